#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "errors.hpp"
#include "fracop.hpp"
#include "quadrature.hpp"
#include "special.hpp"

namespace fracheat {

struct RadialGeometry {
    double r_min = 1e-3;
    double r_max = 1e4;
    int n = 301;

    void validate() const {
        if (!(r_min > 0.0 && r_max > r_min)) throw DomainError("radial geometry needs 0 < r_min < r_max");
        if (n < 8) throw DomainError("radial geometry needs at least 8 nodes");
    }
};

enum class Boundary { FreeSpace, Dirichlet };

/// Nodal discretization of the weighted operator
///   (A v)(r_i) ~ a_{N,s} r_i^{-mu} P.V. int rho^{N-1-mu} (v(r_i) - v(rho)) K_N(r_i, rho) d rho
/// on a geometric grid. mu = 0 gives (-Delta)^s itself. Far from r_i, v is the piecewise-linear
/// interpolant; on [r_{i-1}, r_{i+1}] the local quadratic, whose principal value is taken in
/// closed moments. Below r_0 v is constant. Beyond r_{n-1}, v decays like rho^{-tail_exponent}
/// (free space) or vanishes (Dirichlet).
class RadialDiscretization {
public:
    RadialDiscretization(int N, double s, double mu, RadialGeometry geometry, Boundary boundary, double tail_exponent)
        : N_(N), s_(s), mu_(mu), geometry_(geometry), boundary_(boundary), tail_exponent_(tail_exponent) {
        if (N < 1 || !(s > 0.0 && s < 1.0)) throw DomainError("invalid (N, s)");
        if (mu < 0.0 || !(N - 2 * mu > 0.0)) throw DomainError("operator weight exponent out of range");
        geometry.validate();
        int const n = geometry.n;
        ratio_ = std::pow(geometry.r_max / geometry.r_min, 1.0 / (n - 1));
        r_.resize(n);
        for (int i = 0; i < n; ++i) r_[i] = geometry.r_min * std::pow(ratio_, i);
        r_.back() = geometry.r_max;
        build_weights();
        build_operator();
    }

    int N() const { return N_; }
    double s() const { return s_; }
    double mu() const { return mu_; }
    int size() const { return static_cast<int>(r_.size()); }
    Boundary boundary() const { return boundary_; }
    double tail_exponent() const { return tail_exponent_; }
    std::vector<double> const& radii() const { return r_; }
    /// |S^{N-1}| rho^{N-1} d rho quadrature weights (Simpson in log rho).
    Eigen::VectorXd const& weights() const { return omega_; }
    /// Log-trapezoid weights; the operator is symmetric in sum_i t_i a_i b_i.
    Eigen::VectorXd const& symmetry_weights() const { return trapezoid_; }
    /// Operator symmetrised in the weighted inner product.
    Eigen::MatrixXd const& matrix() const { return sym_; }
    Eigen::MatrixXd const& raw_matrix() const { return raw_; }

    /// int |x|^{-a} u(|x|)^b dx for u = rho^{-power} v with v the nodal field (constant below r_0,
    /// decaying like rho^{-decay} beyond r_{n-1}, or zero for the Dirichlet geometry).
    double integrate_power(std::span<double const> v, double power, double a, double b, double decay) const {
        int const n = size();
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            if (v[i] == 0.0) continue;
            total += omega_[i] * std::pow(r_[i], -a - b * power) * std::pow(std::abs(v[i]), b);
        }
        double const area = sphere_area(N_);
        double const e0 = N_ - a - b * power;
        if (v[0] != 0.0) {
            if (!(e0 > 0.0)) return std::numeric_limits<double>::infinity();
            total += area * std::pow(std::abs(v[0]), b) * std::pow(r_[0], e0) / e0;
        }
        if (boundary_ == Boundary::FreeSpace && v[n - 1] != 0.0) {
            double const e1 = b * (decay + power) - N_ + a;
            if (!(e1 > 0.0)) return std::numeric_limits<double>::infinity();
            total += area * std::pow(std::abs(v[n - 1]), b) * std::pow(r_[n - 1], e0) / e1;
        }
        return total;
    }

private:
    double weight(double r, double rho, double d) const { return std::pow(rho, N_ - 1 - mu_) * radial_kernel(N_, s_, r, rho, d); }

    void build_weights() {
        int const n = size();
        double const h = std::log(ratio_);
        std::vector<double> w(n, 0.0);
        int simpson_end = (n % 2 == 1) ? n - 1 : n - 4;
        for (int i = 0; i + 2 <= simpson_end; i += 2) {
            w[i] += h / 3;
            w[i + 1] += 4 * h / 3;
            w[i + 2] += h / 3;
        }
        if (n % 2 == 0) {
            int const k = n - 4;
            w[k] += 3 * h / 8;
            w[k + 1] += 9 * h / 8;
            w[k + 2] += 9 * h / 8;
            w[k + 3] += 3 * h / 8;
        }
        double const area = sphere_area(N_);
        omega_.resize(n);
        trapezoid_.resize(n);
        for (int i = 0; i < n; ++i) {
            omega_[i] = area * std::pow(r_[i], N_) * w[i];
            trapezoid_[i] = area * std::pow(r_[i], N_) * h * ((i == 0 || i == n - 1) ? 0.5 : 1.0);
        }
        // the end unknowns also carry the origin ball and the decaying tail
        trapezoid_[0] += area * std::pow(r_[0], N_) / N_;
        if (boundary_ == Boundary::FreeSpace && 2 * tail_exponent_ > N_)
            trapezoid_[n - 1] += area * std::pow(r_[n - 1], N_) / (2 * tail_exponent_ - N_);
    }

    // PV moments int_{r-h1}^{r+h2} W(rho) (rho - r)^k d rho, k = 1, 2.
    std::pair<double, double> window_moments(double r, double h1, double h2) const {
        double const e = 1.0 + 2 * s_;
        double const hs = std::min(h1, h2);
        double const d_core = 1e-3 * hs;
        double const gp = weight(r, r + d_core, d_core) * std::pow(d_core, e);
        double const gm = weight(r, r - d_core, -d_core) * std::pow(d_core, e);
        double const g0 = 0.5 * (gp + gm), g1 = (gp - gm) / (2 * d_core);
        double const core = std::pow(d_core, 2 - 2 * s_) / (2 - 2 * s_);
        double m1 = 2 * g1 * core, m2 = 2 * g0 * core;
        auto breaks = quad::geometric_breaks(d_core, hs, 2.0);
        auto pair1 = [&](double d) { return d * (weight(r, r + d, d) - weight(r, r - d, -d)); };
        auto pair2 = [&](double d) { return d * d * (weight(r, r + d, d) + weight(r, r - d, -d)); };
        m1 += quad::integrate_panels(pair1, breaks, 12);
        m2 += quad::integrate_panels(pair2, breaks, 12);
        if (h2 > hs) {
            auto rest = quad::geometric_breaks(hs, h2, 1.5);
            m1 += quad::integrate_panels([&](double d) { return d * weight(r, r + d, d); }, rest, 12);
            m2 += quad::integrate_panels([&](double d) { return d * d * weight(r, r + d, d); }, rest, 12);
        } else if (h1 > hs) {
            auto rest = quad::geometric_breaks(hs, h1, 1.5);
            m1 -= quad::integrate_panels([&](double d) { return d * weight(r, r - d, -d); }, rest, 12);
            m2 += quad::integrate_panels([&](double d) { return d * d * weight(r, r - d, -d); }, rest, 12);
        }
        return {m1, m2};
    }

    void build_operator() {
        int const n = size();
        double const area = sphere_area(N_);
        double const C = frac_laplacian_constant(N_, s_);
        double const ghost_lo = r_[0] / ratio_;
        double const ghost_hi = r_[n - 1] * ratio_;
        double const ghost_factor = (boundary_ == Boundary::FreeSpace) ? std::pow(r_[n - 1] / ghost_hi, tail_exponent_) : 0.0;
        raw_ = Eigen::MatrixXd::Zero(n, n);
        auto node = [&](int j) { return j < 0 ? ghost_lo : (j >= n ? ghost_hi : r_[j]); };
        // ghost nodes map onto real unknowns: below r_0 v = v_0, beyond r_{n-1} v = ghost_factor v_{n-1}
        auto add = [&](int row, int j, double c) {
            if (j < 0) raw_(row, 0) += c;
            else if (j >= n) raw_(row, n - 1) += ghost_factor * c;
            else raw_(row, j) += c;
        };
        auto const& gl = quad::gauss_legendre(8);
        for (int i = 0; i < n; ++i) {
            double const r = r_[i];
            double const x0 = node(i - 1), x1 = r, x2 = node(i + 1);
            double far_total = 0.0;
            auto far_w = [&](double rho) { return weight(r, rho, rho - r); };

            // below the grid (or below the window for i = 0): v = v_0
            double const lo_end = (i == 0) ? ghost_lo : r_[0];
            {
                auto br = quad::graded_breaks(0.0, lo_end, 60);
                double const m = quad::integrate_panels(far_w, br, 12);
                far_total += m;
                add(i, 0, -m);
            }
            // interior segments [r_k, r_{k+1}] outside the window, hat functions
            for (int k = 0; k + 1 < n; ++k) {
                double const a = r_[k], b = r_[k + 1];
                if (a >= x0 && b <= x2) continue;
                int const dist = std::min(std::abs(k - i), std::abs(k + 1 - i));
                int const panels = dist <= 2 ? 4 : 1;
                double ml = 0.0, mr = 0.0;
                for (int pnl = 0; pnl < panels; ++pnl) {
                    double const pa = a + (b - a) * pnl / panels, pb = a + (b - a) * (pnl + 1) / panels;
                    double const half = 0.5 * (pb - pa), mid = 0.5 * (pa + pb);
                    for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
                        double const rho = mid + half * gl.nodes[q];
                        double const wq = gl.weights[q] * half * far_w(rho);
                        double const t = (rho - a) / (b - a);
                        ml += wq * (1 - t);
                        mr += wq * t;
                    }
                }
                far_total += ml + mr;
                add(i, k, -ml);
                add(i, k + 1, -mr);
            }
            // beyond the grid (beyond the window for i = n-1)
            {
                double const start = (i == n - 1) ? ghost_hi : r_[n - 1];
                double const rho_far = 1e6 * start;
                auto br = quad::geometric_breaks(start, rho_far, 1.25);
                double const plain = quad::integrate_panels(far_w, br, 12) + area * std::pow(rho_far, -2 * s_ - mu_) / (2 * s_ + mu_);
                far_total += plain;
                if (boundary_ == Boundary::FreeSpace) {
                    double const q = tail_exponent_;
                    double const rn = r_[n - 1];
                    double const decayed = quad::integrate_panels([&](double rho) { return far_w(rho) * std::pow(rn / rho, q); }, br, 12) +
                                           area * std::pow(rn / rho_far, q) * std::pow(rho_far, -2 * s_ - mu_) / (2 * s_ + mu_ + q);
                    add(i, n - 1, -decayed);
                }
            }
            add(i, i, far_total);
            // window [x0, x2]: v_i - Q(rho) = -Q'(r)(rho - r) - Q''(rho - r)^2 / 2
            auto const [m1, m2] = window_moments(r, x1 - x0, x2 - x1);
            double const d01 = x0 - x1, d02 = x0 - x2, d12 = x1 - x2;
            double const l0p = (x1 - x2) / (d01 * d02), l1p = (2 * x1 - x0 - x2) / ((x1 - x0) * d12), l2p = (x1 - x0) / ((x2 - x0) * (x2 - x1));
            double const l0pp = 2 / (d01 * d02), l1pp = 2 / ((x1 - x0) * d12), l2pp = 2 / ((x2 - x0) * (x2 - x1));
            add(i, i - 1, -(l0p * m1 + 0.5 * l0pp * m2));
            add(i, i, -(l1p * m1 + 0.5 * l1pp * m2));
            add(i, i + 1, -(l2p * m1 + 0.5 * l2pp * m2));
            raw_.row(i) *= C * std::pow(r, -mu_);
        }
        // symmetrise with the smooth log-trapezoid weights; Simpson's alternating weights would alias
        Eigen::VectorXd const& w = trapezoid_;
        sym_ = 0.5 * (raw_ + w.cwiseInverse().asDiagonal() * raw_.transpose() * w.asDiagonal());
        // restore the row sums so the symmetric operator still annihilates what the raw one did
        Eigen::VectorXd const raw_sum = raw_.rowwise().sum(), sym_sum = sym_.rowwise().sum();
        sym_.diagonal() += raw_sum - sym_sum;
    }

    int N_;
    double s_, mu_;
    RadialGeometry geometry_;
    Boundary boundary_;
    double tail_exponent_;
    double ratio_ = 1.0;
    std::vector<double> r_;
    Eigen::VectorXd omega_, trapezoid_;
    Eigen::MatrixXd raw_, sym_;
};

} // namespace fracheat
