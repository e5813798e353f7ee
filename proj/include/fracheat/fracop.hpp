#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "exponents.hpp"
#include "kernel.hpp"
#include "quadrature.hpp"
#include "special.hpp"

namespace fracheat {

/// A radial function f(|x|) with what the singular quadrature needs to close the far field.
struct RadialFunction {
    std::function<double(double)> f;
    /// f(rho) ~ rho^{-decay} as rho -> infinity; +inf for compact support or faster decay.
    double decay = std::numeric_limits<double>::infinity();
    /// Length over which f changes appreciably; 0 means "use the evaluation radius".
    double scale = 0.0;
    /// Radii where f is not smooth (support edges, table ends).
    std::vector<double> breakpoints = {};

    double operator()(double r) const { return f(r); }
};

/// Spherical average kernel K_N(r, rho) = int_{S^{N-1}} |r e - rho w|^{-N-2s} dw, given the exact
/// signed distance d = rho - r so that the diagonal singularity keeps full precision.
inline double radial_kernel(int N, double s, double r, double rho, double d) {
    double const ad = std::abs(d);
    double const sum = r + rho;
    double const e = 1.0 + 2 * s;
    if (N == 1) return std::pow(ad, -e) + std::pow(sum, -e);
    if (r == 0.0 || rho == 0.0) return sphere_area(N) * std::pow(std::max(r, rho), -N - 2 * s);
    if (N == 3) {
        double const x = std::min(r, rho) / std::max(r, rho);
        double const gap = -std::expm1(e * (std::log1p(-x) - std::log1p(x)));
        return 2 * std::numbers::pi / (r * rho * e) * std::pow(ad, -e) * gap;
    }
    double const q = 0.5 * (N + 2 * s);
    double const x = std::min(r, rho) / std::max(r, rho);
    if (x <= 0.5) {
        // mean of |e - x w|^{-2q} over the sphere is 2F1(q, q - N/2 + 1; N/2; x^2)
        double const z = x * x, b = q - 0.5 * N + 1, c0 = 0.5 * N;
        double term = 1.0, series = 1.0;
        for (int n = 0; n < 200; ++n) {
            term *= (q + n) * (b + n) / ((c0 + n) * (n + 1)) * z;
            series += term;
            if (std::abs(term) <= 1e-17 * series) break;
        }
        return sphere_area(N) * std::pow(std::max(r, rho), -2 * q) * series;
    }
    // |S^{N-2}| int_0^pi sin^{N-2} t (a - b cos t)^{-q} dt after t = 2 atan(c u), c = |d| / (r + rho):
    //   2^{N-1} c^{N-1} d^{-2q} int_0^inf u^{N-2} (1 + c^2 u^2)^{q-N+1} (1 + u^2)^{-q} du
    double const c = ad / sum;
    auto integrand = [&](double u) { return std::pow(u, N - 2) * std::pow(1.0 + c * c * u * u, q - N + 1) * std::pow(1.0 + u * u, -q); };
    double const u_far = 1e4 / std::max(c, 1e-12);
    auto breaks = quad::geometric_breaks(1.0, u_far, 2.0);
    breaks.insert(breaks.begin(), 0.0);
    double prev = quad::integrate_panels(integrand, breaks, 8), value = prev;
    for (int order : {16, 32}) {
        value = quad::integrate_panels(integrand, breaks, order);
        if (std::abs(value - prev) <= 1e-10 * std::abs(value)) break;
        prev = value;
    }
    // integrand ~ c^{2q-2N+2} u^{-N} beyond u_far
    double const u_end = breaks.back();
    value += std::pow(c, 2 * q - 2 * N + 2) * std::pow(u_end, 1 - N) / (N - 1);
    return sphere_area(N - 1) * std::exp2(N - 1) * std::pow(c, N - 1) * std::pow(ad, -2 * q) * value;
}

namespace detail {

struct TailTerm {
    double value_at_far;   // numerator term evaluated at rho_far
    double exponent;       // decays like (rho_far / rho)^{exponent}
};

/// int_0^inf rho^{N-1-mu} num(rho) K_N(r, rho) d rho, where num vanishes at rho = r.
/// The diagonal is integrated in symmetric pairs rho = r +- d (principal value), the innermost
/// core d < d_core by the second-order Taylor expansion of num and of the kernel's regular part.
/// Sorted breakpoints with panels below `limit` split to width <= h; beyond it they are kept.
inline std::vector<double> refine_near(std::vector<double> const& breaks, double limit, double h) {
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        double const a = breaks[i], b = breaks[i + 1];
        int const m = (a < limit) ? std::max(1, static_cast<int>(std::ceil((b - a) / h))) : 1;
        for (int k = 0; k < m; ++k) out.push_back(a + (b - a) * k / m);
    }
    if (!breaks.empty()) out.push_back(breaks.back());
    return out;
}

template <class Num, class Tail>
double singular_radial_integral(int N, double s, double r, double mu, Num&& num, Tail&& tail, double scale,
                                std::span<double const> extra_breaks) {
    double const e = 1.0 + 2 * s;
    auto weight = [&](double rho, double d) { return std::pow(rho, N - 1 - mu) * radial_kernel(N, s, r, rho, d); };
    constexpr int order = 16;
    if (scale <= 0.0) scale = r;
    double const rho_far = 1e6 * std::max(r, scale);
    double total = 0.0;
    std::vector<double> breaks;

    if (r == 0.0) {
        // K_N(0, rho) = |S| rho^{-N-2s}; num is even, num ~ a2 rho^2
        double const area = sphere_area(N);
        auto f = [&](double rho) { return area * std::pow(rho, -1.0 - 2 * s - mu) * num(rho, rho); };
        double const d_core = 1e-3 * scale;
        double const a2 = num(d_core, d_core) / (d_core * d_core);
        total += area * a2 * std::pow(d_core, 2 - 2 * s - mu) / (2 - 2 * s - mu);
        breaks = quad::geometric_breaks(d_core, rho_far, 1.25);
        for (double b : extra_breaks) if (b > d_core && b < rho_far) breaks.push_back(b);
        quad::sort_unique(breaks);
        total += quad::integrate_panels(f, refine_near(breaks, 20 * scale, 0.25 * scale), order);
        for (auto const& t : tail(rho_far)) total += area * t.value_at_far * std::pow(rho_far, -2 * s - mu) / (2 * s + mu + t.exponent);
        return total;
    }

    double const delta = 0.5 * std::min(r, scale);
    double const d_core = 1e-3 * delta;

    // Taylor core: num(r+d) ~ a1 d + a2 d^2, weight(r+d) ~ (g + g' d) |d|^{-1-2s}
    {
        double const h = d_core;
        double const np = num(r + h, h), nm = num(r - h, -h);
        double const a1 = (np - nm) / (2 * h), a2 = (np + nm) / (2 * h * h);
        double const gp = weight(r + h, h) * std::pow(h, e), gm = weight(r - h, -h) * std::pow(h, e);
        double const g0 = 0.5 * (gp + gm), g1 = (gp - gm) / (2 * h);
        total += 2 * (a1 * g1 + a2 * g0) * std::pow(d_core, 2 - 2 * s) / (2 - 2 * s);
    }
    // paired near field d in [d_core, delta]
    {
        auto pair = [&](double d) { return num(r + d, d) * weight(r + d, d) + num(r - d, -d) * weight(r - d, -d); };
        auto nb = quad::geometric_breaks(d_core, delta, 2.0);
        total += quad::integrate_panels(pair, nb, order);
    }
    auto far = [&](double rho) { return num(rho, rho - r) * weight(rho, rho - r); };
    // left far field [0, r - delta]
    {
        breaks.clear();
        double const left = r - delta;
        for (int k = 60; k >= 1; --k) breaks.push_back(left * std::ldexp(1.0, -k));
        breaks.push_back(0.0);
        for (double d = delta; d < r; d *= 1.5) breaks.push_back(r - d);
        breaks.push_back(left);
        for (double b : extra_breaks) if (b > 0.0 && b < left) breaks.push_back(b);
        quad::sort_unique(breaks);
        total += quad::integrate_panels(far, refine_near(breaks, r, 0.25 * scale), order);
    }
    // right far field [r + delta, rho_far]
    {
        breaks.clear();
        double d = delta;
        for (; d < 10 * scale; d *= 1.5) breaks.push_back(r + d);
        auto outer = quad::geometric_breaks(r + d, rho_far, 1.25);
        breaks.insert(breaks.end(), outer.begin(), outer.end());
        for (double b : extra_breaks) if (b > r + delta && b < rho_far) breaks.push_back(b);
        quad::sort_unique(breaks);
        total += quad::integrate_panels(far, refine_near(breaks, r + 20 * scale, 0.25 * scale), order);
    }
    double const area = sphere_area(N);
    for (auto const& t : tail(rho_far)) total += area * t.value_at_far * std::pow(rho_far, -2 * s - mu) / (2 * s + mu + t.exponent);
    if (!std::isfinite(total)) throw ConvergenceError("singular radial quadrature produced a non-finite value");
    return total;
}

inline double capped(double decay) { return std::min(decay, 1e3); }

inline void check_tail(RadialFunction const& f, double s, double mu) {
    if (!(f.decay > -2 * s - mu)) throw ConvergenceError("far-field decay too slow: the singular integral diverges");
}

} // namespace detail

/// (-Delta)^s f at |x| = r for a radial f, including the normalisation constant.
inline double frac_laplacian_radial(RadialFunction const& f, int N, double s, double r) {
    if (N < 1 || !(s > 0.0 && s < 1.0)) throw DomainError("invalid (N, s)");
    if (r < 0.0) throw DomainError("negative radius");
    detail::check_tail(f, s, 0.0);
    double const fr = f(r);
    auto num = [&](double rho, double) { return fr - f(rho); };
    auto tail = [&](double far) {
        return std::vector<detail::TailTerm>{{fr, 0.0}, {-f(far), detail::capped(f.decay)}};
    };
    return frac_laplacian_constant(N, s) * detail::singular_radial_integral(N, s, r, 0.0, num, tail, f.scale, f.breakpoints);
}

/// int (w(x)-w(y))(v(x)-v(y)) / |x-y|^{N+2s} dy at |x| = r, without the normalisation constant.
inline double bilinear_remainder(RadialFunction const& w, RadialFunction const& v, int N, double s, double r) {
    if (N < 1 || !(s > 0.0 && s < 1.0)) throw DomainError("invalid (N, s)");
    detail::check_tail(w, s, 0.0);
    detail::check_tail(v, s, 0.0);
    double const wr = w(r), vr = v(r);
    auto num = [&](double rho, double) { return (wr - w(rho)) * (vr - v(rho)); };
    auto tail = [&](double far) {
        double const wf = w(far), vf = v(far);
        double const qw = detail::capped(w.decay), qv = detail::capped(v.decay);
        return std::vector<detail::TailTerm>{{wr * vr, 0.0}, {-wr * vf, qv}, {-vr * wf, qw}, {wf * vf, qw + qv}};
    };
    double scale = std::min(w.scale > 0 ? w.scale : r, v.scale > 0 ? v.scale : r);
    std::vector<double> breaks = w.breakpoints;
    breaks.insert(breaks.end(), v.breakpoints.begin(), v.breakpoints.end());
    return detail::singular_radial_integral(N, s, r, 0.0, num, tail, scale, breaks);
}

/// L v(r) = a_{N,s} P.V. int (v(x)-v(y)) |x|^{-mu} |y|^{-mu} |x-y|^{-N-2s} dy, the operator obtained from
/// (-Delta)^s - lambda(mu)|x|^{-2s} by u = |x|^{-mu} v:  (-Delta)^s u - lambda u/|x|^{2s} = |x|^{mu} L v.
inline double apply_ground_state_operator(RadialFunction const& v, double mu, int N, double s, double r) {
    if (N < 1 || !(s > 0.0 && s < 1.0)) throw DomainError("invalid (N, s)");
    if (!(r > 0.0)) throw DomainError("the ground-state operator is evaluated at r > 0");
    if (mu < 0.0) throw DomainError("mu must be nonnegative");
    detail::check_tail(v, s, mu);
    double const vr = v(r);
    auto num = [&](double rho, double) { return vr - v(rho); };
    auto tail = [&](double far) {
        return std::vector<detail::TailTerm>{{vr, 0.0}, {-v(far), detail::capped(v.decay)}};
    };
    return frac_laplacian_constant(N, s) * std::pow(r, -mu) *
           detail::singular_radial_integral(N, s, r, mu, num, tail, v.scale, v.breakpoints);
}

/// Worst relative error of (-Delta)^s |x|^{-(N-2s)/2 +- alpha} = lambda(alpha) |x|^{-2s} |x|^{-(N-2s)/2 +- alpha}.
inline double verify_power_solution(int N, double s, double alpha, std::span<double const> radii) {
    double const lambda = lambda_of_alpha(N, s, alpha);
    double worst = 0.0;
    for (double sign : {1.0, -1.0}) {
        double const expo = -0.5 * (N - 2 * s) + sign * alpha;
        RadialFunction f{[expo](double rho) { return std::pow(rho, expo); }, -expo};
        for (double r : radii) {
            double const exact = lambda * std::pow(r, expo - 2 * s);
            double const got = frac_laplacian_radial(f, N, s, r);
            worst = std::max(worst, std::abs(got - exact) / std::abs(exact));
        }
        if (alpha == 0.0) break;
    }
    return worst;
}

inline std::vector<double> default_scaling_radii() { return {0.0, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0}; }

/// max_r |2s (-Delta)^s H - N H - r H'| / (N H) for an arbitrary radial candidate H.
inline double check_scaling_ode(RadialFunction const& H, std::function<double(double)> const& Hprime, int N, double s,
                                std::span<double const> radii) {
    double worst = 0.0;
    for (double r : radii) {
        double const h = H(r);
        double const lhs = 2 * s * frac_laplacian_radial(H, N, s, r);
        worst = std::max(worst, std::abs(lhs - N * h - r * Hprime(r)) / std::abs(N * h));
    }
    return worst;
}

inline double check_scaling_ode(KernelProfile const& prof, std::span<double const> radii) {
    if (prof.sigma_max < 20.0) throw DomainError("scaling check needs sigma_max >= 20");
    RadialFunction H{[&prof](double r) { return profile_H(prof, r).value; }, prof.N + 2 * prof.s, 1.0};
    return check_scaling_ode(H, [&prof](double r) { return profile_Hprime(prof, r).value; }, prof.N, prof.s, radii);
}

inline double check_scaling_ode(KernelProfile const& prof) {
    auto const radii = default_scaling_radii();
    return check_scaling_ode(prof, radii);
}

/// Tabulated radial field on a strictly increasing positive grid with monotone cubic (PCHIP)
/// interpolation, constant continuation below r_grid[0] and a power-law tail beyond the grid.
struct RadialField {
    std::vector<double> r_grid;
    std::vector<double> values;
    double decay_exponent = std::numeric_limits<double>::infinity();

    void validate() const {
        if (r_grid.size() < 2 || r_grid.size() != values.size()) throw DomainError("radial field needs matching grid and values");
        if (!(r_grid.front() > 0.0)) throw DomainError("radial grid must start at r > 0");
        for (std::size_t i = 1; i < r_grid.size(); ++i)
            if (!(r_grid[i] > r_grid[i - 1])) throw DomainError("radial grid must be strictly increasing");
        for (double v : values)
            if (!std::isfinite(v)) throw DomainError("radial field values must be finite");
    }

    double operator()(double r) const {
        if (r <= r_grid.front()) return values.front();
        if (r >= r_grid.back()) {
            if (std::isinf(decay_exponent)) return r == r_grid.back() ? values.back() : 0.0;
            return values.back() * std::pow(r_grid.back() / r, decay_exponent);
        }
        std::size_t const i = static_cast<std::size_t>(std::upper_bound(r_grid.begin(), r_grid.end(), r) - r_grid.begin()) - 1;
        double const h = r_grid[i + 1] - r_grid[i];
        double const t = (r - r_grid[i]) / h;
        double const d0 = slope(i), d1 = slope(i + 1);
        double const t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * values[i] + (t3 - 2 * t2 + t) * h * d0 + (-2 * t3 + 3 * t2) * values[i + 1] + (t3 - t2) * h * d1;
    }

    RadialFunction as_function(double scale = 0.0) const {
        validate();
        return RadialFunction{[this](double r) { return (*this)(r); }, decay_exponent, scale, {r_grid.front(), r_grid.back()}};
    }

private:
    // Fritsch-Carlson slopes
    double slope(std::size_t i) const {
        std::size_t const n = r_grid.size();
        auto secant = [&](std::size_t k) { return (values[k + 1] - values[k]) / (r_grid[k + 1] - r_grid[k]); };
        if (i == 0) return secant(0);
        if (i == n - 1) return secant(n - 2);
        double const a = secant(i - 1), b = secant(i);
        if (a * b <= 0.0) return 0.0;
        double const h0 = r_grid[i] - r_grid[i - 1], h1 = r_grid[i + 1] - r_grid[i];
        double const w1 = 2 * h1 + h0, w2 = h1 + 2 * h0;
        return (w1 + w2) / (w1 / a + w2 / b);
    }
};

} // namespace fracheat
