#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "errors.hpp"
#include "exponents.hpp"
#include "fracop.hpp"
#include "kernel.hpp"
#include "quadrature.hpp"
#include "special.hpp"

namespace fracheat {

struct TestFunctionParams {
    double eta = 1.0;
    double mu = 0.0;
};

struct SupersolutionParams {
    double A = 0.0;
    double gamma = 0.0;
    double T = 1.0;
    double theta = 0.0;
    double beta = 0.0;
};

/// psi_eta(x) = eta^{N/(2s) - mu/s} |x|^{-mu} H(eta^{1/(2s)} |x|)
inline double psi_eta_value(double x_norm, TestFunctionParams const& tp, KernelProfile const& prof) {
    if (!(tp.eta > 0.0)) throw DomainError("eta must be positive");
    if (!(x_norm > 0.0) && tp.mu > 0.0) throw DomainError("psi_eta is singular at the origin");
    double const s = prof.s;
    double const sigma = std::pow(tp.eta, 1.0 / (2 * s)) * x_norm;
    double const w = tp.mu > 0.0 ? std::pow(x_norm, -tp.mu) : 1.0;
    return std::pow(tp.eta, prof.N / (2 * s) - tp.mu / s) * w * profile_H(prof, sigma).value;
}

/// int |y|^{-mu} H(|y|) dy, the eta = 1 mass of psi_eta.
inline double weighted_profile_mass(KernelProfile const& prof, double mu) {
    int const N = prof.N;
    double const area = sphere_area(N);
    auto f = [&](double r) { return area * std::pow(r, N - 1 - mu) * profile_H(prof, r).value; };
    auto br = quad::graded_breaks(0.0, 1.0, 40);
    auto outer = quad::geometric_breaks(1.0, prof.sigma_max, 1.2);
    br.insert(br.end(), outer.begin() + 1, outer.end());
    br = quad::refine_breaks(br, 0.25);
    double total = quad::integrate_panels(f, br, 16);
    // tail with H ~ c sigma^{-N-2s}
    double const sm = prof.sigma_max;
    double const c = profile_H(prof, sm).value * std::pow(sm, N + 2 * prof.s);
    total += area * c * std::pow(sm, -2 * prof.s - mu) / (2 * prof.s + mu);
    return total;
}

/// int psi_eta dx = C eta^{-mu/(2s)} with C the weighted profile mass.
inline double psi_eta_mass(TestFunctionParams const& tp, KernelProfile const& prof) {
    return weighted_profile_mass(prof, tp.mu) * std::pow(tp.eta, -tp.mu / (2 * prof.s));
}

struct PsiInequalitySample {
    double r = 0.0;
    double margin = 0.0;   // -(-Delta)^s psi + lambda psi/r^{2s} + (N/2s) eta psi
    double scale = 0.0;
};

/// The pointwise inequality -(-Delta)^s psi_eta + lambda psi_eta/|x|^{2s} >= -(N/(2s)) eta psi_eta,
/// evaluated with the radial quadrature at each radius.
inline std::vector<PsiInequalitySample> psi_eta_inequality(TestFunctionParams const& tp, ProblemParams const& pp, KernelProfile const& prof,
                                                           std::span<double const> radii) {
    int const N = pp.N;
    double const s = pp.s;
    RadialFunction psi{[&](double r) { return psi_eta_value(r, tp, prof); }, N + 2 * s + tp.mu, std::pow(tp.eta, -1.0 / (2 * s))};
    std::vector<PsiInequalitySample> out;
    for (double r : radii) {
        double const v = psi(r);
        double const lap = frac_laplacian_radial(psi, N, s, r);
        double const pot = pp.lambda * v / std::pow(r, 2 * s);
        double const rate = N / (2 * s) * tp.eta * v;
        out.push_back({r, -lap + pot + rate, std::abs(lap) + pot + rate});
    }
    return out;
}

/// Least T with 1/Y0^{p-1} <= C (2s/N) eta^{(p-1)mu/(2s)-1} (1 - exp(-(p-1)(N/2s) eta T)).
inline std::optional<double> y_ode_blowup_predictor(double Y0, double eta, ProblemParams const& pp, double C) {
    if (!(eta > 0.0)) throw DomainError("eta must be positive");
    if (Y0 < 0.0) throw DomainError("Y0 must be nonnegative");
    if (Y0 == 0.0 || !(C > 0.0)) return std::nullopt;
    double const mu = exponent_profile(pp.N, pp.s, pp.lambda).mu;
    double const p = pp.p, s = pp.s;
    double const k = (p - 1) * pp.N / (2 * s) * eta;
    double const log_q = -(p - 1) * std::log(Y0) - std::log(C * 2 * s / pp.N) - ((p - 1) * mu / (2 * s) - 1) * std::log(eta);
    if (!(log_q < 0.0)) return std::nullopt;
    return -std::log1p(-std::exp(log_q)) / k;
}

/// The Jensen constant C_psi^{1-p} in  int u^p psi_eta >= C eta^{(p-1)mu/(2s)} (int u psi_eta)^p.
inline double jensen_constant(ProblemParams const& pp, KernelProfile const& prof) {
    double const mu = exponent_profile(pp.N, pp.s, pp.lambda).mu;
    return std::pow(weighted_profile_mass(prof, mu), 1 - pp.p);
}

struct PredictorSearch {
    std::optional<double> horizon;
    double eta = 0.0;
    double Y0 = 0.0;
};

/// Scan eta over 40 points per decade in [1e-6, 1]; Y0(eta) supplies int u0 psi_eta.
inline PredictorSearch search_blowup_horizon(std::function<double(double)> const& Y0_of_eta, ProblemParams const& pp, double C) {
    PredictorSearch best;
    for (int k = 0; k <= 240; ++k) {
        double const eta = std::pow(10.0, -6.0 + k / 40.0);
        double const Y0 = Y0_of_eta(eta);
        auto const T = y_ode_blowup_predictor(Y0, eta, pp, C);
        if (T && (!best.horizon || *T < *best.horizon)) best = {T, eta, Y0};
    }
    return best;
}

/// int u0(|x|) psi_eta(x) dx for a radial datum.
inline double psi_weighted_mass(RadialFunction const& u0, TestFunctionParams const& tp, KernelProfile const& prof) {
    int const N = prof.N;
    double const area = sphere_area(N);
    double const len = std::pow(tp.eta, -1.0 / (2 * prof.s));
    double const scale = u0.scale > 0 ? std::min(u0.scale, len) : len;
    auto f = [&](double r) { return r > 0 ? area * std::pow(r, N - 1) * u0(r) * psi_eta_value(r, tp, prof) : 0.0; };
    auto br = quad::graded_breaks(0.0, scale, 40);
    auto outer = quad::geometric_breaks(scale, 1e4 * std::max(len, scale), 1.2);
    br.insert(br.end(), outer.begin() + 1, outer.end());
    for (double b : u0.breakpoints) br.push_back(b);
    quad::sort_unique(br);
    return quad::integrate_panels(f, br, 16);
}

// ----- supersolution -----

/// w(x,t,T) = A (T+t)^{-theta} (|x|/(T+t)^beta)^{-gamma} H(|x|/(T+t)^beta)
inline double supersolution_value(double r, double t, SupersolutionParams const& sp, KernelProfile const& prof) {
    double const tau = sp.T + t;
    double const sigma = r * std::pow(tau, -sp.beta);
    return sp.A * std::pow(tau, -sp.theta) * std::pow(sigma, -sp.gamma) * profile_H(prof, sigma).value;
}

/// The (s11) requirement  w^{p-1} <= ((N+gamma)/(2s) - theta)/(T+t) + (lambda(gamma)-lambda)/|x|^{2s},
/// as the ratio left/right at A = 1.
inline double s11_ratio(double r, double t, SupersolutionParams sp, ProblemParams const& pp, KernelProfile const& prof) {
    sp.A = 1.0;
    double const lg = power_eigenvalue(pp.N, pp.s, sp.gamma);
    double const rhs = ((pp.N + sp.gamma) / (2 * pp.s) - sp.theta) / (sp.T + t) + (lg - pp.lambda) / std::pow(r, 2 * pp.s);
    return std::pow(supersolution_value(r, t, sp, prof), pp.p - 1) / rhs;
}

/// gamma at the midpoint of (mu, 2s/(p-1)); A from the worst (s11) ratio on a fixed (r, t)
/// sample, shrunk so the inequality holds with a 10% margin.
inline SupersolutionParams choose_supersolution(ProblemParams const& pp, KernelProfile const& prof, double T = 1.0) {
    validate(pp);
    auto const ex = exponent_profile(pp.N, pp.s, pp.lambda);
    if (!(pp.p > ex.fujita && pp.p < ex.p_plus)) throw RegimeError("supersolution family needs F < p < p_+");
    if (prof.N != pp.N || prof.s != pp.s) throw DomainError("kernel profile does not match (N, s)");
    if (!(T > 0.0)) throw DomainError("time shift T must be positive");
    SupersolutionParams sp;
    sp.theta = 2 * pp.s / (pp.p - 1);
    sp.beta = 1.0 / (2 * pp.s);
    sp.gamma = 0.5 * (ex.mu + sp.theta);
    sp.T = T;
    double worst = 0.0;
    for (int i = 0; i <= 400; ++i) {
        double const r = std::pow(10.0, -4.0 + 8.0 * i / 400);
        for (int j = 0; j <= 60; ++j) {
            double const t = j == 0 ? 0.0 : std::pow(10.0, -3.0 + 6.0 * (j - 1) / 59.0);
            worst = std::max(worst, s11_ratio(r, t, sp, pp, prof));
        }
    }
    sp.A = std::pow(1.0 / (1.1 * worst), 1.0 / (pp.p - 1));
    return sp;
}

struct ResidualSample {
    double r = 0.0, t = 0.0;
    double residual = 0.0;   // w_t + (-Delta)^s w - lambda w/r^{2s} - w^p
    double scale = 0.0;      // sum of the magnitudes of those terms
    double mixed = 0.0;      // J = -a_{N,s} int (h(x)-h(y))(D(x)-D(y)) |x-y|^{-N-2s} dy
};

struct ResidualReport {
    std::vector<ResidualSample> samples;
    double min_relative = std::numeric_limits<double>::infinity();
    double min_residual = std::numeric_limits<double>::infinity();
    bool certified = false;
};

/// Pointwise residual of the supersolution inequality with (-Delta)^s w by the radial quadrature and
/// w_t in closed form. Certification: residual >= -1e-6 * scale at every sample.
inline ResidualSample supersolution_residual_at(double r, double t, SupersolutionParams const& sp, ProblemParams const& pp,
                                                KernelProfile const& prof, bool with_mixed = false) {
    int const N = pp.N;
    double const s = pp.s;
    double const tau = sp.T + t;
    double const len = std::pow(tau, sp.beta);
    RadialFunction w{[&](double x) { return supersolution_value(x, t, sp, prof); }, sp.gamma + N + 2 * s, len};
    double const wv = w(r);
    double const lap = frac_laplacian_radial(w, N, s, r);
    // d/dt of A tau^{-theta + gamma beta} r^{-gamma} H(r tau^{-beta})
    double const sigma = r / len;
    double const Hs = profile_H(prof, sigma).value, Hp = profile_Hprime(prof, sigma).value;
    double const wt = wv * ((-sp.theta + sp.gamma * sp.beta) / tau - sp.beta * sigma * Hp / (Hs * tau));
    double const pot = pp.lambda * wv / std::pow(r, 2 * s);
    double const react = std::pow(wv, pp.p);
    ResidualSample out;
    out.r = r;
    out.t = t;
    out.residual = wt + lap - pot - react;
    out.scale = std::abs(wt) + std::abs(lap) + pot + react;
    if (with_mixed) {
        double const Dc = sp.A * std::pow(tau, -sp.theta + sp.gamma * sp.beta + N * sp.beta);
        RadialFunction D{[&](double x) { return Dc * std::pow(x, -sp.gamma); }, sp.gamma, 0.0};
        RadialFunction h{[&](double x) { return std::pow(tau, -N * sp.beta) * profile_H(prof, x / len).value; }, N + 2 * s, len};
        out.mixed = -frac_laplacian_constant(N, s) * bilinear_remainder(h, D, N, s, r);
    }
    return out;
}

inline ResidualReport supersolution_residual(SupersolutionParams const& sp, ProblemParams const& pp, KernelProfile const& prof,
                                             std::span<double const> radii, std::span<double const> times, bool with_mixed = false) {
    ResidualReport rep;
    for (double t : times)
        for (double r : radii) {
            auto const smp = supersolution_residual_at(r, t, sp, pp, prof, with_mixed);
            rep.min_residual = std::min(rep.min_residual, smp.residual);
            rep.min_relative = std::min(rep.min_relative, smp.residual / smp.scale);
            rep.samples.push_back(smp);
        }
    rep.certified = rep.min_relative >= -1e-6;
    return rep;
}

// ----- energy criterion -----

struct EnergyCriterion {
    bool holds = false;
    double reaction_term = 0.0;   // int h^{p+1} / (p+1)
    double quadratic_term = 0.0;  // (a/4) Gagliardo - (lambda/2) int h^2/(|x|^{2s}+1)
    double forecast_constant = 0.0;
};

/// Compare (1/(p+1)) int h^{p+1} with (a_{N,s}/4)[h]^2 - (lambda/2) int h^2/(|x|^{2s}+1) for a radial h
/// supported in B_R; the Gagliardo term is evaluated as (1/2) <(-Delta)^s h, h>.
inline EnergyCriterion energy_blowup_criterion(RadialFunction const& h, ProblemParams const& pp, double R) {
    validate(pp);
    if (!(R > 0.0)) throw DomainError("ball radius must be positive");
    int const N = pp.N;
    double const s = pp.s, p = pp.p;
    for (double probe : {1.0001, 1.01, 1.1, 1.5, 2.0, 4.0})
        if (h(R * probe) != 0.0) throw DomainError("datum is not supported in the declared ball");
    double const area = sphere_area(N);
    RadialFunction hh = h;
    if (hh.scale <= 0.0) hh.scale = 0.25 * R;
    hh.breakpoints.push_back(R);
    auto br = quad::refine_breaks({0.0, R}, R / 16);
    double react = 0.0, quad_form = 0.0, pot = 0.0;
    auto const& gl = quad::gauss_legendre(8);
    for (std::size_t k = 0; k + 1 < br.size(); ++k) {
        double const a = br[k], b = br[k + 1], half = 0.5 * (b - a), mid = 0.5 * (a + b);
        for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
            double const r = mid + half * gl.nodes[q];
            double const w = gl.weights[q] * half * area * std::pow(r, N - 1);
            double const v = h(r);
            if (v < 0.0) throw DomainError("datum must be nonnegative");
            if (v == 0.0) continue;
            react += w * std::pow(v, p + 1);
            quad_form += w * v * frac_laplacian_radial(hh, N, s, r);
            pot += w * v * v / (std::pow(r, 2 * s) + 1.0);
        }
    }
    EnergyCriterion out;
    out.reaction_term = react / (p + 1);
    out.quadratic_term = 0.5 * quad_form - 0.5 * pp.lambda * pot;
    out.holds = out.reaction_term > out.quadratic_term;
    double const ball = area / N * std::pow(R, N);
    out.forecast_constant = 2 * (p - 1) / (p + 1) * std::pow(ball, -(p - 1) / 2);
    return out;
}

// ----- critical case -----

/// phi(z) = 1 - S(z - 1) on [1, 2] with S(x) = 10x^3 - 15x^4 + 6x^5: 1 below, 0 above, C^2 joins.
inline double smoothstep(double x) {
    x = std::clamp(x, 0.0, 1.0);
    return x * x * x * (10 - 15 * x + 6 * x * x);
}
inline double smoothstep_derivative(double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return 30 * x * x * (1 - x) * (1 - x);
}
inline double cutoff(double z) { return 1.0 - smoothstep(z - 1.0); }

struct CriticalConstants {
    double C1 = 0.0, C3 = 0.0;
    double C1_refined = 0.0, C3_refined = 0.0;
    double change1 = 0.0, change3 = 0.0;
    bool stable = false;
};

namespace detail {

/// Both integrals over (tau, y) in polar coordinates tau = sqrt(z) cos w, |y|^{2s} = sqrt(z) sin w,
/// tanh-sinh in z and w at the given level.
inline std::pair<double, double> critical_integrals(ProblemParams const& pp, double mu, double m, double kappa, int level) {
    int const N = pp.N;
    double const s = pp.s, p = pp.p;
    double const pc = p / (p - 1);
    double const area = sphere_area(N);
    double const weight3 = mu * (p + 1) / (p - 1);
    double const z_lo3 = kappa > 0.0 ? 1.0 : 0.0;
    // C1 over the annulus 1 < z < 2
    auto inner1 = [&](double z, double dz_lo, double dz_hi) {
        double const sz = std::sqrt(z);
        double const phi = smoothstep(dz_hi);        // 1 - S(z-1) = S(2-z)
        double const dphi = smoothstep_derivative(dz_lo);
        if (phi <= 0.0 || dphi == 0.0) return 0.0;
        auto g = [&](double w, double, double) {
            double const tau = sz * std::cos(w);
            double const rho = std::pow(sz * std::sin(w), 1.0 / (2 * s));
            double const jac = area * std::pow(rho, N - 1) * rho / (4 * s * sz * std::sin(w));
            return jac * std::pow(rho, -mu) * std::pow(tau, pc) * std::pow(dphi, pc) / std::pow(phi, pc - m);
        };
        return quad::integrate_tanh_sinh(g, 0.0, 0.5 * std::numbers::pi, level);
    };
    double const C1 = std::pow(2.0, pc) * quad::integrate_tanh_sinh(inner1, 1.0, 2.0, level);
    // C3: L acts on y -> phi(tau^2 + |y|^{4s}) with tau frozen
    auto inner3 = [&](double z, double dz_lo, double dz_hi) {
        double const sz = std::sqrt(z);
        double const theta = (z < 1.0) ? 1.0 : smoothstep(dz_hi);
        double const one_minus = (z < 1.0) ? 0.0 : smoothstep(z_lo3 == 1.0 ? dz_lo : z - 1.0);
        if (theta <= 0.0) return 0.0;
        if (kappa > 0.0 && one_minus <= 0.0) return 0.0;
        auto g = [&](double w, double, double) {
            double const tau = sz * std::cos(w);
            double const rho = std::pow(sz * std::sin(w), 1.0 / (2 * s));
            double const jac = area * std::pow(rho, N - 1) * rho / (4 * s * sz * std::sin(w));
            double const t2 = tau * tau;
            auto th = [t2, s](double x) { return cutoff(t2 + std::pow(x, 4 * s)); };
            std::vector<double> bps;
            if (t2 < 1.0) bps.push_back(std::pow(1.0 - t2, 1.0 / (4 * s)));
            if (t2 < 2.0) bps.push_back(std::pow(2.0 - t2, 1.0 / (4 * s)));
            double const outer = bps.empty() ? 1.0 : bps.back();
            RadialFunction f{th, std::numeric_limits<double>::infinity(), 0.25 * outer, bps};
            double const L = apply_ground_state_operator(f, mu, N, s, rho);
            double val = jac * std::pow(rho, weight3) * std::pow(std::abs(L), pc) / std::pow(theta, pc - m);
            if (kappa > 0.0) val /= std::pow(one_minus, kappa * (pc - 1));
            return val;
        };
        return quad::integrate_tanh_sinh(g, 0.0, 0.5 * std::numbers::pi, level);
    };
    double const C3 = quad::integrate_tanh_sinh(inner3, z_lo3, 2.0, level);
    return {C1, C3};
}

} // namespace detail

/// C1 and C3 at tanh-sinh level `level` and level + 1; stable iff both change by less than 1%.
inline CriticalConstants critical_case_constants(ProblemParams const& pp, double m, double kappa, int level = 3) {
    validate(pp);
    auto const ex = exponent_profile(pp.N, pp.s, pp.lambda);
    if (std::abs(pp.p - ex.fujita) > 1e-9) throw RegimeError("critical-case constants need p = F");
    double const pc = pp.p / (pp.p - 1);
    if (!(m > 1.0 && m <= pc)) throw DomainError("m must lie in (1, p']");
    if (kappa < 0.0) throw DomainError("kappa must be nonnegative");
    CriticalConstants out;
    std::tie(out.C1, out.C3) = detail::critical_integrals(pp, ex.mu, m, kappa, level);
    std::tie(out.C1_refined, out.C3_refined) = detail::critical_integrals(pp, ex.mu, m, kappa, level + 1);
    out.change1 = std::abs(out.C1_refined - out.C1) / std::abs(out.C1_refined);
    out.change3 = std::abs(out.C3_refined - out.C3) / std::abs(out.C3_refined);
    out.stable = std::isfinite(out.C1_refined) && std::isfinite(out.C3_refined) && out.change1 < 0.01 && out.change3 < 0.01;
    return out;
}

} // namespace fracheat
