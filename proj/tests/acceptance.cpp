// Acceptance driver: `acceptance k` runs criterion k, no argument runs all eight.
// Each criterion prints one PASS/FAIL line; sub-checks are indented beneath it.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "fracheat/constructions.hpp"
#include "fracheat/solver.hpp"
#include "oracles.hpp"

using namespace fracheat;

namespace {

struct Criterion {
    bool pass = true;

    void check(bool ok, char const* fmt, ...) __attribute__((format(printf, 3, 4))) {
        std::va_list args;
        va_start(args, fmt);
        char buf[512];
        std::vsnprintf(buf, sizeof buf, fmt, args);
        va_end(args);
        std::printf("    [%s] %s\n", ok ? "PASS" : "FAIL", buf);
        pass = pass && ok;
    }
};

double elapsed_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

RadialFunction gaussian(double amp) {
    return {[amp](double r) { return amp * std::exp(-r * r); }, std::numeric_limits<double>::infinity(), 1.0};
}

RadialFunction bump(double amp) {
    return {[amp](double r) { return r < 1 ? amp * std::pow(1 - r * r, 3) : 0.0; }, std::numeric_limits<double>::infinity(), 0.25, {1.0}};
}

std::vector<double> geometric(double lo, double hi, int n) {
    std::vector<double> out;
    for (int i = 0; i < n; ++i) out.push_back(lo * std::pow(hi / lo, double(i) / (n - 1)));
    return out;
}

struct Case {
    int N;
    double s;
};

std::vector<Case> admissible() {
    std::vector<Case> out;
    for (int N = 1; N <= 4; ++N)
        for (double s : {0.25, 0.5, 0.75})
            if (N > 2 * s) out.push_back({N, s});
    return out;
}

// ----- 1 -----

void exponent_algebra(Criterion& c) {
    double worst_trip = 0.0, worst_hardy = 0.0;
    bool chain = true;
    for (auto [N, s] : admissible()) {
        double const h = oracle::hardy(N, s);
        worst_hardy = std::max(worst_hardy, std::abs(lambda_of_alpha(N, s, 0.0) - h) / h);
        for (int i = 1; i <= 100; ++i) {
            double const lam = hardy_constant(N, s) * i / 100;
            worst_trip = std::max(worst_trip, std::abs(lambda_of_alpha(N, s, alpha_of_lambda(N, s, lam)) - lam) / lam);
            auto const e = exponent_profile(N, s, lam);
            double const tiny = 1e-12;
            chain = chain && 1 + 2 * s / N <= e.fujita + tiny && e.fujita <= e.p_minus + tiny && e.p_minus <= e.sobolev_power + tiny &&
                    e.sobolev_power <= e.p_plus + tiny;
        }
    }
    c.check(worst_trip <= 1e-12, "round trip max |lambda(alpha(lambda)) - lambda|/lambda = %.3e (<= 1e-12)", worst_trip);
    c.check(worst_hardy <= 1e-12, "lambda(0) against the Lanczos Hardy constant: %.3e (<= 1e-12)", worst_hardy);
    c.check(chain, "ordering 1+2s/N <= F <= p_- <= 2*_s - 1 <= p_+ on all 1100 (N, s, lambda) points");
    auto const e = exponent_profile(3, 0.5, 0.5);
    double const dev = std::max({std::abs(e.alpha - 0.5), std::abs(e.mu - 0.5), std::abs(e.p_plus - 3.0), std::abs(e.p_minus - 5.0 / 3.0),
                                 std::abs(e.fujita - 1.4)});
    c.check(dev <= 1e-12, "(3, 1/2, 1/2): alpha=%.15g mu=%.15g p+=%.15g p-=%.15g F=%.15g (max dev %.1e)", e.alpha, e.mu, e.p_plus, e.p_minus,
            e.fujita, dev);
}

// ----- 2 -----

void kernel_fidelity(Criterion& c) {
    for (int N : {1, 3}) {
        auto const prof = build_profile(N, 0.5, 50, 801);
        double worst = 0.0;
        for (std::size_t i = 0; i + 1 < prof.sigma.size(); ++i) {
            for (double x : {prof.sigma[i], 0.5 * (prof.sigma[i] + prof.sigma[i + 1])}) {
                if (x > 20) break;
                worst = std::max(worst, std::abs(profile_H(prof, x).value / oracle::poisson(N, x) - 1));
            }
        }
        c.check(worst <= 1e-6, "N=%d s=1/2 against the Poisson kernel on [0,20] (nodes and midpoints): %.3e", N, worst);
    }
    for (auto [N, s] : {Case{1, 0.5}, Case{3, 0.5}, Case{2, 0.25}, Case{2, 0.75}}) {
        auto const prof = build_profile(N, s, 50, 801);
        bool decreasing = true;
        for (std::size_t i = 1; i < prof.H.size(); ++i) decreasing = decreasing && prof.H[i] < prof.H[i - 1];
        double const C = check_envelope(prof);
        c.check(std::abs(prof.mass - 1) <= 1e-6 && decreasing && std::isfinite(C), "N=%d s=%.2f: |mass-1| = %.2e, strictly decreasing %s, envelope C = %.4g",
                N, s, std::abs(prof.mass - 1), decreasing ? "yes" : "no", C);
        if (N == 1) c.check(C <= 10.0, "envelope constant C = %.6g <= 10 for the Cauchy profile (N=1, s=1/2)", C);
    }
}

// ----- 3 -----

void operator_identities(Criterion& c) {
    std::vector<double> const radii = {0.5, 1.0, 2.0};
    for (double alpha : {0.0, 0.5}) {
        double const err = verify_power_solution(3, 0.5, alpha, radii);
        c.check(err <= 1e-3, "power solutions N=3 s=1/2 alpha=%.1f: max relative error %.3e", alpha, err);
    }
    double const r1 = check_scaling_ode(build_profile(1, 0.5, 50, 801));
    c.check(r1 <= 1e-3, "scaling identity N=1 s=1/2: %.3e (<= 1e-3)", r1);
    double const r3 = check_scaling_ode(build_profile(3, 0.5, 50, 801));
    c.check(r3 <= 1e-3, "scaling identity N=3 s=1/2: %.3e (<= 1e-3)", r3);
    double const r4 = check_scaling_ode(build_profile(3, 0.25, 50, 801));
    c.check(r4 <= 1e-2, "scaling identity N=3 s=1/4: %.3e (<= 1e-2)", r4);
    double worst = 0.0;
    RadialFunction const v = gaussian(1.0);
    for (auto [N, s, lam] : {std::tuple{3, 0.5, 0.5}, {3, 0.25, 0.2}, {1, 0.25, 0.05}}) {
        double const mu = exponent_profile(N, s, lam).mu;
        RadialFunction u{[mu](double r) { return std::pow(r, -mu) * std::exp(-r * r); }, std::numeric_limits<double>::infinity(), 1.0};
        for (double r : {0.1, 0.5, 1.0, 2.0}) {
            double const direct = frac_laplacian_radial(u, N, s, r) - lam * u(r) / std::pow(r, 2 * s);
            double const gs = std::pow(r, mu) * apply_ground_state_operator(v, mu, N, s, r);
            worst = std::max(worst, std::abs(gs / direct - 1));
        }
    }
    c.check(worst <= 1e-3, "ground-state transform, direct against weighted operator: %.3e", worst);
}

// ----- 4 -----

void test_functions(Criterion& c) {
    ProblemParams const sub{3, 0.5, 0.5, 1.2}, super{3, 0.5, 0.5, 2.0};
    double const mu = exponent_profile(sub).mu;
    auto const prof = build_profile(3, 0.5, 50, 801);
    // direct quadrature of int psi_eta dx, independent of the closed mass law
    RadialFunction const one{[](double) { return 1.0; }, 0.0, 0.0};
    std::vector<double> x, y;
    for (int k = 0; k <= 20; ++k) {
        double const eta = std::pow(10.0, -2.0 + 0.1 * k);
        x.push_back(std::log(eta));
        y.push_back(std::log(psi_weighted_mass(one, {eta, mu}, prof)));
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) mx += x[i] / x.size(), my += y[i] / y.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) sxy += (x[i] - mx) * (y[i] - my), sxx += (x[i] - mx) * (x[i] - mx);
    double const slope = sxy / sxx;
    c.check(std::abs(slope + mu / (2 * 0.5)) <= 1e-2, "mass-law slope %.6f against -mu/(2s) = %.6f", slope, -mu);

    auto const radii = geometric(1e-2, 1e2, 20);
    for (double eta : {1.0, 0.1}) {
        double worst = std::numeric_limits<double>::infinity();
        for (auto const& smp : psi_eta_inequality({eta, mu}, sub, prof, radii)) worst = std::min(worst, smp.margin / smp.scale);
        c.check(worst >= -1e-6, "differential inequality at 20 radii, eta=%.1f: min margin/scale %.3e", eta, worst);
    }

    std::map<double, double> unit;
    RadialFunction const g = gaussian(1.0);
    auto Y0 = [&](double eta) {
        auto [it, fresh] = unit.try_emplace(eta, 0.0);
        if (fresh) it->second = psi_weighted_mass(g, {eta, mu}, prof);
        return it->second;
    };
    double const C_sub = jensen_constant(sub, prof), C_super = jensen_constant(super, prof);
    bool all = true;
    double longest = 0.0;
    for (double amp : {1e-8, 1e-6, 1e-4, 1e-2, 1.0, 1e2}) {
        auto const res = search_blowup_horizon([&](double eta) { return amp * Y0(eta); }, sub, C_sub);
        all = all && res.horizon && std::isfinite(*res.horizon);
        if (res.horizon) longest = std::max(longest, *res.horizon);
    }
    c.check(all, "p=1.2 < F: finite horizon for every amplitude in [1e-8, 1e2] (longest %.4g)", longest);
    bool none = true;
    for (double amp : {1e-8, 1e-6}) none = none && !search_blowup_horizon([&](double eta) { return amp * Y0(eta); }, super, C_super).horizon;
    c.check(none, "p=2 > F: no horizon for amplitudes 1e-8 and 1e-6");
}

// ----- 5 -----

void supersolution_certificate(Criterion& c) {
    ProblemParams const pp{3, 0.5, 0.5, 2.0};
    auto const prof = build_profile(3, 0.5, 50, 2001);
    auto const sp = choose_supersolution(pp, prof);
    c.check(std::abs(sp.gamma - 0.75) <= 1e-12, "gamma = %.15g, A = %.6g, theta = %.3g, beta = %.3g", sp.gamma, sp.A, sp.theta, sp.beta);
    std::vector<double> times;
    for (int k = 0; k < 10; ++k) times.push_back(k);
    auto const radii = geometric(1e-2, 1e2, 20);
    auto const rep = supersolution_residual(sp, pp, prof, radii, times, true);
    ResidualSample worst;
    worst.residual = std::numeric_limits<double>::infinity();
    double max_mixed = -std::numeric_limits<double>::infinity();
    for (auto const& smp : rep.samples) {
        if (smp.residual / smp.scale < worst.residual / worst.scale || !std::isfinite(worst.residual)) worst = smp;
        max_mixed = std::max(max_mixed, smp.mixed);
    }
    c.check(rep.certified, "20x10 residual sample: min residual/scale = %.4f at r=%.3g t=%g (need >= -1e-6)", rep.min_relative, worst.r, worst.t);
    c.check(max_mixed <= 0.0, "mixed term J <= 0 at every sample (max %.3e)", max_mixed);
    // the control runs on the samples the chosen A does certify
    std::vector<std::pair<double, double>> good;
    for (auto const& smp : rep.samples)
        if (smp.residual >= -1e-6 * smp.scale) good.emplace_back(smp.r, smp.t);
    auto big = sp;
    bool failed = false;
    int doublings = 0;
    for (; doublings < 12 && !failed && !good.empty(); ++doublings) {
        big.A *= 2;
        for (auto [r, t] : good) {
            auto const smp = supersolution_residual_at(r, t, big, pp, prof);
            failed = failed || smp.residual < -1e-6 * smp.scale;
        }
    }
    c.check(failed, "negative control on the %zu certified samples: a violation appears after %d doublings of A", good.size(), doublings);
}

// ----- 6 -----

/// u(r, 1) for u0 = exp(-|x|^2), N = 3, s = 1/2 by Hankel inversion of pi^{3/2} e^{-k^2/4} e^{-k}.
struct PoissonGaussianTable {
    double h = 0.01, r_end = 60.0, mass = std::pow(std::numbers::pi, 1.5);
    std::vector<double> v;

    PoissonGaussianTable() {
        auto const br = quad::refine_breaks({0.0, 40.0}, 0.1);
        for (double r = 0; r <= r_end + 3 * h; r += h) {
            auto f = [r](double k) {
                double const sc = r > 1e-8 ? std::sin(k * r) / r : k;
                return k * sc * std::pow(std::numbers::pi, 1.5) * std::exp(-k * k / 4 - k);
            };
            v.push_back(quad::integrate_panels(f, br, 20) / (2 * std::numbers::pi * std::numbers::pi));
        }
    }
    double operator()(double r) const {
        if (r >= r_end) return mass / (std::numbers::pi * std::numbers::pi * std::pow(1 + r * r, 2));
        double const x = r / h;
        int const j = std::max(1, int(x));
        double const t = x - j;
        double const a = v[j - 1], b = v[j], c = v[j + 1], d = v[j + 2];
        return b + 0.5 * t * (c - a + t * (2 * a - 5 * b + 4 * c - d + t * (3 * (b - c) + d - a)));
    }
};

void linear_box(Criterion& c) {
    PoissonGaussianTable const T;
    UniformGrid const g{3, 16.0, 128};
    Field u0{g, std::vector<double>(g.size())};
    for (std::size_t i = 0; i < g.size(); ++i) u0.values[i] = std::exp(-g.radius(i) * g.radius(i));
    SolverConfig cfg;
    cfg.params = {3, 0.5, 0.0, 2.0};
    cfg.grid = g;
    cfg.formulation = Formulation::Direct;
    cfg.reaction = false;
    cfg.t_max = 1.0;
    cfg.dt_initial = 0.25;
    cfg.snapshot_times = {1.0};
    auto const rep = run(u0, cfg);
    auto const& snap = rep.snapshots.back();
    int const K = 12, n = g.n;
    double const P = 2 * g.L;
    double err = 0.0, err_free = 0.0;
    for (std::size_t i = 0; i < snap.u.size(); i += 997) {
        double const x = g.coordinate(int(i / (n * n))), y = g.coordinate(int((i / n) % n)), z = g.coordinate(int(i % n));
        double sum = 0.0;
        for (int a = -K; a <= K; ++a)
            for (int b = -K; b <= K; ++b)
                for (int d = -K; d <= K; ++d) {
                    double const X = x + a * P, Y = y + b * P, Z = z + d * P;
                    sum += T(std::sqrt(X * X + Y * Y + Z * Z));
                }
        err = std::max(err, std::abs(snap.u[i] - sum));
        err_free = std::max(err_free, std::abs(snap.u[i] - T(snap.r[i])));
    }
    double const drift = std::abs(rep.weighted_mass_series.back() / rep.weighted_mass_series.front() - 1);
    c.check(err <= 1e-4, "6a box N=3 lambda=0 at t=1 against the periodized Poisson convolution: max error %.3e (free-space image only: %.3e)", err,
            err_free);
    c.check(drift <= 1e-6, "6a mass drift %.3e", drift);
}

void sub_fujita(Criterion& c) {
    for (double amp : {1e-3, 1.0}) {
        SolverConfig cfg;
        cfg.params = {3, 0.5, 0.5, 1.2};
        cfg.t_max = 1e4;
        cfg.dt_initial = 0.5;
        auto const v = run(gaussian(amp), cfg).verdict;
        c.check(v.kind == VerdictKind::BlewUp && std::isfinite(v.t_star) && v.fit_residual <= 0.05,
                "6b p=1.2 amplitude %g: %s, T* = %.6g, tail residual %.4f (max-norm %.4f) %s", amp, to_string(v.kind), v.t_star, v.fit_residual,
                v.fit_max_residual, v.reason.c_str());
    }
}

void under_supersolution(Criterion& c) {
    ProblemParams const pp{3, 0.5, 0.5, 2.0};
    auto const prof = build_profile(3, 0.5, 50, 2001);
    auto const sp = choose_supersolution(pp, prof);
    double const mu = exponent_profile(pp).mu, kappa = 0.5;
    RadialFunction u0{[&](double r) { return kappa * supersolution_value(r, 0, sp, prof) * std::pow(r / (1 + r), sp.gamma - mu); },
                      sp.gamma + pp.N + 2 * pp.s, 1.0};
    SolverConfig cfg;
    cfg.params = pp;
    cfg.t_max = 10;
    cfg.dt_initial = 0.01;
    cfg.snapshot_times = {0, 0.5, 1, 2, 5, 10};
    auto const rep = run(u0, cfg);
    auto const w = [&](double r, double t) { return supersolution_value(r, t, sp, prof); };
    c.check(rep.verdict.kind == VerdictKind::Survived, "6c datum 0.5 w(.,0) below the supersolution: %s through t=%g", to_string(rep.verdict.kind),
            rep.verdict.t_end);
    bool all = true;
    for (auto const& snap : rep.snapshots) {
        std::vector<Snapshot> one = {snap};
        auto const d = compare_supersolution_detail(one, w);
        double first = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < snap.u.size(); ++i)
            if (snap.u[i] > w(snap.r[i], snap.t) * (1 + 1e-6)) {
                first = snap.r[i];
                break;
            }
        std::printf("        t=%-4g u <= w %s; first violation r=%.4g, worst u/w-1 = %.3e at r=%.4g\n", snap.t, d.holds ? "holds" : "fails", first,
                    d.worst_excess, d.r);
        all = all && d.holds;
    }
    c.check(all, "6c compare_supersolution at every recorded time");
}

void ordered_pairs(Criterion& c) {
    struct Pair {
        char const* label;
        RadialFunction lo, hi;
        double p;
    };
    RadialFunction wide{[](double r) { return 0.6 * std::exp(-0.5 * r * r); }, std::numeric_limits<double>::infinity(), 1.0};
    RadialFunction sum{[](double r) { return 0.5 * std::exp(-r * r) + 0.3 * std::pow(1 - std::min(r * r, 1.0), 3); },
                       std::numeric_limits<double>::infinity(), 0.25, {1.0}};
    std::vector<Pair> pairs = {{"gaussian 0.5 < wide gaussian", gaussian(0.5), wide, 1.2},
                               {"gaussian 0.5 < wide gaussian", gaussian(0.5), wide, 2.0},
                               {"bump 0.3 < gaussian 0.5 + bump 0.3", bump(0.3), sum, 1.4}};
    for (auto const& pr : pairs) {
        SolverConfig cfg;
        cfg.params = {3, 0.5, 0.5, pr.p};
        cfg.t_max = 3.0;
        cfg.snapshot_times = {0.5, 1.0, 2.0, 3.0};
        auto const a = run(pr.lo, cfg), b = run(pr.hi, cfg);
        // the upper solution may blow up first; compare at the times both reached
        std::size_t const common = std::min(a.snapshots.size(), b.snapshots.size());
        bool ordered = common > 0;
        double worst = 0.0;
        for (std::size_t k = 0; ordered && k < common; ++k)
            for (std::size_t i = 0; i < a.snapshots[k].u.size(); ++i) {
                double const excess = a.snapshots[k].u[i] - b.snapshots[k].u[i];
                worst = std::max(worst, excess / std::max(b.snapshots[k].u[i], 1e-300));
                ordered = ordered && excess <= 1e-9 * b.snapshots[k].u[i];
            }
        c.check(ordered, "6d %s, p=%.1f: order kept at %zu recorded times (max relative excess %.2e; upper %s at t=%.4g)", pr.label, pr.p, common,
                worst, to_string(b.verdict.kind), b.verdict.t_end);
    }
}

void formulations(Criterion& c) {
    struct Level {
        double r_min;
        int n;
        double dt;
    };
    std::vector<double> diffs;
    for (Level l : {Level{1e-2, 241, 0.02}, Level{1e-3, 301, 0.01}, Level{1e-4, 361, 0.005}}) {
        SolverConfig cfg;
        cfg.params = {3, 0.5, 0.5, 1.2};
        cfg.t_max = 3;
        cfg.dt_initial = l.dt;
        cfg.dt_safety = 0.9;
        cfg.grid = RadialGeometry{l.r_min, 1e4, l.n};
        auto const gs = run(gaussian(1.0), cfg);
        cfg.formulation = Formulation::Direct;
        auto const direct = run(gaussian(1.0), cfg);
        double w = 0.0;
        for (double t : {0.5, 1.0, 1.5, 2.0, 2.5, 3.0}) {
            double const a = interpolate_series(gs.times, gs.weighted_mass_series, t);
            double const b = interpolate_series(direct.times, direct.weighted_mass_series, t);
            w = std::max(w, std::abs(a - b) / a);
        }
        std::printf("        r_min=%g n=%d dt=%g: max relative weighted-mass difference on [0.5, 3] = %.4f\n", l.r_min, l.n, l.dt, w);
        diffs.push_back(w);
    }
    c.check(diffs[1] <= 0.05 && diffs[2] <= 0.05, "6e agreement within 5%% at the default and refined levels (%.4f, %.4f)", diffs[1], diffs[2]);
    c.check(diffs[2] < diffs[1] && diffs[1] < diffs[0], "6e difference shrinks under refinement (%.4f > %.4f > %.4f)", diffs[0], diffs[1], diffs[2]);
}

void dynamics(Criterion& c) {
    linear_box(c);
    sub_fujita(c);
    under_supersolution(c);
    ordered_pairs(c);
    formulations(c);
}

// ----- 7 -----

void critical_case(Criterion& c) {
    ProblemParams const pp{3, 0.5, 0.5, 1.4};
    double const F = exponent_profile(pp).fujita;
    double const m = pp.p / (pp.p - 1) - 0.1;
    auto const k = critical_case_constants(pp, m, 0.05);
    c.check(std::abs(F - 1.4) < 1e-12 && std::isfinite(k.C1) && std::isfinite(k.C3) && k.stable,
            "m=%.2f kappa=0.05: C1 %.6g -> %.6g (%.2e), C3 %.6g -> %.6g (%.2e)", m, k.C1, k.C1_refined, k.change1, k.C3, k.C3_refined, k.change3);
    c.check(k.change1 <= 0.01 && k.change3 <= 0.01, "refinement changes within 1%%");
    for (double amp : {1.0, 3.0, 10.0}) {
        SolverConfig cfg;
        cfg.params = pp;
        cfg.t_max = 1e4;
        cfg.dt_initial = 0.1;
        auto const rep = run(gaussian(amp), cfg);
        auto const& C = rep.critical_norm_series;
        std::size_t drops = 0;
        for (std::size_t i = 1; i < C.size(); ++i) drops += C[i] < C[i - 1];
        c.check(drops == 0, "p=F amplitude %g: critical norm increasing over %zu samples (%s, T* = %.5g)", amp, C.size(), to_string(rep.verdict.kind),
                rep.verdict.t_star);
    }
}

// ----- 8 -----

void energy_criterion(Criterion& c) {
    ProblemParams const pp{3, 0.5, 0.5, 2.0};
    double const R = 2.0;
    double lo = 0.0, hi = 1.0;
    while (!energy_blowup_criterion(bump(hi), pp, R).holds) lo = hi, hi *= 2;
    for (int it = 0; it < 50; ++it) {
        double const mid = 0.5 * (lo + hi);
        (energy_blowup_criterion(bump(mid), pp, R).holds ? hi : lo) = mid;
    }
    // reaction scales like a^{p+1} and the quadratic part like a^2
    auto const unit = energy_blowup_criterion(bump(1.0), pp, R);
    double const closed = std::pow(unit.quadratic_term / unit.reaction_term, 1 / (pp.p - 1));
    c.check(std::abs(hi / closed - 1) <= 1e-9, "threshold by bisection a* = %.9g, scaling law gives %.9g", hi, closed);

    double const a = 1.2 * hi;
    int const n = 201;
    double const r_min = 1e-3;
    SolverConfig cfg;
    cfg.params = pp;
    cfg.grid = RadialGeometry{r_min, std::pow(std::pow(R, n - 1) * r_min, 1.0 / n), n};
    cfg.boundary = Boundary::Dirichlet;
    cfg.formulation = Formulation::Direct;
    cfg.potential_epsilon = 1.0;
    cfg.t_max = 10;
    cfg.dt_initial = 1e-3;
    cfg.blowup_threshold = 1e6;
    auto const rep = run(bump(a), cfg);
    c.check(energy_blowup_criterion(bump(a), pp, R).holds && rep.verdict.kind == VerdictKind::BlewUp,
            "a = 1.2 a*: criterion true, %s with T* = %.9g (tail residual %.4f)", to_string(rep.verdict.kind), rep.verdict.t_star,
            rep.verdict.fit_residual);
    double C = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < rep.times.size(); ++i) {
        double const d = (rep.l2_series[i] - rep.l2_series[i - 1]) / (rep.times[i] - rep.times[i - 1]);
        double const mid = 0.5 * (rep.l2_series[i] + rep.l2_series[i - 1]);
        C = std::min(C, d / std::pow(mid, (pp.p + 1) / 2));
    }
    c.check(C > 0.0, "d/dt int u^2 >= C (int u^2)^{(p+1)/2} over %zu samples: fitted C = %.4g (forecast %.4g)", rep.times.size(), C,
            unit.forecast_constant);
}

struct Entry {
    char const* title;
    double budget;
    std::function<void(Criterion&)> body;
};

} // namespace

int main(int argc, char** argv) {
    std::vector<Entry> const entries = {
        {"exponent algebra", 10, exponent_algebra},       {"kernel fidelity", 60, kernel_fidelity},
        {"operator identities", 120, operator_identities}, {"test functions", 60, test_functions},
        {"supersolution", 120, supersolution_certificate}, {"dynamics", 600, dynamics},
        {"critical case", 120, critical_case},            {"energy criterion", 120, energy_criterion},
    };
    int first = 1, last = int(entries.size());
    if (argc > 1) {
        first = last = std::atoi(argv[1]);
        if (first < 1 || first > int(entries.size())) {
            std::fprintf(stderr, "usage: acceptance [1-%zu]\n", entries.size());
            return 2;
        }
    }
    bool all = true;
    for (int k = first; k <= last; ++k) {
        auto const& e = entries[k - 1];
        Criterion c;
        auto const t0 = std::chrono::steady_clock::now();
        try {
            e.body(c);
        } catch (std::exception const& ex) {
            c.check(false, "exception: %s", ex.what());
        }
        double const secs = elapsed_since(t0);
        c.check(secs <= e.budget, "wall time %.1f s within %g s", secs, e.budget);
        std::printf("criterion %d %s: %s\n", k, c.pass ? "PASS" : "FAIL", e.title);
        std::fflush(stdout);
        all = all && c.pass;
    }
    return all ? 0 : 1;
}
