#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "exponents.hpp"
#include "fracop.hpp"
#include "radial.hpp"
#include "spectral.hpp"

namespace fracheat {

enum class Formulation { Direct, GroundState };

inline char const* to_string(Formulation f) { return f == Formulation::Direct ? "direct" : "ground-state"; }

struct SolverConfig {
    ProblemParams params;
    std::variant<RadialGeometry, UniformGrid> grid = RadialGeometry{};
    /// Regularisation of the potential lambda/(|x|^{2s}+eps^{2s}); negative selects one grid scale.
    double potential_epsilon = -1.0;
    double dt_initial = 0.01;
    double dt_safety = 0.25;
    double t_max = 1.0;
    double blowup_threshold = 1e8;
    Formulation formulation = Formulation::GroundState;
    Boundary boundary = Boundary::FreeSpace;
    bool reaction = true;
    std::vector<double> snapshot_times = {};
    int max_halvings = 40;
    long max_steps = 2'000'000;

    bool is_radial() const { return std::holds_alternative<RadialGeometry>(grid); }

    double epsilon() const {
        if (potential_epsilon >= 0.0) return potential_epsilon;
        if (auto const* g = std::get_if<RadialGeometry>(&grid)) return g->r_min;
        return std::get<UniformGrid>(grid).dx();
    }

    void validate() const {
        if (!(t_max > 0.0)) throw DomainError("t_max must be positive");
        if (!(blowup_threshold > 0.0)) throw DomainError("blow-up threshold must be positive");
        if (!(dt_initial > 0.0)) throw DomainError("dt_initial must be positive");
        if (!(dt_safety > 0.0 && dt_safety < 1.0)) throw DomainError("dt_safety must lie in (0,1)");
        if (params.N < 1 || !(params.s > 0.0 && params.s < 1.0)) throw DomainError("invalid (N, s)");
        if (!(params.p > 1.0)) throw DomainError("p must exceed 1");
        if (params.lambda < 0.0 || params.lambda > hardy_constant(params.N, params.s)) throw DomainError("lambda outside [0, Hardy constant]");
        if (auto const* g = std::get_if<RadialGeometry>(&grid)) g->validate();
        else {
            auto const& b = std::get<UniformGrid>(grid);
            b.validate();
            if (b.N != params.N) throw DomainError("box grid dimension differs from N");
            if (formulation == Formulation::GroundState) throw DomainError("the periodic box supports the direct formulation only");
        }
        if (formulation == Formulation::Direct && params.lambda > 0.0 && !(epsilon() > 0.0))
            throw DomainError("the direct formulation needs a positive potential regularisation");
    }
};

enum class VerdictKind { BlewUp, Survived, Inconclusive };

inline char const* to_string(VerdictKind v) {
    switch (v) {
    case VerdictKind::BlewUp: return "blew-up";
    case VerdictKind::Survived: return "survived";
    default: return "inconclusive";
    }
}

struct Verdict {
    VerdictKind kind = VerdictKind::Inconclusive;
    double t_star = std::numeric_limits<double>::quiet_NaN();
    double t_end = 0.0;
    double fit_residual = std::numeric_limits<double>::quiet_NaN();
    std::string reason = {};
    double fit_max_residual = std::numeric_limits<double>::quiet_NaN();
};

struct Snapshot {
    double t = 0.0;
    std::vector<double> r;
    std::vector<double> u;
};

struct TrajectoryReport {
    std::vector<double> times;
    std::vector<double> weighted_mass_series;
    std::vector<double> critical_norm_series;
    std::vector<double> l2_series;
    std::vector<double> energy_series;
    Verdict verdict;
    std::vector<Snapshot> snapshots;
    long steps = 0;
    double epsilon = 0.0;
    double mu = 0.0;
};

struct Monitors {
    double weighted_mass = 0.0;
    double critical_norm = 0.0;
    double l2 = 0.0;
    double energy = 0.0;
};

/// Monitors of a nodal state x on a radial discretization; x = |x|^{mu_op} u with mu_op the
/// discretization's weight exponent. `Ax` is the operator applied to x.
inline Monitors monitor_norms(RadialDiscretization const& D, std::span<double const> x, Eigen::VectorXd const& Ax, double mu,
                              double p, double lambda, double epsilon) {
    double const mo = D.mu();
    double const decay = D.tail_exponent();
    int const n = D.size();
    Monitors m;
    m.weighted_mass = D.integrate_power(x, mo, mu, 1.0, decay);
    m.critical_norm = D.integrate_power(x, mo, mu, p, decay);
    m.l2 = D.integrate_power(x, mo, 0.0, 2.0, decay);
    double quad = 0.0;
    auto const& w = D.symmetry_weights();
    for (int i = 0; i < n; ++i) quad += w[i] * x[i] * Ax[i];
    m.energy = 0.5 * quad - D.integrate_power(x, mo, 0.0, p + 1.0, decay) / (p + 1.0);
    if (mo == 0.0 && lambda > 0.0) {
        double pot = 0.0;
        auto const& om = D.weights();
        auto const& r = D.radii();
        double const e2s = std::pow(epsilon, 2 * D.s());
        for (int i = 0; i < n; ++i) pot += om[i] * x[i] * x[i] / (std::pow(r[i], 2 * D.s()) + e2s);
        m.energy -= 0.5 * lambda * pot;
    }
    return m;
}

/// Monitors on the periodic box; the |x|^{-mu} weight of the origin cell is integrated in closed
/// form over the ball of equal volume.
inline Monitors monitor_norms(Field const& u, double mu, double p, double lambda, double s, double epsilon) {
    auto const& g = u.grid;
    g.validate();
    double const vol = g.cell_volume();
    double const area = sphere_area(g.N);
    double const ball = area / g.N;
    double const rc = std::pow(vol / ball, 1.0 / g.N);
    double const origin_weight = area * std::pow(rc, g.N - mu) / (g.N - mu) / vol;
    Monitors m;
    Field lap = frac_laplacian_spectral(u, s);
    double const e2s = std::pow(epsilon, 2 * s);
    for (std::size_t i = 0; i < u.values.size(); ++i) {
        double const v = std::max(u.values[i], 0.0);
        double const r = g.radius(i);
        double const wt = (r == 0.0) ? origin_weight : std::pow(r, -mu);
        m.weighted_mass += wt * v * vol;
        m.critical_norm += wt * std::pow(v, p) * vol;
        m.l2 += v * v * vol;
        m.energy += (0.5 * u.values[i] * lap.values[i] - std::pow(v, p + 1) / (p + 1)) * vol;
        if (lambda > 0.0) m.energy -= 0.5 * lambda * v * v / (std::pow(r, 2 * s) + e2s) * vol;
    }
    return m;
}

struct BlowupFit {
    double t_star = 0.0;
    double slope = 0.0;
    double residual = 0.0;       // rms of (fit - data) over the window, relative to the range of Y^{1-p}
    double max_residual = 0.0;   // same with the max norm
};

/// Least-squares line through Y^{1-p} over the final quarter of the series (at least five points),
/// extrapolated to zero. Refuses tails that are not strictly increasing.
inline BlowupFit fit_blowup_tail(std::span<double const> times, std::span<double const> Y, double p) {
    if (times.size() != Y.size() || times.size() < 5) throw DomainError("blow-up fit needs at least five samples");
    if (!(p > 1.0)) throw DomainError("p must exceed 1");
    std::size_t const n = times.size();
    std::size_t const m = std::max<std::size_t>(5, n / 4);
    std::size_t const start = n - m;
    for (std::size_t i = start + 1; i < n; ++i)
        if (!(Y[i] > Y[i - 1]) || !(times[i] > times[i - 1])) throw ConvergenceError("weighted-mass tail is not strictly increasing");
    // offsets from the last sample, centred, so the normal equations survive clustered times
    double const t_last = times[n - 1];
    std::vector<double> z(m), tau(m);
    double tbar = 0, zbar = 0;
    for (std::size_t k = 0; k < m; ++k) {
        z[k] = std::pow(Y[start + k], 1.0 - p);
        tau[k] = times[start + k] - t_last;
        tbar += tau[k];
        zbar += z[k];
    }
    tbar /= m;
    zbar /= m;
    double stt = 0, stz = 0;
    for (std::size_t k = 0; k < m; ++k) {
        stt += (tau[k] - tbar) * (tau[k] - tbar);
        stz += (tau[k] - tbar) * (z[k] - zbar);
    }
    double const slope = stz / stt;
    double const icpt = zbar - slope * tbar;   // value of the line at t_last
    if (!(slope < 0.0)) throw ConvergenceError("Y^{1-p} is not decreasing towards zero");
    BlowupFit fit;
    fit.slope = slope;
    double const ahead = -icpt / slope;
    fit.t_star = t_last + ahead;
    double const zmin = *std::min_element(z.begin(), z.end()), zmax = *std::max_element(z.begin(), z.end());
    double worst = 0.0, ss = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        double const dev = icpt + slope * tau[k] - z[k];
        worst = std::max(worst, std::abs(dev));
        ss += dev * dev;
    }
    fit.residual = std::sqrt(ss / m) / (zmax - zmin);
    fit.max_residual = worst / (zmax - zmin);
    if (!(ahead > 0.0)) throw ConvergenceError("extrapolated blow-up time precedes the last sample");
    return fit;
}

inline double estimate_blowup_time(std::span<double const> times, std::span<double const> Y, double p) {
    return fit_blowup_tail(times, Y, p).t_star;
}

/// Linear interpolation of a recorded series at time t (clamped to the recorded range).
inline double interpolate_series(std::span<double const> times, std::span<double const> series, double t) {
    if (times.empty()) throw DomainError("empty series");
    if (t <= times.front()) return series.front();
    if (t >= times.back()) return series.back();
    auto const it = std::upper_bound(times.begin(), times.end(), t);
    std::size_t const j = static_cast<std::size_t>(it - times.begin());
    double const a = (t - times[j - 1]) / (times[j] - times[j - 1]);
    return (1 - a) * series[j - 1] + a * series[j];
}

struct ComparisonResult {
    bool holds = true;
    double worst_excess = 0.0;   // max of u/w - 1 over the samples
    double r = 0.0, t = 0.0;
};

inline ComparisonResult compare_supersolution_detail(std::span<Snapshot const> snaps, std::function<double(double, double)> const& w,
                                                     double tol = 1e-6) {
    ComparisonResult out;
    out.worst_excess = -std::numeric_limits<double>::infinity();
    for (auto const& snap : snaps) {
        for (std::size_t i = 0; i < snap.u.size(); ++i) {
            double const wv = w(snap.r[i], snap.t);
            double const uv = snap.u[i];
            if (uv <= 0.0) continue;
            double const excess = (wv > 0.0) ? uv / wv - 1.0 : std::numeric_limits<double>::infinity();
            if (excess > out.worst_excess) {
                out.worst_excess = excess;
                out.r = snap.r[i];
                out.t = snap.t;
            }
            if (!(uv <= wv * (1.0 + tol))) out.holds = false;
        }
    }
    return out;
}

/// True iff u <= w (1 + tol) at every recorded time and grid point.
inline bool compare_supersolution(std::span<Snapshot const> snaps, std::function<double(double, double)> const& w, double tol = 1e-6) {
    return compare_supersolution_detail(snaps, w, tol).holds;
}

/// mu(lambda), with the potential-free value 0 at lambda = 0.
inline double weight_exponent(ProblemParams const& pp) {
    return pp.lambda == 0.0 ? 0.0 : exponent_profile(pp.N, pp.s, pp.lambda).mu;
}

namespace detail {

inline void record(TrajectoryReport& rep, double t, Monitors const& m) {
    rep.times.push_back(t);
    rep.weighted_mass_series.push_back(m.weighted_mass);
    rep.critical_norm_series.push_back(m.critical_norm);
    rep.l2_series.push_back(m.l2);
    rep.energy_series.push_back(m.energy);
}

inline void conclude_threshold(TrajectoryReport& rep, double p) {
    rep.verdict.t_end = rep.times.back();
    try {
        auto const fit = fit_blowup_tail(rep.times, rep.weighted_mass_series, p);
        rep.verdict.kind = VerdictKind::BlewUp;
        rep.verdict.t_star = fit.t_star;
        rep.verdict.fit_residual = fit.residual;
        rep.verdict.fit_max_residual = fit.max_residual;
    } catch (ConvergenceError const& e) {
        rep.verdict.kind = VerdictKind::Inconclusive;
        rep.verdict.reason = std::string("threshold crossed but the tail fit was refused: ") + e.what();
    }
}

inline TrajectoryReport run_radial(RadialFunction const& u0, SolverConfig const& cfg) {
    auto const& pp = cfg.params;
    auto const geom = std::get<RadialGeometry>(cfg.grid);
    double const mu = weight_exponent(pp);
    bool const gs = cfg.formulation == Formulation::GroundState;
    double const mo = gs ? mu : 0.0;
    double const tail = pp.N + 2 * pp.s - mo;
    RadialDiscretization D(pp.N, pp.s, mo, geom, cfg.boundary, tail);
    int const n = D.size();
    auto const& r = D.radii();
    double const eps = cfg.epsilon();
    double const e2s = std::pow(eps, 2 * pp.s);
    double const p = pp.p, lam = pp.lambda;

    TrajectoryReport rep;
    rep.epsilon = eps;
    rep.mu = mu;
    Eigen::VectorXd x(n), metric(n), react_w(n), pot(n);
    for (int i = 0; i < n; ++i) {
        double const u = u0(r[i]);
        if (!std::isfinite(u)) throw DomainError("initial datum is not finite on the grid");
        if (u < 0.0) throw DomainError("initial datum must be nonnegative");
        x[i] = std::pow(r[i], mo) * u;
        metric[i] = std::pow(r[i], 2 * mo);
        react_w[i] = std::pow(r[i], mo * (1 - p));
        pot[i] = gs ? 0.0 : lam / (std::pow(r[i], 2 * pp.s) + e2s);
    }
    Eigen::MatrixXd const& A = D.matrix();
    Eigen::MatrixXd const B = metric.asDiagonal() * A;
    auto to_u = [&](Eigen::VectorXd const& s) {
        std::vector<double> u(n);
        for (int i = 0; i < n; ++i) u[i] = std::pow(r[i], -mo) * s[i];
        return u;
    };
    std::size_t next_snap = 0;
    auto snap_if_due = [&](double t, Eigen::VectorXd const& s, bool force) {
        while (next_snap < cfg.snapshot_times.size() && (t >= cfg.snapshot_times[next_snap] * (1 - 1e-12) || force)) {
            rep.snapshots.push_back({t, r, to_u(s)});
            ++next_snap;
            if (force) break;
        }
    };
    auto rhs_of = [&](Eigen::VectorXd const& s, double dt) {
        Eigen::VectorXd out = s;
        for (int i = 0; i < n; ++i) {
            double rr = pot[i] * s[i];
            if (cfg.reaction) rr += react_w[i] * std::pow(s[i], p);
            out[i] += dt * rr;
        }
        return out;
    };
    auto rate_of = [&](Eigen::VectorXd const& s) {
        double rate = gs ? 0.0 : lam / std::max(e2s, 1e-300);
        if (cfg.reaction) {
            double umax = 0.0;
            for (int i = 0; i < n; ++i) umax = std::max(umax, std::pow(r[i], -mo) * s[i]);
            rate += p * std::pow(umax, p - 1);
        }
        return rate;
    };

    Eigen::VectorXd Ax = A * x;
    std::span<double const> xs(x.data(), n);
    record(rep, 0.0, monitor_norms(D, xs, Ax, mu, p, lam, eps));
    snap_if_due(0.0, x, false);

    std::map<int, Eigen::PartialPivLU<Eigen::MatrixXd>> lu_cache;
    auto lu_for = [&](int k) -> Eigen::PartialPivLU<Eigen::MatrixXd> const& {
        auto it = lu_cache.find(k);
        if (it == lu_cache.end()) {
            double const dt = std::ldexp(cfg.dt_initial, -k);
            Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n, n) + dt * B;
            it = lu_cache.emplace(k, Eigen::PartialPivLU<Eigen::MatrixXd>(M)).first;
        }
        return it->second;
    };

    double t = 0.0;
    int level = 0;
    while (t < cfg.t_max * (1 - 1e-14)) {
        if (rep.steps >= cfg.max_steps) {
            rep.verdict = {VerdictKind::Inconclusive, NAN, t, NAN, "step budget exhausted"};
            return rep;
        }
        double const allowed = cfg.dt_safety / std::max(rate_of(x), 1e-300);
        level = 0;
        while (std::ldexp(cfg.dt_initial, -level) > allowed) ++level;
        bool accepted = false;
        for (; level <= cfg.max_halvings && !accepted; ++level) {
            double dt = std::ldexp(cfg.dt_initial, -level);
            bool const last = t + dt >= cfg.t_max;
            Eigen::VectorXd xn;
            Eigen::VectorXd rhs;
            if (last) {
                dt = cfg.t_max - t;
                rhs = rhs_of(x, dt);
                Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n, n) + dt * B;
                xn = M.partialPivLu().solve(rhs);
            } else {
                rhs = rhs_of(x, dt);
                xn = lu_for(level).solve(rhs);
            }
            if (!xn.allFinite()) {
                rep.verdict = {VerdictKind::Inconclusive, NAN, t, NAN, "non-finite state"};
                return rep;
            }
            double const scale = xn.cwiseAbs().maxCoeff();
            if (xn.minCoeff() < -1e-10 * scale) continue;
            xn = xn.cwiseMax(0.0);
            // B xn = (rhs - xn) / dt, hence A xn without another product
            Ax = (rhs - xn).cwiseQuotient(metric) / dt;
            x = xn;
            t = last ? cfg.t_max : t + dt;
            accepted = true;
        }
        if (!accepted) {
            rep.verdict = {VerdictKind::Inconclusive, NAN, t, NAN, "step-size collapse"};
            return rep;
        }
        ++rep.steps;
        auto const m = monitor_norms(D, std::span<double const>(x.data(), n), Ax, mu, p, lam, eps);
        record(rep, t, m);
        snap_if_due(t, x, false);
        if (!std::isfinite(m.weighted_mass) || m.weighted_mass > cfg.blowup_threshold) {
            snap_if_due(t, x, true);
            conclude_threshold(rep, p);
            return rep;
        }
    }
    rep.verdict = {VerdictKind::Survived, NAN, t, NAN, ""};
    return rep;
}

inline TrajectoryReport run_box(Field const& u0, SolverConfig const& cfg) {
    auto const& pp = cfg.params;
    auto const& g = std::get<UniformGrid>(cfg.grid);
    if (u0.grid.N != g.N || u0.grid.n != g.n || u0.grid.L != g.L) throw DomainError("initial field grid differs from the configured grid");
    if (u0.values.size() != g.size()) throw DomainError("initial field size does not match its grid");
    double const mu = weight_exponent(pp);
    double const eps = cfg.epsilon();
    double const e2s = std::pow(eps, 2 * pp.s);
    double const p = pp.p, lam = pp.lambda;
    for (double v : u0.values) {
        if (!std::isfinite(v)) throw DomainError("initial datum is not finite on the grid");
        if (v < 0.0) throw DomainError("initial datum must be nonnegative");
    }
    std::vector<double> pot(g.size()), radius(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        radius[i] = g.radius(i);
        pot[i] = lam > 0.0 ? lam / (std::pow(radius[i], 2 * pp.s) + e2s) : 0.0;
    }
    TrajectoryReport rep;
    rep.epsilon = eps;
    rep.mu = mu;
    Field u = u0;
    record(rep, 0.0, monitor_norms(u, mu, p, lam, pp.s, eps));
    std::size_t next_snap = 0;
    auto snap_if_due = [&](double t) {
        while (next_snap < cfg.snapshot_times.size() && t >= cfg.snapshot_times[next_snap] * (1 - 1e-12)) {
            rep.snapshots.push_back({t, radius, u.values});
            ++next_snap;
        }
    };
    snap_if_due(0.0);
    double t = 0.0;
    while (t < cfg.t_max * (1 - 1e-14)) {
        if (rep.steps >= cfg.max_steps) {
            rep.verdict = {VerdictKind::Inconclusive, NAN, t, NAN, "step budget exhausted"};
            return rep;
        }
        double rate = lam > 0.0 ? lam / e2s : 0.0;
        if (cfg.reaction) rate += p * std::pow(*std::max_element(u.values.begin(), u.values.end()), p - 1);
        double dt = std::min(cfg.dt_initial, cfg.dt_safety / std::max(rate, 1e-300));
        dt = std::min(dt, cfg.t_max - t);
        Field next = u;
        for (std::size_t i = 0; i < g.size(); ++i) {
            double const v = u.values[i];
            next.values[i] += dt * (pot[i] * v + (cfg.reaction ? std::pow(v, p) : 0.0));
        }
        heat_propagate(g, next.values, pp.s, dt);
        double const scale = *std::max_element(next.values.begin(), next.values.end());
        for (double& v : next.values) {
            if (!std::isfinite(v)) {
                rep.verdict = {VerdictKind::Inconclusive, NAN, t, NAN, "non-finite state"};
                return rep;
            }
            if (v < 0.0) {
                if (v < -1e-8 * scale) {
                    rep.verdict = {VerdictKind::Inconclusive, NAN, t, NAN, "periodic propagation lost positivity"};
                    return rep;
                }
                v = 0.0;
            }
        }
        u = std::move(next);
        t += dt;
        ++rep.steps;
        auto const m = monitor_norms(u, mu, p, lam, pp.s, eps);
        record(rep, t, m);
        snap_if_due(t);
        if (!std::isfinite(m.weighted_mass) || m.weighted_mass > cfg.blowup_threshold) {
            conclude_threshold(rep, p);
            return rep;
        }
    }
    rep.verdict = {VerdictKind::Survived, NAN, t, NAN, ""};
    return rep;
}

} // namespace detail

/// Radial run: the datum is sampled at the nodes of the configured geometry.
inline TrajectoryReport run(RadialFunction const& u0, SolverConfig const& cfg) {
    cfg.validate();
    if (!cfg.is_radial()) throw DomainError("a radial datum needs a radial geometry");
    return detail::run_radial(u0, cfg);
}

inline TrajectoryReport run(RadialField const& u0, SolverConfig const& cfg) {
    return run(u0.as_function(), cfg);
}

/// Periodic-box run (direct formulation, exact exponential diffusion step).
inline TrajectoryReport run(Field const& u0, SolverConfig const& cfg) {
    cfg.validate();
    if (cfg.is_radial()) throw DomainError("a box datum needs a box grid");
    return detail::run_box(u0, cfg);
}

} // namespace fracheat
