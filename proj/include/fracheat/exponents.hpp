#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "special.hpp"

namespace fracheat {

/// One Cauchy problem instance u_t + (-Delta)^s u = lambda u/|x|^{2s} + u^p in R^N.
struct ProblemParams {
    int N = 3;
    double s = 0.5;
    double lambda = 0.5;
    double p = 2.0;
};

/// Every critical constant attached to (N, s, lambda).
struct ExponentProfile {
    int N = 0;
    double s = 0.0;
    double lambda = 0.0;
    double hardy_constant = 0.0;
    double alpha = 0.0;
    double mu = 0.0;
    double mu_bar = 0.0;
    double p_minus = 0.0;
    double p_plus = 0.0;
    double fujita = 0.0;
    double sobolev_power = 0.0;
    double a_Ns = 0.0;
};

enum class Regime { SubFujitaBlowUp, CriticalFujita, ConditionalGlobal, NonExistence };

inline char const* to_string(Regime r) {
    switch (r) {
    case Regime::SubFujitaBlowUp: return "SubFujitaBlowUp";
    case Regime::CriticalFujita: return "CriticalFujita";
    case Regime::ConditionalGlobal: return "ConditionalGlobal";
    case Regime::NonExistence: return "NonExistence";
    }
    return "?";
}

inline void check_dimension(int N, double s) {
    if (N < 1) throw DomainError("dimension N must be >= 1");
    if (!(s > 0.0 && s < 1.0)) throw DomainError("fractional order s must lie in (0,1)");
    if (!(N > 2.0 * s)) throw DomainError("requires N > 2s");
}

/// Optimal constant of the fractional Hardy inequality.
inline double hardy_constant(int N, double s) {
    check_dimension(N, s);
    double const r = gamma_quotient(0.25 * (N + 2 * s), 0.25 * (N + 2 * s), 0.25 * (N - 2 * s), 0.25 * (N - 2 * s));
    return std::exp2(2 * s) * r;
}

/// (-Delta)^s |x|^{-gamma} = power_eigenvalue(gamma) |x|^{-gamma-2s} for 0 < gamma < N - 2s.
inline double power_eigenvalue(int N, double s, double gamma) {
    check_dimension(N, s);
    if (!(gamma > 0.0 && gamma < N - 2 * s)) throw DomainError("power exponent outside (0, N-2s)");
    return std::exp2(2 * s) * gamma_quotient(0.5 * (N - gamma), s + 0.5 * gamma, 0.5 * (N - 2 * s - gamma), 0.5 * gamma);
}

/// m_alpha = 2^s Gamma((N+2s+2alpha)/4) / Gamma((N-2s-2alpha)/4); lambda(alpha) = m_alpha m_{-alpha}.
inline double m_alpha(int N, double s, double alpha) {
    check_dimension(N, s);
    if (!(std::abs(alpha) < 0.5 * (N - 2 * s))) throw DomainError("|alpha| must be < (N-2s)/2");
    auto const a = log_gamma(0.25 * (N + 2 * s + 2 * alpha));
    auto const b = log_gamma(0.25 * (N - 2 * s - 2 * alpha));
    return std::exp2(s) * a.sign * b.sign * std::exp(a.log_abs - b.log_abs);
}

inline double lambda_of_alpha(int N, double s, double alpha) {
    check_dimension(N, s);
    if (!(alpha >= 0.0 && alpha < 0.5 * (N - 2 * s))) throw DomainError("alpha outside [0, (N-2s)/2)");
    return std::exp2(2 * s) * gamma_quotient(0.25 * (N + 2 * s + 2 * alpha), 0.25 * (N + 2 * s - 2 * alpha),
                                             0.25 * (N - 2 * s + 2 * alpha), 0.25 * (N - 2 * s - 2 * alpha));
}

/// Inverse of lambda_of_alpha by bisection. The search runs in mu = (N-2s)/2 - alpha, where
/// lambda is increasing, so small lambda keeps full relative precision.
inline double alpha_of_lambda(int N, double s, double lambda) {
    double const hardy = hardy_constant(N, s);
    if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
    if (lambda > hardy) throw DomainError("lambda exceeds the fractional Hardy constant");
    double const half = 0.5 * (N - 2 * s);
    if (lambda == hardy) return 0.0;
    double lo = 1e-13, hi = half;
    if (power_eigenvalue(N, s, lo) >= lambda) return half - lo;
    for (int it = 0; it < 400 && hi - lo > 2.0 * std::numeric_limits<double>::epsilon() * hi; ++it) {
        double const mid = 0.5 * (lo + hi);
        if (power_eigenvalue(N, s, mid) < lambda) lo = mid;
        else hi = mid;
    }
    double const mu = (std::abs(power_eigenvalue(N, s, lo) - lambda) < std::abs(power_eigenvalue(N, s, hi) - lambda)) ? lo : hi;
    return half - mu;
}

inline ExponentProfile exponent_profile(int N, double s, double lambda) {
    ExponentProfile e;
    e.N = N;
    e.s = s;
    e.lambda = lambda;
    e.hardy_constant = hardy_constant(N, s);
    e.alpha = alpha_of_lambda(N, s, lambda);
    double const half = 0.5 * (N - 2 * s);
    e.mu = half - e.alpha;
    e.mu_bar = half + e.alpha;
    e.p_plus = 1.0 + 2 * s / e.mu;
    e.p_minus = 1.0 + 2 * s / e.mu_bar;
    e.fujita = 1.0 + 2 * s / (N - e.mu);
    e.sobolev_power = (N + 2 * s) / (N - 2 * s);
    e.a_Ns = frac_laplacian_constant(N, s);
    return e;
}

inline void validate(ProblemParams const& pp) {
    check_dimension(pp.N, pp.s);
    if (!(pp.lambda > 0.0)) throw DomainError("lambda must be positive");
    if (pp.lambda > hardy_constant(pp.N, pp.s)) throw DomainError("lambda exceeds the fractional Hardy constant");
    if (!(pp.p > 1.0)) throw DomainError("p must exceed 1");
}

inline ExponentProfile exponent_profile(ProblemParams const& pp) { return exponent_profile(pp.N, pp.s, pp.lambda); }

inline Regime classify_regime(ProblemParams const& pp, double tol = 1e-9) {
    validate(pp);
    auto const e = exponent_profile(pp);
    if (std::abs(pp.p - e.p_plus) <= tol) throw AmbiguityError("p within tolerance of p_+; behaviour at p = p_+ is not classified");
    if (pp.p >= e.p_plus + tol) return Regime::NonExistence;
    if (std::abs(pp.p - e.fujita) <= tol) return Regime::CriticalFujita;
    if (pp.p < e.fujita - tol) return Regime::SubFujitaBlowUp;
    return Regime::ConditionalGlobal;
}

struct PhaseRow {
    double lambda, alpha, mu, p_minus, p_plus, fujita;
};

struct PhaseTable {
    std::vector<PhaseRow> rows;
    std::vector<std::pair<double, std::string>> skipped;   // lambda and the reason
};

inline PhaseTable phase_table(int N, double s, std::vector<double> const& lambda_grid) {
    PhaseTable table;
    for (double lambda : lambda_grid) {
        try {
            auto const e = exponent_profile(N, s, lambda);
            table.rows.push_back({lambda, e.alpha, e.mu, e.p_minus, e.p_plus, e.fujita});
        } catch (DomainError const& err) {
            table.skipped.emplace_back(lambda, err.what());
        }
    }
    return table;
}

} // namespace fracheat
