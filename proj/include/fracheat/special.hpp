#pragma once

#include <cmath>
#include <numbers>

#include "errors.hpp"

namespace fracheat {

/// log|Gamma(x)| together with the sign of Gamma(x). Reentrant (uses lgamma_r).
struct SignedLogGamma {
    double log_abs;
    int sign;
};

inline SignedLogGamma log_gamma(double x) {
    int sign = 1;
    double const lg = ::lgamma_r(x, &sign);
    return {lg, sign};
}

/// Gamma(a) Gamma(b) / (Gamma(c) Gamma(d)) evaluated in log space.
inline double gamma_quotient(double a, double b, double c, double d) {
    auto const ga = log_gamma(a), gb = log_gamma(b), gc = log_gamma(c), gd = log_gamma(d);
    double const sign = ga.sign * gb.sign * gc.sign * gd.sign;
    return sign * std::exp(ga.log_abs + gb.log_abs - gc.log_abs - gd.log_abs);
}

/// 1/Gamma(-x) for x > 0, finite across the poles of Gamma(-x).
inline double reciprocal_gamma_of_negative(double x) {
    // Gamma(-x) Gamma(1+x) = -pi / sin(pi x)
    return -std::sin(std::numbers::pi * x) * std::tgamma(1.0 + x) / std::numbers::pi;
}

/// Surface measure of the unit sphere S^{N-1} in R^N (|S^0| = 2).
inline double sphere_area(int N) {
    return 2.0 * std::pow(std::numbers::pi, 0.5 * N) / std::tgamma(0.5 * N);
}

/// C_{N,s} such that C P.V. int (u(x)-u(y))/|x-y|^{N+2s} dy has Fourier symbol |k|^{2s}.
inline double frac_laplacian_constant(int N, double s) {
    auto const num = log_gamma(0.5 * N + s);
    auto const den = log_gamma(-s);
    return std::exp(2.0 * s * std::numbers::ln2 - 0.5 * N * std::log(std::numbers::pi) + num.log_abs - den.log_abs);
}

/// J_nu(z) z^{-nu} for nu = N/2 - 1, the radial Fourier factor in R^N. Regular at z = 0.
inline double reduced_bessel(int N, double z) {
    using std::numbers::pi;
    double const nu = 0.5 * N - 1.0;
    double const az = std::abs(z);
    if (az < 4.0) {
        // 2^{-nu} sum (-1)^m (z/2)^{2m} / (m! Gamma(m+nu+1))
        double const q = -0.25 * az * az;
        double term = 1.0 / std::tgamma(nu + 1.0);
        double sum = term;
        for (int m = 1; m < 60; ++m) {
            term *= q / (m * (m + nu));
            sum += term;
            if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        }
        return sum * std::pow(2.0, -nu);
    }
    double const root = std::sqrt(2.0 / pi);
    switch (N) {
    case 1: return root * std::cos(az);
    case 3: return root * std::sin(az) / az;
    case 5: return root * (std::sin(az) / az - std::cos(az)) / (az * az);
    default: return std::cyl_bessel_j(nu, az) * std::pow(az, -nu);
    }
}

inline void require(bool ok, char const* what) {
    if (!ok) throw DomainError(what);
}

} // namespace fracheat
