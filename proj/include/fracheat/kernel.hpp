#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "errors.hpp"
#include "quadrature.hpp"
#include "special.hpp"

namespace fracheat {

// Self-similar profile H of the fractional heat kernel: h(x,t) = t^{-N/(2s)} H(|x| t^{-1/(2s)}),
// with Fourier transform exp(-|k|^{2s}) in angular frequency.

namespace detail {

/// Large-sigma expansion  H(sigma) = sum_j c_j sigma^{-N-2sj}. Convergent for s < 1/2, convergent
/// for sigma > 1 at s = 1/2, asymptotic otherwise. Returns nullopt when the truncation or the
/// cancellation would cost more than about 1e-12 relative accuracy.
inline std::optional<double> kernel_series(int N, double s, double sigma, double* tail_mass = nullptr) {
    using std::numbers::pi;
    if (sigma <= 0.0) return std::nullopt;
    double const alpha = 2 * s;
    double const lsig = std::log(sigma);
    double sum = 0.0, max_abs = 0.0, prev_abs = HUGE_VAL, mass = 0.0;
    int small = 0;
    for (int j = 1; j <= 400; ++j) {
        double const x = 0.5 * alpha * j;
        double const sn = std::sin(pi * x);
        double term = 0.0;
        if (std::abs(sn) > 1e-14) {
            auto const g1 = log_gamma(0.5 * (N + alpha * j));
            auto const g2 = log_gamma(1.0 + x);
            auto const gj = log_gamma(j + 1.0);
            double const lmag = alpha * j * std::numbers::ln2 + g1.log_abs + g2.log_abs - gj.log_abs - (N + alpha * j) * lsig;
            term = ((j % 2 == 1) ? 1.0 : -1.0) * sn * std::exp(lmag) * std::pow(pi, -0.5 * N - 1.0);
        }
        double const a = std::abs(term);
        if (a > prev_abs && s > 0.5 && j > 2) {
            // asymptotic regime: stop at the smallest term
            if (prev_abs < 1e-15 * std::abs(sum)) break;
            return std::nullopt;
        }
        sum += term;
        mass += term * std::pow(sigma, N) / (alpha * j);
        max_abs = std::max(max_abs, a);
        if (a != 0.0) prev_abs = a;
        if (a < 1e-17 * std::abs(sum)) {
            if (++small >= 2) break;
        } else {
            small = 0;
        }
        if (j == 400) return std::nullopt;
    }
    if (!(sum > 0.0) || max_abs > 1e4 * sum) return std::nullopt;
    if (tail_mass) *tail_mass = mass * sphere_area(N);
    return sum;
}

/// Radial Fourier inversion (2pi)^{-N/2} int_0^inf k^{N-1} J_nu(k sigma)(k sigma)^{-nu} exp(-k^{2s}) dk,
/// panels of half an oscillation period, dyadic grading at k = 0 where k^{2s} is not smooth.
inline double kernel_quadrature(int N, double s, double sigma) {
    using std::numbers::pi;
    double const alpha = 2 * s;
    double kmax = std::pow(60.0, 1.0 / alpha);
    for (int it = 0; it < 20; ++it) kmax = std::pow(60.0 + (N + 1) / alpha * std::log(std::max(kmax, 1.0)), 1.0 / alpha);
    double const width = (sigma > 0.0) ? std::min(pi / sigma, kmax / 64.0) : kmax / 64.0;
    auto f = [&](double k) { return std::pow(k, N - 1) * reduced_bessel(N, k * sigma) * std::exp(-std::pow(k, alpha)); };
    double sum = 0.0;
    // graded first panel
    auto const graded = quad::graded_breaks(0.0, width, 50);
    sum += quad::integrate_panels(f, graded, 20);
    double last = 0.0;
    int const panels = static_cast<int>(std::ceil((kmax - width) / width));
    for (int i = 0; i < panels; ++i) {
        double const a = width * (1 + i), b = std::min(kmax, a + width);
        last = quad::integrate(f, a, b, 20);
        sum += last;
    }
    double const value = sum * std::pow(2 * pi, -0.5 * N);
    if (!std::isfinite(value) || std::abs(last) * std::pow(2 * pi, -0.5 * N) > 1e-13 * std::abs(value) + 1e-300)
        throw ConvergenceError("kernel quadrature did not converge at sigma = " + std::to_string(sigma));
    return value;
}

} // namespace detail

/// H(sigma) for dimension N; N only enters through the radial measure so N + 2 is also valid.
inline double kernel_value(int N, double s, double sigma) {
    if (auto v = detail::kernel_series(N, s, sigma)) return *v;
    return detail::kernel_quadrature(N, s, sigma);
}

/// H'(sigma) = -2 pi sigma H_{N+2}(sigma), its own quadrature rather than a difference quotient.
inline double kernel_derivative(int N, double s, double sigma) {
    if (sigma == 0.0) return 0.0;
    return -2.0 * std::numbers::pi * sigma * kernel_value(N + 2, s, sigma);
}

struct KernelProfile {
    int N = 0;
    double s = 0.0;
    double sigma_max = 0.0;
    std::vector<double> sigma;
    std::vector<double> H;
    std::vector<double> Hprime;
    double mass = 0.0;
};

/// One-sided value with a flag telling whether it came from the table or the far-field expansion.
struct ProfileSample {
    double value;
    bool extended;
};

namespace detail {

inline std::size_t profile_interval(KernelProfile const& prof, double sigma) {
    std::size_t const n = prof.sigma.size();
    if (n < 2) return 0;
    double const pos = std::log1p(sigma) / std::log1p(prof.sigma_max) * static_cast<double>(n - 1);
    auto i = static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<double>(n - 2)));
    while (i + 2 < n && prof.sigma[i + 1] < sigma) ++i;
    while (i > 0 && prof.sigma[i] > sigma) --i;
    return i;
}

/// Cubic Hermite interpolation of log H; returns (H, H').
inline std::pair<double, double> profile_interpolate(KernelProfile const& prof, double sigma) {
    std::size_t const i = profile_interval(prof, sigma);
    double const x0 = prof.sigma[i], x1 = prof.sigma[i + 1], h = x1 - x0;
    double const y0 = std::log(prof.H[i]), y1 = std::log(prof.H[i + 1]);
    double const d0 = prof.Hprime[i] / prof.H[i], d1 = prof.Hprime[i + 1] / prof.H[i + 1];
    double const t = (sigma - x0) / h;
    double const t2 = t * t, t3 = t2 * t;
    double const y = (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * d0 + (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * h * d1;
    double const dy = ((6 * t2 - 6 * t) * y0 + (3 * t2 - 4 * t + 1) * h * d0 + (-6 * t2 + 6 * t) * y1 + (3 * t2 - 2 * t) * h * d1) / h;
    double const H = std::exp(y);
    return {H, H * dy};
}

} // namespace detail

/// Tabulate H and H' on sigma_i = (1+sigma_max)^{i/(n-1)} - 1 and integrate the mass.
inline KernelProfile build_profile(int N, double s, double sigma_max, int n_points, unsigned threads = 0) {
    if (N < 1) throw DomainError("dimension N must be >= 1");
    if (!(s > 0.0 && s < 1.0)) throw DomainError("s must lie in (0,1)");
    if (!(sigma_max > 0.0)) throw DomainError("sigma_max must be positive");
    if (n_points < 16) throw DomainError("a profile needs at least 16 points");
    KernelProfile prof;
    prof.N = N;
    prof.s = s;
    prof.sigma_max = sigma_max;
    prof.sigma.resize(n_points);
    prof.H.resize(n_points);
    prof.Hprime.resize(n_points);
    for (int i = 0; i < n_points; ++i) prof.sigma[i] = std::expm1(std::log1p(sigma_max) * i / (n_points - 1));
    prof.sigma.back() = sigma_max;

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    auto work = [&](unsigned id) {
        for (int i = static_cast<int>(id); i < n_points; i += static_cast<int>(threads)) {
            prof.H[i] = kernel_value(N, s, prof.sigma[i]);
            prof.Hprime[i] = kernel_derivative(N, s, prof.sigma[i]);
        }
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
    }

    for (int i = 0; i < n_points; ++i) {
        if (!(prof.H[i] > 0.0) || !std::isfinite(prof.Hprime[i]) || prof.Hprime[i] > 0.0)
            throw ConvergenceError("kernel profile invalid at sigma = " + std::to_string(prof.sigma[i]));
        if (i > 0 && prof.H[i] > prof.H[i - 1]) throw ConvergenceError("kernel profile not monotone at sigma = " + std::to_string(prof.sigma[i]));
    }

    // Hermite trapezoid rule for |S| sigma^{N-1} H, then the far-field expansion beyond sigma_max.
    double const area = sphere_area(N);
    auto g = [&](int i) { return area * std::pow(prof.sigma[i], N - 1) * prof.H[i]; };
    auto dg = [&](int i) {
        double const x = prof.sigma[i];
        double const lower = (N == 1) ? 0.0 : (N - 1) * std::pow(x, N - 2) * prof.H[i];
        return area * (lower + std::pow(x, N - 1) * prof.Hprime[i]);
    };
    double mass = 0.0;
    for (int i = 0; i + 1 < n_points; ++i) {
        double const h = prof.sigma[i + 1] - prof.sigma[i];
        mass += 0.5 * h * (g(i) + g(i + 1)) + h * h / 12.0 * (dg(i) - dg(i + 1));
    }
    double tail = 0.0;
    if (!detail::kernel_series(N, s, sigma_max, &tail)) throw ConvergenceError("far-field expansion unusable at sigma_max; increase sigma_max");
    prof.mass = mass + tail;
    return prof;
}

/// H(sigma) from the table, or from the far-field expansion beyond sigma_max (flagged).
inline ProfileSample profile_H(KernelProfile const& prof, double sigma) {
    if (sigma < 0.0) throw DomainError("negative similarity variable");
    if (sigma <= prof.sigma_max) return {detail::profile_interpolate(prof, sigma).first, false};
    if (auto v = detail::kernel_series(prof.N, prof.s, sigma)) return {*v, true};
    return {detail::kernel_quadrature(prof.N, prof.s, sigma), true};
}

inline ProfileSample profile_Hprime(KernelProfile const& prof, double sigma) {
    if (sigma < 0.0) throw DomainError("negative similarity variable");
    if (sigma <= prof.sigma_max) return {detail::profile_interpolate(prof, sigma).second, false};
    return {kernel_derivative(prof.N, prof.s, sigma), true};
}

/// h(x,t) = t^{-N/(2s)} H(|x| t^{-1/(2s)}) restricted to the tabulated range.
inline double h_value(KernelProfile const& prof, double x_norm, double t) {
    if (!(t > 0.0)) throw DomainError("t must be positive");
    double const sigma = x_norm * std::pow(t, -1.0 / (2 * prof.s));
    if (sigma > prof.sigma_max) throw OutOfTableError("similarity variable beyond sigma_max: " + std::to_string(sigma));
    return std::pow(t, -prof.N / (2 * prof.s)) * detail::profile_interpolate(prof, sigma).first;
}

/// Smallest C >= 1 with H(sigma)(1 + sigma^{N+2s}) in [1/C, C] on the grid.
inline double check_envelope(KernelProfile const& prof) {
    double C = 1.0;
    for (std::size_t i = 0; i < prof.H.size(); ++i) {
        double const H = prof.H[i];
        if (!(H > 0.0) || !std::isfinite(H)) throw CorruptionError("profile entry not positive and finite at index " + std::to_string(i));
        double const ratio = H * (1.0 + std::pow(prof.sigma[i], prof.N + 2 * prof.s));
        C = std::max({C, ratio, 1.0 / ratio});
    }
    return C;
}

/// c in H ~ c sigma^{-(N+2s)}, least squares over the last decade of the table.
inline double fitted_envelope_coefficient(KernelProfile const& prof) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < prof.H.size(); ++i) {
        if (prof.sigma[i] < 0.1 * prof.sigma_max) continue;
        double const basis = std::pow(prof.sigma[i], -(prof.N + 2 * prof.s));
        num += basis * prof.H[i];
        den += basis * basis;
    }
    return den > 0.0 ? num / den : 0.0;
}

} // namespace fracheat
