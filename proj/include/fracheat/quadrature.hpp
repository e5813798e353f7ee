#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <span>
#include <vector>

namespace fracheat::quad {

struct Rule {
    std::vector<double> nodes;   // on [-1, 1]
    std::vector<double> weights;
};

/// Gauss-Legendre rule of order n, computed once per order and shared read-only.
inline Rule const& gauss_legendre(int n) {
    static std::mutex mutex;
    static std::map<int, Rule> cache;
    std::scoped_lock lock(mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    Rule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double const p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0, p1 = x;
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double const dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double const w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return cache.emplace(n, std::move(rule)).first->second;
}

template <class F>
double integrate(F&& f, double a, double b, int order = 20) {
    if (b == a) return 0.0;
    auto const& rule = gauss_legendre(order);
    double const half = 0.5 * (b - a), mid = 0.5 * (a + b);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return sum * half;
}

/// Sum of Gauss-Legendre panels between consecutive breakpoints.
template <class F>
double integrate_panels(F&& f, std::span<double const> breaks, int order = 20) {
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) sum += integrate(f, breaks[i], breaks[i + 1], order);
    return sum;
}

/// Breakpoints a = x_0 < ... < x_m = b with x_{k+1}/x_k <= ratio (requires 0 < a).
inline std::vector<double> geometric_breaks(double a, double b, double ratio) {
    std::vector<double> out;
    int const m = std::max(1, static_cast<int>(std::ceil(std::log(b / a) / std::log(ratio))));
    out.reserve(m + 1);
    for (int k = 0; k <= m; ++k) out.push_back(a * std::pow(b / a, static_cast<double>(k) / m));
    out.back() = b;
    return out;
}

/// Breakpoints dyadically refined towards the left endpoint: a, a + w 2^{-levels}, ..., a + w/2, b.
inline std::vector<double> graded_breaks(double a, double b, int levels) {
    std::vector<double> out;
    out.push_back(a);
    double const w = b - a;
    for (int k = levels; k >= 1; --k) out.push_back(a + w * std::ldexp(1.0, -k));
    out.push_back(b);
    return out;
}

/// Subdivide every interval of a sorted breakpoint list so no panel is wider than h.
inline std::vector<double> refine_breaks(std::vector<double> const& breaks, double h) {
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        double const a = breaks[i], b = breaks[i + 1];
        int const m = std::max(1, static_cast<int>(std::ceil((b - a) / h)));
        for (int k = 0; k < m; ++k) out.push_back(a + (b - a) * k / m);
    }
    if (!breaks.empty()) out.push_back(breaks.back());
    return out;
}

inline void sort_unique(std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end(), [](double x, double y) { return std::abs(x - y) <= 1e-15 * std::abs(x); }), v.end());
}

/// Double-exponential (tanh-sinh) quadrature on (a, b); robust for integrable endpoint singularities.
/// f receives (x, x - a, b - x) so endpoint distances are available without cancellation.
template <class F>
double integrate_tanh_sinh(F&& f, double a, double b, int level) {
    using std::numbers::pi;
    double const h = std::ldexp(1.0, -level);
    double const half = 0.5 * (b - a);
    double sum = 0.0;
    for (int k = -static_cast<int>(std::ceil(4.0 / h)); k <= static_cast<int>(std::ceil(4.0 / h)); ++k) {
        double const t = k * h;
        double const u = 0.5 * pi * std::sinh(t);
        double const cu = std::cosh(u);
        double const w = 0.5 * pi * std::cosh(t) / (cu * cu);
        if (w < 1e-300) continue;
        // distances of the node to the two ends in units of (b-a)/2
        double const to_right = 2.0 / (std::exp(2.0 * u) + 1.0);
        double const to_left = 2.0 / (std::exp(-2.0 * u) + 1.0);
        double const da = half * to_left, db = half * to_right;
        if (da <= 0.0 || db <= 0.0) continue;
        double const x = (to_left < to_right) ? a + da : b - db;
        sum += w * f(x, da, db);
    }
    return sum * h * half;
}

} // namespace fracheat::quad
