#pragma once

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <vector>

#include "errors.hpp"

namespace fracheat {

/// Origin-centred periodic lattice: x_j = -L + j dx, j = 0..n-1, dx = 2L/n, so x_{n/2} = 0.
struct UniformGrid {
    int N = 1;
    double L = 1.0;
    int n = 64;

    double dx() const { return 2 * L / n; }
    std::size_t size() const {
        std::size_t total = 1;
        for (int d = 0; d < N; ++d) total *= static_cast<std::size_t>(n);
        return total;
    }
    double coordinate(int j) const { return -L + j * dx(); }
    double cell_volume() const { return std::pow(dx(), N); }

    void validate() const {
        if (N < 1 || N > 3) throw DomainError("box grids support N = 1, 2, 3");
        if (!(L > 0.0)) throw DomainError("box half-width must be positive");
        if (n < 2 || (n & (n - 1)) != 0) throw DomainError("points per axis must be a power of two");
    }

    /// |x| at the linear index (row-major, last axis fastest).
    double radius(std::size_t idx) const {
        double r2 = 0.0;
        for (int d = 0; d < N; ++d) {
            double const x = coordinate(static_cast<int>(idx % n));
            r2 += x * x;
            idx /= n;
        }
        return std::sqrt(r2);
    }
};

struct Field {
    UniformGrid grid;
    std::vector<double> values;
};

namespace detail {

struct FftwBuffer {
    void operator()(void* p) const { fftw_free(p); }
};

/// r2c / c2r plans for one grid shape. Plans are created under a global lock (FFTW planning is not
/// reentrant); execution through the new-array interface is.
class FftPlans {
public:
    static FftPlans const& get(int N, int n) {
        static std::mutex mutex;
        static std::map<std::pair<int, int>, std::unique_ptr<FftPlans>> cache;
        std::scoped_lock lock(mutex);
        auto& slot = cache[{N, n}];
        if (!slot) slot.reset(new FftPlans(N, n));
        return *slot;
    }

    ~FftPlans() {
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(backward_);
    }

    std::size_t real_size() const { return real_; }
    std::size_t complex_size() const { return complex_; }

    void forward(double* in, fftw_complex* out) const { fftw_execute_dft_r2c(forward_, in, out); }
    void backward(fftw_complex* in, double* out) const { fftw_execute_dft_c2r(backward_, in, out); }

private:
    FftPlans(int N, int n) {
        std::vector<int> dims(N, n);
        real_ = 1;
        for (int d = 0; d < N; ++d) real_ *= n;
        complex_ = real_ / n * (n / 2 + 1);
        auto* r = fftw_alloc_real(real_);
        auto* c = fftw_alloc_complex(complex_);
        forward_ = fftw_plan_dft_r2c(N, dims.data(), r, c, FFTW_ESTIMATE);
        backward_ = fftw_plan_dft_c2r(N, dims.data(), c, r, FFTW_ESTIMATE);
        fftw_free(r);
        fftw_free(c);
    }

    fftw_plan forward_{};
    fftw_plan backward_{};
    std::size_t real_ = 0, complex_ = 0;
};

} // namespace detail

/// Replace values by F^{-1}[ m(|k|) F values ] on the periodic box, k the angular frequency.
template <class Multiplier>
void apply_multiplier(UniformGrid const& grid, std::span<double> values, Multiplier&& m) {
    grid.validate();
    if (values.size() != grid.size()) throw DomainError("field size does not match its grid");
    auto const& plans = detail::FftPlans::get(grid.N, grid.n);
    std::unique_ptr<double, detail::FftwBuffer> real(fftw_alloc_real(plans.real_size()));
    std::unique_ptr<fftw_complex, detail::FftwBuffer> spec(fftw_alloc_complex(plans.complex_size()));
    std::copy(values.begin(), values.end(), real.get());
    plans.forward(real.get(), spec.get());

    int const n = grid.n, half = n / 2 + 1;
    double const dk = std::numbers::pi / grid.L;
    auto freq = [&](int m_idx) { return dk * (m_idx <= n / 2 ? m_idx : m_idx - n); };
    std::size_t const outer = plans.complex_size() / half;
    for (std::size_t o = 0; o < outer; ++o) {
        double k2_outer = 0.0;
        std::size_t rest = o;
        for (int d = 0; d < grid.N - 1; ++d) {
            double const k = freq(static_cast<int>(rest % n));
            k2_outer += k * k;
            rest /= n;
        }
        for (int j = 0; j < half; ++j) {
            double const k = dk * j;
            double const factor = m(std::sqrt(k2_outer + k * k)) / static_cast<double>(plans.real_size());
            auto& z = spec.get()[o * half + j];
            z[0] *= factor;
            z[1] *= factor;
        }
    }
    plans.backward(spec.get(), real.get());
    std::copy(real.get(), real.get() + values.size(), values.begin());
}

/// Discrete multiplier |k|^{2s} on the periodic box; exact on resolvable modes, zero on constants.
inline Field frac_laplacian_spectral(Field const& field, double s) {
    if (!(s > 0.0 && s < 1.0)) throw DomainError("s must lie in (0,1)");
    for (double v : field.values)
        if (!std::isfinite(v)) throw DomainError("field values must be finite");
    Field out = field;
    apply_multiplier(out.grid, out.values, [s](double k) { return k == 0.0 ? 0.0 : std::pow(k, 2 * s); });
    return out;
}

/// Exact fractional heat semigroup exp(-t |k|^{2s}) on the periodic box.
inline void heat_propagate(UniformGrid const& grid, std::span<double> values, double s, double t) {
    apply_multiplier(grid, values, [s, t](double k) { return std::exp(-t * std::pow(k, 2 * s)); });
}

} // namespace fracheat
