#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fracheat/spectral.hpp"
#include "oracles.hpp"

using namespace fracheat;

namespace {
Field sample(UniformGrid const& g, auto&& f) {
    Field out{g, std::vector<double>(g.size())};
    for (std::size_t i = 0; i < g.size(); ++i) {
        std::size_t rest = i;
        double x[3] = {0, 0, 0};
        for (int d = g.N - 1; d >= 0; --d) {
            x[d] = g.coordinate(static_cast<int>(rest % g.n));
            rest /= g.n;
        }
        out.values[i] = f(x);
    }
    return out;
}
} // namespace

TEST(Spectral, PlaneWaveIsEigenfunction) {
    UniformGrid const g{3, 4.0, 16};
    double const k1 = std::numbers::pi / g.L, k2 = 2 * std::numbers::pi / g.L, k3 = 3 * std::numbers::pi / g.L;
    auto const u = sample(g, [&](double const* x) { return std::cos(k1 * x[0] + k2 * x[1] - k3 * x[2]); });
    double const s = 0.35, lam = std::pow(k1 * k1 + k2 * k2 + k3 * k3, s);
    auto const lap = frac_laplacian_spectral(u, s);
    for (std::size_t i = 0; i < g.size(); ++i) ASSERT_NEAR(lap.values[i], lam * u.values[i], 1e-12);
    Field v = u;
    heat_propagate(g, v.values, s, 0.7);
    for (std::size_t i = 0; i < g.size(); ++i) ASSERT_NEAR(v.values[i], std::exp(-0.7 * lam) * u.values[i], 1e-13);
}

TEST(Spectral, ConstantsAreAnnihilated) {
    UniformGrid const g{2, 1.0, 8};
    Field const one{g, std::vector<double>(g.size(), 3.0)};
    for (double v : frac_laplacian_spectral(one, 0.5).values) ASSERT_NEAR(v, 0.0, 1e-14);
}

TEST(Spectral, HeatPreservesMass) {
    UniformGrid const g{2, 8.0, 64};
    auto u = sample(g, [](double const* x) { return std::exp(-x[0] * x[0] - 2 * x[1] * x[1]); });
    double m0 = 0.0, m1 = 0.0;
    for (double v : u.values) m0 += v;
    heat_propagate(g, u.values, 0.25, 3.0);
    for (double v : u.values) m1 += v;
    EXPECT_NEAR(m1 / m0, 1.0, 1e-13);
}

TEST(Spectral, GaussianAtLatticePoints) {
    // N = 1 against the Kummer closed form; the box is wide so periodic images are negligible
    UniformGrid const g{1, 512.0, 1 << 14};
    auto const u = sample(g, [](double const* x) { return std::exp(-x[0] * x[0]); });
    for (double s : {0.25, 0.5, 0.75}) {
        auto const lap = frac_laplacian_spectral(u, s);
        for (double r : {0.0, 1.0}) {
            auto const j = static_cast<std::size_t>(std::lround((r + g.L) / g.dx()));
            ASSERT_NEAR(g.coordinate(static_cast<int>(j)), r, 1e-12);
            EXPECT_NEAR(lap.values[j], oracle::frac_laplacian_gaussian(1, s, r), 1e-4) << s << " " << r;
        }
    }
}

TEST(Spectral, GridValidation) {
    EXPECT_THROW((UniformGrid{4, 1.0, 8}.validate()), DomainError);
    EXPECT_THROW((UniformGrid{1, 1.0, 12}.validate()), DomainError);
    EXPECT_THROW((UniformGrid{1, 0.0, 16}.validate()), DomainError);
    UniformGrid const g{1, 1.0, 16};
    std::vector<double> wrong(8, 0.0);
    EXPECT_THROW(heat_propagate(g, wrong, 0.5, 1.0), DomainError);
    Field bad{g, std::vector<double>(16, 0.0)};
    bad.values[3] = std::nan("");
    EXPECT_THROW(frac_laplacian_spectral(bad, 0.5), DomainError);
}

TEST(Spectral, RadiusOfIndex) {
    UniformGrid const g{3, 2.0, 8};
    std::size_t const centre = (4 * 8 + 4) * 8 + 4;
    EXPECT_DOUBLE_EQ(g.radius(centre), 0.0);
    EXPECT_DOUBLE_EQ(g.radius(centre + 1), g.dx());
    EXPECT_DOUBLE_EQ(g.radius(centre + 8 * 8), g.dx());
}
