#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "fracheat/solver.hpp"

using namespace fracheat;

namespace {

RadialFunction gaussian(double amp) {
    return {[amp](double r) { return amp * std::exp(-r * r); }, std::numeric_limits<double>::infinity(), 1.0};
}

SolverConfig coarse(double p, double lambda = 0.5) {
    SolverConfig c;
    c.params = {3, 0.5, lambda, p};
    c.grid = RadialGeometry{1e-2, 1e3, 161};
    c.dt_initial = 0.02;
    return c;
}

} // namespace

TEST(BlowupFit, RecoversExactBlowupTime) {
    double const p = 1.5, T = 2.75;
    std::vector<double> t, Y;
    for (int k = 0; k < 200; ++k) {
        t.push_back(T * (1 - std::pow(0.97, k)));
        Y.push_back(std::pow(3.0 * (T - t.back()), -1 / (p - 1)));
    }
    auto const fit = fit_blowup_tail(t, Y, p);
    EXPECT_NEAR(fit.t_star, T, 1e-9);
    EXPECT_LT(fit.residual, 1e-10);
    EXPECT_NEAR(fit.slope, -3.0, 1e-8);
}

TEST(BlowupFit, ClusteredTimesKeepPrecision) {
    // samples a few ulps of t apart near t = 0.156, as when the step size collapses
    double const p = 2.0, T = 0.15595796161;
    std::vector<double> t, Y;
    for (int k = 0; k < 100; ++k) {
        t.push_back(T - 1e-6 * std::pow(0.85, k));
        Y.push_back(1.0 / (T - t.back()));
    }
    auto const fit = fit_blowup_tail(t, Y, p);
    EXPECT_GT(fit.t_star, t.back());
    EXPECT_NEAR(fit.t_star, T, 1e-15);
}

TEST(BlowupFit, Refusals) {
    std::vector<double> t = {0, 1, 2, 3, 4, 5, 6, 7};
    std::vector<double> flat(8, 1.0);
    EXPECT_THROW(fit_blowup_tail(t, flat, 2.0), ConvergenceError);
    std::vector<double> decay = {8, 7, 6, 5, 4, 3, 2, 1};
    EXPECT_THROW(fit_blowup_tail(t, decay, 2.0), ConvergenceError);
    EXPECT_THROW(fit_blowup_tail(std::vector<double>{0, 1}, std::vector<double>{1, 2}, 2.0), DomainError);
    EXPECT_THROW(fit_blowup_tail(t, flat, 1.0), DomainError);
}

TEST(Series, Interpolation) {
    std::vector<double> t = {0, 1, 3}, y = {0, 2, 6};
    EXPECT_DOUBLE_EQ(interpolate_series(t, y, 2.0), 4.0);
    EXPECT_DOUBLE_EQ(interpolate_series(t, y, -1.0), 0.0);
    EXPECT_DOUBLE_EQ(interpolate_series(t, y, 9.0), 6.0);
}

TEST(Solver, ConfigValidation) {
    SolverConfig c = coarse(2.0);
    c.params.lambda = 10.0;
    EXPECT_THROW(c.validate(), DomainError);
    c = coarse(2.0);
    c.grid = UniformGrid{3, 8.0, 16};
    EXPECT_THROW(c.validate(), DomainError);   // ground-state formulation on the box
    c.formulation = Formulation::Direct;
    EXPECT_NO_THROW(c.validate());
    c = coarse(1.0);
    EXPECT_THROW(c.validate(), DomainError);
    c = coarse(2.0);
    c.dt_safety = 1.5;
    EXPECT_THROW(c.validate(), DomainError);
}

TEST(Solver, RejectsNegativeDatum) {
    RadialFunction neg{[](double r) { return -std::exp(-r * r); }, std::numeric_limits<double>::infinity(), 1.0};
    EXPECT_THROW(run(neg, coarse(2.0)), DomainError);
}

TEST(Solver, ZeroDatumSurvives) {
    RadialFunction zero{[](double) { return 0.0; }, std::numeric_limits<double>::infinity(), 1.0};
    auto c = coarse(2.0);
    c.t_max = 1.0;
    auto const rep = run(zero, c);
    EXPECT_EQ(rep.verdict.kind, VerdictKind::Survived);
    EXPECT_EQ(rep.weighted_mass_series.back(), 0.0);
}

TEST(Solver, SubFujitaBlowsUp) {
    auto c = coarse(1.2);
    c.t_max = 1e4;
    c.dt_initial = 0.5;
    auto const rep = run(gaussian(1.0), c);
    ASSERT_EQ(rep.verdict.kind, VerdictKind::BlewUp) << rep.verdict.reason;
    EXPECT_TRUE(std::isfinite(rep.verdict.t_star));
    EXPECT_GT(rep.verdict.t_star, rep.verdict.t_end);
    EXPECT_LT(rep.verdict.fit_residual, 0.05);
}

TEST(Solver, EnergyNonIncreasing) {
    auto c = coarse(1.2);
    c.t_max = 1e4;
    c.dt_initial = 0.5;
    auto const rep = run(gaussian(1.0), c);
    for (std::size_t i = 1; i < rep.energy_series.size(); ++i)
        ASSERT_LE(rep.energy_series[i], rep.energy_series[i - 1] + 1e-9 * std::abs(rep.energy_series[i - 1]));
}

TEST(Solver, LinearFlowKeepsWeightedMass) {
    // |x|^{-mu} is stationary for the adjoint flow, so the weighted mass is conserved without reaction
    auto c = coarse(2.0);
    c.reaction = false;
    c.t_max = 2.0;
    auto const rep = run(gaussian(1.0), c);
    EXPECT_EQ(rep.verdict.kind, VerdictKind::Survived);
    EXPECT_NEAR(rep.weighted_mass_series.back() / rep.weighted_mass_series.front(), 1.0, 0.05);
}

TEST(Solver, FormulationsAgree) {
    auto c = coarse(1.2);
    c.t_max = 2.0;
    c.potential_epsilon = 1e-2;
    auto const gs = run(gaussian(1.0), c);
    c.formulation = Formulation::Direct;
    auto const direct = run(gaussian(1.0), c);
    for (double t : {0.5, 1.0, 2.0}) {
        double const a = interpolate_series(gs.times, gs.weighted_mass_series, t);
        double const b = interpolate_series(direct.times, direct.weighted_mass_series, t);
        EXPECT_NEAR(a / b, 1.0, 0.1) << t;
    }
}

TEST(Solver, Snapshots) {
    auto c = coarse(2.0);
    c.t_max = 1.0;
    c.snapshot_times = {0.0, 0.5, 1.0};
    auto const rep = run(gaussian(0.1), c);
    ASSERT_EQ(rep.snapshots.size(), 3u);
    EXPECT_NEAR(rep.snapshots[1].t, 0.5, 1e-9);
    EXPECT_EQ(rep.snapshots[0].r.size(), rep.snapshots[0].u.size());
    EXPECT_NEAR(rep.snapshots[0].u[50], 0.1 * std::exp(-rep.snapshots[0].r[50] * rep.snapshots[0].r[50]), 1e-12);
}

TEST(Solver, BoxHeatConservesMass) {
    UniformGrid const g{2, 8.0, 32};
    Field u0{g, std::vector<double>(g.size())};
    for (std::size_t i = 0; i < g.size(); ++i) u0.values[i] = std::exp(-g.radius(i) * g.radius(i));
    SolverConfig c;
    c.params = {2, 0.5, 0.0, 2.0};
    c.grid = g;
    c.formulation = Formulation::Direct;
    c.reaction = false;
    c.t_max = 1.0;
    c.dt_initial = 0.1;
    auto const rep = run(u0, c);
    EXPECT_EQ(rep.verdict.kind, VerdictKind::Survived);
    EXPECT_NEAR(rep.weighted_mass_series.back() / rep.weighted_mass_series.front(), 1.0, 1e-12);
}

TEST(Comparison, DetectsViolation) {
    Snapshot snap{1.0, {0.5, 1.0}, {1.0, 2.0}};
    std::vector<Snapshot> snaps = {snap};
    EXPECT_TRUE(compare_supersolution(snaps, [](double, double) { return 3.0; }));
    auto const d = compare_supersolution_detail(snaps, [](double r, double) { return r < 0.75 ? 3.0 : 1.0; });
    EXPECT_FALSE(d.holds);
    EXPECT_DOUBLE_EQ(d.r, 1.0);
    EXPECT_DOUBLE_EQ(d.worst_excess, 1.0);
}

TEST(Comparison, OrderedDataStayOrdered) {
    auto c = coarse(1.2);
    c.t_max = 3.0;
    c.snapshot_times = {1.0, 2.0, 3.0};
    auto const lo = run(gaussian(0.5), c);
    RadialFunction hi{[](double r) { return 0.6 * std::exp(-0.5 * r * r); }, std::numeric_limits<double>::infinity(), 1.0};
    auto const up = run(hi, c);
    ASSERT_EQ(lo.snapshots.size(), up.snapshots.size());
    for (std::size_t k = 0; k < lo.snapshots.size(); ++k)
        for (std::size_t i = 0; i < lo.snapshots[k].u.size(); ++i) ASSERT_LE(lo.snapshots[k].u[i], up.snapshots[k].u[i] * (1 + 1e-9));
}
