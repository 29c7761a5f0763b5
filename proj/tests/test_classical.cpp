#include <cmath>

#include <gtest/gtest.h>

#include "mwell/classical.hpp"

using namespace mwell;

namespace {

const double es = qo_saddle_energy(18.0);
const double peripheral_x = (1 + std::sqrt(1 - 16.0 / 18.0)) / 8;
// h = 1e-3 characteristic periods; the central-well period is 2 pi sqrt(W)
const double qo_step = 2e-3 * std::numbers::pi * std::sqrt(18.0);

PhasePoint on_shell(const Potential2D& u, double x, double y, double e, double angle)
{
    const double p = std::sqrt(2 * (e - u(x, y)));
    return {x, y, p * std::cos(angle), p * std::sin(angle)};
}

} // namespace

TEST(Integrate, HarmonicCircleOverMillionSteps)
{
    const auto u = ho_2d(1.0, 1.0);
    IntegrateOptions opt;
    opt.sample_every = 1000;
    const auto tr = integrate(u, {1.0, 0.0, 0.0, 1.0}, 1e-3, 1000.0, opt);
    EXPECT_EQ(tr.steps, 1000000u);
    EXPECT_LT(tr.max_energy_error, 1e-12);
    for (const auto& s : tr.samples)
        EXPECT_NEAR(std::hypot(s.x, s.y), 1.0, 1e-10);
}

TEST(Integrate, FourthOrderConvergence)
{
    const auto u = d5();
    const PhasePoint s0 = on_shell(u, -1.2, 0.1, -0.3, 0.7);
    auto endpoint = [&](double h) { return integrate(u, s0, h, 4.0, {0}).samples.back(); };
    const auto ref = endpoint(1e-4);
    const auto a = endpoint(0.02), b = endpoint(0.01);
    const double ea = std::hypot(a.x - ref.x, a.y - ref.y), eb = std::hypot(b.x - ref.x, b.y - ref.y);
    EXPECT_NEAR(std::log2(ea / eb), 4.0, 0.3);
}

TEST(Integrate, QoEnergyDriftOverMillionSteps)
{
    const auto u = qo(18.0);
    IntegrateOptions opt;
    opt.sample_every = 100;
    opt.energy_scale = es;
    const auto tr = integrate(u, on_shell(u, 0.02, 0.01, 0.75 * es, 0.3), qo_step, 1e6 * qo_step, opt);
    EXPECT_LT(tr.max_energy_error, 1e-8);
}

TEST(Integrate, TimeReversible)
{
    const auto u = qo(18.0);
    const auto s0 = on_shell(u, peripheral_x + 0.01, 0.005, 0.3 * es, 1.1);
    const auto fwd = integrate(u, s0, qo_step, 1e4 * qo_step, {0});
    auto s1 = fwd.samples.back();
    s1.px = -s1.px;
    s1.py = -s1.py;
    const auto back = integrate(u, s1, qo_step, 1e4 * qo_step, {0}).samples.back();
    EXPECT_NEAR(back.x, s0.x, 1e-9);
    EXPECT_NEAR(back.y, s0.y, 1e-9);
    EXPECT_NEAR(-back.px, s0.px, 1e-9);
    EXPECT_NEAR(-back.py, s0.py, 1e-9);
}

TEST(Integrate, PeripheralOrbitBelowSaddleStaysInWell)
{
    const auto u = qo(18.0);
    const double e = 0.3 * es;
    const auto region = well_region(u, e, peripheral_x, 0.0, default_search_box(u));
    const auto shell = sample_energy_shell(u, region, e, 4, 3);
    IntegrateOptions opt;
    opt.sample_every = 10;
    opt.energy_scale = es;
    for (const auto& s0 : shell) {
        const auto tr = integrate(u, s0, qo_step, 2e4, opt);
        EXPECT_FALSE(tr.escaped);
        EXPECT_LT(tr.max_energy_error, 1e-8);
        for (const auto& s : tr.samples)
            ASSERT_TRUE(region.contains(s.x, s.y));
    }
}

TEST(Integrate, D5AboveSaddlesVisitsBothWells)
{
    const auto u = d5();
    const auto tr = integrate(u, on_shell(u, -std::sqrt(2.0), 0.0, 0.5, 0.4), 0.01, 200.0, {});
    bool left = false, right = false;
    for (const auto& s : tr.samples) {
        left |= s.x < -1.0;
        right |= s.x > 1.0;
    }
    EXPECT_TRUE(left && right);
}

TEST(Integrate, EscapeIsFlagged)
{
    const auto tr = integrate(d5(), {0.0, 0.0, -3.0, 0.0}, 0.01, 100.0, {.escape_radius = 2.5});
    EXPECT_TRUE(tr.escaped);
    EXPECT_LT(tr.steps, 10000u);
}

TEST(Section, HarmonicCrossingsLieOnEllipse)
{
    for (double wy : {1.0, std::sqrt(2.0)}) {
        const auto u = ho_2d(1.0, wy);
        const PhasePoint s0{0.5, 0.0, 0.3, 0.8};
        const double ex = 0.5 * (s0.px * s0.px + s0.x * s0.x);
        const auto tr = integrate(u, s0, 0.01, 500.0, {});
        const auto rec = poincare_section(u, tr, Section::y_equals(0.0), 7);
        ASSERT_GT(rec.points.size(), 50u);
        EXPECT_EQ(rec.trajectory_id, 7u);
        for (const auto& p : rec.points) {
            EXPECT_NEAR(0.5 * (p.s * p.s + p.ps * p.ps), ex, 1e-8);
            EXPECT_LE(p.residual, 1e-10);
        }
    }
}

TEST(Section, NoCrossingsGivesDiagnostic)
{
    const auto u = ho_2d(1.0, 1.0);
    const auto tr = integrate(u, {1.0, 0.0, 0.0, 0.5}, 0.01, 50.0, {});
    const auto rec = poincare_section(u, tr, Section::x_equals(5.0));
    EXPECT_TRUE(rec.points.empty());
    EXPECT_FALSE(rec.diagnostic.empty());
}

TEST(Regularity, HarmonicExponentIsTiny)
{
    const auto u = ho_2d(1.0, 1.3);
    IntegrateOptions opt;
    opt.sample_every = 0;
    const auto tr = integrate(u, {0.7, -0.2, 0.1, 0.4}, 0.05, 5000.0, opt);
    EXPECT_LT(regularity_estimate(u, tr), 1e-4);
}

TEST(Regularity, NeedsLongTrajectory)
{
    const auto u = ho_2d(1.0, 1.0);
    const auto tr = integrate(u, {1, 0, 0, 1}, 0.01, 10.0, {});
    EXPECT_THROW(regularity_estimate(u, tr), Error);
}

TEST(Ensemble, WellRegionsSeparateBelowSaddle)
{
    const auto u = qo(18.0);
    const auto box = default_search_box(u);
    const auto low = well_region(u, 0.75 * es, 0.0, 0.0, box);
    EXPECT_TRUE(low.contains(0.0, 0.0));
    EXPECT_FALSE(low.contains(peripheral_x, 0.0));
    const auto high = well_region(u, 1.1 * es, 0.0, 0.0, box);
    EXPECT_TRUE(high.contains(peripheral_x, 0.0));
}

TEST(Ensemble, ShellSamplesAreOnShellAndReproducible)
{
    const auto u = qo(18.0);
    const double e = 0.75 * es;
    const auto region = well_region(u, e, 0.0, 0.0, default_search_box(u));
    const auto a = sample_energy_shell(u, region, e, 32, 42);
    const auto b = sample_energy_shell(u, region, e, 32, 42);
    ASSERT_EQ(a.size(), 32u);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_NEAR(hamiltonian(u, a[i]), e, 1e-15);
        EXPECT_TRUE(region.contains(a[i].x, a[i].y));
        EXPECT_EQ(a[i].x, b[i].x);
        EXPECT_EQ(a[i].py, b[i].py);
    }
}

TEST(Ensemble, Median)
{
    EXPECT_EQ(median_of({3, 1, 2}), 2.0);
    EXPECT_EQ(median_of({4, 1, 2, 3}), 2.5);
    EXPECT_THROW(median_of({}), Error);
}
