#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "mwell/potentials.hpp"

using namespace mwell;

TEST(Polynomial, DerivativesMatchFiniteDifferences)
{
    const auto u = qo(18.0);
    const double h = 1e-5;
    for (double x : {-0.2, 0.05, 0.17})
        for (double y : {-0.11, 0.0, 0.23}) {
            const auto g = u.gradient(x, y);
            EXPECT_NEAR(g[0], (u(x + h, y) - u(x - h, y)) / (2 * h), 1e-8);
            EXPECT_NEAR(g[1], (u(x, y + h) - u(x, y - h)) / (2 * h), 1e-8);
            const auto H = u.hessian(x, y);
            EXPECT_NEAR(H[1], (u.gradient(x, y + h)[0] - u.gradient(x, y - h)[0]) / (2 * h), 1e-7);
        }
}

TEST(Potentials, QoMatchesClosedForm)
{
    const double W = 18.0, x = 0.12, y = -0.07;
    const double r2 = x * x + y * y;
    EXPECT_NEAR(qo(W)(x, y), r2 / (2 * W) + x * y * y - x * x * x / 3 + r2 * r2, 1e-16);
}

TEST(Potentials, QoHasFourMinimaAndThreeSaddles)
{
    const auto u = qo(18.0);
    const auto r = find_critical_points(u, default_search_box(u));
    EXPECT_EQ(r.count(CriticalKind::minimum), 4u);
    EXPECT_EQ(r.count(CriticalKind::saddle), 3u);
    const double es = qo_saddle_energy(18.0);
    for (const auto& p : r.points)
        if (p.kind == CriticalKind::saddle)
            EXPECT_NEAR(p.energy, es, 1e-12);
}

TEST(Potentials, QoBelowSixteenHasSingleMinimum)
{
    const auto u = qo(13.0);
    const auto r = find_critical_points(u, default_search_box(u));
    EXPECT_EQ(r.count(CriticalKind::minimum), 1u);
    EXPECT_EQ(r.count(CriticalKind::saddle), 0u);
    EXPECT_THROW(qo_saddle_energy(13.0), Error);
}

TEST(Potentials, QoThreefoldSymmetry)
{
    const auto u = qo(18.0);
    const double c = std::cos(2 * std::numbers::pi / 3), s = std::sin(2 * std::numbers::pi / 3);
    for (double x : {0.05, 0.2})
        for (double y : {-0.1, 0.13})
            EXPECT_NEAR(u(x, y), u(c * x - s * y, s * x + c * y), 1e-15);
}

TEST(Potentials, D5CriticalPoints)
{
    const auto u = d5();
    const auto r = find_critical_points(u, default_search_box(u));
    // two minima at (+-sqrt 2, 0), saddle at the origin
    EXPECT_EQ(r.count(CriticalKind::minimum), 2u);
    EXPECT_EQ(r.count(CriticalKind::saddle), 3u);
    for (const auto& p : r.points)
        if (p.kind == CriticalKind::minimum) {
            EXPECT_NEAR(std::abs(p.x), std::sqrt(2.0), 1e-10);
            EXPECT_NEAR(p.energy, -1.0, 1e-12);
        }
    EXPECT_NEAR(u(0.3, -0.4), eval_d5(0.3, -0.4), 1e-15);
}

TEST(Potentials, D5IsEvenInY)
{
    const auto u = d5(1.3, 0.7);
    for (double x : {-1.7, 0.2, 2.4})
        for (double y : {0.3, 1.9})
            EXPECT_EQ(u(x, y), u(x, -y));
}

TEST(Potentials, D5SaddlesDegenerateUnderMaxwellCondition)
{
    const double a = 3.0, b = a * a / 4.0;
    const auto u = d5(a, b);
    const auto r = find_critical_points(u, {-5, 5, -5, 5}, 31);
    std::vector<double> es;
    for (const auto& p : r.points)
        if (p.kind == CriticalKind::saddle)
            es.push_back(p.energy);
    ASSERT_EQ(es.size(), 3u);
    for (double e : es)
        EXPECT_NEAR(e, es.front(), 1e-10);
}

TEST(Potentials, QoSymmetryAtRandomPoints)
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> d(-0.3, 0.3);
    const auto u = qo(18.0);
    const double c = std::cos(2 * std::numbers::pi / 3), s = std::sin(2 * std::numbers::pi / 3);
    for (int i = 0; i < 200; ++i) {
        const double x = d(rng), y = d(rng);
        EXPECT_LT(std::abs(u(c * x - s * y, s * x + c * y) - u(x, y)), 1e-12);
    }
}

TEST(Polynomial, GradientAtRandomPoints)
{
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> d(-2.0, 2.0);
    const auto u = d5(1.3, 0.7);
    const double h = 1e-6;
    for (int i = 0; i < 100; ++i) {
        const double x = d(rng), y = d(rng);
        const auto g = u.gradient(x, y);
        const double fx = (u(x + h, y) - u(x - h, y)) / (2 * h);
        const double fy = (u(x, y + h) - u(x, y - h)) / (2 * h);
        EXPECT_LT(std::abs(g[0] - fx), 1e-6 * std::max(1.0, std::abs(fx)));
        EXPECT_LT(std::abs(g[1] - fy), 1e-6 * std::max(1.0, std::abs(fy)));
    }
}

TEST(Potentials, HarmonicHasSingleMinimum)
{
    const auto u = ho_2d(1.0, 2.0);
    const auto r = find_critical_points(u, default_search_box(u));
    ASSERT_EQ(r.points.size(), 1u);
    EXPECT_EQ(r.points[0].kind, CriticalKind::minimum);
    EXPECT_NEAR(r.points[0].hessian_eigenvalues[0], 1.0, 1e-12);
    EXPECT_NEAR(r.points[0].hessian_eigenvalues[1], 4.0, 1e-12);
}

TEST(Potentials, ScalingMultipliesValueAndDerivatives)
{
    const auto u = qo(18.0);
    const auto v = scaled(u, 7.0);
    EXPECT_NEAR(v(0.1, 0.2), 7.0 * u(0.1, 0.2), 1e-15);
    EXPECT_NEAR(v.gradient(0.1, 0.2)[1], 7.0 * u.gradient(0.1, 0.2)[1], 1e-14);
    EXPECT_NEAR(v.hessian(0.1, 0.2)[2], 7.0 * u.hessian(0.1, 0.2)[2], 1e-13);
}

TEST(Potentials, DomainErrors)
{
    EXPECT_THROW(qo(0.0), Error);
    EXPECT_THROW(ho_1d(-1.0), Error);
    EXPECT_THROW(ho_2d(1.0, 0.0), Error);
}
