#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "mwell/susy.hpp"
#include "oracles/oracle_values.hpp"

using namespace mwell;

namespace {

double potential_at(const SusyEvaluator& ev, double xi) { return ev.potential(std::span<const double>(&xi, 1)).front(); }

SusyEvaluator double_well(double lambda)
{
    return SusyEvaluator(SusyParams::double_well(-3.0, lambda), lambda == 1.0 ? SusyFamily::Hmm : SusyFamily::Hpp);
}

double max_overlap_error(const SolvableModel& m)
{
    double worst = 0.0;
    for (std::size_t a = 0; a < m.states.size(); ++a)
        for (std::size_t b = 0; b <= a; ++b) {
            const double ip = std::abs(inner_product(m.states[a], m.states[b]));
            worst = std::max(worst, std::abs(ip - (a == b ? 1.0 : 0.0)));
        }
    return worst;
}

} // namespace

TEST(SusyDoubleWell, PotentialMatchesMpmath)
{
    for (const auto& o : oracle::double_well_u) {
        const auto ev = double_well(o.a);
        EXPECT_NEAR(potential_at(ev, o.b), o.value, 1e-9 * std::max(1.0, std::abs(o.value))) << o.a << ' ' << o.b;
    }
}

TEST(SusyTripleWell, PotentialMatchesMpmath)
{
    for (const auto& o : oracle::triple_well_u) {
        const SusyEvaluator ev(SusyParams::triple_well(-0.02, -1.0, o.a, 1.0), SusyFamily::triple_Hmm);
        EXPECT_NEAR(potential_at(ev, o.b), o.value, 1e-9 * std::max(1.0, std::abs(o.value))) << o.a << ' ' << o.b;
    }
}

TEST(SusyDoubleWell, ZeroModeMatchesMpmath)
{
    for (const auto& o : oracle::zero_mode) {
        const auto ev = double_well(o.a);
        const double xi = o.b;
        const double v = ev.state(0, std::span<const double>(&xi, 1)).front();
        EXPECT_NEAR(v, o.value, 1e-9) << o.a << ' ' << o.b;
    }
}

TEST(SusyDoubleWell, SuperpotentialValueAndLimits)
{
    const auto ev = double_well(0.5);
    const std::vector<double> xi{-20.0, 0.0, 20.0};
    const auto w = ev.superpotential(xi);
    EXPECT_NEAR(w[1], oracle::superpotential_at_0, 1e-12);
    EXPECT_NEAR(w[0], 0.0, 1e-12);
    EXPECT_NEAR(w[2], -0.5 * std::log(0.5), 1e-12);
}

TEST(SusyDoubleWell, SymmetricMemberCoincidesWithLambdaOneHpp)
{
    const SusyEvaluator a(SusyParams::double_well(-2.5, 1.0), SusyFamily::Hmm);
    const SusyEvaluator b(SusyParams::double_well(-2.5, 1.0), SusyFamily::Hpp);
    std::vector<double> xi;
    for (double x = -8; x <= 8; x += 0.37)
        xi.push_back(x);
    const auto ua = a.potential(xi), ub = b.potential(xi);
    for (std::size_t j = 0; j < xi.size(); ++j)
        EXPECT_LT(std::abs(ua[j] - ub[j]), 1e-12);
}

TEST(SusyDoubleWell, MirrorMapsLambdaToInverse)
{
    const auto a = double_well(0.2), b = double_well(5.0), sym = double_well(1.0);
    for (double x = -6; x <= 6; x += 0.5) {
        EXPECT_NEAR(potential_at(a, -x), potential_at(b, x), 1e-10);
        EXPECT_NEAR(potential_at(sym, -x), potential_at(sym, x), 1e-10);
    }
}

TEST(SusyDoubleWell, DeltaFunctionLimits)
{
    const auto ev = double_well(1.0);
    const std::vector<double> xi{-15.0, 0.0, 15.0};
    const auto d = ev.delta_function(xi);
    EXPECT_NEAR(d[0], 1.0, 1e-12);
    EXPECT_NEAR(d[1], 0.0, 1e-14);
    EXPECT_NEAR(d[2], -1.0, 1e-12);
}

TEST(SusyDoubleWell, StatesAreOrthonormalWithOrderedNodes)
{
    for (double lambda : {1.0, 0.5, 0.05}) {
        const auto m = build_double_well(SusyParams::double_well(-3.0, lambda), default_susy_grid(), 10);
        ASSERT_EQ(m.levels.size(), 11u);
        EXPECT_DOUBLE_EQ(m.levels[0], -2.5);
        EXPECT_LT(max_overlap_error(m), 1e-9);
        for (std::size_t k = 0; k < m.states.size(); ++k) {
            EXPECT_EQ(count_sign_changes(m.states[k]), static_cast<int>(k)) << lambda << ' ' << k;
            EXPECT_NEAR(m.measured_norms[k], 1.0, 1e-9);
        }
    }
}

TEST(SusyDoubleWell, StatesSolveSchroedingerEquation)
{
    const auto m = build_double_well(SusyParams::double_well(-3.0, 0.5), default_susy_grid(), 8);
    for (std::size_t k = 0; k < m.states.size(); ++k)
        EXPECT_LT(residual_norm(m.states[k], m.potential, m.levels[k]), 1e-6) << k;
}

TEST(SusyDoubleWell, ShiftedLevelsStartAtZero)
{
    const auto m = build_double_well(SusyParams::double_well(-3.0, 1.0, 2.0), default_susy_grid(), 3);
    const auto s = m.shifted_levels();
    EXPECT_DOUBLE_EQ(s[0], 0.0);
    EXPECT_DOUBLE_EQ(s[1], 3.0);
    EXPECT_DOUBLE_EQ(m.levels_absolute()[1], 1.0);
}

TEST(SusyTripleWell, StatesOrthonormalAndSolveEquation)
{
    for (double lambda : {1.0, 0.3}) {
        const auto m = build_triple_well(SusyParams::triple_well(-3.0, -3.02, lambda, 1.0), default_susy_grid(), 8);
        ASSERT_EQ(m.levels.size(), 10u);
        EXPECT_DOUBLE_EQ(m.levels[0], -2.52);
        EXPECT_LT(max_overlap_error(m), 1e-8);
        for (std::size_t k = 0; k < m.states.size(); ++k) {
            EXPECT_EQ(count_sign_changes(m.states[k]), static_cast<int>(k));
            EXPECT_LT(residual_norm(m.states[k], m.potential, m.levels[k]), 1e-6) << k;
        }
    }
}

TEST(SusyTripleWell, OnlyDerivedCoefficientSolvesEquation)
{
    const SusyParams p = SusyParams::triple_well(-0.02, -1.0, 1.0, 1.0);
    const SusyEvaluator ev(p, SusyFamily::triple_Hmm);
    const auto g = default_susy_grid();
    const auto xi = g.nodes();
    const auto u = ev.potential(xi);
    for (std::size_t level = 2; level < 5; ++level) {
        const double e = ev.levels(5)[level];
        const auto good = ev.state(level, xi, TripleCoefficient::derived);
        const auto bad = ev.state(level, xi, TripleCoefficient::printed);
        const auto rg = residual_norm(from_real(g, std::span<const double>(good)), u, e);
        const auto rb = residual_norm(from_real(g, std::span<const double>(bad)), u, e);
        EXPECT_LT(rg, 1e-6);
        EXPECT_GT(rb, 1e-2);
    }
}

TEST(SusyTripleWell, ChiSumsToWronskianOverPhi)
{
    const SusyEvaluator ev(SusyParams::triple_well(-0.5, -1.5, 1.0, 0.7), SusyFamily::triple_Hpp);
    const std::vector<double> xi{-2.0, 0.3, 1.7};
    const auto [c1, c2] = ev.chi(xi);
    const auto g = ev.u(xi);
    const auto f = ev.phi(xi);
    for (std::size_t j = 0; j < xi.size(); ++j) {
        const double uu = std::exp(g[j].log_scale) * g[j].value;
        const double du = std::exp(g[j].log_scale) * g[j].deriv;
        const double l = f[j].deriv / f[j].value;
        EXPECT_NEAR(c1[j] + c2[j], uu * l - du, 1e-10 * std::max(1.0, std::abs(uu * l - du)));
    }
}

TEST(Susy, WronskianQuotientIntegratesInClosedForm)
{
    // d/dt [y1 / (A1 y1 + A2 y2)] = -A2 W[y1, y2] / (A1 y1 + A2 y2)^2
    const double nu = -1.7, a1 = 1.3, a2 = 0.6;
    const CylinderFunction d(nu);
    const double s2 = std::sqrt(2.0);
    auto y1 = [&](double t) { return d(s2 * t); };
    auto y2 = [&](double t) { return d(-s2 * t); };
    const double w = wronskian_pair(nu); // already W[y1, y2] in xi
    const double lo = -3.0, hi = 3.0;
    const int n = 2000;
    const double h = (hi - lo) / n;
    double integral = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double t = lo + i * h;
        const double den = a1 * y1(t) + a2 * y2(t);
        const double wt = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        integral += wt * w / (den * den);
    }
    integral *= h / 3.0;
    auto prim = [&](double t) { return y1(t) / (a1 * y1(t) + a2 * y2(t)); };
    EXPECT_NEAR(integral, -(prim(hi) - prim(lo)) / a2, 1e-8);
}

TEST(Susy, ConstructionErrors)
{
    EXPECT_THROW(SusyEvaluator(SusyParams::double_well(0.2, 1.0), SusyFamily::Hpp), Error);
    EXPECT_THROW(SusyEvaluator(SusyParams::double_well(-1.0, -1.0), SusyFamily::Hpp), Error);
    EXPECT_THROW(SusyEvaluator(SusyParams::double_well(-1.0, 0.5), SusyFamily::Hmm), Error);
    EXPECT_THROW(SusyEvaluator(SusyParams::double_well(-1.0, 1.0), SusyFamily::triple_Hmm), Error);
    try {
        SusyEvaluator(SusyParams::triple_well(-1.0, -1.0 - 1e-10, 1.0, 1.0), SusyFamily::triple_Hmm);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::construction);
    }
    // grid too small to hold the states
    try {
        build_double_well(SusyParams::double_well(-3.0, 1.0), make_grid(-2.0, 2.0, 8), 4);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::normalization);
    }
}

TEST(Susy, DescribeListsLevels)
{
    const auto m = build_double_well(SusyParams::double_well(-3.0, 1.0), default_susy_grid(), 2);
    const auto s = describe(m);
    EXPECT_NE(s.find("\"family\": \"Hmm\""), std::string::npos);
    EXPECT_NE(s.find("\"levels\": [-2.5, 0.5, 1.5]"), std::string::npos);
}
