#include <cmath>

#include <gtest/gtest.h>

#include "mwell/diag.hpp"
#include "mwell/susy.hpp"

using namespace mwell;

namespace {

// Ground state of p^2/2 + x^4 (published to 15 digits, independently reproduced by grid_eigen_1d below).
constexpr double pure_quartic_e0 = 0.667986259155777;

} // namespace

TEST(Truncation, OneDimensional)
{
    const auto idx = truncation_order(BasisSpec::ho1d(1.0), 3);
    ASSERT_EQ(idx.size(), 3u);
    EXPECT_EQ(idx[2], (BasisIndex{2, 0}));
}

TEST(Truncation, IsotropicOscillatorOrdersByEnergyThenIndex)
{
    const auto idx = truncation_order(BasisSpec::ho_product(1.0, 1.0), 6);
    const std::vector<BasisIndex> want{{0, 0}, {0, 1}, {1, 0}, {0, 2}, {1, 1}, {2, 0}};
    EXPECT_EQ(idx, want);
}

TEST(Truncation, AnisotropicTieGoesToSmallerTuple)
{
    // energies 1.5, 2.5, 3.5, 3.5: (0,1) and (2,0) tie, (0,1) sorts first
    const auto idx = truncation_order(BasisSpec::ho_product(1.0, 2.0), 4);
    const std::vector<BasisIndex> want{{0, 0}, {1, 0}, {0, 1}, {2, 0}};
    EXPECT_EQ(idx, want);
}

TEST(Truncation, SineAxesStartAtOne)
{
    const auto idx = truncation_order(BasisSpec::plane_wave(1.0, 1.0), 3);
    const std::vector<BasisIndex> want{{1, 1}, {1, 2}, {2, 1}};
    EXPECT_EQ(idx, want);
}

TEST(Diag, HarmonicInMatchedBasisIsDiagonal)
{
    const auto h = assemble(ho_1d(1.3), BasisSpec::ho1d(1.3), 20);
    for (std::size_t i = 0; i < 20; ++i)
        for (std::size_t j = 0; j < 20; ++j)
            EXPECT_NEAR(h(i, j), i == j ? 1.3 * (i + 0.5) : 0.0, 1e-12);
}

TEST(Diag, QuarticMatrixHasBandwidthFour)
{
    const auto h = assemble(quartic_1d(), BasisSpec::ho1d(2.0), 60);
    EXPECT_EQ(h.storage, MatrixStorage::banded);
    EXPECT_EQ(h.measured_bandwidth(), 4u);
}

TEST(Diag, BandedAndDenseAgree)
{
    const auto band = assemble(quartic_1d(), BasisSpec::ho1d(2.0), 120);
    AssemblyOptions dense_opt;
    dense_opt.storage = MatrixStorage::dense;
    const auto dense = assemble(quartic_1d(), BasisSpec::ho1d(2.0), 120, dense_opt);
    const auto a = eigen_lowest(band, 20, false).energies();
    const auto b = eigen_lowest(dense, 20, false).energies();
    for (std::size_t k = 0; k < 20; ++k)
        EXPECT_NEAR(a[k], b[k], 1e-10 * std::max(1.0, std::abs(a[k])));
    EXPECT_LT(dense.gram_deviation, 1e-8);
}

TEST(Diag, PureQuarticGroundState)
{
    const auto h = assemble(quartic_1d(), BasisSpec::ho1d(2.0), 150);
    EXPECT_NEAR(eigen_lowest(h, 1, false).levels[0].energy, pure_quartic_e0, 1e-12);
    const auto g = grid_eigen_1d(quartic_1d(), make_grid(-6, 6, 11), 1);
    EXPECT_NEAR(g.levels[0].energy, pure_quartic_e0, 1e-9);
}

TEST(Diag, VariationalLevelsDecreaseWithBasisSize)
{
    const auto u = scaled(qo(18.0), 1e5);
    const auto w = default_basis_frequency(u);
    std::vector<double> prev;
    for (std::size_t n : {100u, 200u, 300u}) {
        const auto e = eigen_lowest(assemble(u, BasisSpec::ho_product(w[0], w[1]), n), 6, false).energies();
        if (!prev.empty())
            for (std::size_t k = 0; k < 6; ++k)
                EXPECT_LE(e[k], prev[k] + 1e-10 * std::abs(prev[k]));
        prev = e;
    }
}

TEST(Diag, TwoDimensionalOscillatorInEachFamily)
{
    const auto u = ho_2d(1.0, 1.0);
    const std::vector<double> exact{1, 2, 2, 3, 3, 3};
    const auto ho = eigen_lowest(assemble(u, BasisSpec::ho_product(1.0, 1.0), 20), 6, false).energies();
    const auto pw = eigen_lowest(assemble(u, BasisSpec::plane_wave(8.0, 8.0), 800), 6, false).energies();
    const auto mx = eigen_lowest(assemble(u, BasisSpec::mixed(8.0, 1.0), 500), 6, false).energies();
    for (std::size_t k = 0; k < 6; ++k) {
        EXPECT_NEAR(ho[k], exact[k], 1e-12);
        EXPECT_NEAR(pw[k], exact[k], 1e-6);
        EXPECT_NEAR(mx[k], exact[k], 1e-6);
    }
}

TEST(Diag, BasisStateIsNormalizedEigenfunction)
{
    const auto u = ho_2d(1.0, 1.5);
    const auto h = assemble(u, BasisSpec::ho_product(1.2, 1.2), 120);
    const auto r = eigen_lowest(h, 4, true);
    const Grid2D g(make_grid(-8, 8, 7), make_grid(-8, 8, 7));
    const auto v = u.sample(g);
    for (std::size_t k = 0; k < 4; ++k) {
        const auto psi = basis_state(h, r.vectors, k, g);
        EXPECT_NEAR(norm(psi), 1.0, 1e-8);
        EXPECT_LT(residual_norm(psi, v, r.levels[k].energy), 1e-5);
    }
}

TEST(Diag, GridEigenHarmonic)
{
    const auto r = grid_eigen_1d(ho_1d(1.0), make_grid(-10, 10, 10), 10);
    for (std::size_t k = 0; k < 10; ++k) {
        EXPECT_NEAR(r.levels[k].energy, k + 0.5, 1e-8);
        EXPECT_FALSE(r.levels[k].flagged);
    }
}

TEST(Diag, SusyPotentialIsIsospectral)
{
    for (double lambda : {1.0, 0.5, 0.05}) {
        const auto m = build_double_well(SusyParams::double_well(-3.0, lambda), default_susy_grid(), 6);
        const auto r = grid_eigen_1d(m.potential_xi(), make_grid(-12, 12, 11), 7);
        for (std::size_t k = 0; k < 7; ++k)
            EXPECT_NEAR(r.levels[k].energy, m.levels[k], 1e-6) << lambda << ' ' << k;
    }
}

TEST(Diag, SusyPotentialInOscillatorBasis)
{
    const auto m = build_double_well(SusyParams::double_well(-3.0, 0.5), default_susy_grid(), 4);
    const auto h = assemble(m.potential_xi(), BasisSpec::ho1d(1.0), 200);
    EXPECT_EQ(h.storage, MatrixStorage::dense);
    const auto e = eigen_lowest(h, 4, false).energies();
    for (std::size_t k = 0; k < 4; ++k)
        EXPECT_NEAR(e[k], m.levels[k], 1e-4) << k;
}

TEST(Diag, CorrectCount)
{
    const std::vector<double> ref{0, 1, 2, 3, 4};
    EXPECT_EQ(correct_count({0.001, 1.002, 2.5, 3, 4}, ref), 2u);
    EXPECT_EQ(correct_count(ref, ref), 5u);
    EXPECT_EQ(correct_count({0.02}, ref), 0u);
}

TEST(Diag, DefaultFrequencyOfQoUsesCentralWell)
{
    const double s = 5e6;
    const auto w = default_basis_frequency(scaled(qo(18.0), s));
    EXPECT_NEAR(w[0], std::sqrt(s / 18.0), 1e-6 * w[0]);
    EXPECT_NEAR(w[1], std::sqrt(s / 18.0), 1e-6 * w[1]);
}

TEST(Diag, Errors)
{
    EXPECT_THROW(eigen_lowest(assemble(ho_1d(1.0), BasisSpec::ho1d(1.0), 5), 6), Error);
    EXPECT_THROW(assemble(ho_1d(1.0), BasisSpec::ho1d(1.0), 0), Error);
    EXPECT_THROW(assemble(ho_2d(1.0, 1.0), BasisSpec::ho1d(1.0), 4), Error);
}
