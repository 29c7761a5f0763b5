#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "mwell/error.hpp"
#include "mwell/fft.hpp"
#include "mwell/grid.hpp"
#include "mwell/linalg.hpp"
#include "mwell/potentials.hpp"
#include "mwell/specfun.hpp"
#include "mwell/spectrum.hpp"

namespace mwell {

enum class BasisFamily { plane_wave_2d, ho_product_2d, mixed_2d, ho_1d, grid_1d_fd };

inline std::string_view to_string(BasisFamily f)
{
    switch (f) {
    case BasisFamily::plane_wave_2d: return "plane_wave_2d";
    case BasisFamily::ho_product_2d: return "ho_product_2d";
    case BasisFamily::mixed_2d: return "mixed_2d";
    case BasisFamily::ho_1d: return "ho_1d";
    case BasisFamily::grid_1d_fd: return "grid_1d_fd";
    }
    return "?";
}

/// Product basis of 1D eigenfunctions. Sine axes are the box [-a, a] with
/// Dirichlet walls, s_k = sin(pi k (x + a)/(2a))/sqrt(a), k >= 1. Oscillator
/// axes use psi_n of frequency omega, n >= 0. Mixed is sine in x, oscillator in y.
struct BasisSpec {
    BasisFamily family = BasisFamily::ho_1d;
    double a_x = 1.0;
    double a_y = 1.0;
    double omega_x = 1.0;
    double omega_y = 1.0;
    std::size_t max_size = 0;

    static BasisSpec plane_wave(double a_x, double a_y, std::size_t n = 0)
    {
        return {BasisFamily::plane_wave_2d, a_x, a_y, 1.0, 1.0, n};
    }
    static BasisSpec ho_product(double wx, double wy, std::size_t n = 0)
    {
        return {BasisFamily::ho_product_2d, 1.0, 1.0, wx, wy, n};
    }
    static BasisSpec mixed(double a, double omega, std::size_t n = 0)
    {
        return {BasisFamily::mixed_2d, a, 1.0, 1.0, omega, n};
    }
    static BasisSpec ho1d(double omega, std::size_t n = 0) { return {BasisFamily::ho_1d, 1.0, 1.0, omega, 1.0, n}; }

    std::size_t dimensions() const
    {
        return family == BasisFamily::ho_1d || family == BasisFamily::grid_1d_fd ? 1 : 2;
    }
    bool sine_x() const { return family == BasisFamily::plane_wave_2d || family == BasisFamily::mixed_2d; }
    bool sine_y() const { return family == BasisFamily::plane_wave_2d; }
    int first_index(std::size_t axis) const { return (axis == 0 ? sine_x() : sine_y()) ? 1 : 0; }

    /// Unperturbed 1D level energy of quantum number k on the given axis.
    double axis_energy(std::size_t axis, int k) const
    {
        const bool sine = axis == 0 ? sine_x() : sine_y();
        if (sine) {
            const double a = axis == 0 ? a_x : a_y;
            const double q = std::numbers::pi * k / (2.0 * a);
            return 0.5 * q * q;
        }
        const double w = axis == 0 ? omega_x : omega_y;
        return w * (k + 0.5);
    }

    void validate() const
    {
        detail::require(a_x > 0 && a_y > 0 && omega_x > 0 && omega_y > 0, ErrorKind::domain, "diag",
                        "basis parameters must be positive");
        detail::require(family != BasisFamily::grid_1d_fd, ErrorKind::domain, "diag",
                        "grid_1d_fd is solved by grid_eigen_1d, not by matrix assembly");
    }
};

using BasisIndex = std::array<int, 2>;

/// First N product states ordered by unperturbed energy, ties broken
/// lexicographically on the index tuple. 1D bases return (k, 0).
inline std::vector<BasisIndex> truncation_order(const BasisSpec& basis, std::size_t n)
{
    std::vector<BasisIndex> out;
    if (n == 0)
        return out;
    const int n_int = static_cast<int>(n);
    if (basis.dimensions() == 1) {
        for (int k = 0; k < n_int; ++k)
            out.push_back({basis.first_index(0) + k, 0});
        return out;
    }
    struct Candidate {
        double e;
        BasisIndex idx;
    };
    std::vector<Candidate> cand;
    const int x0 = basis.first_index(0);
    const int y0 = basis.first_index(1);
    // Any state among the lowest N has both quantum numbers below offset + N.
    for (int i = 0; i < n_int; ++i) {
        const double ex = basis.axis_energy(0, x0 + i);
        for (int j = 0; j < n_int; ++j)
            cand.push_back({ex + basis.axis_energy(1, y0 + j), {x0 + i, y0 + j}});
    }
    // Energies of distinct tuples that agree to roundoff count as ties.
    std::sort(cand.begin(), cand.end(), [](const Candidate& a, const Candidate& b) {
        const double tol = 1e-12 * std::max({1.0, std::abs(a.e), std::abs(b.e)});
        if (std::abs(a.e - b.e) > tol)
            return a.e < b.e;
        return a.idx < b.idx;
    });
    for (std::size_t k = 0; k < n; ++k)
        out.push_back(cand[k].idx);
    return out;
}

enum class MatrixStorage { dense, banded };

struct HamiltonianMatrix {
    BasisSpec basis;
    std::vector<BasisIndex> indices;
    MatrixStorage storage = MatrixStorage::dense;
    DenseMatrix dense;
    BandMatrix band;
    double gram_deviation = 0.0;  // worst |<k|k'> - delta| under the assembly quadrature

    std::size_t dimension() const { return indices.size(); }
    std::size_t bandwidth() const { return storage == MatrixStorage::banded ? band.bandwidth() : dimension(); }

    double operator()(std::size_t i, std::size_t j) const
    {
        return storage == MatrixStorage::dense ? dense(i, j) : band.get(i, j);
    }

    DenseMatrix to_dense() const { return storage == MatrixStorage::dense ? dense : band.to_dense(); }

    /// Largest |index difference| with an entry above tol * max|entry|.
    std::size_t measured_bandwidth(double tol = 1e-13) const
    {
        const std::size_t n = dimension();
        double scale = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = j; i < n; ++i)
                scale = std::max(scale, std::abs((*this)(i, j)));
        std::size_t b = 0;
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = j; i < n; ++i)
                if (std::abs((*this)(i, j)) > tol * scale)
                    b = std::max(b, i - j);
        return b;
    }

    /// Row-major 64-bit float dump.
    void write_binary(std::ostream& os) const
    {
        const std::size_t n = dimension();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                const double v = (*this)(i, j);
                os.write(reinterpret_cast<const char*>(&v), sizeof v);
            }
    }
};

struct AssemblyOptions {
    /// Banded storage for polynomial potentials in an oscillator basis (1D);
    /// dense forces full storage and quadrature.
    std::optional<MatrixStorage> storage;
    /// Quadrature order per oscillator axis; 0 picks 2 n_max + 40.
    std::size_t quadrature = 0;
    /// Midpoint samples per sine axis; 0 picks 4 k_max, at least 64.
    std::size_t sine_samples = 0;
};

namespace detail {

/// Sampled 1D basis functions on a quadrature rule: f[k][q], weights w[q], nodes x[q].
struct AxisRule {
    std::vector<double> x;
    std::vector<double> w;
    std::vector<std::vector<double>> f;
};

inline AxisRule oscillator_rule(double omega, int n_max, std::size_t q)
{
    const auto gh = gauss_hermite(q);
    AxisRule r;
    const double s = std::sqrt(omega);
    r.x.resize(q);
    r.w.resize(q);
    r.f.assign(static_cast<std::size_t>(n_max) + 1, std::vector<double>(q));
    for (std::size_t i = 0; i < q; ++i) {
        r.x[i] = gh.nodes[i] / s;
        r.w[i] = gh.weights[i] / s;
        const auto psi = ho_functions(n_max, r.x[i], omega);
        for (int k = 0; k <= n_max; ++k)
            r.f[static_cast<std::size_t>(k)][i] = psi[static_cast<std::size_t>(k)];
    }
    return r;
}

inline AxisRule sine_rule(double a, int k_max, std::size_t m)
{
    AxisRule r;
    r.x.resize(m);
    r.w.assign(m, 2.0 * a / static_cast<double>(m));
    r.f.assign(static_cast<std::size_t>(k_max) + 1, std::vector<double>(m));
    const double inv = 1.0 / std::sqrt(a);
    for (std::size_t i = 0; i < m; ++i) {
        r.x[i] = -a + (i + 0.5) * 2.0 * a / static_cast<double>(m);
        for (int k = 1; k <= k_max; ++k)
            r.f[static_cast<std::size_t>(k)][i] =
                inv * std::sin(std::numbers::pi * k * (r.x[i] + a) / (2.0 * a));
    }
    return r;
}

inline double rule_gram_deviation(const AxisRule& r, int k_lo, int k_hi)
{
    double worst = 0.0;
    for (int k = k_lo; k <= k_hi; ++k)
        for (int l = k; l <= k_hi; ++l) {
            double s = 0.0;
            const auto& fk = r.f[static_cast<std::size_t>(k)];
            const auto& fl = r.f[static_cast<std::size_t>(l)];
            for (std::size_t q = 0; q < r.w.size(); ++q)
                s += r.w[q] * fk[q] * fl[q];
            worst = std::max(worst, std::abs(s - (k == l ? 1.0 : 0.0)));
        }
    return worst;
}

inline void check_gram(double dev)
{
    if (dev > 1e-8) {
        std::ostringstream msg;
        msg << "quadrature order insufficient: basis Gram deviation " << dev;
        fail(ErrorKind::domain, "diag", msg.str());
    }
}

/// Position operator x = (a + a^dagger)/sqrt(2 omega) applied to a coefficient vector.
inline std::vector<double> apply_position(const std::vector<double>& v, double omega)
{
    std::vector<double> out(v.size(), 0.0);
    const double s = 1.0 / std::sqrt(2.0 * omega);
    for (std::size_t n = 0; n < v.size(); ++n) {
        if (v[n] == 0.0)
            continue;
        if (n > 0)
            out[n - 1] += s * std::sqrt(static_cast<double>(n)) * v[n];
        if (n + 1 < v.size())
            out[n + 1] += s * std::sqrt(static_cast<double>(n + 1)) * v[n];
    }
    return out;
}

inline HamiltonianMatrix assemble_ho1d_banded(const Polynomial1D& p_eff, const BasisSpec& basis, std::size_t n)
{
    const int deg = std::max(0, p_eff.degree());
    const std::size_t m = n + static_cast<std::size_t>(deg) + 1;
    HamiltonianMatrix h;
    h.basis = basis;
    h.indices = truncation_order(basis, n);
    h.storage = MatrixStorage::banded;
    h.band = BandMatrix(n, static_cast<std::size_t>(deg));
    std::vector<double> coef(static_cast<std::size_t>(deg) + 1, 0.0);
    for (const auto& [e, c] : p_eff.terms())
        coef[static_cast<std::size_t>(e[0])] += c;
    for (std::size_t col = 0; col < n; ++col) {
        std::vector<double> v(m, 0.0), acc(m, 0.0);
        v[col] = 1.0;
        for (int p = 0; p <= deg; ++p) {
            if (p > 0)
                v = apply_position(v, basis.omega_x);
            const double c = coef[static_cast<std::size_t>(p)];
            if (c != 0.0)
                for (std::size_t i = 0; i < m; ++i)
                    acc[i] += c * v[i];
        }
        acc[col] += basis.omega_x * (static_cast<double>(col) + 0.5);
        const std::size_t hi = std::min(n, col + static_cast<std::size_t>(deg) + 1);
        for (std::size_t row = col; row < hi; ++row)
            h.band.set(row, col, acc[row]);
    }
    return h;
}

} // namespace detail

/// <k|H|k'> for a 1D potential in the oscillator basis of frequency omega.
/// H = -1/2 d^2/dx^2 + U is split as H_osc + (U - omega^2 x^2/2): the first
/// part is diagonal, the remainder goes through ladder algebra (polynomial U,
/// banded) or Gauss-Hermite quadrature (anything else, dense).
inline HamiltonianMatrix assemble(const Potential1D& u, const BasisSpec& basis, std::size_t n,
                                  const AssemblyOptions& opt = {})
{
    basis.validate();
    detail::require(basis.family == BasisFamily::ho_1d, ErrorKind::domain, "diag",
                    "1D assembly supports the oscillator basis");
    detail::require(n >= 1, ErrorKind::domain, "diag", "basis size must be at least 1");
    const double w = basis.omega_x;
    const MatrixStorage storage = opt.storage.value_or(u.polynomial ? MatrixStorage::banded : MatrixStorage::dense);
    if (storage == MatrixStorage::banded) {
        detail::require(u.polynomial.has_value(), ErrorKind::domain, "diag",
                        "banded assembly needs a polynomial potential");
        Polynomial1D eff = *u.polynomial;
        eff.add({2}, -0.5 * w * w);
        return detail::assemble_ho1d_banded(eff, basis, n);
    }
    const int n_max = static_cast<int>(n) - 1;
    const std::size_t q = opt.quadrature ? opt.quadrature : 2 * n + 40;
    const auto rule = detail::oscillator_rule(w, n_max, q);
    HamiltonianMatrix h;
    h.basis = basis;
    h.indices = truncation_order(basis, n);
    h.storage = MatrixStorage::dense;
    h.gram_deviation = detail::rule_gram_deviation(rule, 0, n_max);
    detail::check_gram(h.gram_deviation);
    auto ueff = u.at(rule.x);
    for (std::size_t i = 0; i < q; ++i)
        ueff[i] = rule.w[i] * (ueff[i] - 0.5 * w * w * rule.x[i] * rule.x[i]);
    h.dense = DenseMatrix(n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = j; i < n; ++i) {
            double s = 0.0;
            const auto& fi = rule.f[i];
            const auto& fj = rule.f[j];
            for (std::size_t k = 0; k < q; ++k)
                s += ueff[k] * fi[k] * fj[k];
            if (i == j)
                s += w * (static_cast<double>(i) + 0.5);
            h.dense(i, j) = s;
            h.dense(j, i) = s;
        }
    return h;
}

/// 2D assembly. Plane-wave potential elements come from a 2D DCT of U on a
/// midpoint grid; oscillator and mixed families use a factorized tensor quadrature.
inline HamiltonianMatrix assemble(const Potential2D& u, const BasisSpec& basis, std::size_t n,
                                  const AssemblyOptions& opt = {})
{
    basis.validate();
    detail::require(basis.dimensions() == 2, ErrorKind::domain, "diag", "2D assembly needs a 2D basis");
    detail::require(n >= 1, ErrorKind::domain, "diag", "basis size must be at least 1");
    HamiltonianMatrix h;
    h.basis = basis;
    h.indices = truncation_order(basis, n);
    h.storage = MatrixStorage::dense;
    h.dense = DenseMatrix(n);
    int kx_max = 0, ky_max = 0;
    for (const auto& idx : h.indices) {
        kx_max = std::max(kx_max, idx[0]);
        ky_max = std::max(ky_max, idx[1]);
    }

    if (basis.family == BasisFamily::plane_wave_2d) {
        const std::size_t mx = opt.sine_samples ? opt.sine_samples : std::max<std::size_t>(64, 4 * kx_max);
        const std::size_t my = opt.sine_samples ? opt.sine_samples : std::max<std::size_t>(64, 4 * ky_max);
        detail::require(mx >= 2 * static_cast<std::size_t>(kx_max) + 1 && my >= 2 * static_cast<std::size_t>(ky_max) + 1,
                        ErrorKind::domain, "diag", "too few midpoint samples for the requested plane waves");
        std::vector<double> samples(mx * my);
        for (std::size_t iy = 0; iy < my; ++iy) {
            const double y = -basis.a_y + (iy + 0.5) * 2.0 * basis.a_y / static_cast<double>(my);
            for (std::size_t ix = 0; ix < mx; ++ix) {
                const double x = -basis.a_x + (ix + 0.5) * 2.0 * basis.a_x / static_cast<double>(mx);
                samples[iy * mx + ix] = u.value(x, y);
            }
        }
        const auto c = dct2_2d(std::move(samples), my, mx);
        const double norm = 1.0 / (4.0 * static_cast<double>(mx * my));
        auto cc = [&](int m, int l) { return c[static_cast<std::size_t>(l) * mx + static_cast<std::size_t>(m)] * norm; };
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = j; i < n; ++i) {
                const auto [kx, ky] = h.indices[i];
                const auto [lx, ly] = h.indices[j];
                const int dx = std::abs(kx - lx), sx = kx + lx;
                const int dy = std::abs(ky - ly), sy = ky + ly;
                double s = cc(dx, dy) - cc(dx, sy) - cc(sx, dy) + cc(sx, sy);
                if (i == j)
                    s += basis.axis_energy(0, kx) + basis.axis_energy(1, ky);
                h.dense(i, j) = s;
                h.dense(j, i) = s;
            }
        return h;
    }

    const bool sx = basis.sine_x();
    const std::size_t qx = sx ? (opt.sine_samples ? opt.sine_samples : std::max<std::size_t>(64, 4 * kx_max))
                              : (opt.quadrature ? opt.quadrature : 2 * static_cast<std::size_t>(kx_max) + 40);
    const std::size_t qy = opt.quadrature ? opt.quadrature : 2 * static_cast<std::size_t>(ky_max) + 40;
    const auto rx = sx ? detail::sine_rule(basis.a_x, kx_max, qx) : detail::oscillator_rule(basis.omega_x, kx_max, qx);
    const auto ry = detail::oscillator_rule(basis.omega_y, ky_max, qy);
    h.gram_deviation = std::max(detail::rule_gram_deviation(rx, basis.first_index(0), kx_max),
                                detail::rule_gram_deviation(ry, 0, ky_max));
    detail::check_gram(h.gram_deviation);

    // Potential minus the parts already diagonal in the basis, weighted.
    std::vector<double> veff(qx * qy);
    for (std::size_t iy = 0; iy < qy; ++iy)
        for (std::size_t ix = 0; ix < qx; ++ix) {
            double v = u.value(rx.x[ix], ry.x[iy]);
            if (!sx)
                v -= 0.5 * basis.omega_x * basis.omega_x * rx.x[ix] * rx.x[ix];
            v -= 0.5 * basis.omega_y * basis.omega_y * ry.x[iy] * ry.x[iy];
            veff[iy * qx + ix] = v * rx.w[ix] * ry.w[iy];
        }
    // G[(kx, lx)][qy] = sum_qx f_kx f_lx veff
    const int x0 = basis.first_index(0);
    const std::size_t nkx = static_cast<std::size_t>(kx_max - x0 + 1);
    std::vector<double> g(nkx * nkx * qy, 0.0);
    for (std::size_t a = 0; a < nkx; ++a)
        for (std::size_t b = a; b < nkx; ++b) {
            const auto& fa = rx.f[a + static_cast<std::size_t>(x0)];
            const auto& fb = rx.f[b + static_cast<std::size_t>(x0)];
            std::vector<double> prod(qx);
            for (std::size_t ix = 0; ix < qx; ++ix)
                prod[ix] = fa[ix] * fb[ix];
            for (std::size_t iy = 0; iy < qy; ++iy) {
                const double* row = veff.data() + iy * qx;
                double s = 0.0;
                for (std::size_t ix = 0; ix < qx; ++ix)
                    s += prod[ix] * row[ix];
                g[(a * nkx + b) * qy + iy] = s;
                g[(b * nkx + a) * qy + iy] = s;
            }
        }
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = j; i < n; ++i) {
            const auto [kx, ky] = h.indices[i];
            const auto [lx, ly] = h.indices[j];
            const double* gp = g.data() + (static_cast<std::size_t>(kx - x0) * nkx + static_cast<std::size_t>(lx - x0)) * qy;
            const auto& fy = ry.f[static_cast<std::size_t>(ky)];
            const auto& fly = ry.f[static_cast<std::size_t>(ly)];
            double s = 0.0;
            for (std::size_t iy = 0; iy < qy; ++iy)
                s += gp[iy] * fy[iy] * fly[iy];
            if (i == j)
                s += basis.axis_energy(0, kx) + basis.axis_energy(1, ky);
            h.dense(i, j) = s;
            h.dense(j, i) = s;
        }
    return h;
}

/// Lowest n_levels eigenpairs, ascending. Dense storage runs Householder + QL;
/// banded storage reduces by Givens bulge chasing when only values are wanted.
inline SpectrumResult eigen_lowest(const HamiltonianMatrix& m, std::size_t n_levels, bool want_vectors = true)
{
    const std::size_t n = m.dimension();
    detail::require(n_levels <= n, ErrorKind::domain, "diag", "more levels requested than basis size");
    const std::string tag = std::string("diag-") + std::string(to_string(m.basis.family));
    SpectrumResult out;
    std::vector<double> values;
    if (m.storage == MatrixStorage::banded && !want_vectors) {
        values = band_eigenvalues(m.band);
    } else {
        auto dec = eigh(m.to_dense(), want_vectors);
        values = std::move(dec.values);
        if (want_vectors)
            out.vectors = std::move(dec.vectors);
    }
    // Eigenvalues of a symmetric matrix are accurate to ~eps * ||H||.
    double scale = 0.0;
    for (double v : values)
        scale = std::max(scale, std::abs(v));
    for (std::size_t k = 0; k < n_levels; ++k)
        out.levels.push_back({values[k], 64 * std::numeric_limits<double>::epsilon() * scale, tag, false});
    return out;
}

/// Dense matrix from explicit entries, for tests and callers with their own assembly.
inline HamiltonianMatrix dense_hamiltonian(DenseMatrix a)
{
    HamiltonianMatrix h;
    h.basis = BasisSpec::ho1d(1.0, a.size());
    h.indices = truncation_order(h.basis, a.size());
    h.storage = MatrixStorage::dense;
    h.dense = std::move(a);
    return h;
}

/// Wave function of 2D eigenvector column k on a grid.
inline WaveFunction2D basis_state(const HamiltonianMatrix& m, const DenseMatrix& vectors, std::size_t k,
                                  const Grid2D& grid)
{
    detail::require(m.basis.dimensions() == 2, ErrorKind::domain, "diag", "basis_state needs a 2D basis");
    const auto& b = m.basis;
    int kx_max = 0, ky_max = 0;
    for (const auto& idx : m.indices) {
        kx_max = std::max(kx_max, idx[0]);
        ky_max = std::max(ky_max, idx[1]);
    }
    auto axis_values = [&](std::size_t axis, const Grid1D& g, int kmax) {
        const bool sine = axis == 0 ? b.sine_x() : b.sine_y();
        const double a = axis == 0 ? b.a_x : b.a_y;
        const double w = axis == 0 ? b.omega_x : b.omega_y;
        std::vector<std::vector<double>> f(static_cast<std::size_t>(kmax) + 1, std::vector<double>(g.size(), 0.0));
        for (std::size_t j = 0; j < g.size(); ++j) {
            const double x = g.x(j);
            if (sine) {
                if (std::abs(x) >= a)
                    continue;
                for (int k = 1; k <= kmax; ++k)
                    f[static_cast<std::size_t>(k)][j] = std::sin(std::numbers::pi * k * (x + a) / (2 * a)) / std::sqrt(a);
            } else {
                const auto psi = ho_functions(kmax, x, w);
                for (int k = 0; k <= kmax; ++k)
                    f[static_cast<std::size_t>(k)][j] = psi[static_cast<std::size_t>(k)];
            }
        }
        return f;
    };
    const auto fx = axis_values(0, grid.x_axis(), kx_max);
    const auto fy = axis_values(1, grid.y_axis(), ky_max);
    WaveFunction2D psi(grid);
    const double* c = vectors.column(k);
    for (std::size_t i = 0; i < m.indices.size(); ++i) {
        if (c[i] == 0.0)
            continue;
        const auto& gx = fx[static_cast<std::size_t>(m.indices[i][0])];
        const auto& gy = fy[static_cast<std::size_t>(m.indices[i][1])];
        for (std::size_t iy = 0; iy < grid.ny(); ++iy) {
            const double cy = c[i] * gy[iy];
            if (cy == 0.0)
                continue;
            for (std::size_t ix = 0; ix < grid.nx(); ++ix)
                psi.values[grid.index(ix, iy)] += cy * gx[ix];
        }
    }
    return psi;
}

/// Wave function of a 1D oscillator-basis eigenvector on a grid.
inline WaveFunction1D basis_state(const HamiltonianMatrix& m, const DenseMatrix& vectors, std::size_t k,
                                  const Grid1D& grid)
{
    detail::require(m.basis.family == BasisFamily::ho_1d, ErrorKind::domain, "diag", "basis_state: not a 1D basis");
    WaveFunction1D psi(grid);
    const int n_max = static_cast<int>(m.dimension()) - 1;
    const double* c = vectors.column(k);
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const auto f = ho_functions(n_max, grid.x(j), m.basis.omega_x);
        double s = 0.0;
        for (std::size_t i = 0; i < m.dimension(); ++i)
            s += c[i] * f[i];
        psi.values[j] = s;
    }
    return psi;
}

struct GridEigenOptions {
    double tolerance = 1e-6;  // levels whose Richardson error exceeds this are flagged
};

namespace detail {

/// Three-point finite-difference Hamiltonian on the interior nodes of the grid,
/// with psi = 0 at x_min and at x_max.
inline Tridiagonal fd_hamiltonian(const Potential1D& u, double x_min, double x_max, std::size_t n)
{
    const double h = (x_max - x_min) / static_cast<double>(n);
    std::vector<double> x(n - 1);
    for (std::size_t j = 1; j < n; ++j)
        x[j - 1] = x_min + static_cast<double>(j) * h;
    const auto v = u.at(x);
    Tridiagonal t;
    t.d.resize(n - 1);
    t.e.assign(n - 2, -0.5 / (h * h));
    for (std::size_t j = 0; j + 1 < n; ++j)
        t.d[j] = 1.0 / (h * h) + v[j];
    return t;
}

} // namespace detail

/// Lowest levels of -1/2 d^2/dx^2 + U on the grid box with Dirichlet walls.
/// Solved by Sturm bisection on N, 2N and 4N intervals; two Richardson stages
/// remove h^2 and h^4 terms and their difference is the error estimate.
inline SpectrumResult grid_eigen_1d(const Potential1D& u, const Grid1D& grid, std::size_t n_levels,
                                    const GridEigenOptions& opt = {})
{
    detail::require(n_levels >= 1 && n_levels + 2 < grid.size(), ErrorKind::domain, "diag",
                    "grid_eigen_1d: level count must be positive and below the node count");
    std::array<std::vector<double>, 3> e;
    for (std::size_t r = 0; r < 3; ++r) {
        const auto t = detail::fd_hamiltonian(u, grid.x_min(), grid.x_max(), grid.size() << r);
        e[r] = tridiagonal_lowest(t, n_levels);
    }
    SpectrumResult out;
    for (std::size_t k = 0; k < n_levels; ++k) {
        const double r1 = (4.0 * e[1][k] - e[0][k]) / 3.0;
        const double r2 = (4.0 * e[2][k] - e[1][k]) / 3.0;
        const double best = (16.0 * r2 - r1) / 15.0;
        const double err = std::abs(r2 - r1) + 1e-13 * (1.0 + std::abs(best));
        out.levels.push_back({best, err, "grid-fd", err > opt.tolerance});
    }
    const auto flagged = std::count_if(out.levels.begin(), out.levels.end(), [](const Level& l) { return l.flagged; });
    if (flagged > 0)
        out.diagnostics.push_back(std::to_string(flagged) + " level(s) above the requested tolerance");
    return out;
}

/// Largest k such that levels 0..k-1 all have |E - E_ref| below frac times the
/// local reference spacing. This is the count of correctly calculable states.
inline std::size_t correct_count(const std::vector<double>& computed, const std::vector<double>& reference,
                                 double frac = 0.01)
{
    std::size_t k = 0;
    const std::size_t n = std::min(computed.size(), reference.size());
    for (; k < n; ++k) {
        double spacing;
        if (reference.size() < 2)
            spacing = 1.0;
        else if (k + 1 < reference.size())
            spacing = reference[k + 1] - reference[k];
        else
            spacing = reference[k] - reference[k - 1];
        if (!(std::abs(computed[k] - reference[k]) < frac * spacing))
            break;
    }
    return k;
}

/// Default oscillator frequency for a basis: sqrt of the Hessian eigenvalues at the
/// deepest minimum. Minima tied in energy go to the one nearest the origin, where
/// the basis is centred.
inline std::array<double, 2> default_basis_frequency(const Potential2D& u)
{
    const auto rep = find_critical_points(u, default_search_box(u));
    double scale = 0.0;
    for (const auto& p : rep.points)
        scale = std::max(scale, std::abs(p.energy));
    const CriticalPoint* best = nullptr;
    for (const auto& p : rep.points) {
        if (p.kind != CriticalKind::minimum)
            continue;
        if (!best || p.energy < best->energy - 1e-9 * scale ||
            (std::abs(p.energy - best->energy) <= 1e-9 * scale && std::hypot(p.x, p.y) < std::hypot(best->x, best->y)))
            best = &p;
    }
    if (!best)
        return {1.0, 1.0};
    const auto h = u.hessian(best->x, best->y);
    return {std::sqrt(std::max(h[0], 1e-12)), std::sqrt(std::max(h[2], 1e-12))};
}

} // namespace mwell
