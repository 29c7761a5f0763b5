#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "mwell/error.hpp"
#include "mwell/fft.hpp"

namespace mwell {

/// Uniform periodic lattice x_j = x_min + j*dx, j = 0..n-1, dx = (x_max - x_min)/n.
///
/// The node count is a power of two, 2^k with 4 <= k <= 24, so every
/// transform over the grid is a radix-2 FFT.
class Grid1D {
public:
    static constexpr int min_exponent = 4;
    static constexpr int max_exponent = 24;

    Grid1D() = default;

    Grid1D(double x_min, double x_max, std::size_t n_points) : x_min_(x_min), x_max_(x_max), n_(n_points)
    {
        detail::require(std::isfinite(x_min) && std::isfinite(x_max) && x_max > x_min, ErrorKind::domain,
                        "grid", "grid requires x_max > x_min");
        detail::require(std::has_single_bit(n_points) && n_points >= (std::size_t{1} << min_exponent) &&
                            n_points <= (std::size_t{1} << max_exponent),
                        ErrorKind::domain, "grid", "node count must be 2^k with 4 <= k <= 24");
    }

    double x_min() const { return x_min_; }
    double x_max() const { return x_max_; }
    std::size_t size() const { return n_; }
    double dx() const { return (x_max_ - x_min_) / static_cast<double>(n_); }
    double length() const { return x_max_ - x_min_; }
    double x(std::size_t j) const { return x_min_ + static_cast<double>(j) * dx(); }
    double cell_volume() const { return dx(); }

    /// Angular wavenumber of FFT bin j: 2*pi*j'/(n*dx) with j' the signed index.
    double k(std::size_t j) const
    {
        return 2.0 * std::numbers::pi * static_cast<double>(signed_index(j, n_)) / length();
    }
    double k_max() const { return std::numbers::pi / dx(); }

    std::vector<double> nodes() const
    {
        std::vector<double> out(n_);
        for (std::size_t j = 0; j < n_; ++j)
            out[j] = x(j);
        return out;
    }

    /// Same box, twice the node count.
    Grid1D refined() const { return Grid1D(x_min_, x_max_, 2 * n_); }

    friend bool operator==(const Grid1D&, const Grid1D&) = default;

private:
    double x_min_ = 0.0;
    double x_max_ = 1.0;
    std::size_t n_ = 16;
};

inline Grid1D make_grid(double x_min, double x_max, int k)
{
    detail::require(x_max > x_min, ErrorKind::domain, "grid", "make_grid: x_max must exceed x_min");
    detail::require(k >= Grid1D::min_exponent && k <= Grid1D::max_exponent, ErrorKind::domain, "grid",
                    "make_grid: exponent must lie in [4, 24]");
    return Grid1D(x_min, x_max, std::size_t{1} << k);
}

/// Tensor product of two axes; node (ix, iy) is stored at iy*nx + ix.
class Grid2D {
public:
    Grid2D() = default;
    Grid2D(Grid1D x_axis, Grid1D y_axis) : x_(x_axis), y_(y_axis) {}

    const Grid1D& x_axis() const { return x_; }
    const Grid1D& y_axis() const { return y_; }
    std::size_t nx() const { return x_.size(); }
    std::size_t ny() const { return y_.size(); }
    std::size_t size() const { return nx() * ny(); }
    std::size_t index(std::size_t ix, std::size_t iy) const { return iy * nx() + ix; }
    double cell_volume() const { return x_.dx() * y_.dx(); }

    Grid2D refined() const { return Grid2D(x_.refined(), y_.refined()); }

    friend bool operator==(const Grid2D&, const Grid2D&) = default;

private:
    Grid1D x_;
    Grid1D y_;
};

inline constexpr std::size_t dimensions(const Grid1D&) { return 1; }
inline constexpr std::size_t dimensions(const Grid2D&) { return 2; }

inline FftPlan make_fft(const Grid1D& g) { return FftPlan(g.size()); }
inline FftPlan make_fft(const Grid2D& g) { return FftPlan(g.ny(), g.nx()); }

/// Squared wavenumber |k|^2 for every FFT bin, laid out like the data.
inline std::vector<double> k_squared(const Grid1D& g)
{
    std::vector<double> out(g.size());
    for (std::size_t j = 0; j < g.size(); ++j)
        out[j] = g.k(j) * g.k(j);
    return out;
}

inline std::vector<double> k_squared(const Grid2D& g)
{
    std::vector<double> out(g.size());
    for (std::size_t iy = 0; iy < g.ny(); ++iy) {
        const double ky = g.y_axis().k(iy);
        for (std::size_t ix = 0; ix < g.nx(); ++ix) {
            const double kx = g.x_axis().k(ix);
            out[g.index(ix, iy)] = kx * kx + ky * ky;
        }
    }
    return out;
}

/// Largest kinetic energy representable on the grid, sum over axes of k_max^2/2.
inline double max_kinetic_energy(const Grid1D& g) { return 0.5 * g.k_max() * g.k_max(); }
inline double max_kinetic_energy(const Grid2D& g)
{
    return max_kinetic_energy(g.x_axis()) + max_kinetic_energy(g.y_axis());
}

template <class Grid>
struct WaveFunction {
    Grid grid;
    std::vector<cplx> values;

    WaveFunction() = default;
    explicit WaveFunction(Grid g) : grid(std::move(g)), values(grid.size()) {}
    WaveFunction(Grid g, std::vector<cplx> v) : grid(std::move(g)), values(std::move(v))
    {
        detail::require(values.size() == grid.size(), ErrorKind::grid_mismatch, "grid",
                        "value count does not match the grid node count");
    }
};

using WaveFunction1D = WaveFunction<Grid1D>;
using WaveFunction2D = WaveFunction<Grid2D>;

/// Riemann sum sum_j conj(a_j) b_j * cell volume.
template <class Grid>
cplx inner_product(const WaveFunction<Grid>& a, const WaveFunction<Grid>& b)
{
    detail::require(a.grid == b.grid, ErrorKind::grid_mismatch, "grid", "inner_product: grids differ");
    cplx acc{0.0, 0.0};
    for (std::size_t j = 0; j < a.values.size(); ++j)
        acc += std::conj(a.values[j]) * b.values[j];
    return acc * a.grid.cell_volume();
}

template <class Grid>
double norm_squared(const WaveFunction<Grid>& psi)
{
    double acc = 0.0;
    for (const auto& v : psi.values)
        acc += std::norm(v);
    return acc * psi.grid.cell_volume();
}

template <class Grid>
double norm(const WaveFunction<Grid>& psi)
{
    return std::sqrt(norm_squared(psi));
}

template <class Grid>
void normalize(WaveFunction<Grid>& psi)
{
    const double n = norm(psi);
    detail::require(n > 0.0 && std::isfinite(n), ErrorKind::normalization, "grid",
                    "cannot normalize a zero or non-finite wave function");
    for (auto& v : psi.values)
        v /= n;
}

/// Norm of the continuous Fourier transform sampled on the momentum grid,
/// sum_k |psi~(k)|^2 dk with psi~(k) = dx/sqrt(2 pi) sum_j psi_j exp(-i k x_j).
template <class Grid>
double momentum_norm_squared(const WaveFunction<Grid>& psi)
{
    auto work = psi.values;
    make_fft(psi.grid).forward(work);
    double acc = 0.0;
    for (const auto& v : work)
        acc += std::norm(v);
    // Per axis: (dx^2 / 2pi) * dk = dx / n.
    return acc * psi.grid.cell_volume() / static_cast<double>(psi.grid.size());
}

/// Applies -1/2 laplacian spectrally: FFT, multiply by |k|^2/2, inverse FFT.
template <class Grid>
std::vector<cplx> apply_kinetic(const WaveFunction<Grid>& psi, const FftPlan& fft, std::span<const double> k2)
{
    auto work = psi.values;
    fft.forward(work);
    const double scale = 0.5 / static_cast<double>(work.size());
    for (std::size_t j = 0; j < work.size(); ++j)
        work[j] *= k2[j] * scale;
    fft.backward(work);
    return work;
}

/// H psi with H = -1/2 laplacian + U, U sampled on the nodes.
template <class Grid>
std::vector<cplx> apply_hamiltonian(const WaveFunction<Grid>& psi, std::span<const double> potential)
{
    detail::require(potential.size() == psi.values.size(), ErrorKind::grid_mismatch, "grid",
                    "potential sample count does not match the grid");
    const auto k2 = k_squared(psi.grid);
    auto out = apply_kinetic(psi, make_fft(psi.grid), k2);
    for (std::size_t j = 0; j < out.size(); ++j)
        out[j] += potential[j] * psi.values[j];
    return out;
}

/// <psi|H|psi> for a normalized psi; the imaginary part of the raw sum must vanish.
template <class Grid>
double expectation_energy(const WaveFunction<Grid>& psi, std::span<const double> potential)
{
    detail::require(std::abs(norm_squared(psi) - 1.0) < 1e-8, ErrorKind::normalization, "grid",
                    "expectation_energy requires a normalized wave function");
    const auto h_psi = apply_hamiltonian(psi, potential);
    cplx acc{0.0, 0.0};
    for (std::size_t j = 0; j < h_psi.size(); ++j)
        acc += std::conj(psi.values[j]) * h_psi[j];
    acc *= psi.grid.cell_volume();
    detail::require(std::abs(acc.imag()) < 1e-10, ErrorKind::domain, "grid",
                    "expectation_energy: non-real <H>, imaginary part " + std::to_string(acc.imag()));
    return acc.real();
}

/// ||(H - E) psi|| / ||psi||.
template <class Grid>
double residual_norm(const WaveFunction<Grid>& psi, std::span<const double> potential, double energy)
{
    auto h_psi = apply_hamiltonian(psi, potential);
    double acc = 0.0;
    for (std::size_t j = 0; j < h_psi.size(); ++j)
        acc += std::norm(h_psi[j] - energy * psi.values[j]);
    return std::sqrt(acc * psi.grid.cell_volume()) / norm(psi);
}

/// Real samples -> wave function.
template <class Grid>
WaveFunction<Grid> from_real(const Grid& grid, std::span<const double> values)
{
    WaveFunction<Grid> psi(grid);
    detail::require(values.size() == grid.size(), ErrorKind::grid_mismatch, "grid",
                    "from_real: sample count does not match the grid");
    for (std::size_t j = 0; j < values.size(); ++j)
        psi.values[j] = values[j];
    return psi;
}

} // namespace mwell
