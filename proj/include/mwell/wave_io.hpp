#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <string>
#include <type_traits>

#include "mwell/grid.hpp"

namespace mwell {

// Binary layout, all little-endian:
//   char[4]  "MWWF"
//   uint32   dims (1 or 2)
//   uint64   n_points per axis (dims entries)
//   float64  x_min, x_max per axis (2*dims entries)
//   float64  re, im per node, x fastest

namespace detail {

template <class T>
void put_le(std::ostream& os, T v)
{
    static_assert(std::is_trivially_copyable_v<T>);
    std::array<char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(bytes.begin(), bytes.end());
    os.write(bytes.data(), sizeof(T));
}

template <class T>
T get_le(std::istream& is)
{
    std::array<char, sizeof(T)> bytes;
    is.read(bytes.data(), sizeof(T));
    require(static_cast<bool>(is), ErrorKind::io, "grid", "truncated wave function dump");
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(bytes.begin(), bytes.end());
    T v;
    std::memcpy(&v, bytes.data(), sizeof(T));
    return v;
}

} // namespace detail

template <class Grid>
void write_binary(std::ostream& os, const WaveFunction<Grid>& psi)
{
    os.write("MWWF", 4);
    if constexpr (std::is_same_v<Grid, Grid1D>) {
        detail::put_le<std::uint32_t>(os, 1);
        detail::put_le<std::uint64_t>(os, psi.grid.size());
        detail::put_le(os, psi.grid.x_min());
        detail::put_le(os, psi.grid.x_max());
    } else {
        detail::put_le<std::uint32_t>(os, 2);
        detail::put_le<std::uint64_t>(os, psi.grid.nx());
        detail::put_le<std::uint64_t>(os, psi.grid.ny());
        for (const auto* ax : {&psi.grid.x_axis(), &psi.grid.y_axis()}) {
            detail::put_le(os, ax->x_min());
            detail::put_le(os, ax->x_max());
        }
    }
    for (const auto& v : psi.values) {
        detail::put_le(os, v.real());
        detail::put_le(os, v.imag());
    }
}

template <class Grid>
WaveFunction<Grid> read_binary(std::istream& is)
{
    char magic[4];
    is.read(magic, 4);
    detail::require(is && std::memcmp(magic, "MWWF", 4) == 0, ErrorKind::io, "grid", "not a wave function dump");
    const auto dims = detail::get_le<std::uint32_t>(is);
    Grid grid;
    if constexpr (std::is_same_v<Grid, Grid1D>) {
        detail::require(dims == 1, ErrorKind::io, "grid", "dump is not one-dimensional");
        const auto n = detail::get_le<std::uint64_t>(is);
        const double lo = detail::get_le<double>(is);
        const double hi = detail::get_le<double>(is);
        grid = Grid1D(lo, hi, n);
    } else {
        detail::require(dims == 2, ErrorKind::io, "grid", "dump is not two-dimensional");
        const auto nx = detail::get_le<std::uint64_t>(is);
        const auto ny = detail::get_le<std::uint64_t>(is);
        const double x0 = detail::get_le<double>(is);
        const double x1 = detail::get_le<double>(is);
        const double y0 = detail::get_le<double>(is);
        const double y1 = detail::get_le<double>(is);
        grid = Grid2D(Grid1D(x0, x1, nx), Grid1D(y0, y1, ny));
    }
    WaveFunction<Grid> psi(grid);
    for (auto& v : psi.values) {
        const double re = detail::get_le<double>(is);
        const double im = detail::get_le<double>(is);
        v = {re, im};
    }
    return psi;
}

template <class Grid>
void write_binary(const std::string& path, const WaveFunction<Grid>& psi)
{
    std::ofstream os(path, std::ios::binary);
    detail::require(static_cast<bool>(os), ErrorKind::io, "grid", "cannot open " + path);
    write_binary(os, psi);
}

template <class Grid>
WaveFunction<Grid> read_binary(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    detail::require(static_cast<bool>(is), ErrorKind::io, "grid", "cannot open " + path);
    return read_binary<Grid>(is);
}

/// CSV with header; columns x,re,im (1D) or x,y,re,im (2D).
template <class Grid>
void write_csv(std::ostream& os, const WaveFunction<Grid>& psi)
{
    os << std::setprecision(17);
    if constexpr (std::is_same_v<Grid, Grid1D>) {
        os << "x,re,im\n";
        for (std::size_t j = 0; j < psi.grid.size(); ++j)
            os << psi.grid.x(j) << ',' << psi.values[j].real() << ',' << psi.values[j].imag() << '\n';
    } else {
        os << "x,y,re,im\n";
        for (std::size_t iy = 0; iy < psi.grid.ny(); ++iy)
            for (std::size_t ix = 0; ix < psi.grid.nx(); ++ix) {
                const auto& v = psi.values[psi.grid.index(ix, iy)];
                os << psi.grid.x_axis().x(ix) << ',' << psi.grid.y_axis().x(iy) << ',' << v.real() << ','
                   << v.imag() << '\n';
            }
    }
}

} // namespace mwell
