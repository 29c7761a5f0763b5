#pragma once

#include <iomanip>
#include <ostream>
#include <string>
#include <vector>

#include "mwell/linalg.hpp"

namespace mwell {

struct Level {
    double energy = 0.0;
    double uncertainty = 0.0;
    std::string method;
    bool flagged = false; // error estimate above the requested tolerance
};

/// Levels in ascending order plus whatever eigenvector data the method produced.
struct SpectrumResult {
    std::vector<Level> levels;
    DenseMatrix vectors; // basis coefficients, column k for level k (may be empty)
    std::vector<double> amplitudes; // peak heights, spectral method only
    std::vector<std::string> diagnostics;

    std::size_t size() const { return levels.size(); }
    bool empty() const { return levels.empty(); }

    std::vector<double> energies() const
    {
        std::vector<double> out;
        out.reserve(levels.size());
        for (const auto& l : levels)
            out.push_back(l.energy);
        return out;
    }

    static SpectrumResult from_energies(const std::vector<double>& e, double uncertainty, const std::string& method)
    {
        SpectrumResult r;
        for (double v : e)
            r.levels.push_back({v, uncertainty, method, false});
        return r;
    }
};

inline void write_csv(std::ostream& os, const SpectrumResult& s)
{
    os << "index,E,error,method\n" << std::setprecision(17);
    for (std::size_t k = 0; k < s.levels.size(); ++k)
        os << k << ',' << s.levels[k].energy << ',' << s.levels[k].uncertainty << ',' << s.levels[k].method << '\n';
}

} // namespace mwell
