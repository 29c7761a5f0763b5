#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "mwell/diag.hpp"
#include "mwell/error.hpp"
#include "mwell/grid.hpp"
#include "mwell/potentials.hpp"
#include "mwell/propagate.hpp"
#include "mwell/spectrum.hpp"

namespace mwell {

// ---------------------------------------------------------------- nodal domains

struct NodalOptions {
    double amplitude_floor = 1e-8;   // |psi| below floor * max is treated as nodal set
    std::size_t min_contact = 3;     // shorter shared boundaries are corner touches, not adjacency
    double angle_tolerance = 0.35;   // radians, for the two lattice directions
    double length_tolerance = 0.5;   // relative to the median length along a direction
    std::size_t gap_radius = 6;      // search radius (nodes) for same-sign quasicrossing gaps
    std::vector<std::uint8_t> region; // optional mask; nodes outside are ignored
};

struct DomainInfo {
    int sign = 0;
    std::size_t area = 0;       // node count
    double weight = 0.0;        // integrated |psi|^2
    double cx = 0.0, cy = 0.0;  // |psi|^2-weighted centroid
};

struct NodalReport {
    Grid2D grid;
    std::size_t domain_count = 0;
    std::vector<int> labels;                 // domain id per node, -1 for the nodal set / outside region
    std::vector<DomainInfo> domains;
    std::map<std::pair<int, int>, std::size_t> adjacency; // (i < j) -> shared boundary edges
    double checkerboard_score = 0.0;
    std::array<double, 2> lattice_angles{};  // dominant adjacency directions (radians, mod pi)
    std::vector<std::uint8_t> turning_mask;  // 1 where U < E (classically allowed)
    std::vector<double> minimal_gaps;        // closest approach of same-sign domain pairs
    std::optional<bool> refinement_stable;   // domain count unchanged on the doubled grid
    std::vector<std::string> diagnostics;
};

namespace detail {

inline double angle_mod_pi(double dx, double dy)
{
    double a = std::atan2(dy, dx);
    if (a < 0.0)
        a += std::numbers::pi;
    if (a >= std::numbers::pi)
        a -= std::numbers::pi;
    return a;
}

inline double angle_distance(double a, double b)
{
    const double d = std::abs(a - b);
    return std::min(d, std::numbers::pi - d);
}

// Score in [0, 1]: weighted fraction of adjacency pairs whose centroid
// displacement follows one of two distinct lattice directions with a consistent length.
inline double checkerboard_from_pairs(const std::vector<std::array<double, 3>>& pairs, const NodalOptions& opt,
                                      std::array<double, 2>& angles)
{
    if (pairs.empty())
        return 0.0;
    // pairs: angle, length, weight
    auto dominant = [&](const std::vector<std::array<double, 3>>& ps, const std::function<bool(double)>& allowed) {
        double best_a = 0.0, best_w = -1.0;
        for (const auto& c : ps) {
            if (!allowed(c[0]))
                continue;
            double w = 0.0;
            for (const auto& p : ps)
                if (angle_distance(p[0], c[0]) < opt.angle_tolerance)
                    w += p[2];
            if (w > best_w) {
                best_w = w;
                best_a = c[0];
            }
        }
        return std::pair{best_a, best_w};
    };
    const auto [a1, w1] = dominant(pairs, [](double) { return true; });
    const auto [a2, w2] = dominant(pairs, [&](double a) { return angle_distance(a, a1) > 2.0 * opt.angle_tolerance; });
    angles = {a1, w2 > 0.0 ? a2 : a1};
    double total = 0.0, good = 0.0;
    for (const auto& p : pairs)
        total += p[2];
    for (double dir : {a1, a2}) {
        if (dir == a2 && w2 <= 0.0)
            break;
        std::vector<double> lengths;
        for (const auto& p : pairs)
            if (angle_distance(p[0], dir) < opt.angle_tolerance)
                lengths.push_back(p[1]);
        if (lengths.empty())
            continue;
        std::nth_element(lengths.begin(), lengths.begin() + lengths.size() / 2, lengths.end());
        const double med = lengths[lengths.size() / 2];
        for (const auto& p : pairs)
            if (angle_distance(p[0], dir) < opt.angle_tolerance && std::abs(p[1] - med) <= opt.length_tolerance * med)
                good += p[2];
    }
    return total > 0.0 ? good / total : 0.0;
}

} // namespace detail

/// Sign domains of a real function sampled on a 2D grid (4-connectivity).
inline NodalReport nodal_domains(const std::vector<double>& psi, const Grid2D& grid, double energy,
                                 const Potential2D& u, const NodalOptions& opt = {})
{
    detail::require(psi.size() == grid.size(), ErrorKind::grid_mismatch, "analysis",
                    "nodal_domains: sample count does not match the grid");
    detail::require(opt.region.empty() || opt.region.size() == grid.size(), ErrorKind::grid_mismatch, "analysis",
                    "nodal_domains: region mask does not match the grid");
    const std::size_t nx = grid.nx(), ny = grid.ny();
    NodalReport rep;
    rep.grid = grid;
    rep.labels.assign(grid.size(), -1);
    rep.turning_mask.assign(grid.size(), 0);
    double amax = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i)
        if (opt.region.empty() || opt.region[i])
            amax = std::max(amax, std::abs(psi[i]));
    detail::require(amax > 0.0, ErrorKind::domain, "analysis", "nodal_domains: function vanishes on the region");
    const double floor = opt.amplitude_floor * amax;
    auto sign_at = [&](std::size_t i) -> int {
        if (!opt.region.empty() && !opt.region[i])
            return 0;
        if (std::abs(psi[i]) <= floor)
            return 0;
        return psi[i] > 0.0 ? 1 : -1;
    };
    for (std::size_t iy = 0; iy < ny; ++iy)
        for (std::size_t ix = 0; ix < nx; ++ix)
            rep.turning_mask[grid.index(ix, iy)] = u.value(grid.x_axis().x(ix), grid.y_axis().x(iy)) < energy;

    std::vector<std::size_t> stack;
    for (std::size_t start = 0; start < grid.size(); ++start) {
        const int s = sign_at(start);
        if (s == 0 || rep.labels[start] >= 0)
            continue;
        const int id = static_cast<int>(rep.domains.size());
        DomainInfo d;
        d.sign = s;
        stack.push_back(start);
        rep.labels[start] = id;
        while (!stack.empty()) {
            const std::size_t c = stack.back();
            stack.pop_back();
            const std::size_t cx = c % nx, cy = c / nx;
            const double w = psi[c] * psi[c];
            d.area += 1;
            d.weight += w;
            d.cx += w * grid.x_axis().x(cx);
            d.cy += w * grid.y_axis().x(cy);
            auto visit = [&](std::size_t q) {
                if (rep.labels[q] < 0 && sign_at(q) == s) {
                    rep.labels[q] = id;
                    stack.push_back(q);
                }
            };
            if (cx > 0)
                visit(c - 1);
            if (cx + 1 < nx)
                visit(c + 1);
            if (cy > 0)
                visit(c - nx);
            if (cy + 1 < ny)
                visit(c + nx);
        }
        d.cx /= d.weight;
        d.cy /= d.weight;
        rep.domains.push_back(d);
    }
    rep.domain_count = rep.domains.size();

    // Adjacency across sign changes between 4-neighbors.
    for (std::size_t iy = 0; iy < ny; ++iy)
        for (std::size_t ix = 0; ix < nx; ++ix) {
            const std::size_t c = grid.index(ix, iy);
            const int a = rep.labels[c];
            if (a < 0)
                continue;
            for (std::size_t q : {ix + 1 < nx ? c + 1 : c, iy + 1 < ny ? c + nx : c}) {
                const int b = rep.labels[q];
                if (q == c || b < 0 || b == a)
                    continue;
                ++rep.adjacency[{std::min(a, b), std::max(a, b)}];
            }
        }

    std::vector<std::array<double, 3>> pairs;
    for (const auto& [key, contact] : rep.adjacency) {
        if (contact < opt.min_contact)
            continue;
        const auto& p = rep.domains[static_cast<std::size_t>(key.first)];
        const auto& q = rep.domains[static_cast<std::size_t>(key.second)];
        const double dx = q.cx - p.cx, dy = q.cy - p.cy;
        pairs.push_back({detail::angle_mod_pi(dx, dy), std::hypot(dx, dy), static_cast<double>(contact)});
    }
    rep.checkerboard_score = detail::checkerboard_from_pairs(pairs, opt, rep.lattice_angles);
    if (pairs.empty())
        rep.diagnostics.push_back("no adjacent domain pairs");

    // Quasicrossings: same-sign domains that approach without touching.
    std::map<std::pair<int, int>, double> gaps;
    const long r = static_cast<long>(opt.gap_radius);
    const double hx = grid.x_axis().dx(), hy = grid.y_axis().dx();
    for (std::size_t iy = 0; iy < ny; ++iy)
        for (std::size_t ix = 0; ix < nx; ++ix) {
            const int a = rep.labels[grid.index(ix, iy)];
            if (a < 0)
                continue;
            for (long dy = 0; dy <= r; ++dy)
                for (long dx = -r; dx <= r; ++dx) {
                    if (dy == 0 && dx <= 0)
                        continue;
                    const long jx = static_cast<long>(ix) + dx, jy = static_cast<long>(iy) + dy;
                    if (jx < 0 || jy < 0 || jx >= static_cast<long>(nx) || jy >= static_cast<long>(ny))
                        continue;
                    const int b = rep.labels[grid.index(static_cast<std::size_t>(jx), static_cast<std::size_t>(jy))];
                    if (b < 0 || b == a || rep.domains[static_cast<std::size_t>(a)].sign !=
                                               rep.domains[static_cast<std::size_t>(b)].sign)
                        continue;
                    const double dist = std::hypot(dx * hx, dy * hy);
                    auto key = std::pair{std::min(a, b), std::max(a, b)};
                    auto it = gaps.find(key);
                    if (it == gaps.end() || dist < it->second)
                        gaps[key] = dist;
                }
        }
    for (const auto& [key, g] : gaps)
        rep.minimal_gaps.push_back(g);
    std::sort(rep.minimal_gaps.begin(), rep.minimal_gaps.end());
    return rep;
}

/// Complex input: rotated to its dominant global phase; rejected when the
/// remaining imaginary part is not negligible.
inline NodalReport nodal_domains(const WaveFunction2D& psi, double energy, const Potential2D& u,
                                 const NodalOptions& opt = {}, double imag_tolerance = 1e-6)
{
    // Best global phase: maximize sum Re(e^{-i t} psi)^2, t = arg(sum psi^2)/2.
    cplx s2{0.0, 0.0};
    double n2 = 0.0;
    for (const auto& v : psi.values) {
        s2 += v * v;
        n2 += std::norm(v);
    }
    detail::require(n2 > 0.0, ErrorKind::domain, "analysis", "nodal_domains: zero wave function");
    const cplx rot = std::polar(1.0, -0.5 * std::arg(s2));
    std::vector<double> re(psi.values.size());
    double im2 = 0.0;
    for (std::size_t i = 0; i < re.size(); ++i) {
        const cplx v = rot * psi.values[i];
        re[i] = v.real();
        im2 += v.imag() * v.imag();
    }
    detail::require(std::sqrt(im2 / n2) <= imag_tolerance, ErrorKind::domain, "analysis",
                    "nodal_domains: wave function has a non-trivial phase; realify it first");
    return nodal_domains(re, psi.grid, energy, u, opt);
}

/// Runs the analysis on a grid and on its doubled refinement; the report comes from
/// the base grid and records whether the domain count survived refinement.
inline NodalReport nodal_domains_checked(const std::function<std::vector<double>(const Grid2D&)>& sampler,
                                         const Grid2D& grid, double energy, const Potential2D& u,
                                         const NodalOptions& opt = {},
                                         const std::function<std::vector<std::uint8_t>(const Grid2D&)>& region = {})
{
    NodalOptions o1 = opt, o2 = opt;
    const Grid2D fine = grid.refined();
    if (region) {
        o1.region = region(grid);
        o2.region = region(fine);
    }
    auto rep = nodal_domains(sampler(grid), grid, energy, u, o1);
    o2.gap_radius = 0;
    const auto ref = nodal_domains(sampler(fine), fine, energy, u, o2);
    rep.refinement_stable = ref.domain_count == rep.domain_count;
    if (!*rep.refinement_stable)
        rep.diagnostics.push_back("domain count changed under refinement: " + std::to_string(rep.domain_count) +
                                  " -> " + std::to_string(ref.domain_count));
    return rep;
}

/// Sign map and domain-id map as CSV rows (x, y, sign, domain, allowed).
inline void write_csv(std::ostream& os, const NodalReport& rep)
{
    os << "x,y,sign,domain,allowed\n" << std::setprecision(12);
    for (std::size_t iy = 0; iy < rep.grid.ny(); ++iy)
        for (std::size_t ix = 0; ix < rep.grid.nx(); ++ix) {
            const std::size_t i = rep.grid.index(ix, iy);
            const int id = rep.labels[i];
            const int s = id < 0 ? 0 : rep.domains[static_cast<std::size_t>(id)].sign;
            os << rep.grid.x_axis().x(ix) << ',' << rep.grid.y_axis().x(iy) << ',' << s << ',' << id << ','
               << int(rep.turning_mask[i]) << '\n';
        }
}

// ------------------------------------------------------------------ unfolding

struct AccuracyReport {
    std::vector<double> epsilon;               // |dE| / local mean spacing, per computed level
    std::vector<double> spacing;               // local mean spacing used
    std::vector<std::size_t> reference_index;  // matched reference level
    std::vector<bool> unmatched;               // |dE| > spacing / 2
    std::size_t correct_count = 0;             // leading levels with epsilon below the threshold

    double max_epsilon(std::size_t n) const
    {
        double m = 0.0;
        for (std::size_t k = 0; k < std::min(n, epsilon.size()); ++k)
            m = std::max(m, unmatched[k] ? std::numeric_limits<double>::infinity() : epsilon[k]);
        return m;
    }
};

/// Local mean spacing of an ascending spectrum: mean of the spacings within
/// `half` neighbors on each side (5 spacings for half = 2), clamped at the ends.
inline std::vector<double> local_spacing(const std::vector<double>& ref, std::size_t half = 2)
{
    detail::require(ref.size() >= 2, ErrorKind::domain, "analysis", "need at least two reference levels");
    const std::size_t ns = ref.size() - 1;
    const std::size_t width = std::min(2 * half + 1, ns);
    std::vector<double> out(ref.size());
    for (std::size_t j = 0; j < ref.size(); ++j) {
        std::size_t lo = j > half ? j - half : 0;
        lo = std::min(lo, ns - width);
        out[j] = (ref[lo + width] - ref[lo]) / static_cast<double>(width);
    }
    return out;
}

inline AccuracyReport unfolded_accuracy(const std::vector<double>& computed, const std::vector<double>& reference,
                                        double threshold = 0.01)
{
    detail::require(std::is_sorted(computed.begin(), computed.end()) &&
                        std::is_sorted(reference.begin(), reference.end()),
                    ErrorKind::domain, "analysis", "unfolded_accuracy: spectra must be ascending");
    detail::require(reference.size() >= computed.size(), ErrorKind::domain, "analysis",
                    "unfolded_accuracy: reference must be at least as dense as the computed spectrum");
    const auto sp = local_spacing(reference);
    AccuracyReport rep;
    bool leading = true;
    for (double e : computed) {
        const auto it = std::lower_bound(reference.begin(), reference.end(), e);
        std::size_t j = static_cast<std::size_t>(it - reference.begin());
        if (j == reference.size() || (j > 0 && std::abs(reference[j - 1] - e) <= std::abs(reference[j] - e)))
            j = j == 0 ? 0 : j - 1;
        const double s = sp[j];
        detail::require(s > 0.0, ErrorKind::domain, "analysis", "unfolded_accuracy: zero local spacing");
        const double eps = std::abs(e - reference[j]) / s;
        rep.epsilon.push_back(eps);
        rep.spacing.push_back(s);
        rep.reference_index.push_back(j);
        rep.unmatched.push_back(eps > 0.5);
        if (leading && eps < threshold && eps <= 0.5)
            ++rep.correct_count;
        else
            leading = false;
    }
    return rep;
}

inline AccuracyReport unfolded_accuracy(const SpectrumResult& computed, const SpectrumResult& reference,
                                        double threshold = 0.01)
{
    return unfolded_accuracy(computed.energies(), reference.energies(), threshold);
}

// ------------------------------------------------------------------ fits

struct PowerLawFit {
    double exponent = 0.0;
    double prefactor = 0.0;
    double r2 = 0.0;
};

/// Least squares fit of log y = log c + p log x.
inline PowerLawFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y)
{
    detail::require(x.size() == y.size() && x.size() >= 2, ErrorKind::domain, "analysis",
                    "power-law fit needs at least two points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        detail::require(x[i] > 0.0 && y[i] > 0.0, ErrorKind::domain, "analysis", "power-law fit needs positive data");
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        syy += ly * ly;
    }
    const double vx = sxx - sx * sx / n, vy = syy - sy * sy / n, cxy = sxy - sx * sy / n;
    detail::require(vx > 0.0, ErrorKind::domain, "analysis", "power-law fit needs distinct abscissae");
    PowerLawFit f;
    f.exponent = cxy / vx;
    f.prefactor = std::exp((sy - f.exponent * sx) / n);
    f.r2 = vy > 0.0 ? cxy * cxy / (vx * vy) : 1.0;
    return f;
}

/// Exponent of the level density rho(E) ~ (E - E0)^a, fitted from the staircase
/// N(E_k) = k + 1/2 over levels above e0. Returns a (the staircase exponent minus one).
inline double density_exponent(const std::vector<double>& levels, double e0 = 0.0)
{
    std::vector<double> e, n;
    for (std::size_t k = 0; k < levels.size(); ++k)
        if (levels[k] > e0) {
            e.push_back(levels[k] - e0);
            n.push_back(static_cast<double>(k) + 0.5);
        }
    return fit_power_law(e, n).exponent - 1.0;
}

// ------------------------------------------------------------------ benchmark

struct CostRecord {
    std::string method;          // "MD-dense", "MD-banded", "SM"
    std::size_t n = 0;           // levels requested
    double epsilon = 0.0;        // achieved max relative-to-spacing error over the n levels
    double wall_time = 0.0;      // seconds, median of repeats
    std::size_t peak_memory = 0; // bytes held by the dominant arrays
    std::size_t setting = 0;     // basis size (MD) or step count (SM)
    bool capped = false;         // target not reached within the resource cap
};

struct BenchmarkOptions {
    double basis_omega = 1.0;
    std::size_t md_start = 0;      // 0: start at n
    std::size_t md_cap = 800;
    bool md_banded = false;        // banded storage for polynomial potentials, values only
    Grid1D sm_grid = make_grid(-12.0, 12.0, 8);
    std::size_t sm_min_steps = std::size_t{1} << 9;
    std::size_t sm_cap_steps = std::size_t{1} << 17;
    Window sm_window = Window::hann;
    double packet_x0 = 0.7;        // initial packet offset
    double packet_sigma = 0.0;     // 0: 1/sqrt(2 basis_omega)
    std::uint64_t seed = 20240611;
    std::size_t repeats = 5;
};

struct BenchmarkResult {
    CostRecord md;
    CostRecord sm;
    std::vector<std::pair<std::size_t, double>> md_sweep; // (N, epsilon)
    std::vector<std::pair<std::size_t, double>> sm_sweep; // (steps, epsilon)
};

namespace detail {

template <class F>
double median_time(std::size_t repeats, F&& f)
{
    std::vector<double> t;
    for (std::size_t r = 0; r < std::max<std::size_t>(repeats, 1); ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        t.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    std::sort(t.begin(), t.end());
    return t[t.size() / 2];
}

// Max epsilon over the first n reference levels, each matched to its nearest peak.
inline double match_epsilon(const std::vector<double>& peaks, const std::vector<double>& reference, std::size_t n)
{
    const auto sp = local_spacing(reference);
    double worst = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        double best = std::numeric_limits<double>::infinity();
        for (double p : peaks)
            best = std::min(best, std::abs(p - reference[k]));
        const double eps = best / sp[k];
        worst = std::max(worst, eps > 0.5 ? std::numeric_limits<double>::infinity() : eps);
    }
    return worst;
}

} // namespace detail

/// Smallest basis size (MD) and shortest run (SM) reaching eps_target on the
/// lowest n levels of a 1D problem, with median timings of the chosen setting.
inline BenchmarkResult cost_benchmark(const Potential1D& u, std::size_t n, double eps_target,
                                      const std::vector<double>& reference, const BenchmarkOptions& opt = {})
{
    detail::require(n >= 1 && reference.size() > n, ErrorKind::domain, "analysis",
                    "cost_benchmark: reference needs more than n levels");
    BenchmarkResult res;
    const BasisSpec basis = BasisSpec::ho1d(opt.basis_omega, opt.md_cap);
    AssemblyOptions ao;
    if (!opt.md_banded)
        ao.storage = MatrixStorage::dense;

    // MD: grow N geometrically (x1.25) until the target is met.
    std::size_t nb = std::max(opt.md_start ? opt.md_start : n, n);
    double eps = std::numeric_limits<double>::infinity();
    while (true) {
        const auto m = assemble(u, basis, nb, ao);
        const auto s = eigen_lowest(m, n, false);
        eps = detail::match_epsilon(s.energies(), reference, n);
        res.md_sweep.push_back({nb, eps});
        if (eps <= eps_target || nb >= opt.md_cap)
            break;
        nb = std::min(opt.md_cap, std::max(nb + 1, nb * 5 / 4));
    }
    {
        const auto m = assemble(u, basis, nb, ao);
        res.md.method = m.storage == MatrixStorage::banded ? "MD-banded" : "MD-dense";
        res.md.n = n;
        res.md.epsilon = eps;
        res.md.setting = nb;
        res.md.capped = eps > eps_target;
        res.md.wall_time = detail::median_time(opt.repeats, [&] {
            const auto mm = assemble(u, basis, nb, ao);
            (void)eigen_lowest(mm, n, false);
        });
        res.md.peak_memory = m.storage == MatrixStorage::banded ? nb * (m.bandwidth() + 1) * sizeof(double)
                                                                : nb * nb * sizeof(double);
    }

    // SM: double the run length until the target is met.
    const auto pot = u.sample(opt.sm_grid);
    const double dt = PropagationPlan<Grid1D>::max_step(opt.sm_grid, pot);
    const double sigma = opt.packet_sigma > 0.0 ? opt.packet_sigma : 1.0 / std::sqrt(2.0 * opt.basis_omega);
    auto psi0 = gaussian_packet(opt.sm_grid, opt.packet_x0, sigma);
    random_phase_mask(psi0, opt.seed, 2.0 / sigma);
    normalize(psi0);
    SpectrumOptions so;
    so.window = opt.sm_window;
    so.floor = 1e-4;
    std::size_t steps = opt.sm_min_steps;
    eps = std::numeric_limits<double>::infinity();
    while (true) {
        const PropagationPlan<Grid1D> plan(opt.sm_grid, pot, dt, steps);
        const auto ev = evolve(psi0, plan);
        const auto s = extract_spectrum(ev.autocorrelation, so);
        eps = detail::match_epsilon(s.energies(), reference, n);
        res.sm_sweep.push_back({steps, eps});
        if (eps <= eps_target || steps >= opt.sm_cap_steps)
            break;
        steps *= 2;
    }
    res.sm.method = "SM";
    res.sm.n = n;
    res.sm.epsilon = eps;
    res.sm.setting = steps;
    res.sm.capped = eps > eps_target;
    res.sm.wall_time = detail::median_time(opt.repeats, [&] {
        const PropagationPlan<Grid1D> plan(opt.sm_grid, pot, dt, steps);
        const auto ev = evolve(psi0, plan);
        (void)extract_spectrum(ev.autocorrelation, so);
    });
    // Wave function, its initial copy, phase tables and the autocorrelation.
    res.sm.peak_memory = opt.sm_grid.size() * 5 * sizeof(cplx) + steps * sizeof(cplx) * (1 + so.oversample);
    return res;
}

inline void write_csv(std::ostream& os, const std::vector<CostRecord>& recs)
{
    os << "method,n,epsilon,wall_time,peak_memory,setting,capped\n" << std::setprecision(10);
    for (const auto& r : recs)
        os << r.method << ',' << r.n << ',' << r.epsilon << ',' << r.wall_time << ',' << r.peak_memory << ','
           << r.setting << ',' << (r.capped ? 1 : 0) << '\n';
}

/// Median wall time of a full dense eigensolve (values and vectors) of seeded
/// random symmetric matrices, per size.
inline std::vector<double> dense_solve_times(const std::vector<std::size_t>& sizes, std::size_t repeats = 5,
                                             std::uint64_t seed = 7)
{
    std::vector<double> out;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    for (std::size_t n : sizes) {
        DenseMatrix a(n);
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i <= j; ++i)
                a(i, j) = a(j, i) = g(rng);
        out.push_back(detail::median_time(repeats, [&] { (void)eigh(a, true); }));
    }
    return out;
}

/// Median wall time of evolve() for each step count on a fixed grid and potential.
template <class Grid>
std::vector<double> propagation_times(const WaveFunction<Grid>& psi0, const std::vector<double>& potential,
                                      const std::vector<std::size_t>& steps, std::size_t repeats = 5)
{
    const double dt = PropagationPlan<Grid>::max_step(psi0.grid, potential);
    std::vector<double> out;
    for (std::size_t n : steps) {
        const PropagationPlan<Grid> plan(psi0.grid, potential, dt, n);
        out.push_back(detail::median_time(repeats, [&] { (void)evolve(psi0, plan); }));
    }
    return out;
}

} // namespace mwell
