#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mwell/error.hpp"
#include "mwell/fft.hpp"
#include "mwell/grid.hpp"
#include "mwell/spectrum.hpp"

namespace mwell {

enum class Window { hann, rectangular };

inline std::string_view to_string(Window w) { return w == Window::hann ? "hann" : "rectangular"; }

inline double window_weight(Window w, std::size_t j, std::size_t n)
{
    if (w == Window::rectangular)
        return 1.0;
    return 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n)));
}

/// Strang split step exp(-i U dt/2) exp(-i T dt) exp(-i U dt/2) on a periodic grid.
template <class Grid>
class PropagationPlan {
public:
    PropagationPlan(Grid grid, std::vector<double> potential, double dt, std::size_t n_steps)
        : grid_(std::move(grid)), potential_(std::move(potential)), dt_(dt), n_steps_(n_steps), fft_(make_fft(grid_))
    {
        detail::require(potential_.size() == grid_.size(), ErrorKind::grid_mismatch, "propagate",
                        "potential sample count does not match the grid");
        detail::require(dt != 0.0 && std::isfinite(dt), ErrorKind::domain, "propagate", "time step must be nonzero");
        detail::require(std::has_single_bit(n_steps) && n_steps >= 2, ErrorKind::domain, "propagate",
                        "step count must be a power of two");
        double umax = 0.0;
        for (double v : potential_)
            umax = std::max(umax, std::abs(v));
        e_max_ = max_kinetic_energy(grid_) + umax;
        if (std::abs(dt) > 1.0 / e_max_) {
            std::ostringstream msg;
            msg << "time step " << std::abs(dt) << " exceeds 1/E_max = " << 1.0 / e_max_;
            detail::fail(ErrorKind::domain, "propagate", msg.str());
        }
        const auto k2 = k_squared(grid_);
        const double inv_n = 1.0 / static_cast<double>(grid_.size());
        kinetic_.resize(k2.size());
        for (std::size_t j = 0; j < k2.size(); ++j)
            kinetic_[j] = std::polar(inv_n, -0.5 * k2[j] * dt_);
        half_potential_.resize(potential_.size());
        for (std::size_t j = 0; j < potential_.size(); ++j)
            half_potential_[j] = std::polar(1.0, -0.5 * potential_[j] * dt_);
    }

    /// Largest step allowed on this grid and potential.
    static double max_step(const Grid& grid, const std::vector<double>& potential)
    {
        double umax = 0.0;
        for (double v : potential)
            umax = std::max(umax, std::abs(v));
        return 1.0 / (max_kinetic_energy(grid) + umax);
    }

    const Grid& grid() const { return grid_; }
    const std::vector<double>& potential() const { return potential_; }
    double dt() const { return dt_; }
    std::size_t n_steps() const { return n_steps_; }
    double duration() const { return std::abs(dt_) * static_cast<double>(n_steps_); }
    double e_max() const { return e_max_; }

    /// Same grid and potential, reversed time direction.
    PropagationPlan reversed() const { return PropagationPlan(grid_, potential_, -dt_, n_steps_); }

    void step(std::vector<cplx>& psi) const
    {
        for (std::size_t j = 0; j < psi.size(); ++j)
            psi[j] *= half_potential_[j];
        fft_.forward(psi);
        for (std::size_t j = 0; j < psi.size(); ++j)
            psi[j] *= kinetic_[j];
        fft_.backward(psi);
        for (std::size_t j = 0; j < psi.size(); ++j)
            psi[j] *= half_potential_[j];
    }

private:
    Grid grid_;
    std::vector<double> potential_;
    double dt_;
    std::size_t n_steps_;
    FftPlan fft_;
    double e_max_ = 0.0;
    std::vector<cplx> kinetic_;
    std::vector<cplx> half_potential_;
};

/// P(t_j) = <psi0|psi(t_j)>, t_j = j dt, j = 0..n_steps-1.
struct Autocorrelation {
    double dt = 0.0;
    std::vector<cplx> samples;
    double duration() const { return std::abs(dt) * static_cast<double>(samples.size()); }
};

template <class Grid>
struct EvolveOptions {
    std::size_t snapshot_every = 0;       // 0 keeps no snapshots
    std::vector<double> project_energies; // accumulate time-Fourier projections at these energies
    Window window = Window::hann;
    double norm_tolerance = 1e-10;
};

template <class Grid>
struct Snapshot {
    double t = 0.0;
    WaveFunction<Grid> psi;
};

template <class Grid>
struct EvolutionResult {
    Autocorrelation autocorrelation;
    std::vector<Snapshot<Grid>> snapshots;
    std::vector<WaveFunction<Grid>> projections; // unnormalized, one per requested energy
    WaveFunction<Grid> final_state;
    double max_norm_drift = 0.0;
};

/// Evolves psi0 for plan.n_steps() steps, recording the autocorrelation at
/// every step. Aborts with a norm_drift error naming the step if the norm
/// leaves 1 by more than the tolerance.
template <class Grid>
EvolutionResult<Grid> evolve(const WaveFunction<Grid>& psi0, const PropagationPlan<Grid>& plan,
                             const EvolveOptions<Grid>& opt = {})
{
    detail::require(psi0.grid == plan.grid(), ErrorKind::grid_mismatch, "propagate",
                    "initial state and plan use different grids");
    // no stricter than the drift check, so a final state can seed the next run
    const double n0 = norm_squared(psi0);
    detail::require(std::abs(std::sqrt(n0) - 1.0) <= std::max(opt.norm_tolerance, 1e-12), ErrorKind::normalization, "propagate",
                    "initial state must be normalized");
    const std::size_t n = plan.n_steps();
    const double dv = psi0.grid.cell_volume();
    EvolutionResult<Grid> out;
    out.autocorrelation.dt = plan.dt();
    out.autocorrelation.samples.resize(n);
    for (std::size_t k = 0; k < opt.project_energies.size(); ++k)
        out.projections.emplace_back(psi0.grid);

    std::vector<cplx> psi = psi0.values;
    for (std::size_t j = 0; j < n; ++j) {
        if (j > 0)
            plan.step(psi);
        cplx p{0.0, 0.0};
        double nn = 0.0;
        for (std::size_t i = 0; i < psi.size(); ++i) {
            p += std::conj(psi0.values[i]) * psi[i];
            nn += std::norm(psi[i]);
        }
        out.autocorrelation.samples[j] = p * dv;
        const double drift = std::abs(1.0 - std::sqrt(nn * dv));
        out.max_norm_drift = std::max(out.max_norm_drift, drift);
        if (drift > opt.norm_tolerance) {
            std::ostringstream msg;
            msg << "norm drift " << drift << " at step " << j;
            detail::fail(ErrorKind::norm_drift, "propagate", msg.str());
        }
        const double t = static_cast<double>(j) * plan.dt();
        if (!opt.project_energies.empty()) {
            const double w = window_weight(opt.window, j, n) * std::abs(plan.dt());
            for (std::size_t k = 0; k < opt.project_energies.size(); ++k) {
                const cplx phase = std::polar(w, opt.project_energies[k] * t);
                auto& acc = out.projections[k].values;
                for (std::size_t i = 0; i < psi.size(); ++i)
                    acc[i] += phase * psi[i];
            }
        }
        if (opt.snapshot_every && j % opt.snapshot_every == 0)
            out.snapshots.push_back({t, WaveFunction<Grid>(psi0.grid, psi)});
    }
    out.final_state = WaveFunction<Grid>(psi0.grid, std::move(psi));
    return out;
}

struct SpectrumOptions {
    Window window = Window::hann;
    double floor = 1e-3;             // peaks below floor * max are diagnostics only
    std::size_t oversample = 64;     // zero padding: energy spacing 2 pi/(oversample T) < 0.1/T
    bool reject_sidelobes = true;
    std::optional<double> e_min;
    std::optional<double> e_max;
};

/// |P~(E)| on the padded energy grid, ascending in E.
struct SpectralDensity {
    std::vector<double> energy;
    std::vector<double> magnitude;
};

/// P~(E) = sum_j w_j P(t_j) exp(i E t_j) dt, evaluated by a zero-padded FFT.
inline SpectralDensity spectral_density(const Autocorrelation& p, const SpectrumOptions& opt = {})
{
    const std::size_t n = p.samples.size();
    detail::require(n >= 2 && p.dt != 0.0, ErrorKind::domain, "propagate", "empty autocorrelation");
    const std::size_t m = std::bit_ceil(n * std::max<std::size_t>(opt.oversample, 1));
    std::vector<cplx> buf(m, cplx{0.0, 0.0});
    const double dt = std::abs(p.dt);
    for (std::size_t j = 0; j < n; ++j) {
        // A reversed-time series is the conjugate of the forward one.
        const cplx v = p.dt > 0 ? p.samples[j] : std::conj(p.samples[j]);
        buf[j] = window_weight(opt.window, j, n) * dt * v;
    }
    FftPlan(m).backward(buf);
    SpectralDensity out;
    out.energy.resize(m);
    out.magnitude.resize(m);
    const double de = 2.0 * std::numbers::pi / (static_cast<double>(m) * dt);
    for (std::size_t k = 0; k < m; ++k) {
        // Ascending order: bins m/2..m-1 are negative energies.
        const std::size_t src = (k + m / 2) % m;
        out.energy[k] = static_cast<double>(signed_index(src, m)) * de;
        out.magnitude[k] = std::abs(buf[src]);
    }
    return out;
}

namespace detail {

/// Relative sidelobe envelope of the window transform at offset d (units of 2 pi/T).
inline double sidelobe_envelope(Window w, double d)
{
    d = std::abs(d);
    if (w == Window::rectangular)
        return d < 1.0 ? 1.0 : 1.0 / (std::numbers::pi * d);
    return d < 2.0 ? 1.0 : 1.0 / (std::numbers::pi * d * (d * d - 1.0));
}

} // namespace detail

/// Peaks of |P~| above the floor, refined by a three-point parabola. Local
/// maxima explained by the summed window sidelobes of taller peaks are rejected.
/// Uncertainty of every level is 1/T.
inline SpectrumResult extract_spectrum(const Autocorrelation& p, const SpectrumOptions& opt = {})
{
    const double t_total = p.duration();
    detail::require(t_total > 0.0, ErrorKind::domain, "propagate", "autocorrelation has zero duration");
    const auto dens = spectral_density(p, opt);
    const auto& e = dens.energy;
    const auto& a = dens.magnitude;
    const double top = *std::max_element(a.begin(), a.end());
    struct Peak {
        double e;
        double h;
    };
    std::vector<Peak> peaks;
    std::size_t weak = 0;
    for (std::size_t k = 1; k + 1 < a.size(); ++k) {
        if (!(a[k] > a[k - 1] && a[k] >= a[k + 1]))
            continue;
        if ((opt.e_min && e[k] < *opt.e_min) || (opt.e_max && e[k] > *opt.e_max))
            continue;
        if (a[k] < opt.floor * top) {
            ++weak;
            continue;
        }
        const double denom = a[k - 1] - 2.0 * a[k] + a[k + 1];
        const double shift = denom != 0.0 ? 0.5 * (a[k - 1] - a[k + 1]) / denom : 0.0;
        const double de = e[k + 1] - e[k];
        const double height = a[k] - 0.25 * (a[k - 1] - a[k + 1]) * shift;
        peaks.push_back({e[k] + shift * de, height});
    }
    // Sidelobe rejection, tallest first.
    std::vector<std::size_t> order(peaks.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](auto i, auto j) { return peaks[i].h > peaks[j].h; });
    std::vector<Peak> kept;
    std::size_t rejected = 0;
    for (auto i : order) {
        double leakage = 0.0;
        for (const auto& q : kept) {
            const double d = (peaks[i].e - q.e) * t_total / (2.0 * std::numbers::pi);
            leakage += q.h * detail::sidelobe_envelope(opt.window, d);
        }
        if (opt.reject_sidelobes && peaks[i].h < 1.5 * leakage)
            ++rejected;
        else
            kept.push_back(peaks[i]);
    }
    std::sort(kept.begin(), kept.end(), [](const Peak& x, const Peak& y) { return x.e < y.e; });
    SpectrumResult out;
    const std::string tag = std::string("spectral-") + std::string(to_string(opt.window));
    for (const auto& q : kept) {
        out.levels.push_back({q.e, 1.0 / t_total, tag, false});
        out.amplitudes.push_back(q.h);
    }
    if (kept.empty())
        out.diagnostics.push_back("no peaks above floor");
    if (weak)
        out.diagnostics.push_back(std::to_string(weak) + " local maxima below the floor");
    if (rejected)
        out.diagnostics.push_back(std::to_string(rejected) + " local maxima attributed to window sidelobes");
    return out;
}

/// Stationary state at energy e from stored snapshots,
/// psi_E = sum_j w_j psi(t_j) exp(i E t_j). Refuses when a known neighbor
/// level lies closer than 2 pi/T.
template <class Grid>
WaveFunction<Grid> reconstruct_state(const std::vector<Snapshot<Grid>>& snapshots, double energy, Window window,
                                     const std::vector<double>& known_levels = {}, double* raw_norm = nullptr)
{
    detail::require(snapshots.size() >= 2, ErrorKind::domain, "propagate", "need at least two snapshots");
    const double span = snapshots.back().t - snapshots.front().t;
    const double dts = span / static_cast<double>(snapshots.size() - 1);
    const double t_total = std::abs(dts) * static_cast<double>(snapshots.size());
    const double resolution = 2.0 * std::numbers::pi / t_total;
    for (double e : known_levels) {
        const double gap = std::abs(e - energy);
        if (gap > 1e-12 * (1.0 + std::abs(energy)) && gap < resolution) {
            std::ostringstream msg;
            msg << "level at " << energy << " is unresolved: neighbor at " << e << ", need T >= "
                << 2.0 * std::numbers::pi / gap << " (have " << t_total << ")";
            detail::fail(ErrorKind::unresolved, "propagate", msg.str());
        }
    }
    WaveFunction<Grid> out(snapshots.front().psi.grid);
    for (std::size_t j = 0; j < snapshots.size(); ++j) {
        const cplx phase = std::polar(window_weight(window, j, snapshots.size()) * std::abs(dts), energy * snapshots[j].t);
        const auto& v = snapshots[j].psi.values;
        for (std::size_t i = 0; i < v.size(); ++i)
            out.values[i] += phase * v[i];
    }
    const double n = norm(out);
    if (raw_norm)
        *raw_norm = n;
    normalize(out);
    return out;
}

/// Normalizes a projection accumulated during evolve(); returns the raw norm.
template <class Grid>
double finish_projection(WaveFunction<Grid>& psi)
{
    const double n = norm(psi);
    normalize(psi);
    return n;
}

/// Multiplies by a global phase so the largest-magnitude sample is real and positive,
/// then drops the imaginary part if it is negligible.
template <class Grid>
void realify(WaveFunction<Grid>& psi)
{
    std::size_t best = 0;
    for (std::size_t i = 1; i < psi.values.size(); ++i)
        if (std::abs(psi.values[i]) > std::abs(psi.values[best]))
            best = i;
    const cplx phase = std::conj(psi.values[best]) / std::abs(psi.values[best]);
    for (auto& v : psi.values)
        v *= phase;
}

/// Gaussian packet exp(-(x-x0)^2/(4 sx^2) + i px x), normalized.
inline WaveFunction1D gaussian_packet(const Grid1D& g, double x0, double sigma, double p0 = 0.0)
{
    WaveFunction1D psi(g);
    for (std::size_t j = 0; j < g.size(); ++j) {
        const double x = g.x(j);
        psi.values[j] = std::polar(std::exp(-(x - x0) * (x - x0) / (4.0 * sigma * sigma)), p0 * x);
    }
    normalize(psi);
    return psi;
}

inline WaveFunction2D gaussian_packet(const Grid2D& g, double x0, double y0, double sx, double sy, double px = 0.0,
                                      double py = 0.0)
{
    WaveFunction2D psi(g);
    for (std::size_t iy = 0; iy < g.ny(); ++iy) {
        const double y = g.y_axis().x(iy);
        for (std::size_t ix = 0; ix < g.nx(); ++ix) {
            const double x = g.x_axis().x(ix);
            const double a = -(x - x0) * (x - x0) / (4 * sx * sx) - (y - y0) * (y - y0) / (4 * sy * sy);
            psi.values[g.index(ix, iy)] = std::polar(std::exp(a), px * x + py * y);
        }
    }
    normalize(psi);
    return psi;
}

/// Multiplies by exp(i theta(x)) with theta a smooth random field (sum of a few
/// random plane waves of wavenumber below k_cut), so the packet populates many levels.
inline void random_phase_mask(WaveFunction2D& psi, std::uint64_t seed, double k_cut, int modes = 6)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<std::array<double, 4>> waves;
    for (int m = 0; m < modes; ++m) {
        const double k = k_cut * uni(rng);
        const double ang = 2 * std::numbers::pi * uni(rng);
        waves.push_back({k * std::cos(ang), k * std::sin(ang), 2 * std::numbers::pi * uni(rng), uni(rng)});
    }
    const auto& g = psi.grid;
    for (std::size_t iy = 0; iy < g.ny(); ++iy)
        for (std::size_t ix = 0; ix < g.nx(); ++ix) {
            const double x = g.x_axis().x(ix), y = g.y_axis().x(iy);
            double th = 0.0;
            for (const auto& w : waves)
                th += 2.0 * w[3] * std::cos(w[0] * x + w[1] * y + w[2]);
            psi.values[g.index(ix, iy)] *= std::polar(1.0, th);
        }
}

inline void random_phase_mask(WaveFunction1D& psi, std::uint64_t seed, double k_cut, int modes = 4)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<std::array<double, 3>> waves;
    for (int m = 0; m < modes; ++m)
        waves.push_back({k_cut * uni(rng), 2 * std::numbers::pi * uni(rng), uni(rng)});
    for (std::size_t j = 0; j < psi.grid.size(); ++j) {
        double th = 0.0;
        for (const auto& w : waves)
            th += 2.0 * w[2] * std::cos(w[0] * psi.grid.x(j) + w[1]);
        psi.values[j] *= std::polar(1.0, th);
    }
}

} // namespace mwell
