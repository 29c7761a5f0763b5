#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "mwell/error.hpp"
#include "mwell/potentials.hpp"

namespace mwell {

struct PhasePoint {
    double x = 0.0;
    double y = 0.0;
    double px = 0.0;
    double py = 0.0;
};

inline double hamiltonian(const Potential2D& u, const PhasePoint& s)
{
    return 0.5 * (s.px * s.px + s.py * s.py) + u.value(s.x, s.y);
}

struct IntegrateOptions {
    std::size_t sample_every = 1;                                     // 0 keeps only the endpoints
    double escape_radius = std::numeric_limits<double>::infinity();   // |q| beyond this stops the run
    std::optional<double> energy_scale;                               // drift reference; default max(|E|, tiny)
    bool track_lyapunov = false;
    std::size_t renormalize_every = 100;
};

struct Trajectory {
    PhasePoint initial;
    double energy = 0.0;
    double h = 0.0;
    std::size_t steps = 0;               // steps actually taken
    std::vector<double> t;               // sample times
    std::vector<PhasePoint> samples;     // sampled states
    bool escaped = false;
    double max_energy_error = 0.0;       // max |H - E| / scale over the samples
    std::optional<double> lyapunov;      // largest-exponent estimate, if tracked
    double duration() const { return h * static_cast<double>(steps); }
};

namespace detail {

// Fourth-order Yoshida composition of the kick-drift-kick leapfrog.
inline constexpr std::array<double, 3> yoshida_weights()
{
    constexpr double c = 1.2599210498948731647672106; // 2^(1/3)
    constexpr double w1 = 1.0 / (2.0 - c);
    constexpr double w0 = -c / (2.0 - c);
    return {w1, w0, w1};
}

struct Tangent {
    double dx = 1.0, dy = 0.0, dpx = 0.0, dpy = 1.0;
};

inline void leapfrog(const Potential2D& u, PhasePoint& s, double h, Tangent* tan)
{
    auto g = u.gradient(s.x, s.y);
    s.px -= 0.5 * h * g[0];
    s.py -= 0.5 * h * g[1];
    if (tan) {
        const auto hs = u.hessian(s.x, s.y);
        tan->dpx -= 0.5 * h * (hs[0] * tan->dx + hs[1] * tan->dy);
        tan->dpy -= 0.5 * h * (hs[1] * tan->dx + hs[2] * tan->dy);
        tan->dx += h * tan->dpx;
        tan->dy += h * tan->dpy;
    }
    s.x += h * s.px;
    s.y += h * s.py;
    g = u.gradient(s.x, s.y);
    s.px -= 0.5 * h * g[0];
    s.py -= 0.5 * h * g[1];
    if (tan) {
        const auto hs = u.hessian(s.x, s.y);
        tan->dpx -= 0.5 * h * (hs[0] * tan->dx + hs[1] * tan->dy);
        tan->dpy -= 0.5 * h * (hs[1] * tan->dx + hs[2] * tan->dy);
    }
}

inline void yoshida_step(const Potential2D& u, PhasePoint& s, double h, Tangent* tan)
{
    for (double w : yoshida_weights())
        leapfrog(u, s, w * h, tan);
}

} // namespace detail

/// Fourth-order symplectic integration of H = p^2/2 + U(q), m = 1, for
/// round(T/h) steps. Stops early (escaped = true) when |q| exceeds the escape radius.
inline Trajectory integrate(const Potential2D& u, PhasePoint s0, double h, double duration,
                            const IntegrateOptions& opt = {})
{
    detail::require(static_cast<bool>(u.gradient), ErrorKind::domain, "classical", "potential needs a gradient");
    detail::require(!opt.track_lyapunov || static_cast<bool>(u.hessian), ErrorKind::domain, "classical",
                    "Lyapunov tracking needs the Hessian");
    detail::require(h != 0.0 && duration >= 0.0, ErrorKind::domain, "classical", "bad step or duration");
    Trajectory tr;
    tr.initial = s0;
    tr.h = h;
    tr.energy = hamiltonian(u, s0);
    const double scale = opt.energy_scale.value_or(std::max(std::abs(tr.energy), 1e-300));
    const auto n = static_cast<std::size_t>(std::llround(duration / std::abs(h)));
    auto record = [&](std::size_t k, const PhasePoint& s) {
        tr.t.push_back(static_cast<double>(k) * h);
        tr.samples.push_back(s);
        tr.max_energy_error = std::max(tr.max_energy_error, std::abs(hamiltonian(u, s) - tr.energy) / scale);
    };
    record(0, s0);
    detail::Tangent tan;
    detail::Tangent* tp = opt.track_lyapunov ? &tan : nullptr;
    if (tp) {
        const double r = std::sqrt(2.0);
        tan = {1.0 / r, 0.0, 0.0, 1.0 / r};
    }
    double log_growth = 0.0;
    PhasePoint s = s0;
    std::size_t k = 0;
    for (k = 1; k <= n; ++k) {
        detail::yoshida_step(u, s, h, tp);
        if (tp && (k % opt.renormalize_every == 0 || k == n)) {
            const double len = std::sqrt(tan.dx * tan.dx + tan.dy * tan.dy + tan.dpx * tan.dpx + tan.dpy * tan.dpy);
            log_growth += std::log(len);
            tan.dx /= len;
            tan.dy /= len;
            tan.dpx /= len;
            tan.dpy /= len;
        }
        if (std::hypot(s.x, s.y) > opt.escape_radius) {
            tr.escaped = true;
            record(k, s);
            break;
        }
        if ((opt.sample_every && k % opt.sample_every == 0) || k == n)
            record(k, s);
    }
    tr.steps = std::min(k, n);
    if (tp && tr.steps > 0)
        tr.lyapunov = log_growth / (static_cast<double>(tr.steps) * std::abs(h));
    return tr;
}

/// A line through q0 with unit normal n; crossings counted where n . qdot > 0.
/// The recorded pair is (t . (q - q0), t . p) with t the unit tangent (n rotated by -90 degrees).
struct Section {
    double x0 = 0.0, y0 = 0.0;
    double nx = 0.0, ny = 1.0;

    static Section y_equals(double y) { return {0.0, y, 0.0, 1.0}; }
    static Section x_equals(double x) { return {x, 0.0, 1.0, 0.0}; }

    double tx() const { return ny; }
    double ty() const { return -nx; }
};

struct SosPoint {
    double s = 0.0;   // coordinate along the section line
    double ps = 0.0;  // conjugate momentum
    double t = 0.0;   // crossing time
    double residual = 0.0; // |n . (q - q0)| at the interpolated point
};

struct SosRecord {
    Section section;
    std::vector<SosPoint> points;
    std::size_t trajectory_id = 0;
    std::optional<double> lyapunov_estimate;
    std::string diagnostic;
};

/// Crossings of a stored trajectory with the section, located by cubic Hermite
/// interpolation between bracketing samples. Needs samples at every step.
inline SosRecord poincare_section(const Potential2D& u, const Trajectory& tr, const Section& sec,
                                  std::size_t trajectory_id = 0)
{
    SosRecord rec;
    rec.section = sec;
    rec.trajectory_id = trajectory_id;
    rec.lyapunov_estimate = tr.lyapunov;
    const double nn = std::hypot(sec.nx, sec.ny);
    detail::require(nn > 0.0, ErrorKind::domain, "classical", "section normal is zero");
    const double nx = sec.nx / nn, ny = sec.ny / nn;
    const double tx = ny, ty = -nx;
    auto g = [&](const PhasePoint& s) { return nx * (s.x - sec.x0) + ny * (s.y - sec.y0); };
    auto gd = [&](const PhasePoint& s) { return nx * s.px + ny * s.py; };
    // Cubic Hermite basis on [0, 1].
    auto herm = [](double f0, double d0, double f1, double d1, double dt, double u) {
        const double u2 = u * u, u3 = u2 * u;
        return (2 * u3 - 3 * u2 + 1) * f0 + (u3 - 2 * u2 + u) * dt * d0 + (-2 * u3 + 3 * u2) * f1 + (u3 - u2) * dt * d1;
    };
    for (std::size_t k = 0; k + 1 < tr.samples.size(); ++k) {
        const auto& a = tr.samples[k];
        const auto& b = tr.samples[k + 1];
        const double ga = g(a), gb = g(b);
        if (!(ga < 0.0 && gb >= 0.0))
            continue;
        const double dt = tr.t[k + 1] - tr.t[k];
        const double da = gd(a), db = gd(b);
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 100; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (herm(ga, da, gb, db, dt, mid) < 0.0)
                lo = mid;
            else
                hi = mid;
            if (hi - lo < 1e-15)
                break;
        }
        const double w = 0.5 * (lo + hi);
        if (gd(a) + (gd(b) - gd(a)) * w <= 0.0)
            continue;
        const auto fa = u.gradient(a.x, a.y);
        const auto fb = u.gradient(b.x, b.y);
        const double x = herm(a.x, a.px, b.x, b.px, dt, w);
        const double y = herm(a.y, a.py, b.y, b.py, dt, w);
        const double px = herm(a.px, -fa[0], b.px, -fb[0], dt, w);
        const double py = herm(a.py, -fa[1], b.py, -fb[1], dt, w);
        SosPoint p;
        p.s = tx * (x - sec.x0) + ty * (y - sec.y0);
        p.ps = tx * px + ty * py;
        p.t = tr.t[k] + w * dt;
        p.residual = std::abs(herm(ga, da, gb, db, dt, w));
        rec.points.push_back(p);
    }
    if (rec.points.empty())
        rec.diagnostic = "trajectory never crosses the section";
    return rec;
}

/// Largest-Lyapunov estimate: re-integrates the trajectory's initial condition
/// with the tangent map, renormalizing every 100 steps.
inline double regularity_estimate(const Potential2D& u, const Trajectory& tr)
{
    if (tr.lyapunov)
        return *tr.lyapunov;
    detail::require(tr.steps >= 10000, ErrorKind::domain, "classical",
                    "regularity estimate needs at least 1e4 steps");
    IntegrateOptions opt;
    opt.sample_every = 0;
    opt.track_lyapunov = true;
    return *integrate(u, tr.initial, tr.h, tr.duration(), opt).lyapunov;
}

inline constexpr double default_regularity_threshold = 1e-3;

/// Connected component of {U < E} containing a seed point, rasterized on the box.
struct WellRegion {
    Box2D box;
    std::size_t n = 0;
    std::vector<std::uint8_t> mask; // n x n, row-major in y
    double cell_x() const { return (box.x_max - box.x_min) / static_cast<double>(n); }
    double cell_y() const { return (box.y_max - box.y_min) / static_cast<double>(n); }
    bool contains(double x, double y) const
    {
        const auto ix = static_cast<long>(std::floor((x - box.x_min) / cell_x()));
        const auto iy = static_cast<long>(std::floor((y - box.y_min) / cell_y()));
        if (ix < 0 || iy < 0 || ix >= static_cast<long>(n) || iy >= static_cast<long>(n))
            return false;
        return mask[static_cast<std::size_t>(iy) * n + static_cast<std::size_t>(ix)] != 0;
    }
};

inline WellRegion well_region(const Potential2D& u, double energy, double x_seed, double y_seed, const Box2D& box,
                              std::size_t n = 512)
{
    WellRegion r;
    r.box = box;
    r.n = n;
    r.mask.assign(n * n, 0);
    std::vector<std::uint8_t> allowed(n * n, 0);
    for (std::size_t iy = 0; iy < n; ++iy)
        for (std::size_t ix = 0; ix < n; ++ix) {
            // centre or any corner below E, so every allowed point lands in a marked cell
            const double x = box.x_min + (ix + 0.5) * r.cell_x();
            const double y = box.y_min + (iy + 0.5) * r.cell_y();
            const double hx = 0.5 * r.cell_x(), hy = 0.5 * r.cell_y();
            allowed[iy * n + ix] = u.value(x, y) < energy || u.value(x - hx, y - hy) < energy ||
                                   u.value(x + hx, y - hy) < energy || u.value(x - hx, y + hy) < energy ||
                                   u.value(x + hx, y + hy) < energy;
        }
    const auto sx = static_cast<std::size_t>(std::clamp((x_seed - box.x_min) / r.cell_x(), 0.0, n - 1.0));
    const auto sy = static_cast<std::size_t>(std::clamp((y_seed - box.y_min) / r.cell_y(), 0.0, n - 1.0));
    detail::require(allowed[sy * n + sx] != 0, ErrorKind::domain, "classical", "seed point lies above the energy");
    std::vector<std::size_t> stack{sy * n + sx};
    r.mask[sy * n + sx] = 1;
    while (!stack.empty()) {
        const std::size_t c = stack.back();
        stack.pop_back();
        const std::size_t cx = c % n, cy = c / n;
        const std::size_t nb[4] = {cx > 0 ? c - 1 : c, cx + 1 < n ? c + 1 : c, cy > 0 ? c - n : c,
                                   cy + 1 < n ? c + n : c};
        for (std::size_t q : nb)
            if (allowed[q] && !r.mask[q]) {
                r.mask[q] = 1;
                stack.push_back(q);
            }
    }
    return r;
}

/// Initial conditions on the energy shell inside a well: positions uniform in
/// the allowed region (rejection), momentum magnitude from E - U, direction uniform.
inline std::vector<PhasePoint> sample_energy_shell(const Potential2D& u, const WellRegion& region, double energy,
                                                   std::size_t count, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    double x_lo = region.box.x_max, x_hi = region.box.x_min, y_lo = region.box.y_max, y_hi = region.box.y_min;
    for (std::size_t iy = 0; iy < region.n; ++iy)
        for (std::size_t ix = 0; ix < region.n; ++ix)
            if (region.mask[iy * region.n + ix]) {
                const double x = region.box.x_min + ix * region.cell_x();
                const double y = region.box.y_min + iy * region.cell_y();
                x_lo = std::min(x_lo, x);
                x_hi = std::max(x_hi, x + region.cell_x());
                y_lo = std::min(y_lo, y);
                y_hi = std::max(y_hi, y + region.cell_y());
            }
    std::uniform_real_distribution<double> ux(x_lo, x_hi), uy(y_lo, y_hi), ua(0.0, 2.0 * std::numbers::pi);
    std::vector<PhasePoint> out;
    std::size_t tries = 0;
    while (out.size() < count) {
        detail::require(++tries < 1000000 * count, ErrorKind::convergence, "classical",
                        "energy-shell sampling rejected too many points");
        const double x = ux(rng), y = uy(rng);
        if (!region.contains(x, y))
            continue;
        const double ke = energy - u.value(x, y);
        if (ke <= 0.0)
            continue;
        const double p = std::sqrt(2.0 * ke);
        const double a = ua(rng);
        out.push_back({x, y, p * std::cos(a), p * std::sin(a)});
    }
    return out;
}

struct EnsembleResult {
    double energy = 0.0;
    std::string well;
    std::vector<double> estimates;
    std::vector<PhasePoint> initial;
    double median = 0.0;
    double max_energy_error = 0.0;
};

inline double median_of(std::vector<double> v)
{
    detail::require(!v.empty(), ErrorKind::domain, "classical", "median of empty set");
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

/// Regularity estimates of `count` trajectories seeded on the energy shell of one well.
inline EnsembleResult well_ensemble(const Potential2D& u, const std::string& label, double x_min, double y_min,
                                    double energy, const Box2D& box, std::size_t count, std::uint64_t seed, double h,
                                    double duration, std::optional<double> energy_scale = std::nullopt)
{
    const auto region = well_region(u, energy, x_min, y_min, box);
    EnsembleResult res;
    res.energy = energy;
    res.well = label;
    res.initial = sample_energy_shell(u, region, energy, count, seed);
    IntegrateOptions opt;
    opt.sample_every = 0;
    opt.track_lyapunov = true;
    opt.energy_scale = energy_scale;
    for (const auto& s0 : res.initial) {
        const auto tr = integrate(u, s0, h, duration, opt);
        res.estimates.push_back(*tr.lyapunov);
        res.max_energy_error = std::max(res.max_energy_error, tr.max_energy_error);
    }
    res.median = median_of(res.estimates);
    return res;
}

} // namespace mwell
