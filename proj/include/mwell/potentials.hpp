#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "mwell/error.hpp"
#include "mwell/grid.hpp"

namespace mwell {

/// Sparse polynomial in D variables: exponent tuple -> coefficient.
template <std::size_t D>
class Polynomial {
public:
    using Exponents = std::array<int, D>;
    using Point = std::array<double, D>;

    Polynomial() = default;
    Polynomial(std::initializer_list<std::pair<const Exponents, double>> terms) : terms_(terms) { prune(); }
    explicit Polynomial(std::map<Exponents, double> terms) : terms_(std::move(terms)) { prune(); }

    const std::map<Exponents, double>& terms() const { return terms_; }

    void add(const Exponents& e, double c)
    {
        for (int k : e)
            detail::require(k >= 0, ErrorKind::domain, "potentials", "negative polynomial exponent");
        terms_[e] += c;
        prune();
    }

    int degree() const
    {
        int d = 0;
        for (const auto& [e, c] : terms_) {
            int s = 0;
            for (int k : e)
                s += k;
            d = std::max(d, s);
        }
        return d;
    }

    /// Highest power of one variable.
    int degree_in(std::size_t axis) const
    {
        int d = 0;
        for (const auto& [e, c] : terms_)
            d = std::max(d, e[axis]);
        return d;
    }

    double operator()(const Point& p) const
    {
        double acc = 0.0;
        for (const auto& [e, c] : terms_) {
            double t = c;
            for (std::size_t i = 0; i < D; ++i)
                t *= ipow(p[i], e[i]);
            acc += t;
        }
        return acc;
    }

    Polynomial derivative(std::size_t axis) const
    {
        std::map<Exponents, double> out;
        for (const auto& [e, c] : terms_) {
            if (e[axis] == 0)
                continue;
            auto f = e;
            f[axis] -= 1;
            out[f] += c * e[axis];
        }
        return Polynomial(std::move(out));
    }

    Polynomial scaled(double s) const
    {
        auto out = terms_;
        for (auto& [e, c] : out)
            c *= s;
        return Polynomial(std::move(out));
    }

private:
    static double ipow(double x, int n)
    {
        double r = 1.0;
        for (int i = 0; i < n; ++i)
            r *= x;
        return r;
    }

    void prune() { std::erase_if(terms_, [](const auto& kv) { return kv.second == 0.0; }); }

    std::map<Exponents, double> terms_;
};

using Polynomial1D = Polynomial<1>;
using Polynomial2D = Polynomial<2>;

enum class PotentialKind { ho, qo, d5, polynomial, susy_numeric, custom };

/// U(x) with first and second derivatives.
struct Potential1D {
    PotentialKind kind = PotentialKind::custom;
    std::string name;
    std::function<double(double)> value;
    std::function<double(double)> derivative;
    std::function<double(double)> second_derivative;
    std::optional<Polynomial1D> polynomial;
    // Optional vectorized evaluation; potentials built from a sweep (SUSY) are
    // far cheaper evaluated on many points at once.
    std::function<std::vector<double>(std::span<const double>)> batch;

    double operator()(double x) const { return value(x); }

    std::vector<double> at(std::span<const double> xs) const
    {
        if (batch)
            return batch(xs);
        std::vector<double> out(xs.size());
        for (std::size_t j = 0; j < xs.size(); ++j)
            out[j] = value(xs[j]);
        return out;
    }

    std::vector<double> sample(const Grid1D& g) const
    {
        const auto xs = g.nodes();
        return at(xs);
    }
};

/// U(x, y) with gradient and Hessian (xx, xy, yy).
struct Potential2D {
    PotentialKind kind = PotentialKind::custom;
    std::string name;
    std::map<std::string, double> params;
    std::function<double(double, double)> value;
    std::function<std::array<double, 2>(double, double)> gradient;
    std::function<std::array<double, 3>(double, double)> hessian;
    std::optional<Polynomial2D> polynomial;

    double operator()(double x, double y) const { return value(x, y); }

    std::vector<double> sample(const Grid2D& g) const
    {
        std::vector<double> out(g.size());
        for (std::size_t iy = 0; iy < g.ny(); ++iy)
            for (std::size_t ix = 0; ix < g.nx(); ++ix)
                out[g.index(ix, iy)] = value(g.x_axis().x(ix), g.y_axis().x(iy));
        return out;
    }
};

inline Potential1D from_polynomial(Polynomial1D p, std::string name, PotentialKind kind = PotentialKind::polynomial)
{
    Potential1D u;
    u.kind = kind;
    u.name = std::move(name);
    const auto d1 = p.derivative(0);
    const auto d2 = d1.derivative(0);
    u.value = [p](double x) { return p({x}); };
    u.derivative = [d1](double x) { return d1({x}); };
    u.second_derivative = [d2](double x) { return d2({x}); };
    u.polynomial = std::move(p);
    return u;
}

inline Potential2D from_polynomial(Polynomial2D p, std::string name, PotentialKind kind = PotentialKind::polynomial)
{
    Potential2D u;
    u.kind = kind;
    u.name = std::move(name);
    const auto px = p.derivative(0);
    const auto py = p.derivative(1);
    const auto pxx = px.derivative(0);
    const auto pxy = px.derivative(1);
    const auto pyy = py.derivative(1);
    u.value = [p](double x, double y) { return p({x, y}); };
    u.gradient = [px, py](double x, double y) { return std::array<double, 2>{px({x, y}), py({x, y})}; };
    u.hessian = [pxx, pxy, pyy](double x, double y) {
        return std::array<double, 3>{pxx({x, y}), pxy({x, y}), pyy({x, y})};
    };
    u.polynomial = std::move(p);
    return u;
}

inline Potential1D ho_1d(double omega)
{
    detail::require(omega > 0.0, ErrorKind::domain, "potentials", "oscillator frequency must be positive");
    auto u = from_polynomial(Polynomial1D{{{2}, 0.5 * omega * omega}}, "ho", PotentialKind::ho);
    return u;
}

/// x^4 (times a coefficient); the banded-matrix test case.
inline Potential1D quartic_1d(double c = 1.0) { return from_polynomial(Polynomial1D{{{4}, c}}, "quartic"); }

inline Potential2D ho_2d(double omega_x, double omega_y)
{
    detail::require(omega_x > 0.0 && omega_y > 0.0, ErrorKind::domain, "potentials",
                    "oscillator frequencies must be positive");
    auto u = from_polynomial(Polynomial2D{{{2, 0}, 0.5 * omega_x * omega_x}, {{0, 2}, 0.5 * omega_y * omega_y}}, "ho2d",
                             PotentialKind::ho);
    u.params = {{"omega_x", omega_x}, {"omega_y", omega_y}};
    return u;
}

inline double eval_qo(double x, double y, double W)
{
    detail::require(W > 0.0, ErrorKind::domain, "potentials", "QO parameter W must be positive");
    const double r2 = x * x + y * y;
    return r2 / (2.0 * W) + x * y * y - x * x * x / 3.0 + r2 * r2;
}

/// Quadrupole-oscillation surface: (x^2+y^2)/(2W) + x y^2 - x^3/3 + (x^2+y^2)^2.
inline Potential2D qo(double W)
{
    detail::require(W > 0.0, ErrorKind::domain, "potentials", "QO parameter W must be positive");
    Polynomial2D p{{{2, 0}, 0.5 / W}, {{0, 2}, 0.5 / W}, {{1, 2}, 1.0}, {{3, 0}, -1.0 / 3.0},
                   {{4, 0}, 1.0},     {{2, 2}, 2.0},     {{0, 4}, 1.0}};
    auto u = from_polynomial(std::move(p), "qo", PotentialKind::qo);
    u.params = {{"W", W}};
    return u;
}

/// Saddle energy of the QO surface for W > 16 (the three saddles are degenerate).
inline double qo_saddle_energy(double W)
{
    detail::require(W > 16.0, ErrorKind::domain, "potentials", "QO has saddles only for W > 16");
    const double x = (1.0 - std::sqrt(1.0 - 16.0 / W)) / 8.0;
    return eval_qo(x, 0.0, W);
}

inline double eval_d5(double x, double y)
{
    return 0.25 * x * x * x * x + x * y * y + 2.0 * y * y - x * x;
}

/// D5 family x^4/4 + x y^2 - b x^2 + a y^2. The default (a, b) = (2, 1) is eval_d5.
inline Potential2D d5(double a = 2.0, double b = 1.0)
{
    Polynomial2D p{{{4, 0}, 0.25}, {{1, 2}, 1.0}, {{2, 0}, -b}, {{0, 2}, a}};
    auto u = from_polynomial(std::move(p), "d5", PotentialKind::d5);
    u.params = {{"a", a}, {"b", b}};
    return u;
}

/// U / hbar^2: the same dynamics expressed in units where hbar = 1.
inline Potential2D scaled(const Potential2D& u, double factor)
{
    Potential2D out = u;
    out.name = u.name + "*" + std::to_string(factor);
    out.value = [v = u.value, factor](double x, double y) { return factor * v(x, y); };
    out.gradient = [g = u.gradient, factor](double x, double y) {
        auto r = g(x, y);
        return std::array<double, 2>{factor * r[0], factor * r[1]};
    };
    out.hessian = [h = u.hessian, factor](double x, double y) {
        auto r = h(x, y);
        return std::array<double, 3>{factor * r[0], factor * r[1], factor * r[2]};
    };
    if (u.polynomial)
        out.polynomial = u.polynomial->scaled(factor);
    return out;
}

inline Potential1D scaled(const Potential1D& u, double factor)
{
    Potential1D out = u;
    out.name = u.name + "*" + std::to_string(factor);
    out.value = [v = u.value, factor](double x) { return factor * v(x); };
    if (u.derivative)
        out.derivative = [d = u.derivative, factor](double x) { return factor * d(x); };
    if (u.second_derivative)
        out.second_derivative = [d = u.second_derivative, factor](double x) { return factor * d(x); };
    if (u.polynomial)
        out.polynomial = u.polynomial->scaled(factor);
    if (u.batch)
        out.batch = [b = u.batch, factor](std::span<const double> xs) {
            auto v = b(xs);
            for (auto& e : v)
                e *= factor;
            return v;
        };
    return out;
}

/// <psi|H|psi> with U given as a potential rather than samples.
template <class Pot, class Grid>
    requires requires(const Pot& u, const Grid& g) { u.sample(g); }
double expectation_energy(const WaveFunction<Grid>& psi, const Pot& u)
{
    const auto samples = u.sample(psi.grid);
    return expectation_energy(psi, std::span<const double>(samples));
}

// ---------------------------------------------------------------------------
// Critical points

enum class CriticalKind { minimum, saddle, maximum, degenerate };

inline std::string_view to_string(CriticalKind k)
{
    switch (k) {
    case CriticalKind::minimum: return "minimum";
    case CriticalKind::saddle: return "saddle";
    case CriticalKind::maximum: return "maximum";
    case CriticalKind::degenerate: return "degenerate";
    }
    return "?";
}

struct CriticalPoint {
    double x = 0.0;
    double y = 0.0;
    double energy = 0.0;
    CriticalKind kind = CriticalKind::degenerate;
    std::array<double, 2> hessian_eigenvalues{};
    double gradient_norm = 0.0;
};

struct Box2D {
    double x_min, x_max, y_min, y_max;
};

struct CriticalPointReport {
    std::vector<CriticalPoint> points;
    std::vector<std::array<double, 2>> unconverged_seeds;

    std::size_t count(CriticalKind k) const
    {
        return static_cast<std::size_t>(
            std::count_if(points.begin(), points.end(), [k](const auto& p) { return p.kind == k; }));
    }
};

inline std::array<double, 2> symmetric_eigenvalues(const std::array<double, 3>& h)
{
    const double mean = 0.5 * (h[0] + h[2]);
    const double dev = std::hypot(0.5 * (h[0] - h[2]), h[1]);
    return {mean - dev, mean + dev};
}

/// Newton iteration on grad U = 0 from a seeds x seeds lattice over the box.
/// Converged points are deduplicated at distance 1e-6 and classified by the
/// Hessian spectrum; |lambda| < 1e-8 counts as degenerate.
inline CriticalPointReport find_critical_points(const Potential2D& u, const Box2D& box, int seeds = 21,
                                                int max_iterations = 200)
{
    detail::require(seeds >= 1, ErrorKind::domain, "potentials", "need at least one seed");
    detail::require(static_cast<bool>(u.gradient) && static_cast<bool>(u.hessian), ErrorKind::domain, "potentials",
                    "critical point search needs gradient and Hessian");
    detail::require(box.x_max > box.x_min && box.y_max > box.y_min, ErrorKind::domain, "potentials",
                    "empty search box");
    CriticalPointReport report;
    const double wx = box.x_max - box.x_min;
    const double wy = box.y_max - box.y_min;
    const double tol_box = 1e-9 * std::max(wx, wy);

    for (int i = 0; i < seeds; ++i) {
        for (int j = 0; j < seeds; ++j) {
            const double sx = seeds == 1 ? 0.5 * (box.x_min + box.x_max) : box.x_min + wx * i / (seeds - 1);
            const double sy = seeds == 1 ? 0.5 * (box.y_min + box.y_max) : box.y_min + wy * j / (seeds - 1);
            double x = sx;
            double y = sy;
            bool converged = false;
            for (int it = 0; it < max_iterations; ++it) {
                const auto g = u.gradient(x, y);
                const auto h = u.hessian(x, y);
                const double det = h[0] * h[2] - h[1] * h[1];
                if (det == 0.0 || !std::isfinite(det))
                    break;
                const double dx = (h[2] * g[0] - h[1] * g[1]) / det;
                const double dy = (h[0] * g[1] - h[1] * g[0]) / det;
                x -= dx;
                y -= dy;
                if (!std::isfinite(x) || !std::isfinite(y) || std::abs(x - sx) > 2 * wx + 1 ||
                    std::abs(y - sy) > 2 * wy + 1)
                    break;
                if (std::hypot(dx, dy) < 1e-15 * (1.0 + std::hypot(x, y))) {
                    converged = true;
                    break;
                }
            }
            const auto g = u.gradient(x, y);
            const double gn = std::hypot(g[0], g[1]);
            if (!converged && gn < 1e-12)
                converged = true;
            if (!converged || gn >= 1e-10) {
                report.unconverged_seeds.push_back({sx, sy});
                continue;
            }
            // Newton may wander to a point outside the box; only in-box points count.
            if (x < box.x_min - tol_box || x > box.x_max + tol_box || y < box.y_min - tol_box ||
                y > box.y_max + tol_box)
                continue;
            const bool seen = std::any_of(report.points.begin(), report.points.end(),
                                          [&](const auto& p) { return std::hypot(p.x - x, p.y - y) < 1e-6; });
            if (seen)
                continue;
            CriticalPoint cp;
            cp.x = x;
            cp.y = y;
            cp.energy = u.value(x, y);
            cp.gradient_norm = gn;
            cp.hessian_eigenvalues = symmetric_eigenvalues(u.hessian(x, y));
            const auto [l0, l1] = cp.hessian_eigenvalues;
            if (std::abs(l0) < 1e-8 || std::abs(l1) < 1e-8)
                cp.kind = CriticalKind::degenerate;
            else if (l0 > 0)
                cp.kind = CriticalKind::minimum;
            else if (l1 < 0)
                cp.kind = CriticalKind::maximum;
            else
                cp.kind = CriticalKind::saddle;
            report.points.push_back(cp);
        }
    }
    std::sort(report.points.begin(), report.points.end(), [](const auto& a, const auto& b) {
        return std::tie(a.energy, a.x, a.y) < std::tie(b.energy, b.x, b.y);
    });
    return report;
}

/// Default search box used by the CLI and the acceptance runs.
inline Box2D default_search_box(const Potential2D& u)
{
    if (u.kind == PotentialKind::qo)
        return {-0.3, 0.3, -0.3, 0.3};
    return {-3.0, 3.0, -3.0, 3.0};
}

} // namespace mwell
