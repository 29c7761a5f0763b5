#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mwell/error.hpp"
#include "mwell/grid.hpp"
#include "mwell/potentials.hpp"
#include "mwell/specfun.hpp"

namespace mwell {

// Everything here works in the dimensionless coordinate xi = sqrt(omega) x,
// where the seed oscillator is H = -1/2 d^2/dxi^2 + xi^2/2 and energies are in
// units of omega. potential_x() and levels_absolute() convert back.

/// Parameters of the exactly solvable double- and triple-well families.
struct SusyParams {
    double omega = 1.0;
    double eps_bar = 0.0;                                            // added level, units of omega
    double eps1_bar = std::numeric_limits<double>::quiet_NaN();      // second added level (triple well)
    double lambda = 1.0;                                             // asymmetry weight Lambda
    double lambda1 = 1.0;                                            // second weight Lambda_1

    double nu() const { return eps_bar - 0.5; }
    double mu() const { return eps1_bar - 0.5; }
    bool triple() const { return !std::isnan(eps1_bar); }

    static SusyParams double_well(double nu, double lambda, double omega = 1.0)
    {
        SusyParams p;
        p.omega = omega;
        p.eps_bar = nu + 0.5;
        p.lambda = lambda;
        return p;
    }

    static SusyParams triple_well(double nu, double mu, double lambda, double lambda1, double omega = 1.0)
    {
        SusyParams p = double_well(nu, lambda, omega);
        p.eps1_bar = mu + 0.5;
        p.lambda1 = lambda1;
        return p;
    }

    void validate() const
    {
        detail::require(omega > 0.0, ErrorKind::domain, "susy", "omega must be positive");
        detail::require(eps_bar < 0.5, ErrorKind::domain, "susy", "added level must lie below the oscillator ground state");
        detail::require(lambda > 0.0, ErrorKind::domain, "susy", "Lambda must be positive");
        if (triple()) {
            detail::require(eps1_bar < eps_bar, ErrorKind::domain, "susy", "need eps1 < eps < 1/2");
            detail::require(lambda1 > 0.0, ErrorKind::domain, "susy", "Lambda_1 must be positive");
        }
    }
};

enum class SusyFamily { Hmm, Hpp, triple_Hmm, triple_Hpp };

inline std::string_view to_string(SusyFamily f)
{
    switch (f) {
    case SusyFamily::Hmm: return "Hmm";
    case SusyFamily::Hpp: return "Hpp";
    case SusyFamily::triple_Hmm: return "triple_Hmm";
    case SusyFamily::triple_Hpp: return "triple_Hpp";
    }
    return "?";
}

/// Which coefficient to use in front of the Wronskian term of the
/// oscillator-descended triple-well states. `derived` is (eps - eps1)/(E - eps);
/// `printed` is (eps - eps1)/(E - eps1). Only `derived` solves the
/// Schroedinger equation; `printed` exists so tests can show that.
enum class TripleCoefficient { derived, printed };

/// phi_1 + Lambda phi_2 built from a scaled pair, kept scaled.
inline Scaled combine(const Scaled& a, const Scaled& b, double weight)
{
    const double lw = std::log(std::abs(weight));
    const double sign = weight < 0 ? -1.0 : 1.0;
    const double top = std::max(a.log_scale, b.log_scale + lw);
    const double fa = std::exp(a.log_scale - top);
    const double fb = std::exp(b.log_scale + lw - top) * sign;
    Scaled out;
    out.log_scale = top;
    out.value = a.value * fa + b.value * fb;
    out.deriv = a.deriv * fa + b.deriv * fb;
    return out;
}

/// Analytic evaluator of the constructed potentials and states at arbitrary xi.
/// Holds the cylinder-function evaluators; immutable and shareable.
class SusyEvaluator {
public:
    SusyEvaluator(SusyParams p, SusyFamily family) : p_(checked(p)), family_(family), d_nu_(p.nu())
    {
        const bool want_triple = family == SusyFamily::triple_Hmm || family == SusyFamily::triple_Hpp;
        detail::require(want_triple == p_.triple(), ErrorKind::domain, "susy",
                        "family tag does not match the parameter set");
        if (family == SusyFamily::Hmm)
            detail::require(p_.lambda == 1.0, ErrorKind::domain, "susy", "Hmm family has Lambda = 1");
        if (family == SusyFamily::triple_Hmm)
            detail::require(p_.lambda1 == 1.0, ErrorKind::domain, "susy", "triple_Hmm family has Lambda_1 = 1");
        if (p_.triple()) {
            detail::require(p_.nu() - p_.mu() > 1e-8, ErrorKind::construction, "susy",
                            "degenerate added levels: normalization constants vanish as mu -> nu");
            d_mu_.emplace(p_.mu());
        }
    }

    const SusyParams& params() const { return p_; }
    SusyFamily family() const { return family_; }
    bool triple() const { return p_.triple(); }

    /// phi = D_nu(sqrt2 xi) + Lambda D_nu(-sqrt2 xi), scaled, derivative in xi.
    std::vector<Scaled> phi(std::span<const double> xi) const
    {
        const auto pair = cylinder_pair(d_nu_, xi);
        std::vector<Scaled> out(xi.size());
        for (std::size_t j = 0; j < xi.size(); ++j)
            out[j] = combine(pair.phi1[j], pair.phi2[j], p_.lambda);
        return out;
    }

    /// u = D_mu(sqrt2 xi) - Lambda_1 D_mu(-sqrt2 xi) (triple well only).
    std::vector<Scaled> u(std::span<const double> xi) const
    {
        detail::require(triple(), ErrorKind::domain, "susy", "u is defined for the triple well only");
        const auto pair = cylinder_pair(*d_mu_, xi);
        std::vector<Scaled> out(xi.size());
        for (std::size_t j = 0; j < xi.size(); ++j)
            out[j] = combine(pair.phi1[j], pair.phi2[j], -p_.lambda1);
        return out;
    }

    /// Potential in xi units. Double well: xi^2/2 - (ln phi)'' = -xi^2/2 + 2 eps + (phi'/phi)^2.
    /// Triple well: xi^2/2 - (ln W)'' with W = u phi' - u' phi and W' = -2 (eps - eps1) u phi.
    std::vector<double> potential(std::span<const double> xi) const
    {
        std::vector<double> out(xi.size());
        const auto f = phi(xi);
        if (!triple()) {
            for (std::size_t j = 0; j < xi.size(); ++j) {
                check_phi(f[j], xi[j]);
                const double l = f[j].deriv / f[j].value;
                out[j] = -0.5 * xi[j] * xi[j] + 2.0 * p_.eps_bar + l * l;
            }
            return out;
        }
        const auto g = u(xi);
        const double delta = p_.eps_bar - p_.eps1_bar;
        for (std::size_t j = 0; j < xi.size(); ++j) {
            const double w = wronskian_scaled(g[j], f[j], xi[j]);
            const double a = g[j].value * f[j].value / w;
            const double b = (g[j].deriv * f[j].value + g[j].value * f[j].deriv) / w;
            out[j] = 0.5 * xi[j] * xi[j] + 2.0 * delta * b + 4.0 * delta * delta * a * a;
        }
        return out;
    }

    /// Superpotential -1/2 ln(phi_Lambda / phi_1) of the double-well step.
    std::vector<double> superpotential(std::span<const double> xi) const
    {
        detail::require(!triple(), ErrorKind::domain, "susy", "superpotential is defined for the double well");
        const auto pair = cylinder_pair(d_nu_, xi);
        std::vector<double> out(xi.size());
        for (std::size_t j = 0; j < xi.size(); ++j) {
            const auto num = combine(pair.phi1[j], pair.phi2[j], p_.lambda);
            const auto den = combine(pair.phi1[j], pair.phi2[j], 1.0);
            check_phi(num, xi[j]);
            out[j] = -0.5 * (num.log_scale - den.log_scale + std::log(num.value / den.value));
        }
        return out;
    }

    /// (phi_1 - phi_2)/(phi_1 + phi_2), whose limit at +inf is -1.
    std::vector<double> delta_function(std::span<const double> xi) const
    {
        const auto pair = cylinder_pair(d_nu_, xi);
        std::vector<double> out(xi.size());
        for (std::size_t j = 0; j < xi.size(); ++j) {
            const auto num = combine(pair.phi1[j], pair.phi2[j], -1.0);
            const auto den = combine(pair.phi1[j], pair.phi2[j], 1.0);
            out[j] = num.value / den.value;
        }
        return out;
    }

    /// Energies in units of omega, unshifted: added levels, then n + 1/2.
    std::vector<double> levels(int n_ho_states) const
    {
        std::vector<double> out;
        if (triple())
            out.push_back(p_.eps1_bar);
        out.push_back(p_.eps_bar);
        for (int n = 0; n < n_ho_states; ++n)
            out.push_back(n + 0.5);
        return out;
    }

    std::size_t added_levels() const { return triple() ? 2 : 1; }

    /// Closed-form normalization constants N^{-2} of the added states, in level order.
    std::vector<double> normalization_constants() const
    {
        const double sp = std::sqrt(std::numbers::pi);
        if (!triple())
            return {2.0 * p_.lambda * sp / std::tgamma(-p_.nu())};
        const double d = p_.nu() - p_.mu();
        return {4.0 * p_.lambda1 * d * sp / std::tgamma(-p_.mu()), 4.0 * p_.lambda * d * sp / std::tgamma(-p_.nu())};
    }

    /// Normalized state `level` (index into levels()) sampled at xi.
    std::vector<double> state(std::size_t level, std::span<const double> xi,
                              TripleCoefficient coeff = TripleCoefficient::derived) const
    {
        const auto f = phi(xi);
        const auto norms = normalization_constants();
        std::vector<double> out(xi.size());
        if (!triple()) {
            if (level == 0) {
                const double c = std::sqrt(norms[0]);
                for (std::size_t j = 0; j < xi.size(); ++j) {
                    check_phi(f[j], xi[j]);
                    out[j] = c * std::exp(-f[j].log_scale) / f[j].value;
                }
                return out;
            }
            const int n = static_cast<int>(level) - 1;
            const double e = n + 0.5;
            const double c = 1.0 / std::sqrt(2.0 * (e - p_.eps_bar));
            for (std::size_t j = 0; j < xi.size(); ++j) {
                const auto [psi, dpsi] = ho_value_and_derivative(n, xi[j]);
                const double l = f[j].deriv / f[j].value;
                out[j] = c * (psi * l - dpsi);
            }
            return out;
        }

        const auto g = u(xi);
        const double delta = p_.eps_bar - p_.eps1_bar;
        if (level == 0 || level == 1) {
            const double c = std::sqrt(norms[level]);
            for (std::size_t j = 0; j < xi.size(); ++j) {
                const double w = wronskian_scaled(g[j], f[j], xi[j]);
                // phi / W = exp(-S_u) vphi / w ; u / W = exp(-S_phi) vu / w
                out[j] = level == 0 ? c * std::exp(-g[j].log_scale) * f[j].value / w
                                    : c * std::exp(-f[j].log_scale) * g[j].value / w;
            }
            return out;
        }
        const int n = static_cast<int>(level) - 2;
        const double e = n + 0.5;
        const double de = e - p_.eps_bar;
        const double de1 = e - p_.eps1_bar;
        for (std::size_t j = 0; j < xi.size(); ++j) {
            const auto [psi, dpsi] = ho_value_and_derivative(n, xi[j]);
            const double w = wronskian_scaled(g[j], f[j], xi[j]);
            // u W[psi, phi] / W[u, phi], all scales cancel.
            const double ratio = g[j].value * (psi * f[j].deriv - dpsi * f[j].value) / w;
            if (coeff == TripleCoefficient::derived)
                out[j] = std::sqrt(de / de1) * (psi + delta / de * ratio);
            else
                out[j] = std::sqrt(de / de1) * (psi + delta / de1 * ratio);
        }
        return out;
    }

    /// Normalized zero-mode style auxiliary functions chi_1, chi_2 (triple well), scaled by phi.
    /// Returns chi_1 and Lambda_1 chi_2 such that their sum is W[u, phi] / phi.
    std::pair<std::vector<double>, std::vector<double>> chi(std::span<const double> xi) const
    {
        detail::require(triple(), ErrorKind::domain, "susy", "chi is defined for the triple well only");
        const auto f = phi(xi);
        const auto pair = cylinder_pair(*d_mu_, xi);
        std::pair<std::vector<double>, std::vector<double>> out;
        out.first.resize(xi.size());
        out.second.resize(xi.size());
        for (std::size_t j = 0; j < xi.size(); ++j) {
            const auto& a = pair.phi1[j];
            const auto& b = pair.phi2[j];
            // W[y, phi] / phi = y (phi'/phi) - y'
            const double l = f[j].deriv / f[j].value;
            out.first[j] = std::exp(a.log_scale) * (a.value * l - a.deriv);
            out.second[j] = -p_.lambda1 * std::exp(b.log_scale) * (b.value * l - b.deriv);
        }
        return out;
    }

private:
    static SusyParams checked(SusyParams p)
    {
        p.validate();
        return p;
    }

    static std::pair<double, double> ho_value_and_derivative(int n, double xi)
    {
        const auto h = ho_functions(n + 1, xi, 1.0);
        const double psi = h[static_cast<std::size_t>(n)];
        const double up = h[static_cast<std::size_t>(n) + 1];
        const double down = n > 0 ? h[static_cast<std::size_t>(n) - 1] : 0.0;
        return {psi, std::sqrt(n / 2.0) * down - std::sqrt((n + 1) / 2.0) * up};
    }

    static void check_phi(const Scaled& f, double xi)
    {
        if (!(f.value > 0.0)) {
            std::ostringstream msg;
            msg << "auxiliary solution phi is not positive at xi = " << xi;
            detail::fail(ErrorKind::construction, "susy", msg.str());
        }
    }

    /// W[u, phi] with the scales of u and phi divided out.
    static double wronskian_scaled(const Scaled& g, const Scaled& f, double xi)
    {
        const double w = g.value * f.deriv - g.deriv * f.value;
        if (!(w > 0.0)) {
            std::ostringstream msg;
            msg << "Wronskian W[u, phi] has a node or wrong sign at xi = " << xi;
            detail::fail(ErrorKind::construction, "susy", msg.str());
        }
        return w;
    }

    SusyParams p_;
    SusyFamily family_;
    CylinderFunction d_nu_;
    std::optional<CylinderFunction> d_mu_;
};

/// A constructed model sampled on a xi grid.
struct SolvableModel {
    SusyParams params;
    SusyFamily family = SusyFamily::Hpp;
    std::shared_ptr<const SusyEvaluator> evaluator;
    Grid1D grid;                          // xi grid
    std::vector<double> potential;        // U(xi_j), units of omega
    std::vector<double> levels;           // unshifted, units of omega
    std::vector<WaveFunction1D> states;   // one per level, normalized on the grid
    std::vector<double> normalization;    // closed-form N^{-2} of the added states
    std::vector<double> measured_norms;   // grid integral of each state before any correction

    std::size_t added_levels() const { return evaluator->added_levels(); }

    /// Levels counted from the lowest added level, as in the factorized form.
    std::vector<double> shifted_levels() const
    {
        auto out = levels;
        const double e0 = levels.front();
        for (auto& e : out)
            e -= e0;
        return out;
    }

    /// Absolute energies omega * level.
    std::vector<double> levels_absolute() const
    {
        auto out = levels;
        for (auto& e : out)
            e *= params.omega;
        return out;
    }

    /// U as a potential in xi (units of omega) with vectorized evaluation.
    Potential1D potential_xi() const
    {
        Potential1D pot;
        pot.kind = PotentialKind::susy_numeric;
        pot.name = std::string("susy-") + std::string(to_string(family));
        auto ev = evaluator;
        pot.value = [ev](double x) { return ev->potential(std::span<const double>(&x, 1)).front(); };
        pot.batch = [ev](std::span<const double> xs) { return ev->potential(xs); };
        return pot;
    }

    /// U in natural units: omega * U_xi(sqrt(omega) x).
    Potential1D potential_x() const
    {
        Potential1D pot = potential_xi();
        const double w = params.omega;
        const double s = std::sqrt(w);
        auto ev = evaluator;
        pot.value = [ev, w, s](double x) {
            const double xi = s * x;
            return w * ev->potential(std::span<const double>(&xi, 1)).front();
        };
        pot.batch = [ev, w, s](std::span<const double> xs) {
            std::vector<double> xi(xs.begin(), xs.end());
            for (auto& v : xi)
                v *= s;
            auto u = ev->potential(xi);
            for (auto& v : u)
                v *= w;
            return u;
        };
        return pot;
    }
};

/// Default xi grid for SUSY models: |xi| <= 25 with 2^12 nodes.
inline Grid1D default_susy_grid() { return make_grid(-25.0, 25.0, 12); }

namespace detail {

inline SolvableModel build_model(const SusyParams& params, SusyFamily family, const Grid1D& grid, int n_ho_states)
{
    require(n_ho_states >= 1, ErrorKind::domain, "susy", "need at least one oscillator-descended state");
    require(grid.x_min() >= -42.0 && grid.x_max() <= 42.0, ErrorKind::domain, "susy",
            "xi grid must stay within |xi| <= 42 (|z| <= 60)");
    SolvableModel m;
    m.params = params;
    m.family = family;
    m.evaluator = std::make_shared<const SusyEvaluator>(params, family);
    m.grid = grid;
    const auto xi = grid.nodes();
    m.potential = m.evaluator->potential(xi);
    m.levels = m.evaluator->levels(n_ho_states);
    m.normalization = m.evaluator->normalization_constants();
    for (std::size_t k = 0; k < m.levels.size(); ++k) {
        auto values = m.evaluator->state(k, xi);
        auto psi = from_real(grid, std::span<const double>(values));
        const double n2 = norm_squared(psi);
        m.measured_norms.push_back(n2);
        if (std::abs(n2 - 1.0) > 1e-6) {
            std::ostringstream msg;
            msg << "state " << k << " integrates to " << n2 << " on the grid; grid too small or too coarse";
            fail(ErrorKind::normalization, "susy", msg.str());
        }
        m.states.push_back(std::move(psi));
    }
    return m;
}

} // namespace detail

/// Double-well model: one added level eps below the oscillator ladder.
/// Lambda = 1 gives the symmetric (Hmm) member; other Lambda the Hpp member.
inline SolvableModel build_double_well(const SusyParams& params, const Grid1D& grid = default_susy_grid(),
                                       int n_ho_states = 10, std::optional<SusyFamily> family = std::nullopt)
{
    const SusyFamily f = family.value_or(params.lambda == 1.0 ? SusyFamily::Hmm : SusyFamily::Hpp);
    detail::require(f == SusyFamily::Hmm || f == SusyFamily::Hpp, ErrorKind::domain, "susy",
                    "double-well family must be Hmm or Hpp");
    return detail::build_model(params, f, grid, n_ho_states);
}

/// Triple-well model: added levels eps1 < eps below the oscillator ladder.
inline SolvableModel build_triple_well(const SusyParams& params, const Grid1D& grid = default_susy_grid(),
                                       int n_ho_states = 10, std::optional<SusyFamily> family = std::nullopt)
{
    const SusyFamily f = family.value_or(params.lambda1 == 1.0 ? SusyFamily::triple_Hmm : SusyFamily::triple_Hpp);
    detail::require(f == SusyFamily::triple_Hmm || f == SusyFamily::triple_Hpp, ErrorKind::domain, "susy",
                    "triple-well family must be triple_Hmm or triple_Hpp");
    return detail::build_model(params, f, grid, n_ho_states);
}

inline std::vector<double> superpotential(const SusyParams& params, const Grid1D& grid)
{
    const SusyEvaluator ev(params, params.lambda == 1.0 ? SusyFamily::Hmm : SusyFamily::Hpp);
    return ev.superpotential(grid.nodes());
}

inline const WaveFunction1D& susy_state(const SolvableModel& model, std::size_t level_index)
{
    detail::require(level_index < model.states.size(), ErrorKind::domain, "susy", "level index out of range");
    return model.states[level_index];
}

/// Sign changes of a real sampled function, ignoring samples below floor * max|f|.
inline int count_sign_changes(std::span<const double> f, double floor = 1e-8)
{
    double peak = 0.0;
    for (double v : f)
        peak = std::max(peak, std::abs(v));
    int changes = 0;
    int last = 0;
    for (double v : f) {
        if (std::abs(v) <= floor * peak)
            continue;
        const int s = v > 0 ? 1 : -1;
        if (last != 0 && s != last)
            ++changes;
        last = s;
    }
    return changes;
}

inline int count_sign_changes(const WaveFunction1D& psi, double floor = 1e-8)
{
    std::vector<double> re(psi.values.size());
    for (std::size_t j = 0; j < re.size(); ++j)
        re[j] = psi.values[j].real();
    return count_sign_changes(re, floor);
}

/// Model descriptor as a JSON-like record.
inline std::string describe(const SolvableModel& m)
{
    std::ostringstream os;
    os.precision(17);
    os << "{\"family\": \"" << to_string(m.family) << "\", \"omega\": " << m.params.omega
       << ", \"eps_bar\": " << m.params.eps_bar << ", \"nu\": " << m.params.nu() << ", \"Lambda\": " << m.params.lambda;
    if (m.params.triple())
        os << ", \"eps1_bar\": " << m.params.eps1_bar << ", \"mu\": " << m.params.mu()
           << ", \"Lambda1\": " << m.params.lambda1;
    os << ", \"levels\": [";
    for (std::size_t k = 0; k < m.levels.size(); ++k)
        os << (k ? ", " : "") << m.levels[k];
    os << "], \"normalization_inv_sq\": [";
    for (std::size_t k = 0; k < m.normalization.size(); ++k)
        os << (k ? ", " : "") << m.normalization[k];
    os << "]}";
    return os.str();
}

} // namespace mwell
