#pragma once

// Command-line driver. Needs the vendored CLI11.hpp and json.hpp on the include path.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mwell/mwell.hpp"

namespace mwell::cli {

using json = nlohmann::ordered_json;

struct Flag {
    const char* name; // without the leading dashes; config key is name with '-' -> '_'
    const char* help;
};

inline const std::map<std::string, std::vector<Flag>>& command_flags()
{
    static const std::map<std::string, std::vector<Flag>> table = {
        {"susy-gen",
         {{"nu", "order nu = eps - 1/2 of the added level"},
          {"mu", "order mu = eps1 - 1/2; builds the triple well as well"},
          {"lambda", "asymmetry weight Lambda (default 1)"},
          {"lambda1", "second weight Lambda_1 (default 1)"},
          {"omega", "oscillator frequency (default 1)"},
          {"xi-min", "grid start (default -25)"},
          {"xi-max", "grid end (default 25)"},
          {"grid-log2", "log2 of the node count (default 12)"},
          {"n-ho", "oscillator-descended states to emit (default 10)"}}},
        {"diag",
         {{"potential", "ho|quartic|susy-double|susy-triple|ho2d|qo|d5"},
          {"W", "QO shape parameter"},
          {"scale", "multiply U by this factor (1/hbar^2), default 1"},
          {"nu", "SUSY order"},
          {"mu", "SUSY second order"},
          {"lambda", "SUSY weight"},
          {"lambda1", "SUSY second weight"},
          {"basis", "ho|pw|mixed|grid (default ho)"},
          {"omega", "basis frequency (default from the Hessian at the deepest minimum)"},
          {"a", "plane-wave box half width"},
          {"size", "basis size N (default 200)"},
          {"levels", "levels to report (default 10)"},
          {"check", "extra basis functions for a convergence estimate (default 0)"},
          {"dump-matrix", "1 writes the Hamiltonian as row-major float64"}}},
        {"spectral",
         {{"potential", "ho|quartic|susy-double|susy-triple|ho2d|qo|d5"},
          {"W", "QO shape parameter"},
          {"scale", "multiply U by this factor (1/hbar^2), default 1"},
          {"nu", "SUSY order"},
          {"mu", "SUSY second order"},
          {"lambda", "SUSY weight"},
          {"lambda1", "SUSY second weight"},
          {"box", "half width of the square grid box (default 8)"},
          {"grid-log2", "log2 of nodes per axis (default 7)"},
          {"steps-log2", "log2 of the step count (default 12)"},
          {"dt", "time step (default 1/E_max)"},
          {"window", "hann|rectangular (default hann)"},
          {"x0", "packet centre x"},
          {"y0", "packet centre y"},
          {"sigma", "packet width (default 1/sqrt(2))"},
          {"phase-mask", "1 applies the seeded random phase mask"},
          {"floor", "peak floor relative to the maximum (default 1e-3)"}}},
        {"poincare",
         {{"potential", "qo|d5 (default qo)"},
          {"W", "QO shape parameter (default 18)"},
          {"energy-frac", "energy as a fraction of the saddle energy (QO)"},
          {"energy", "absolute energy (overrides energy-frac)"},
          {"duration", "integration time per trajectory (default 20000)"},
          {"step", "integrator step (default 0.025)"},
          {"count", "trajectories per well (default 32)"},
          {"sos-trajectories", "trajectories per well written to the SOS CSV (default 4)"}}},
        {"nodal",
         {{"potential", "ho2d|qo (default ho2d)"},
          {"nx", "oscillator quantum number along x"},
          {"ny", "oscillator quantum number along y"},
          {"W", "QO shape parameter (default 18)"},
          {"scale", "QO scale factor 1/hbar^2 (default 2.4e9)"},
          {"size", "basis size for the QO eigenproblem (default 1000)"},
          {"energy-frac", "target energy as a fraction of the saddle energy (default 0.75)"},
          {"well", "central|all (default central)"},
          {"grid-log2", "log2 of raster nodes per axis (default 8)"}}},
        {"bench",
         {{"problem", "ho|quartic|susy-double (default ho)"},
          {"n", "levels (default 10)"},
          {"eps", "target relative-to-spacing accuracy (default 0.01)"},
          {"nu", "SUSY order (default -3)"},
          {"lambda", "SUSY weight (default 1)"},
          {"banded", "1 uses banded storage for polynomial problems"},
          {"repeats", "timing repeats (default 5)"},
          {"scaling", "1 also records dense-solve and propagation timing fits"}}},
        {"critical-points",
         {{"potential", "qo|d5|ho2d (default qo)"},
          {"W", "QO shape parameter (default 18)"},
          {"a", "D5 y^2 coefficient (default 2)"},
          {"b", "D5 x^2 coefficient (default 1)"},
          {"seeds", "Newton seeds per axis (default 21)"}}},
    };
    return table;
}

inline std::string config_key(std::string name)
{
    for (auto& c : name)
        if (c == '-')
            c = '_';
    return name;
}

/// One run directory plus its log.
class Run {
public:
    Run(const std::string& command, const ExperimentConfig& cfg, const std::filesystem::path& outdir,
        const std::string& name)
        : command_(command), cfg_(cfg)
    {
        std::string stamp = name;
        if (stamp.empty()) {
            const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
            std::tm tm{};
            localtime_r(&now, &tm);
            std::ostringstream os;
            os << std::put_time(&tm, "%Y%m%d-%H%M%S");
            stamp = os.str();
        }
        dir_ = outdir / (command + "-" + stamp);
        for (int k = 1; std::filesystem::exists(dir_); ++k)
            dir_ = outdir / (command + "-" + stamp + "-" + std::to_string(k));
        std::filesystem::create_directories(dir_);
        std::ofstream(dir_ / "config") << cfg_.to_string();
        log_.open(dir_ / "log");
        log_ << "command " << command << '\n';
    }

    const std::filesystem::path& dir() const { return dir_; }
    const ExperimentConfig& cfg() const { return cfg_; }
    std::ostream& log() { return log_; }

    std::ofstream open(const std::string& file)
    {
        std::ofstream os(dir_ / file);
        detail::require(static_cast<bool>(os), ErrorKind::io, "cli", "cannot write " + (dir_ / file).string());
        os << std::setprecision(17);
        return os;
    }

    void write_json(const std::string& file, const json& j) { open(file) << j.dump(2) << '\n'; }

private:
    std::string command_;
    ExperimentConfig cfg_;
    std::filesystem::path dir_;
    std::ofstream log_;
};

inline json error_record(const std::string& kind, const std::string& module, const std::string& message)
{
    return json{{"status", "error"}, {"kind", kind}, {"module", module}, {"message", message}};
}

// ------------------------------------------------------------- potentials

inline bool is_2d(const std::string& name) { return name == "ho2d" || name == "qo" || name == "d5"; }

inline Potential2D potential_2d(const ExperimentConfig& c, const std::string& fallback = "qo")
{
    const auto name = c.str("potential", fallback);
    Potential2D u;
    if (name == "qo")
        u = qo(c.real("W", 18.0));
    else if (name == "d5")
        u = d5(c.real("a", 2.0), c.real("b", 1.0));
    else if (name == "ho2d")
        u = ho_2d(c.real("omega_x", 1.0), c.real("omega_y", 1.0));
    else
        detail::fail(ErrorKind::config, "cli", "field 'potential': unknown 2D potential '" + name + "'");
    const double s = c.real("scale", 1.0);
    return s == 1.0 ? u : scaled(u, s);
}

inline SusyParams susy_params(const ExperimentConfig& c)
{
    const double nu = c.real("nu", -3.0);
    const double lambda = c.real("lambda", 1.0);
    const double omega = c.real("omega_susy", 1.0);
    if (c.has("mu"))
        return SusyParams::triple_well(nu, c.real("mu"), lambda, c.real("lambda1", 1.0), omega);
    return SusyParams::double_well(nu, lambda, omega);
}

/// 1D potential plus its exact levels when known.
struct Problem1D {
    Potential1D u;
    std::vector<double> exact;
};

inline Problem1D potential_1d(const ExperimentConfig& c, const std::string& key = "potential",
                              const std::string& fallback = "ho")
{
    const auto name = c.str(key, fallback);
    Problem1D p;
    if (name == "ho") {
        const double w = c.real("omega_ho", 1.0);
        p.u = ho_1d(w);
        for (int n = 0; n < 400; ++n)
            p.exact.push_back(w * (n + 0.5));
    } else if (name == "quartic") {
        p.u = quartic_1d(1.0);
    } else if (name == "susy-double" || name == "susy-triple") {
        auto params = susy_params(c);
        detail::require((name == "susy-triple") == params.triple(), ErrorKind::config, "cli",
                        "field 'mu' is required exactly for susy-triple");
        const auto m = params.triple() ? build_triple_well(params, default_susy_grid(), 1)
                                       : build_double_well(params, default_susy_grid(), 1);
        p.u = m.potential_xi();
        p.exact = m.evaluator->levels(300);
    } else {
        detail::fail(ErrorKind::config, "cli", "field '" + key + "': unknown 1D potential '" + name + "'");
    }
    const double s = c.real("scale", 1.0);
    if (s != 1.0) {
        p.u = scaled(p.u, s);
        p.exact.clear();
    }
    return p;
}

// ------------------------------------------------------------- commands

inline void write_levels(std::ostream& os, const SpectrumResult& s) { write_csv(os, s); }

inline int cmd_critical_points(Run& run)
{
    const auto& c = run.cfg();
    const auto u = potential_2d(c, "qo");
    const auto rep = find_critical_points(u, default_search_box(u), static_cast<int>(c.integer("seeds", 21)));
    auto os = run.open("critical_points.csv");
    os << "kind,x,y,energy,hessian_min,hessian_max\n";
    json pts = json::array();
    for (const auto& p : rep.points) {
        os << to_string(p.kind) << ',' << p.x << ',' << p.y << ',' << p.energy << ',' << p.hessian_eigenvalues[0]
           << ',' << p.hessian_eigenvalues[1] << '\n';
        pts.push_back({{"kind", to_string(p.kind)}, {"x", p.x}, {"y", p.y}, {"energy", p.energy}});
    }
    json summary{{"status", "ok"},
                 {"minima", rep.count(CriticalKind::minimum)},
                 {"saddles", rep.count(CriticalKind::saddle)},
                 {"maxima", rep.count(CriticalKind::maximum)},
                 {"degenerate", rep.count(CriticalKind::degenerate)},
                 {"points", pts}};
    if (u.kind == PotentialKind::qo && c.real("W", 18.0) > 16.0 && !c.has("scale"))
        summary["saddle_energy_closed_form"] = qo_saddle_energy(c.real("W", 18.0));
    run.write_json("summary.json", summary);
    run.log() << "critical points " << rep.points.size() << ", unconverged seeds " << rep.unconverged_seeds.size()
              << '\n';
    return 0;
}

inline void write_model(Run& run, const std::string& stem, const SolvableModel& m, bool with_w)
{
    auto os = run.open(stem + ".csv");
    os << "xi,U";
    if (with_w)
        os << ",W";
    for (std::size_t k = 0; k < m.states.size(); ++k)
        os << ",psi" << k;
    os << '\n';
    const auto xi = m.grid.nodes();
    std::vector<double> w;
    if (with_w)
        w = m.evaluator->superpotential(xi);
    for (std::size_t j = 0; j < xi.size(); ++j) {
        os << xi[j] << ',' << m.potential[j];
        if (with_w)
            os << ',' << w[j];
        for (const auto& s : m.states)
            os << ',' << s.values[j].real();
        os << '\n';
    }
    std::ofstream(run.dir() / (stem + ".json")) << describe(m) << '\n';
}

inline int cmd_susy_gen(Run& run)
{
    const auto& c = run.cfg();
    const double nu = c.real("nu");
    const double lambda = c.real("lambda", 1.0);
    const double omega = c.real("omega", 1.0);
    const Grid1D grid = make_grid(c.real("xi_min", -25.0), c.real("xi_max", 25.0),
                                  static_cast<int>(c.integer("grid_log2", 12)));
    const int n_ho = static_cast<int>(c.integer("n_ho", 10));
    const auto dw = build_double_well(SusyParams::double_well(nu, lambda, omega), grid, n_ho);
    write_model(run, "double_well", dw, true);
    run.log() << "double well " << describe(dw) << '\n';
    if (c.has("mu")) {
        const auto tw = build_triple_well(
            SusyParams::triple_well(nu, c.real("mu"), lambda, c.real("lambda1", 1.0), omega), grid, n_ho);
        write_model(run, "triple_well", tw, false);
        run.log() << "triple well " << describe(tw) << '\n';
    }
    return 0;
}

inline int cmd_diag(Run& run)
{
    const auto& c = run.cfg();
    const auto name = c.str("potential", "ho");
    const auto n = static_cast<std::size_t>(c.integer("size", 200));
    const auto levels = static_cast<std::size_t>(c.integer("levels", 10));
    const auto check = static_cast<std::size_t>(c.integer("check", 0));
    const auto basis_name = c.str("basis", "ho");
    SpectrumResult s;
    HamiltonianMatrix m;
    auto solve = [&](auto const& u, const BasisSpec& b, std::size_t size) {
        auto mm = assemble(u, b, size);
        auto ss = eigen_lowest(mm, std::min(levels, size), false);
        return std::pair{std::move(mm), std::move(ss)};
    };
    if (is_2d(name)) {
        const auto u = potential_2d(c);
        const auto w = default_basis_frequency(u);
        const double wx = c.real("omega", w[0]), wy = c.real("omega", w[1]);
        BasisSpec b;
        if (basis_name == "ho")
            b = BasisSpec::ho_product(wx, wy, n + check);
        else if (basis_name == "pw")
            b = BasisSpec::plane_wave(c.real("a"), c.real("a"), n + check);
        else if (basis_name == "mixed")
            b = BasisSpec::mixed(c.real("a"), wy, n + check);
        else
            detail::fail(ErrorKind::config, "cli", "field 'basis': unknown 2D basis '" + basis_name + "'");
        std::tie(m, s) = solve(u, b, n);
        if (check) {
            const auto ref = solve(u, b, n + check).second;
            for (std::size_t k = 0; k < s.size(); ++k)
                s.levels[k].uncertainty =
                    std::max(s.levels[k].uncertainty, std::abs(s.levels[k].energy - ref.levels[k].energy));
        }
    } else {
        const auto p = potential_1d(c);
        if (basis_name == "grid") {
            s = grid_eigen_1d(p.u, make_grid(-c.real("box", 12.0), c.real("box", 12.0),
                                             static_cast<int>(c.integer("grid_log2", 12))),
                              levels);
        } else {
            detail::require(basis_name == "ho", ErrorKind::config, "cli",
                            "field 'basis': 1D potentials use ho or grid");
            const BasisSpec b = BasisSpec::ho1d(c.real("omega", 1.0), n + check);
            std::tie(m, s) = solve(p.u, b, n);
            if (check) {
                const auto ref = solve(p.u, b, n + check).second;
                for (std::size_t k = 0; k < s.size(); ++k)
                    s.levels[k].uncertainty =
                        std::max(s.levels[k].uncertainty, std::abs(s.levels[k].energy - ref.levels[k].energy));
            }
        }
    }
    auto os = run.open("spectrum.csv");
    write_levels(os, s);
    if (c.integer("dump_matrix", 0) && m.dimension()) {
        std::ofstream bin(run.dir() / "matrix.bin", std::ios::binary);
        m.write_binary(bin);
    }
    run.log() << "potential " << name << ", basis " << basis_name << ", N " << n << ", levels " << s.size() << '\n';
    return 0;
}

inline int cmd_spectral(Run& run)
{
    const auto& c = run.cfg();
    const auto name = c.str("potential", "ho");
    const double box = c.real("box", 8.0);
    const int k = static_cast<int>(c.integer("grid_log2", 7));
    const auto steps = std::size_t{1} << c.integer("steps_log2", 12);
    const double sigma = c.real("sigma", 1.0 / std::sqrt(2.0));
    const auto seed = static_cast<std::uint64_t>(c.integer("seed", 1));
    SpectrumOptions so;
    so.window = c.str("window", "hann") == "rectangular" ? Window::rectangular : Window::hann;
    so.floor = c.real("floor", 1e-3);
    auto finish = [&](const Autocorrelation& p, double dt, double t_total, double e_max) {
        auto ac = run.open("autocorrelation.csv");
        ac << "t,re,im\n";
        for (std::size_t j = 0; j < p.samples.size(); ++j)
            ac << static_cast<double>(j) * p.dt << ',' << p.samples[j].real() << ',' << p.samples[j].imag() << '\n';
        const auto s = extract_spectrum(p, so);
        auto os = run.open("spectrum.csv");
        write_levels(os, s);
        run.log() << std::setprecision(17) << "dt " << dt << ", T " << t_total << ", E_max " << e_max << ", steps "
                  << steps << ", seed " << seed << ", window " << to_string(so.window) << '\n';
        for (const auto& d : s.diagnostics)
            run.log() << "diagnostic: " << d << '\n';
    };
    if (is_2d(name)) {
        const auto u = potential_2d(c);
        const Grid2D g(make_grid(-box, box, k), make_grid(-box, box, k));
        const auto pot = u.sample(g);
        const double dt = c.real("dt", PropagationPlan<Grid2D>::max_step(g, pot));
        auto psi = gaussian_packet(g, c.real("x0", 0.0), c.real("y0", 0.0), sigma, sigma);
        if (c.integer("phase_mask", 0))
            random_phase_mask(psi, seed, 1.0 / sigma);
        const PropagationPlan<Grid2D> plan(g, pot, dt, steps);
        const auto ev = evolve(psi, plan);
        run.log() << "grid " << g.nx() << "x" << g.ny() << " on [" << -box << ", " << box << "]^2\n";
        finish(ev.autocorrelation, dt, plan.duration(), plan.e_max());
    } else {
        const auto p = potential_1d(c);
        const Grid1D g = make_grid(-box, box, k);
        const auto pot = p.u.sample(g);
        const double dt = c.real("dt", PropagationPlan<Grid1D>::max_step(g, pot));
        auto psi = gaussian_packet(g, c.real("x0", 0.0), sigma);
        if (c.integer("phase_mask", 0))
            random_phase_mask(psi, seed, 1.0 / sigma);
        const PropagationPlan<Grid1D> plan(g, pot, dt, steps);
        const auto ev = evolve(psi, plan);
        run.log() << "grid " << g.size() << " on [" << -box << ", " << box << "]\n";
        finish(ev.autocorrelation, dt, plan.duration(), plan.e_max());
    }
    return 0;
}

inline int cmd_poincare(Run& run)
{
    const auto& c = run.cfg();
    const auto name = c.str("potential", "qo");
    const auto u = potential_2d(c, "qo");
    const auto seed = static_cast<std::uint64_t>(c.integer("seed", 1));
    const double h = c.real("step", 0.025);
    const double duration = c.real("duration", 20000.0);
    const auto count = static_cast<std::size_t>(c.integer("count", 32));
    const auto sos_count = static_cast<std::size_t>(c.integer("sos_trajectories", 4));
    struct Well {
        std::string label;
        double x, y;
    };
    std::vector<Well> wells;
    double energy = 0.0;
    std::optional<double> scale;
    Box2D box = default_search_box(u);
    if (name == "qo") {
        const double W = c.real("W", 18.0);
        const double es = qo_saddle_energy(W);
        energy = c.has("energy") ? c.real("energy") : c.real("energy_frac", 0.75) * es;
        scale = es;
        const double xp = (1.0 + std::sqrt(1.0 - 16.0 / W)) / 8.0;
        wells = {{"central", 0.0, 0.0}, {"peripheral", xp, 0.0}};
    } else if (name == "d5") {
        energy = c.real("energy", 0.5);
        const double xm = std::sqrt(2.0 * c.real("b", 1.0));
        wells = {{"left", -xm, 0.0}, {"right", xm, 0.0}};
        box = {-4.0, 4.0, -4.0, 4.0};
    } else {
        detail::fail(ErrorKind::config, "cli", "field 'potential': poincare supports qo and d5");
    }
    json summary = json::array();
    const auto sec = Section::y_equals(0.0);
    for (std::size_t w = 0; w < wells.size(); ++w) {
        const auto& well = wells[w];
        auto ens = well_ensemble(u, well.label, well.x, well.y, energy, box, count, seed + w, h, duration, scale);
        auto os = run.open("sos_" + well.label + ".csv");
        os << "s,ps,trajectory\n";
        IntegrateOptions io;
        io.energy_scale = scale;
        io.escape_radius = 10.0 * std::max(box.x_max - box.x_min, box.y_max - box.y_min);
        for (std::size_t t = 0; t < std::min(sos_count, ens.initial.size()); ++t) {
            const auto tr = integrate(u, ens.initial[t], h, duration, io);
            const auto rec = poincare_section(u, tr, sec, t);
            for (const auto& p : rec.points)
                os << p.s << ',' << p.ps << ',' << t << '\n';
        }
        summary.push_back({{"energy", energy},
                           {"well", well.label},
                           {"median_exponent", ens.median},
                           {"regular", ens.median < default_regularity_threshold},
                           {"max_energy_error", ens.max_energy_error}});
    }
    run.write_json("ensemble.json", summary);
    run.log() << "step " << h << ", duration " << duration << ", count " << count << ", seed " << seed << '\n';
    return 0;
}

inline int cmd_nodal(Run& run)
{
    const auto& c = run.cfg();
    const auto name = c.str("potential", "ho2d");
    const int k = static_cast<int>(c.integer("grid_log2", 8));
    NodalReport rep;
    json extra;
    if (name == "ho2d") {
        const int nx = static_cast<int>(c.integer("nx", 3)), ny = static_cast<int>(c.integer("ny", 2));
        const auto u = ho_2d(1.0, 1.0);
        const double L = std::sqrt(2.0 * (nx + ny + 1)) + 3.0;
        auto sampler = [nx, ny](const Grid2D& g) {
            std::vector<double> v(g.size());
            for (std::size_t iy = 0; iy < g.ny(); ++iy)
                for (std::size_t ix = 0; ix < g.nx(); ++ix)
                    v[g.index(ix, iy)] = ho_function(nx, g.x_axis().x(ix)) * ho_function(ny, g.y_axis().x(iy));
            return v;
        };
        rep = nodal_domains_checked(sampler, Grid2D(make_grid(-L, L, k), make_grid(-L, L, k)), nx + ny + 1.0, u);
        extra = {{"nx", nx}, {"ny", ny}};
    } else if (name == "qo") {
        const double W = c.real("W", 18.0);
        const double s = c.real("scale", 2.4e9);
        const auto u = scaled(qo(W), s);
        const double es = s * qo_saddle_energy(W);
        const double target = c.real("energy_frac", 0.75) * es;
        const auto n = static_cast<std::size_t>(c.integer("size", 1000));
        const double w = std::sqrt(s / W);
        const auto m = assemble(u, BasisSpec::ho_product(w, w, n), n);
        const auto sp = eigen_lowest(m, n, true);
        std::size_t best = 0;
        for (std::size_t j = 0; j < sp.size(); ++j)
            if (std::abs(sp.levels[j].energy - target) < std::abs(sp.levels[best].energy - target))
                best = j;
        const double e = sp.levels[best].energy;
        const double L = 1.0 / 12.0 + 0.02;
        const Box2D box{-L, L, -L, L};
        auto sampler = [&](const Grid2D& g) {
            const auto psi = basis_state(m, sp.vectors, best, g);
            std::vector<double> v(g.size());
            for (std::size_t i = 0; i < v.size(); ++i)
                v[i] = psi.values[i].real();
            return v;
        };
        std::function<std::vector<std::uint8_t>(const Grid2D&)> region;
        if (c.str("well", "central") == "central")
            region = [&](const Grid2D& g) {
                const auto r = well_region(u, e, 0.0, 0.0, box, g.nx());
                return r.mask;
            };
        rep = nodal_domains_checked(sampler, Grid2D(make_grid(-L, L, k), make_grid(-L, L, k)), e, u, {}, region);
        extra = {{"level_index", best}, {"energy", e}, {"energy_over_saddle", e / es}};
    } else {
        detail::fail(ErrorKind::config, "cli", "field 'potential': nodal supports ho2d and qo");
    }
    auto os = run.open("nodal.csv");
    write_csv(os, rep);
    json j{{"domain_count", rep.domain_count},
           {"checkerboard_score", rep.checkerboard_score},
           {"adjacent_pairs", rep.adjacency.size()},
           {"refinement_stable", rep.refinement_stable.value_or(false)},
           {"minimal_gaps", rep.minimal_gaps}};
    j.update(extra);
    run.write_json("nodal.json", j);
    return 0;
}

inline int cmd_bench(Run& run)
{
    const auto& c = run.cfg();
    ExperimentConfig pc = c;
    pc.set("potential", c.str("problem", "ho"));
    auto p = potential_1d(pc);
    const auto n = static_cast<std::size_t>(c.integer("n", 10));
    const double eps = c.real("eps", 0.01);
    BenchmarkOptions bo;
    bo.repeats = static_cast<std::size_t>(c.integer("repeats", 5));
    bo.md_banded = c.integer("banded", 0) != 0;
    bo.seed = static_cast<std::uint64_t>(c.integer("seed", static_cast<std::int64_t>(bo.seed)));
    if (p.exact.empty())
        p.exact = grid_eigen_1d(p.u, make_grid(-8.0, 8.0, 12), n + 10).energies();
    const auto res = cost_benchmark(p.u, n, eps, p.exact, bo);
    auto os = run.open("bench.csv");
    write_csv(os, std::vector<CostRecord>{res.md, res.sm});
    auto sw = run.open("sweeps.csv");
    sw << "method,setting,epsilon\n";
    for (const auto& [N, e] : res.md_sweep)
        sw << "MD," << N << ',' << e << '\n';
    for (const auto& [st, e] : res.sm_sweep)
        sw << "SM," << st << ',' << e << '\n';
    if (c.integer("scaling", 0)) {
        const std::vector<std::size_t> sizes{100, 150, 200, 300, 400};
        const auto td = dense_solve_times(sizes, bo.repeats);
        const auto g = make_grid(-8.0, 8.0, 8);
        auto psi = gaussian_packet(g, 0.5, 1.0 / std::sqrt(2.0));
        const std::vector<std::size_t> steps{1024, 2048, 4096, 8192};
        const auto ts = propagation_times(psi, p.u.sample(g), steps, bo.repeats);
        std::vector<double> sd(sizes.begin(), sizes.end()), ss(steps.begin(), steps.end());
        run.write_json("scaling.json", {{"dense_solve_exponent", fit_power_law(sd, td).exponent},
                                        {"propagation_step_exponent", fit_power_law(ss, ts).exponent}});
    }
    run.log() << "MD wall " << res.md.wall_time << " s, SM wall " << res.sm.wall_time << " s\n";
    return 0;
}

/// Entry point. Returns 0 on success; on failure prints a JSON error record to
/// `err` (and to error.json in the run directory when one exists) and returns nonzero.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    CLI::App app{"Multi-well potential toolkit"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string config_path, outdir = "runs", run_name, seed;
    app.add_option("--config", config_path, "key = value file; its entries override flags");
    app.add_option("--outdir", outdir, "output root (default runs)");
    app.add_option("--run-name", run_name, "run directory suffix instead of the timestamp");
    app.add_option("--seed", seed, "seed for all randomness");
    std::map<std::string, std::map<std::string, std::string>> values;
    for (const auto& [cmd, flags] : command_flags()) {
        auto* sub = app.add_subcommand(cmd);
        for (const auto& f : flags)
            sub->add_option(std::string("--") + f.name, values[cmd][config_key(f.name)], f.help);
    }
    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << error_record("usage", "cli", e.what()).dump() << '\n';
        return 2;
    }
    const std::string command = app.get_subcommands().front()->get_name();
    std::unique_ptr<Run> r;
    try {
        ExperimentConfig cfg;
        for (const auto& [k, v] : values[command])
            if (!v.empty())
                cfg.set(k, v);
        if (!seed.empty())
            cfg.set("seed", seed);
        if (!config_path.empty())
            cfg.merge(ExperimentConfig::load(config_path));
        cfg.set("command", command);
        detail::require(cfg.str("command") == command, ErrorKind::config, "cli", "config command mismatch");
        r = std::make_unique<Run>(command, cfg, outdir, run_name);
        int rc = 0;
        if (command == "critical-points")
            rc = cmd_critical_points(*r);
        else if (command == "susy-gen")
            rc = cmd_susy_gen(*r);
        else if (command == "diag")
            rc = cmd_diag(*r);
        else if (command == "spectral")
            rc = cmd_spectral(*r);
        else if (command == "poincare")
            rc = cmd_poincare(*r);
        else if (command == "nodal")
            rc = cmd_nodal(*r);
        else if (command == "bench")
            rc = cmd_bench(*r);
        out << r->dir().string() << '\n';
        return rc;
    } catch (const Error& e) {
        const auto rec = error_record(std::string(to_string(e.kind())), e.module(), e.what());
        err << rec.dump() << '\n';
        if (r)
            r->write_json("error.json", rec);
        return e.kind() == ErrorKind::config ? 3 : 1;
    } catch (const std::exception& e) {
        const auto rec = error_record("internal", "cli", e.what());
        err << rec.dump() << '\n';
        if (r)
            r->write_json("error.json", rec);
        return 1;
    }
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    return run(std::vector<std::string>(argv + 1, argv + argc), out, err);
}

} // namespace mwell::cli
