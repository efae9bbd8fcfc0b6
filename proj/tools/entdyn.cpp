// entdyn: command-line front end
//
//   entdyn evolve   time series of u, v and entanglement measures
//   entdyn modes    critical coupling and localized modes
//   entdyn sweep    steady-state phase diagram over (eta, s, T)
//   entdyn validate oracle and route-equivalence checks
//   entdyn fock     thermal-like Fock distribution of the center-of-mass mode

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "entdyn/errors.hpp"
#include "entdyn/greens.hpp"
#include "entdyn/model.hpp"
#include "entdyn/modes.hpp"
#include "entdyn/observables.hpp"
#include "entdyn/output.hpp"
#include "entdyn/sweep.hpp"
#include "entdyn/validation.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace entdyn;

namespace {

constexpr const char* kOutputEnv = "ENTDYN_OUTPUT_DIR";

struct CommonOptions {
    std::string config_path;
    std::string manifest_path;
    std::string out_dir;
    std::string steady_method;
    RawParameters flags;
};

void add_physics_flags(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--config", o.config_path, "INI file with [system], [bath], [solver] sections");
    cmd->add_option("--eta", o.flags.eta, "Coupling strength");
    cmd->add_option("--s", o.flags.s, "Spectral exponent");
    cmd->add_option("--omega-c", o.flags.omega_c, "Bath cutoff frequency");
    cmd->add_option("--kappa", o.flags.kappa, "Inter-mode coupling");
    cmd->add_option("--r", o.flags.r, "Initial two-mode squeeze parameter");
    cmd->add_option("--temperature", o.flags.temperature, "Bath temperature");
    cmd->add_option("--t-max", o.flags.t_max, "Evolution horizon");
    cmd->add_option("--dt", o.flags.dt, "Time step");
    cmd->add_option("--steady-method", o.steady_method, "Steady-state route: limit or window");
    cmd->add_option("--out", o.out_dir, std::string("Output directory (default $") + kOutputEnv + " or ./entdyn_out)");
}

fs::path output_dir(const CommonOptions& o) {
    if (!o.out_dir.empty()) return o.out_dir;
    if (const char* env = std::getenv(kOutputEnv); env && *env) return env;
    return "entdyn_out";
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError("parse_error", path + ": " + e.what());
    }
}

// Manifest or config file first, command-line flags on top.
Configuration resolve_config(const CommonOptions& o, std::optional<RunManifest>& manifest) {
    RawParameters raw;
    if (!o.manifest_path.empty()) {
        manifest = manifest_from_json(read_json_file(o.manifest_path));
        raw = parse_config(serialize_config(manifest->config));
    }
    if (!o.config_path.empty()) raw.merge(load_config_file(o.config_path));
    RawParameters flags = o.flags;
    if (!o.steady_method.empty()) flags.steady_method = parse_steady_method(o.steady_method);
    raw.merge(flags);
    Configuration config = build_config(raw);
    for (const auto& w : config.warnings) std::cerr << "warning: " << w << "\n";
    return config;
}

RunManifest new_manifest(const std::string& command, const Configuration& config, json grid = json::object()) {
    RunManifest m;
    m.command = command;
    m.config = config;
    m.grid = std::move(grid);
    m.created = current_utc_timestamp();
    return m;
}

json modes_json(const Configuration& config, const ModeSearch& search) {
    json modes = json::array();
    for (const auto& m : search.modes) modes.push_back({{"frequency", m.frequency}, {"residue", m.residue}});
    return {
        {"eta_c", critical_coupling(config.spectral.s, config.model.omega_plus, config.spectral.omega_c)},
        {"eta", config.spectral.eta},
        {"s", config.spectral.s},
        {"marginal", search.marginal},
        {"modes", modes},
    };
}

// ---- evolve ---------------------------------------------------------------

int run_evolve(const CommonOptions& o) {
    std::optional<RunManifest> previous;
    Configuration config = resolve_config(o, previous);
    const SpectralDensity bath(config.spectral, {config.solver.omega_max_factor, config.solver.quad_rel_tol});
    const double eta_c = critical_coupling(config.spectral.s, config.model.omega_plus, config.spectral.omega_c);
    const ModeSearch search = find_localized_modes(config.model, bath);

    const TimeGrid grid = TimeGrid::covering(config.solver.dt, config.solver.t_max);
    GreensSeries series = evolve_greens(config, grid);
    Table table = evolution_table(series, config.model);
    SteadyState steady = steady_state(config);

    PhasePoint point{config.spectral.eta, config.spectral.s, config.bath.temperature,
                     steady.u_inf_abs, steady.v_inf, steady.en_inf, Phase::I, steady.converged};
    point.phase = classify_phase(point, eta_c, config.solver.eps_ent);

    RunManifest manifest = new_manifest("evolve", config);
    const fs::path dir = output_dir(o);
    write_table(dir, "evolve", table, manifest);

    const auto& last = table.rows.back();
    json summary = modes_json(config, search);
    summary["manifest_hash"] = manifest.hash();
    summary["t_max"] = grid.t_max();
    summary["final"] = {{"abs_u", last[3]}, {"v", last[4]}, {"en_plus", last[10]}, {"en_total", last[11]},
                        {"en_naive", last[12]}};
    summary["steady"] = {
        {"t_max", steady.t_max},
        {"u_inf_abs", steady.u_inf_abs},
        {"v_inf", steady.v_inf},
        {"en_plus_steady", steady.en_inf},
        {"en_total_steady", total_entanglement(steady.en_inf, config.model.r)},
        {"phase", to_string(point.phase)},
        {"converged", steady.converged},
    };
    summary["warnings"] = config.warnings;
    write_json(dir / "summary.json", summary);
    write_json(dir / "manifest.json", manifest.to_json());

    std::cout << summary.dump(2) << "\n";
    return 0;
}

// ---- modes ----------------------------------------------------------------

int run_modes(const CommonOptions& o, bool as_json) {
    std::optional<RunManifest> previous;
    Configuration config = resolve_config(o, previous);
    const SpectralDensity bath(config.spectral, {config.solver.omega_max_factor, config.solver.quad_rel_tol});
    const ModeSearch search = find_localized_modes(config.model, bath);
    json info = modes_json(config, search);

    Table table;
    table.columns = {"j", "frequency", "residue"};
    for (std::size_t j = 0; j < search.modes.size(); ++j) {
        table.rows.push_back({j, search.modes[j].frequency, search.modes[j].residue});
    }
    RunManifest manifest = new_manifest("modes", config);
    write_table(output_dir(o), "modes", table, manifest);

    if (as_json) {
        std::cout << info.dump(2) << "\n";
        return 0;
    }
    std::printf("eta_c = %.6f   eta = %.6f   s = %g\n", info["eta_c"].get<double>(), config.spectral.eta,
                config.spectral.s);
    if (search.marginal) std::printf("marginal: eta equals eta_c to rounding\n");
    std::printf("%3s  %14s  %12s\n", "j", "frequency", "residue");
    for (std::size_t j = 0; j < search.modes.size(); ++j) {
        std::printf("%3zu  %14.8f  %12.8f\n", j, search.modes[j].frequency, search.modes[j].residue);
    }
    if (search.modes.empty()) std::printf("  (no localized mode)\n");
    return 0;
}

// ---- sweep ----------------------------------------------------------------

// "min:max:count" or a single value.
Axis parse_axis(const std::string& text, const char* name) {
    Axis axis;
    std::istringstream is(text);
    std::string a, b, c;
    std::getline(is, a, ':');
    bool range = static_cast<bool>(std::getline(is, b, ':'));
    if (range) std::getline(is, c, ':');
    try {
        axis.min = std::stod(a);
        axis.max = range ? std::stod(b) : axis.min;
        axis.count = range ? static_cast<std::size_t>(std::stoul(c)) : 1;
    } catch (const std::exception&) {
        throw ValidationError("parse_error", std::string("--") + name + "-range expects min:max:count, got '" +
                                                 text + "'");
    }
    return axis;
}

json axis_json(const Axis& a) { return {{"min", a.min}, {"max", a.max}, {"count", a.count}}; }

Axis axis_from_json(const json& j) {
    return {j.at("min").get<double>(), j.at("max").get<double>(), j.at("count").get<std::size_t>()};
}

struct SweepOptions {
    std::string eta_range, s_range, t_range;
    unsigned jobs{1};
};

int run_sweep_command(const CommonOptions& o, const SweepOptions& so) {
    std::optional<RunManifest> previous;
    Configuration config = resolve_config(o, previous);

    SweepGrid grid;
    grid.eta = {config.spectral.eta, config.spectral.eta, 1};
    grid.s = {config.spectral.s, config.spectral.s, 1};
    grid.temperature = {config.bath.temperature, config.bath.temperature, 1};
    if (previous && previous->grid.contains("eta")) {
        try {
            grid.eta = axis_from_json(previous->grid.at("eta"));
            grid.s = axis_from_json(previous->grid.at("s"));
            grid.temperature = axis_from_json(previous->grid.at("T"));
        } catch (const json::exception& e) {
            throw ValidationError("parse_error", std::string("malformed manifest grid: ") + e.what());
        }
    }
    if (!so.eta_range.empty()) grid.eta = parse_axis(so.eta_range, "eta");
    if (!so.s_range.empty()) grid.s = parse_axis(so.s_range, "s");
    if (!so.t_range.empty()) grid.temperature = parse_axis(so.t_range, "temperature");
    grid.validate();
    if (so.jobs < 1) throw ValidationError("jobs_invalid", "--jobs must be >= 1");

    std::vector<PhasePoint> points = run_sweep(grid, config, so.jobs);

    json grid_spec = {{"eta", axis_json(grid.eta)}, {"s", axis_json(grid.s)}, {"T", axis_json(grid.temperature)}};
    RunManifest manifest = new_manifest("sweep", config, grid_spec);
    const fs::path dir = output_dir(o);
    write_table(dir, "sweep", sweep_table(points), manifest);

    Table boundary;
    boundary.columns = {"eta", "s", "T_c"};
    for (const auto& b : thermal_boundary(points, grid, config)) {
        json tc = std::isfinite(b.critical_temperature) ? json(b.critical_temperature) : json(nullptr);
        boundary.rows.push_back({b.eta, b.s, tc});
    }
    write_table(dir, "thermal_boundary", boundary, manifest);

    auto temps = grid.temperature.values();
    for (std::size_t i_t = 0; i_t < temps.size(); ++i_t) {
        for (const char* field : {"en_inf", "v_inf", "u_inf_abs"}) {
            std::string header = "# " + std::string(field) + " at T = " + format_number(temps[i_t]) +
                                 "; rows s, columns eta; manifest_hash " + manifest.hash() + "\n";
            write_text(dir / (std::string(field) + "_T" + std::to_string(i_t) + ".dat"),
                       header + gnuplot_matrix(points, grid, i_t, field));
        }
    }
    write_json(dir / "manifest.json", manifest.to_json());

    std::size_t unconverged = 0;
    for (const auto& p : points) unconverged += p.converged ? 0 : 1;
    std::cout << "sweep: " << points.size() << " points, " << unconverged << " not converged, written to "
              << dir.string() << "\n";
    return 0;
}

// ---- validate ---------------------------------------------------------------

int run_validate(const ValidationOptions& vo, bool skip_oracle) {
    std::vector<ValidationCheck> checks;
    if (!skip_oracle) {
        checks = oracle_suite(vo);
        auto steady = steady_suite(vo);
        checks.insert(checks.end(), steady.begin(), steady.end());
    }
    auto routes = route_suite(vo);
    checks.insert(checks.end(), routes.begin(), routes.end());

    json failed = json::array();
    std::printf("%-44s %12s %10s  %s\n", "metric", "value", "tolerance", "result");
    for (const auto& c : checks) {
        std::printf("%-44s %12.3e %10.1e  %s\n", c.metric.c_str(), c.value, c.tolerance, c.passed ? "PASS" : "FAIL");
        if (!c.passed) failed.push_back({{"metric", c.metric}, {"value", c.value}, {"tolerance", c.tolerance}});
    }
    if (failed.empty()) return 0;
    json err = {{"error", "tolerance"}, {"failed", failed}};
    std::cerr << err.dump() << "\n";
    return 1;
}

// ---- fock -----------------------------------------------------------------

int run_fock(const CommonOptions& o, std::optional<double> nbar, int n_max) {
    std::optional<RunManifest> previous;
    Configuration config = resolve_config(o, previous);
    double occupation = 0.0;
    double at_time = 0.0;
    if (nbar) {
        occupation = *nbar;
    } else {
        const TimeGrid grid = TimeGrid::covering(config.solver.dt, config.solver.t_max);
        GreensSeries series = evolve_greens(config, grid);
        ModeMoments plus = center_moments(series.u.back(), series.v.back(), config.model.r);
        occupation = effective_thermal_occupation(plus);
        at_time = grid.t_max();
    }
    auto p = thermal_fock_distribution(occupation, n_max);

    Table table;
    table.columns = {"n", "p"};
    for (std::size_t n = 0; n < p.size(); ++n) table.rows.push_back({n, p[n]});
    json grid = {{"nbar", occupation}, {"n_max", n_max}, {"t", at_time}};
    RunManifest manifest = new_manifest("fock", config, grid);
    write_table(output_dir(o), "fock", table, manifest);

    std::printf("nbar = %.10g%s\n", occupation, nbar ? "" : (" at t = " + format_number(at_time)).c_str());
    for (std::size_t n = 0; n < p.size() && n < 10; ++n) std::printf("p[%zu] = %.10g\n", n, p[n]);
    if (p.size() > 10) std::printf("... (%zu entries)\n", p.size());
    return 0;
}

void print_error(const std::string& kind, const std::string& code, const std::string& message) {
    json err = {{"error", kind}, {"code", code}, {"message", message}};
    std::cerr << err.dump() << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Entanglement dynamics of two modes in an Ohmic-family bath"};
    app.require_subcommand(1);

    CommonOptions common;
    bool modes_json_flag = false;
    SweepOptions sweep_opts;
    ValidationOptions vo;
    bool skip_oracle = false;
    std::optional<double> fock_nbar;
    int fock_n_max = 64;

    auto* evolve = app.add_subcommand("evolve", "Time series of u, v, moments and log-negativities");
    add_physics_flags(evolve, common);
    evolve->add_option("--manifest", common.manifest_path, "Rerun from a manifest.json");

    auto* modes = app.add_subcommand("modes", "Critical coupling and localized modes");
    add_physics_flags(modes, common);
    modes->add_flag("--json", modes_json_flag, "Print JSON instead of a table");

    auto* sweep = app.add_subcommand("sweep", "Steady-state phase diagram");
    add_physics_flags(sweep, common);
    sweep->add_option("--manifest", common.manifest_path, "Rerun from a manifest.json");
    sweep->add_option("--eta-range", sweep_opts.eta_range, "min:max:count");
    sweep->add_option("--s-range", sweep_opts.s_range, "min:max:count");
    sweep->add_option("--temperature-range", sweep_opts.t_range, "min:max:count");
    sweep->add_option("--jobs", sweep_opts.jobs, "Worker threads");

    auto* validate = app.add_subcommand("validate", "Compare against the finite-bath oracle and the spectral route");
    validate->add_option("--k", vo.oracle_modes, "Oracle bath size");
    auto* dt_opt = validate->add_option("--dt", vo.dt, "Integration step of the main solver (disables internal substeps)");
    validate->add_option("--t-max", vo.t_max, "Comparison window");
    validate->add_option("--tolerance", vo.tolerance, "Sup-norm tolerance for u and v");
    validate->add_flag("--skip-oracle", skip_oracle, "Skip the finite-bath oracle checks");

    auto* fock = app.add_subcommand("fock", "Thermal-like Fock distribution of the center-of-mass mode");
    add_physics_flags(fock, common);
    fock->add_option("--nbar", fock_nbar, "Occupation; default is nbar_+ at t_max of an evolution");
    fock->add_option("--n-max", fock_n_max, "Largest Fock number");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        print_error("usage", e.get_name(), e.what());
        return 1;
    }

    if (dt_opt->count() > 0) vo.substep = false;

    try {
        if (*evolve) return run_evolve(common);
        if (*modes) return run_modes(common, modes_json_flag);
        if (*sweep) return run_sweep_command(common, sweep_opts);
        if (*validate) return run_validate(vo, skip_oracle);
        if (*fock) return run_fock(common, fock_nbar, fock_n_max);
    } catch (const ValidationError& e) {
        print_error("validation", e.code(), e.what());
        return 1;
    } catch (const IoError& e) {
        print_error("io", "io_error", e.what());
        return 2;
    } catch (const NumericalError& e) {
        print_error("numerical", "not_converged", e.what());
        return 1;
    } catch (const ConsistencyError& e) {
        print_error("consistency", "route_mismatch", e.what());
        return 1;
    } catch (const PhysicalityError& e) {
        print_error("physicality", "unphysical_moments", e.what());
        return 1;
    } catch (const std::filesystem::filesystem_error& e) {
        print_error("io", "io_error", e.what());
        return 2;
    }
    return 0;
}
