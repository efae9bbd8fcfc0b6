#include "entdyn/output.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <sstream>

#include "entdyn/errors.hpp"
#include "entdyn/observables.hpp"

namespace entdyn {

namespace fs = std::filesystem;
using nlohmann::json;

const std::vector<std::string> kEvolveColumns = {
    "t", "re_u", "im_u", "abs_u", "v", "n_plus", "sigma_abs", "nbar",
    "r_plus_abs", "lambda2", "en_plus", "en_total", "en_naive",
};

const std::vector<std::string> kSweepColumns = {
    "eta", "s", "T", "u_inf_abs", "v_inf", "en_inf", "phase", "converged",
};

namespace {

json config_to_json(const Configuration& c) {
    return {
        {"system", {{"omega0", c.model.omega0}, {"kappa", c.model.kappa}, {"r", c.model.r}}},
        {"bath",
         {{"eta", c.spectral.eta},
          {"s", c.spectral.s},
          {"omega_c", c.spectral.omega_c},
          {"temperature", c.bath.temperature}}},
        {"solver",
         {{"dt", c.solver.dt},
          {"t_max", c.solver.t_max},
          {"steady_t_max", c.solver.steady_t_max},
          {"omega_max_factor", c.solver.omega_max_factor},
          {"freq_nodes", c.solver.freq_nodes},
          {"max_freq_nodes", c.solver.max_freq_nodes},
          {"v_tol", c.solver.v_tol},
          {"quad_rel_tol", c.solver.quad_rel_tol},
          {"tail_fraction", c.solver.tail_fraction},
          {"eps_ent", c.solver.eps_ent},
          {"extrapolate", c.solver.extrapolate},
          {"steady_method", to_string(c.solver.steady_method)}}},
    };
}

Configuration config_from_json(const json& j) {
    try {
        RawParameters raw;
        const auto& sys = j.at("system");
        const auto& bath = j.at("bath");
        const auto& sol = j.at("solver");
        raw.omega0 = sys.at("omega0").get<double>();
        raw.kappa = sys.at("kappa").get<double>();
        raw.r = sys.at("r").get<double>();
        raw.eta = bath.at("eta").get<double>();
        raw.s = bath.at("s").get<double>();
        raw.omega_c = bath.at("omega_c").get<double>();
        raw.temperature = bath.at("temperature").get<double>();
        raw.dt = sol.at("dt").get<double>();
        raw.t_max = sol.at("t_max").get<double>();
        raw.steady_t_max = sol.at("steady_t_max").get<double>();
        raw.omega_max_factor = sol.at("omega_max_factor").get<double>();
        raw.freq_nodes = sol.at("freq_nodes").get<int>();
        raw.max_freq_nodes = sol.at("max_freq_nodes").get<int>();
        raw.v_tol = sol.at("v_tol").get<double>();
        raw.quad_rel_tol = sol.at("quad_rel_tol").get<double>();
        raw.tail_fraction = sol.at("tail_fraction").get<double>();
        raw.eps_ent = sol.at("eps_ent").get<double>();
        raw.extrapolate = sol.at("extrapolate").get<bool>();
        raw.steady_method = parse_steady_method(sol.at("steady_method").get<std::string>());
        return build_config(raw);
    } catch (const json::exception& e) {
        throw ValidationError("parse_error", std::string("malformed manifest config: ") + e.what());
    }
}

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string csv_cell(const json& cell) {
    if (cell.is_boolean()) return cell.get<bool>() ? "true" : "false";
    if (cell.is_number()) return format_number(cell.get<double>());
    if (cell.is_string()) return cell.get<std::string>();
    if (cell.is_null()) return "nan";
    return cell.dump();
}

// NaN and infinities are not representable in JSON.
json number_cell(double value) {
    if (!std::isfinite(value)) return nullptr;
    return value;
}

} // namespace

json Table::to_json() const {
    json out = json::array();
    for (const auto& row : rows) {
        json obj = json::object();
        for (std::size_t i = 0; i < columns.size(); ++i) obj[columns[i]] = row[i];
        out.push_back(std::move(obj));
    }
    return out;
}

json RunManifest::to_json() const {
    json j = {
        {"tool", "entdyn"},
        {"version", kToolVersion},
        {"command", command},
        {"config", config_to_json(config)},
        {"grid", grid},
        {"created", created},
    };
    j["hash"] = hash();
    return j;
}

std::string RunManifest::hash() const {
    json canonical = {
        {"version", kToolVersion},
        {"command", command},
        {"config", config_to_json(config)},
        {"grid", grid},
    };
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(canonical.dump())));
    return buf;
}

RunManifest manifest_from_json(const json& j) {
    RunManifest m;
    try {
        m.command = j.at("command").get<std::string>();
        m.grid = j.value("grid", json::object());
        m.created = j.value("created", std::string{});
    } catch (const json::exception& e) {
        throw ValidationError("parse_error", std::string("malformed manifest: ") + e.what());
    }
    if (!j.contains("config")) throw ValidationError("parse_error", "manifest has no config");
    m.config = config_from_json(j.at("config"));
    return m;
}

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

std::string current_utc_timestamp() {
    std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string render_csv(const Table& table, const std::vector<std::string>& comments) {
    std::ostringstream os;
    for (const auto& line : comments) os << "# " << line << "\n";
    for (std::size_t i = 0; i < table.columns.size(); ++i) os << (i ? "," : "") << table.columns[i];
    os << "\n";
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
        os << "\n";
    }
    return os.str();
}

void write_text(const fs::path& path, const std::string& text) {
    std::error_code ec;
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path(), ec);
        if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << text;
    out.flush();
    if (!out) throw IoError("write failed for " + path.string());
}

void write_json(const fs::path& path, const json& value) { write_text(path, value.dump(2) + "\n"); }

void write_table(const fs::path& dir, const std::string& stem, const Table& table, const RunManifest& manifest) {
    std::vector<std::string> comments = {
        "entdyn " + std::string(kToolVersion) + " " + manifest.command,
        "manifest_hash " + manifest.hash(),
    };
    write_text(dir / (stem + ".csv"), render_csv(table, comments));
    write_json(dir / (stem + ".json"), table.to_json());
}

Table evolution_table(const GreensSeries& series, const ModelConfig& model) {
    Table table;
    table.columns = kEvolveColumns;
    table.rows.reserve(series.u.size());
    for (std::size_t n = 0; n < series.u.size(); ++n) {
        double t = series.grid.time(n);
        auto u = series.u[n];
        double v = series.v[n];
        ModeMoments plus = center_moments(u, v, model.r);
        ModeMoments minus = relative_moments(model.r, model.omega_minus, t);
        SqueezeRecord sq = squeeze_parameter(plus);
        EntanglementRecord en = entanglement(plus, minus, model.r);
        table.rows.push_back({
            number_cell(t), number_cell(u.real()), number_cell(u.imag()), number_cell(std::abs(u)),
            number_cell(v), number_cell(plus.n), number_cell(std::abs(plus.sigma)),
            number_cell(sq.thermal_occupation), number_cell(sq.magnitude), number_cell(symplectic_min(plus)),
            number_cell(en.en_plus), number_cell(en.en_total), number_cell(en.en_naive),
        });
    }
    return table;
}

Table sweep_table(const std::vector<PhasePoint>& points) {
    Table table;
    table.columns = kSweepColumns;
    table.rows.reserve(points.size());
    for (const auto& p : points) {
        table.rows.push_back({
            number_cell(p.eta), number_cell(p.s), number_cell(p.temperature), number_cell(p.u_inf_abs),
            number_cell(p.v_inf), number_cell(p.en_inf), to_string(p.phase), p.converged,
        });
    }
    return table;
}

std::string gnuplot_matrix(const std::vector<PhasePoint>& points, const SweepGrid& grid, std::size_t i_t,
                           const std::string& field) {
    double PhasePoint::*member = nullptr;
    if (field == "u_inf_abs") member = &PhasePoint::u_inf_abs;
    else if (field == "v_inf") member = &PhasePoint::v_inf;
    else if (field == "en_inf") member = &PhasePoint::en_inf;
    else throw ValidationError("unknown_field", "no sweep field named " + field);
    if (i_t >= grid.temperature.count || points.size() != grid.size()) {
        throw ValidationError("grid_mismatch", "temperature slice outside the sweep grid");
    }

    auto etas = grid.eta.values();
    auto ss = grid.s.values();
    std::ostringstream os;
    os << grid.eta.count;
    for (double eta : etas) os << " " << format_number(eta);
    os << "\n";
    for (std::size_t i_s = 0; i_s < ss.size(); ++i_s) {
        os << format_number(ss[i_s]);
        for (std::size_t i_e = 0; i_e < etas.size(); ++i_e) {
            os << " " << format_number(points[grid.index(i_e, i_s, i_t)].*member);
        }
        os << "\n";
    }
    return os.str();
}

} // namespace entdyn
