#include "entdyn/model.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "entdyn/errors.hpp"

namespace entdyn {

namespace {

void require_finite(double value, const char* name) {
    if (!std::isfinite(value)) {
        throw ValidationError("non_finite", std::string(name) + " must be finite");
    }
}

std::string shortest(double value) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

template <typename T>
void merge_field(std::optional<T>& dst, const std::optional<T>& src) {
    if (src) dst = src;
}

std::optional<double> read_double(const boost::property_tree::ptree& tree, const char* path) {
    auto node = tree.get_optional<std::string>(path);
    if (!node) return std::nullopt;
    double value = 0.0;
    const char* first = node->data();
    const char* last = first + node->size();
    auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc{} || res.ptr != last) {
        throw ValidationError("parse_error", std::string("cannot parse ") + path + " = '" + *node + "'");
    }
    return value;
}

std::optional<int> read_int(const boost::property_tree::ptree& tree, const char* path) {
    auto node = tree.get_optional<std::string>(path);
    if (!node) return std::nullopt;
    int value = 0;
    auto res = std::from_chars(node->data(), node->data() + node->size(), value);
    if (res.ec != std::errc{} || res.ptr != node->data() + node->size()) {
        throw ValidationError("parse_error", std::string("cannot parse ") + path + " = '" + *node + "'");
    }
    return value;
}

std::optional<bool> read_bool(const boost::property_tree::ptree& tree, const char* path) {
    auto node = tree.get_optional<std::string>(path);
    if (!node) return std::nullopt;
    if (*node == "true" || *node == "1") return true;
    if (*node == "false" || *node == "0") return false;
    throw ValidationError("parse_error", std::string("cannot parse ") + path + " = '" + *node + "'");
}

} // namespace

std::string to_string(SteadyMethod method) { return method == SteadyMethod::limit ? "limit" : "window"; }

SteadyMethod parse_steady_method(const std::string& text) {
    if (text == "limit") return SteadyMethod::limit;
    if (text == "window") return SteadyMethod::window;
    throw ValidationError("parse_error", "steady_method must be 'limit' or 'window', got '" + text + "'");
}

bool ModelConfig::derived_consistent() const noexcept {
    return omega_plus == omega0 + kappa && omega_minus == omega0 - kappa;
}

void RawParameters::merge(const RawParameters& over) {
    merge_field(omega0, over.omega0);
    merge_field(kappa, over.kappa);
    merge_field(r, over.r);
    merge_field(eta, over.eta);
    merge_field(s, over.s);
    merge_field(omega_c, over.omega_c);
    merge_field(temperature, over.temperature);
    merge_field(dt, over.dt);
    merge_field(t_max, over.t_max);
    merge_field(steady_t_max, over.steady_t_max);
    merge_field(omega_max_factor, over.omega_max_factor);
    merge_field(v_tol, over.v_tol);
    merge_field(quad_rel_tol, over.quad_rel_tol);
    merge_field(tail_fraction, over.tail_fraction);
    merge_field(eps_ent, over.eps_ent);
    merge_field(freq_nodes, over.freq_nodes);
    merge_field(max_freq_nodes, over.max_freq_nodes);
    merge_field(extrapolate, over.extrapolate);
    merge_field(steady_method, over.steady_method);
}

ModelConfig make_model(double omega0, double kappa, double r) {
    require_finite(omega0, "omega0");
    require_finite(kappa, "kappa");
    require_finite(r, "r");
    if (r < 0.0) throw ValidationError("r_negative", "squeeze parameter r must be >= 0");
    ModelConfig m;
    m.omega0 = omega0;
    m.kappa = kappa;
    m.r = r;
    m.omega_plus = omega0 + kappa;
    m.omega_minus = omega0 - kappa;
    if (!(m.omega_plus > 0.0)) {
        throw ValidationError("omega_plus_nonpositive", "omega0 + kappa must be > 0");
    }
    return m;
}

SpectralParams make_spectral(double eta, double s, double omega_c) {
    require_finite(eta, "eta");
    require_finite(s, "s");
    require_finite(omega_c, "omega_c");
    if (eta < 0.0) throw ValidationError("eta_negative", "coupling eta must be >= 0");
    if (!(s > 0.0)) throw ValidationError("s_nonpositive", "spectral exponent s must be > 0");
    if (!(omega_c > 0.0)) throw ValidationError("omega_c_nonpositive", "cutoff omega_c must be > 0");
    return {eta, s, omega_c};
}

BathParams make_bath(double temperature) {
    require_finite(temperature, "temperature");
    if (temperature < 0.0) throw ValidationError("temperature_negative", "temperature must be >= 0");
    return {temperature};
}

Configuration build_config(const RawParameters& raw) {
    const ModelConfig dm;
    const SpectralParams ds;
    const BathParams db;
    const SolverOptions dso;

    Configuration c;
    c.model = make_model(raw.omega0.value_or(dm.omega0), raw.kappa.value_or(dm.kappa), raw.r.value_or(dm.r));
    c.spectral = make_spectral(raw.eta.value_or(ds.eta), raw.s.value_or(ds.s), raw.omega_c.value_or(ds.omega_c));
    c.bath = make_bath(raw.temperature.value_or(db.temperature));

    SolverOptions& so = c.solver;
    so.dt = raw.dt.value_or(dso.dt);
    so.t_max = raw.t_max.value_or(dso.t_max);
    so.steady_t_max = raw.steady_t_max.value_or(dso.steady_t_max);
    so.omega_max_factor = raw.omega_max_factor.value_or(dso.omega_max_factor);
    so.freq_nodes = raw.freq_nodes.value_or(dso.freq_nodes);
    so.max_freq_nodes = raw.max_freq_nodes.value_or(dso.max_freq_nodes);
    so.v_tol = raw.v_tol.value_or(dso.v_tol);
    so.quad_rel_tol = raw.quad_rel_tol.value_or(dso.quad_rel_tol);
    so.tail_fraction = raw.tail_fraction.value_or(dso.tail_fraction);
    so.eps_ent = raw.eps_ent.value_or(dso.eps_ent);
    so.extrapolate = raw.extrapolate.value_or(dso.extrapolate);
    so.steady_method = raw.steady_method.value_or(dso.steady_method);

    for (double v : {so.dt, so.t_max, so.steady_t_max, so.omega_max_factor, so.v_tol, so.quad_rel_tol,
                     so.tail_fraction, so.eps_ent}) {
        require_finite(v, "solver setting");
    }
    if (!(so.dt > 0.0) || !(so.t_max >= so.dt) || !(so.steady_t_max >= so.dt)) {
        throw ValidationError("solver_invalid", "need dt > 0 and t_max >= dt");
    }
    if (so.omega_max_factor < 30.0) {
        throw ValidationError("solver_invalid", "omega_max_factor must be >= 30");
    }
    if (so.freq_nodes < 8 || so.max_freq_nodes < so.freq_nodes) {
        throw ValidationError("solver_invalid", "need 8 <= freq_nodes <= max_freq_nodes");
    }
    if (!(so.tail_fraction > 0.0 && so.tail_fraction <= 0.5) || !(so.v_tol > 0.0) ||
        !(so.quad_rel_tol > 0.0) || !(so.eps_ent >= 0.0)) {
        throw ValidationError("solver_invalid", "tail_fraction in (0, 0.5], tolerances positive");
    }

    if (c.model.omega_minus <= 0.0) {
        c.warnings.push_back("omega_minus = omega0 - kappa <= 0; the relative mode only picks up a phase");
    }
    if (c.solver.dt * c.model.omega_plus > 0.05) {
        c.warnings.push_back("dt * omega_plus exceeds 0.05; the fastest phase is under-resolved");
    }
    return c;
}

std::string serialize_config(const Configuration& c) {
    std::ostringstream os;
    os << "[system]\n"
       << "omega0 = " << shortest(c.model.omega0) << "\n"
       << "kappa = " << shortest(c.model.kappa) << "\n"
       << "r = " << shortest(c.model.r) << "\n"
       << "\n[bath]\n"
       << "eta = " << shortest(c.spectral.eta) << "\n"
       << "s = " << shortest(c.spectral.s) << "\n"
       << "omega_c = " << shortest(c.spectral.omega_c) << "\n"
       << "temperature = " << shortest(c.bath.temperature) << "\n"
       << "\n[solver]\n"
       << "dt = " << shortest(c.solver.dt) << "\n"
       << "t_max = " << shortest(c.solver.t_max) << "\n"
       << "steady_t_max = " << shortest(c.solver.steady_t_max) << "\n"
       << "omega_max_factor = " << shortest(c.solver.omega_max_factor) << "\n"
       << "freq_nodes = " << c.solver.freq_nodes << "\n"
       << "max_freq_nodes = " << c.solver.max_freq_nodes << "\n"
       << "v_tol = " << shortest(c.solver.v_tol) << "\n"
       << "quad_rel_tol = " << shortest(c.solver.quad_rel_tol) << "\n"
       << "tail_fraction = " << shortest(c.solver.tail_fraction) << "\n"
       << "eps_ent = " << shortest(c.solver.eps_ent) << "\n"
       << "extrapolate = " << (c.solver.extrapolate ? "true" : "false") << "\n"
       << "steady_method = " << to_string(c.solver.steady_method) << "\n";
    return os.str();
}

RawParameters parse_config(const std::string& text) {
    boost::property_tree::ptree tree;
    std::istringstream is(text);
    try {
        boost::property_tree::ini_parser::read_ini(is, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ValidationError("parse_error", e.what());
    }
    RawParameters raw;
    raw.omega0 = read_double(tree, "system.omega0");
    raw.kappa = read_double(tree, "system.kappa");
    raw.r = read_double(tree, "system.r");
    raw.eta = read_double(tree, "bath.eta");
    raw.s = read_double(tree, "bath.s");
    raw.omega_c = read_double(tree, "bath.omega_c");
    raw.temperature = read_double(tree, "bath.temperature");
    raw.dt = read_double(tree, "solver.dt");
    raw.t_max = read_double(tree, "solver.t_max");
    raw.steady_t_max = read_double(tree, "solver.steady_t_max");
    raw.omega_max_factor = read_double(tree, "solver.omega_max_factor");
    raw.freq_nodes = read_int(tree, "solver.freq_nodes");
    raw.max_freq_nodes = read_int(tree, "solver.max_freq_nodes");
    raw.v_tol = read_double(tree, "solver.v_tol");
    raw.quad_rel_tol = read_double(tree, "solver.quad_rel_tol");
    raw.tail_fraction = read_double(tree, "solver.tail_fraction");
    raw.eps_ent = read_double(tree, "solver.eps_ent");
    raw.extrapolate = read_bool(tree, "solver.extrapolate");
    if (auto m = tree.get_optional<std::string>("solver.steady_method")) raw.steady_method = parse_steady_method(*m);
    return raw;
}

RawParameters load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return parse_config(os.str());
}

} // namespace entdyn
