#include "entdyn/validation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "entdyn/errors.hpp"
#include "entdyn/greens.hpp"
#include "entdyn/modes.hpp"
#include "entdyn/oracle.hpp"
#include "entdyn/sweep.hpp"

namespace entdyn {

namespace {

struct Point {
    double s;
    double eta;
};

std::string label(const char* what, double s, double eta, double T = -1.0) {
    std::ostringstream os;
    os << what << "(s=" << s << ",eta=" << eta;
    if (T >= 0.0) os << ",T=" << T;
    os << ")";
    return os.str();
}

ValidationCheck check(std::string metric, double value, double tol) {
    return {std::move(metric), value, tol, std::isfinite(value) && value <= tol};
}

Configuration point_config(double s, double eta, const ValidationOptions& options) {
    RawParameters raw;
    raw.s = s;
    raw.eta = eta;
    raw.dt = options.dt;
    raw.t_max = options.t_max;
    return build_config(raw);
}

} // namespace

std::vector<ValidationCheck> oracle_suite(const ValidationOptions& options) {
    const Point points[] = {{1.0, 0.05}, {0.5, 0.3}};
    const double temperatures[] = {0.0, 0.1};

    std::vector<ValidationCheck> checks;
    for (const auto& p : points) {
        Configuration config = point_config(p.s, p.eta, options);
        const SpectralDensity bath(config.spectral, {config.solver.omega_max_factor, config.solver.quad_rel_tol});
        DiscretizedBath discrete = discretize(bath, options.oracle_modes, bath.omega_max());
        if (std::numbers::pi / discrete.max_spacing() < options.t_max) {
            throw ValidationError("recurrence_window",
                                  "a bath of " + std::to_string(options.oracle_modes) +
                                      " modes re-coheres before t_max; increase --k");
        }
        ExactPropagator exact(discrete, config.model);

        const TimeGrid grid = TimeGrid::covering(options.dt, options.t_max);
        std::vector<double> times(grid.size());
        for (std::size_t n = 0; n < grid.size(); ++n) times[n] = grid.time(n);
        const ComplexSeries u = propagate_u(config.model, bath, grid, config.solver.extrapolate, options.substep);

        for (double T : temperatures) {
            OracleSeries ref = exact.evolve(times, T);
            FluctuationOptions fo;
            fo.initial_nodes = config.solver.freq_nodes;
            fo.max_nodes = config.solver.max_freq_nodes;
            fo.tol = config.solver.v_tol;
            RealSeries v = compute_v(bath, make_bath(T), grid, u, fo);

            double du = 0.0, dv = 0.0;
            for (std::size_t n = 0; n < grid.size(); ++n) {
                du = std::max(du, std::abs(u[n] - ref.u[n]));
                dv = std::max(dv, std::abs(v[n] - ref.v[n]));
            }
            checks.push_back(check(label("oracle_u_sup", p.s, p.eta, T), du, options.tolerance));
            checks.push_back(check(label("oracle_v_sup", p.s, p.eta, T), dv, options.tolerance));
            checks.push_back(check(label("oracle_unitarity", p.s, p.eta, T), ref.max_unitarity_defect,
                                   options.unitarity_tolerance));
        }
    }
    return checks;
}

std::vector<ValidationCheck> route_suite(const ValidationOptions& options) {
    const double exponents[] = {0.5, 1.0, 2.0};
    const double ratios[] = {0.5, 2.0};

    std::vector<ValidationCheck> checks;
    for (double s : exponents) {
        for (double ratio : ratios) {
            const ModelConfig model = make_model(1.0, 0.5, 3.0);
            const double eta = ratio * critical_coupling(s, model.omega_plus, 3.0);
            Configuration config = point_config(s, eta, options);
            const SpectralDensity bath(config.spectral, {config.solver.omega_max_factor, config.solver.quad_rel_tol});
            const TimeGrid grid = TimeGrid::covering(options.dt, options.t_max);
            const ComplexSeries u = propagate_u(config.model, bath, grid, config.solver.extrapolate, options.substep);
            const BranchCutRepresentation spectral(config.model, bath, find_localized_modes(config.model, bath),
                                                   options.t_max);
            double du = 0.0;
            for (std::size_t n = 0; n < grid.size(); ++n) {
                du = std::max(du, std::abs(u[n] - spectral(grid.time(n))));
            }
            checks.push_back(check(label("route_u_sup", s, eta), du, options.tolerance));
            checks.push_back(
                check(label("sum_rule", s, eta), std::abs(spectral.sum_rule() - 1.0), options.sum_rule_tolerance));
        }
    }
    return checks;
}

double oracle_steady_v(const Configuration& config, double temperature, std::size_t base_modes) {
    const SpectralDensity bath(config.spectral, {config.solver.omega_max_factor, config.solver.quad_rel_tol});
    double v[3];
    for (int i = 0; i < 3; ++i) {
        const DiscretizedBath discrete = discretize(bath, base_modes << i, bath.omega_max());
        v[i] = dephased_averages(discrete, config.model, {temperature}).v.front();
    }
    const double first = 2.0 * v[1] - v[0];
    const double second = 2.0 * v[2] - v[1];
    return (4.0 * second - first) / 3.0;
}

std::vector<ValidationCheck> steady_suite(const ValidationOptions& options) {
    struct Case {
        double s, eta, T;
    } const cases[] = {{1.0, 0.05, 0.1}, {0.5, 0.3, 0.1}, {2.0, 0.5, 0.1}};
    std::vector<ValidationCheck> checks;
    for (const auto& c : cases) {
        Configuration config = point_config(c.s, c.eta, options);
        const double main = limit_states(config, {c.T}).front().v_inf;
        const double ref = oracle_steady_v(config, c.T, std::max<std::size_t>(options.oracle_modes / 2, 1));
        checks.push_back(check(label("steady_v", c.s, c.eta, c.T), std::abs(main - ref), options.steady_tolerance));
    }
    return checks;
}

} // namespace entdyn
