#include "entdyn/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include <boost/math/tools/toms748_solve.hpp>

#include "entdyn/errors.hpp"
#include "entdyn/greens.hpp"
#include "entdyn/modes.hpp"
#include "entdyn/observables.hpp"
#include "entdyn/quadrature.hpp"

namespace entdyn {

namespace {

constexpr double kNearCritical = 0.05;
constexpr double kDriftTol = 1e-3;
// Floor under which window means count as zero for the drift test.
constexpr double kDriftFloor = 1e-4;

bool drift_ok(double first, double second) {
    return std::abs(first - second) <= kDriftTol * std::max({std::abs(first), std::abs(second), kDriftFloor});
}

double window_mean(const std::vector<double>& x, std::size_t from, std::size_t to) {
    double acc = 0.0;
    for (std::size_t i = from; i < to; ++i) acc += x[i];
    return acc / static_cast<double>(to - from);
}

} // namespace

std::string to_string(Phase phase) {
    switch (phase) {
    case Phase::I: return "I";
    case Phase::II: return "II";
    case Phase::III: return "III";
    }
    return "?";
}

double steady_horizon(const Configuration& config) {
    const double eta_c = critical_coupling(config.spectral.s, config.model.omega_plus, config.spectral.omega_c);
    double t_max = config.solver.steady_t_max;
    if (std::abs(config.spectral.eta - eta_c) < kNearCritical * eta_c) t_max *= 4.0;
    return t_max;
}

std::vector<SteadyState> window_states(const Configuration& config, const std::vector<double>& temperatures) {
    const SpectralDensity bath(config.spectral, {config.solver.omega_max_factor, config.solver.quad_rel_tol});
    const double t_max = steady_horizon(config);
    const TimeGrid grid = TimeGrid::covering(config.solver.dt, t_max);
    const ComplexSeries u = propagate_u(config.model, bath, grid, config.solver.extrapolate);

    const std::size_t total = grid.size();
    auto window = static_cast<std::size_t>(std::floor(config.solver.tail_fraction * static_cast<double>(grid.n_steps)));
    window = std::max<std::size_t>(window, 2);
    const std::size_t first = total - window;
    const std::size_t half = first + window / 2;

    FluctuationOptions opts;
    opts.initial_nodes = config.solver.freq_nodes;
    opts.max_nodes = config.solver.max_freq_nodes;
    opts.tol = config.solver.v_tol;
    opts.first_step = first;
    const FluctuationResult fl = fluctuation_series(u, grid, bath, temperatures, opts);

    std::vector<double> u2(total, 0.0);
    for (std::size_t n = first; n < total; ++n) u2[n] = std::norm(u[n]);
    const double u2_mean = window_mean(u2, first, total);
    const bool u_ok = drift_ok(window_mean(u2, first, half), window_mean(u2, half, total));

    const double r = config.model.r;
    const double sh = std::sinh(r), ch = std::cosh(r);
    std::vector<SteadyState> out;
    for (std::size_t k = 0; k < temperatures.size(); ++k) {
        const auto& v = fl.v[k];
        SteadyState st;
        st.t_max = grid.t_max();
        st.u_inf_abs = std::sqrt(u2_mean);
        st.v_inf = window_mean(v, first, total);
        // |sigma| = |u|^2 cosh r sinh r, so averaging |u|^2 averages |sigma|.
        ModeMoments m;
        m.n = u2_mean * sh * sh + std::max(st.v_inf, 0.0);
        m.sigma = -u2_mean * ch * sh;
        m.gap = 0.5 + 0.5 * u2_mean * std::expm1(-2.0 * r) + std::max(st.v_inf, 0.0);
        st.en_inf = log_negativity(symplectic_min(m));
        st.converged = u_ok && fl.converged && drift_ok(window_mean(v, first, half), window_mean(v, half, total));
        out.push_back(st);
    }
    return out;
}

std::vector<SteadyState> limit_states(const Configuration& config, const std::vector<double>& temperatures) {
    const SpectralDensity bath(config.spectral, {config.solver.omega_max_factor, config.solver.quad_rel_tol});
    const ModelConfig& model = config.model;
    const ModeSearch search = find_localized_modes(model, bath);
    const double wc = config.spectral.omega_c;
    const double big = bath.omega_max();
    const double s = config.spectral.s;
    constexpr double four_pi_sq = 4.0 * std::numbers::pi * std::numbers::pi;

    // Dyadic grading down to omega_c 2^-40 covers bound states hugging w = 0.
    std::vector<double> bounds{0.0};
    for (double edge = wc * std::ldexp(1.0, -40); edge < big; edge *= 2.0) bounds.push_back(edge);
    bounds.push_back(big);

    // Zeros of z(w) = omega_plus - w + Delta(w) on the continuum are peaks of
    // A of width ~ 2 pi J(w_r); near the transition for s > 1 they get
    // arbitrarily narrow, so grade geometrically toward each of them.
    auto z = [&](double w) { return pole_function(model, bath, w); };
    if (config.spectral.eta > 0.0) {
        constexpr int kScan = 240;
        double prev_w = wc * 1e-12;
        double prev_z = z(prev_w);
        for (int i = 1; i <= kScan; ++i) {
            const double w = wc * 1e-12 * std::pow(big / (wc * 1e-12), static_cast<double>(i) / kScan);
            const double zw = z(w);
            if ((prev_z > 0.0) != (zw > 0.0)) {
                std::uintmax_t iters = 100;
                auto bracket = boost::math::tools::toms748_solve(
                    z, prev_w, w, prev_z, zw, boost::math::tools::eps_tolerance<double>(40), iters);
                const double root = 0.5 * (bracket.first + bracket.second);
                bounds.push_back(root);
                for (int k = 1; k <= 20; ++k) {
                    const double off = root * std::ldexp(1.0, -2 * k);
                    bounds.push_back(root - off);
                    if (root + off < big) bounds.push_back(root + off);
                }
            }
            prev_w = w;
            prev_z = zw;
        }
    }
    std::sort(bounds.begin(), bounds.end());
    bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());

    double pole_sq = 0.0, pole_sum = 0.0;
    for (const auto& m : search.modes) {
        pole_sq += m.residue * m.residue;
        pole_sum += m.residue;
    }

    // v(inf) = int nbar [A + 2 J sum_j Z_j^2 / (w - w_j)^2]; cross terms
    // between the pole and the continuum dephase away.
    struct Pass {
        std::vector<double> v;
        double sum_rule{0.0};
    };
    auto evaluate = [&](int panels) {
        const quad::FrequencyMesh mesh = quad::breakpoint_mesh(bounds, s, panels);
        Pass pass;
        pass.v.assign(temperatures.size(), 0.0);
        pass.sum_rule = pole_sum;
        for (std::size_t i = 0; i < mesh.size(); ++i) {
            const double w = mesh.omega[i];
            const double j = bath.density(w);
            if (j == 0.0) continue;
            const double d = w - model.omega_plus - bath.self_energy_shift(w);
            const double a = 2.0 * j / (d * d + four_pi_sq * j * j);
            double bound = 0.0;
            for (const auto& m : search.modes) bound += m.residue * m.residue / ((w - m.frequency) * (w - m.frequency));
            pass.sum_rule += mesh.weight[i] * a;
            const double density = mesh.weight[i] * (a + 2.0 * j * bound);
            for (std::size_t k = 0; k < temperatures.size(); ++k) {
                if (temperatures[k] > 0.0) pass.v[k] += density * bose_occupation(w, temperatures[k]);
            }
        }
        return pass;
    };

    constexpr double kLimitTol = 1e-9;
    int panels = 2;
    Pass coarse = evaluate(panels);
    Pass fine;
    double change = 0.0;
    bool settled = false;
    for (int iter = 0; iter < 5 && !settled; ++iter) {
        panels *= 2;
        fine = evaluate(panels);
        change = std::abs(fine.sum_rule - coarse.sum_rule);
        for (std::size_t k = 0; k < temperatures.size(); ++k) {
            change = std::max(change, std::abs(fine.v[k] - coarse.v[k]) / std::max(1.0, std::abs(fine.v[k])));
        }
        settled = change < kLimitTol;
        coarse = std::move(fine);
    }
    const bool sum_rule_ok = std::abs(coarse.sum_rule - 1.0) < 1e-6;

    const double r = config.model.r;
    std::vector<SteadyState> out;
    for (std::size_t k = 0; k < temperatures.size(); ++k) {
        SteadyState st;
        st.t_max = std::numeric_limits<double>::infinity();
        st.u_inf_abs = std::sqrt(pole_sq);
        st.v_inf = coarse.v[k];
        // Time averages: |u|^2 -> sum Z^2, |sigma| -> sum Z^2 cosh r sinh r.
        ModeMoments m;
        m.n = pole_sq * std::sinh(r) * std::sinh(r) + st.v_inf;
        m.sigma = -pole_sq * std::cosh(r) * std::sinh(r);
        m.gap = 0.5 + 0.5 * pole_sq * std::expm1(-2.0 * r) + st.v_inf;
        st.en_inf = log_negativity(symplectic_min(m));
        st.converged = settled && sum_rule_ok;
        out.push_back(st);
    }
    return out;
}

std::vector<SteadyState> steady_states(const Configuration& config, const std::vector<double>& temperatures) {
    if (config.solver.steady_method == SteadyMethod::window) return window_states(config, temperatures);
    return limit_states(config, temperatures);
}

SteadyState steady_state(const Configuration& config) {
    return steady_states(config, {config.bath.temperature}).front();
}

std::vector<double> Axis::values() const {
    std::vector<double> out;
    if (count == 1) return {min};
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back(min + (max - min) * static_cast<double>(i) / static_cast<double>(count - 1));
    }
    return out;
}

void SweepGrid::validate() const {
    for (const Axis* a : {&eta, &s, &temperature}) {
        if (a->count < 1) throw ValidationError("grid_invalid", "axis count must be >= 1");
        if (!std::isfinite(a->min) || !std::isfinite(a->max) || a->min > a->max) {
            throw ValidationError("grid_invalid", "axis needs finite min <= max");
        }
    }
    if (eta.min < 0.0) throw ValidationError("eta_negative", "eta axis must start at >= 0");
    if (!(s.min > 0.0)) throw ValidationError("s_nonpositive", "s axis must start above 0");
    if (temperature.min < 0.0) throw ValidationError("temperature_negative", "temperature axis must start at >= 0");
}

Phase classify_phase(const PhasePoint& point, double eta_c, double eps_ent) {
    if (point.eta < eta_c) return Phase::I;
    return point.en_inf > eps_ent ? Phase::II : Phase::III;
}

std::vector<PhasePoint> run_sweep(const SweepGrid& grid, const Configuration& base, unsigned jobs) {
    grid.validate();
    const auto etas = grid.eta.values();
    const auto ss = grid.s.values();
    const auto temps = grid.temperature.values();
    std::vector<PhasePoint> points(grid.size());

    const std::size_t columns = etas.size() * ss.size();
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t task = next++; task < columns; task = next++) {
            const std::size_t i_eta = task / ss.size();
            const std::size_t i_s = task % ss.size();
            Configuration cfg = base;
            std::vector<SteadyState> states;
            double eta_c = std::numeric_limits<double>::quiet_NaN();
            try {
                cfg.spectral = make_spectral(etas[i_eta], ss[i_s], base.spectral.omega_c);
                eta_c = critical_coupling(ss[i_s], cfg.model.omega_plus, cfg.spectral.omega_c);
                states = steady_states(cfg, temps);
            } catch (const std::exception&) {
                states.clear();
            }
            for (std::size_t i_t = 0; i_t < temps.size(); ++i_t) {
                PhasePoint& p = points[grid.index(i_eta, i_s, i_t)];
                p.eta = etas[i_eta];
                p.s = ss[i_s];
                p.temperature = temps[i_t];
                if (states.empty()) {
                    const double nan = std::numeric_limits<double>::quiet_NaN();
                    p.u_inf_abs = p.v_inf = p.en_inf = nan;
                    p.converged = false;
                    p.phase = p.eta < eta_c ? Phase::I : Phase::III;
                    continue;
                }
                p.u_inf_abs = states[i_t].u_inf_abs;
                p.v_inf = states[i_t].v_inf;
                p.en_inf = states[i_t].en_inf;
                p.converged = states[i_t].converged;
                p.phase = classify_phase(p, eta_c, base.solver.eps_ent);
            }
        }
    };

    jobs = std::max(1u, jobs);
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return points;
}

std::vector<ThermalBoundary> thermal_boundary(const std::vector<PhasePoint>& points, const SweepGrid& grid,
                                              const Configuration& base) {
    std::vector<ThermalBoundary> out;
    const double eps = base.solver.eps_ent;
    for (std::size_t i_eta = 0; i_eta < grid.eta.count; ++i_eta) {
        for (std::size_t i_s = 0; i_s < grid.s.count; ++i_s) {
            const PhasePoint& head = points[grid.index(i_eta, i_s, 0)];
            const double eta_c = critical_coupling(head.s, base.model.omega_plus, base.spectral.omega_c);
            if (head.eta < eta_c) continue;
            ThermalBoundary b{head.eta, head.s, std::numeric_limits<double>::quiet_NaN()};
            for (std::size_t i_t = 0; i_t + 1 < grid.temperature.count; ++i_t) {
                const PhasePoint& lo = points[grid.index(i_eta, i_s, i_t)];
                const PhasePoint& hi = points[grid.index(i_eta, i_s, i_t + 1)];
                if (lo.en_inf > eps && hi.en_inf <= eps) {
                    const double f = (lo.en_inf - eps) / (lo.en_inf - hi.en_inf);
                    b.critical_temperature = lo.temperature + f * (hi.temperature - lo.temperature);
                    break;
                }
            }
            out.push_back(b);
        }
    }
    return out;
}

} // namespace entdyn
