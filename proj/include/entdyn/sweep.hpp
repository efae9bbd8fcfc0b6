// sweep.hpp: Steady states over (eta, s, T) grids and phase classification
//
// Phase I: eta < eta_c(s), the center-of-mass entanglement dissipates away.
// Phase II: eta >= eta_c(s) and the localized mode keeps E_N(rho_+) > eps.
// Phase III: eta >= eta_c(s) but thermal fluctuations wipe E_N(rho_+) out.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "entdyn/model.hpp"

namespace entdyn {

enum class Phase { I, II, III };

std::string to_string(Phase phase);

struct SteadyState {
    double u_inf_abs{0.0}; // sqrt of the long-time mean of |u|^2
    double v_inf{0.0};
    double en_inf{0.0};    // E_N(rho_+) from the time-averaged moments
    bool converged{false};
    double t_max{0.0};     // horizon actually used; infinite for the limit route
};

// Horizon for a steady-state run: solver.steady_t_max, quadrupled when
// |eta - eta_c| < 0.05 eta_c.
double steady_horizon(const Configuration& config);

// Mean over the last tail_fraction of one evolution to steady_horizon().
// One u trajectory is shared by all temperatures; config.bath is ignored.
// converged = false when the two half-window means differ by more than 1e-3
// relative.
std::vector<SteadyState> window_states(const Configuration& config, const std::vector<double>& temperatures);

// Exact t -> infinity values: |u|^2 averages to sum_j Z_j^2 and
//   v = int nbar(w) [A(w) + 2 J(w) sum_j Z_j^2 / (w - w_j)^2] dw.
// converged = false when panel doubling stalls or the sum rule is off by
// more than 1e-6. t_max is reported as infinity.
std::vector<SteadyState> limit_states(const Configuration& config, const std::vector<double>& temperatures);

// Dispatches on config.solver.steady_method.
std::vector<SteadyState> steady_states(const Configuration& config, const std::vector<double>& temperatures);

SteadyState steady_state(const Configuration& config);

struct Axis {
    double min{0.0};
    double max{0.0};
    std::size_t count{1};

    std::vector<double> values() const;
};

struct SweepGrid {
    Axis eta;
    Axis s;
    Axis temperature;

    // Throws ValidationError unless counts >= 1, min <= max and the minima
    // lie in the admissible domains (eta >= 0, s > 0, T >= 0).
    void validate() const;
    std::size_t size() const noexcept { return eta.count * s.count * temperature.count; }
    // Row-major index with T fastest, then s, then eta.
    std::size_t index(std::size_t i_eta, std::size_t i_s, std::size_t i_t) const noexcept {
        return (i_eta * s.count + i_s) * temperature.count + i_t;
    }
};

struct PhasePoint {
    double eta{0.0};
    double s{0.0};
    double temperature{0.0};
    double u_inf_abs{0.0};
    double v_inf{0.0};
    double en_inf{0.0};
    Phase phase{Phase::I};
    bool converged{false};
};

Phase classify_phase(const PhasePoint& point, double eta_c, double eps_ent);

// Every point of the grid, in row-major order regardless of scheduling.
// Failures are recorded as converged = false with NaN observables.
std::vector<PhasePoint> run_sweep(const SweepGrid& grid, const Configuration& base, unsigned jobs = 1);

struct ThermalBoundary {
    double eta{0.0};
    double s{0.0};
    double critical_temperature{0.0}; // NaN when en_inf never crosses eps in the T range
};

// Linear interpolation in T of the level set en_inf = eps along every
// (eta, s) column with eta >= eta_c(s).
std::vector<ThermalBoundary> thermal_boundary(const std::vector<PhasePoint>& points, const SweepGrid& grid,
                                              const Configuration& base);

} // namespace entdyn
