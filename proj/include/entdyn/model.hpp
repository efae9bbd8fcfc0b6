// model.hpp: Physical configuration of the two-mode system and its bath
//
// Units: omega0 = 1 sets the energy unit and 1/omega0 the time unit;
// hbar = k_B = 1, so the bath temperature is an energy.

#pragma once

#include <optional>
#include <string>
#include <vector>

namespace entdyn {

struct ModelConfig {
    double omega0{1.0};      // bare mode frequency
    double kappa{0.5};       // inter-mode coupling
    double r{3.0};           // two-mode squeeze parameter
    double omega_plus{1.5};  // center-of-mass frequency omega0 + kappa
    double omega_minus{0.5}; // relative-mode frequency omega0 - kappa

    // Recomputes the derived frequencies from the stored primitives.
    bool derived_consistent() const noexcept;
};

// Ohmic-family bath J(w) = eta * w * (w/omega_c)^(s-1) * exp(-w/omega_c).
struct SpectralParams {
    double eta{0.05};
    double s{0.5};
    double omega_c{3.0};
};

struct BathParams {
    double temperature{0.0};
};

// How steady states are extracted: the exact t -> infinity limit from the
// pole and branch-cut structure, or the mean over the last tail_fraction of
// a finite evolution.
enum class SteadyMethod { limit, window };

std::string to_string(SteadyMethod method);
// Throws ValidationError("parse_error") for anything but "limit" or "window".
SteadyMethod parse_steady_method(const std::string& text);

// Numerical settings shared by the propagators and the sweep.
struct SolverOptions {
    double dt{0.02};               // time step
    double t_max{50.0};            // single-run horizon
    double steady_t_max{200.0};    // horizon for steady-state extraction
    double omega_max_factor{30.0}; // frequency cutoff in units of omega_c
    int freq_nodes{400};           // initial frequency node count for v
    int max_freq_nodes{409600};
    double v_tol{1e-6};            // node-doubling stop criterion for v
    double quad_rel_tol{1e-11};    // adaptive quadrature target
    double tail_fraction{0.1};     // steady-state averaging window
    double eps_ent{1e-3};          // phase II / III threshold
    bool extrapolate{true};        // Richardson-combine dt and dt/2 Volterra runs
    SteadyMethod steady_method{SteadyMethod::limit};
};

struct Configuration {
    ModelConfig model;
    SpectralParams spectral;
    BathParams bath;
    SolverOptions solver;
    std::vector<std::string> warnings;
};

// Unresolved inputs; anything left empty falls back to the defaults above
// (omega_c = 3, kappa = 0.5, r = 3).
struct RawParameters {
    std::optional<double> omega0, kappa, r;
    std::optional<double> eta, s, omega_c, temperature;
    std::optional<double> dt, t_max, steady_t_max, omega_max_factor;
    std::optional<double> v_tol, quad_rel_tol, tail_fraction, eps_ent;
    std::optional<int> freq_nodes, max_freq_nodes;
    std::optional<bool> extrapolate;
    std::optional<SteadyMethod> steady_method;

    // Fields set in `over` replace those in *this.
    void merge(const RawParameters& over);
};

ModelConfig make_model(double omega0, double kappa, double r);
SpectralParams make_spectral(double eta, double s, double omega_c);
BathParams make_bath(double temperature);

// Throws ValidationError with codes: non_finite, omega_plus_nonpositive,
// eta_negative, s_nonpositive, omega_c_nonpositive, temperature_negative,
// r_negative, solver_invalid. A non-positive omega_minus is accepted with a warning.
Configuration build_config(const RawParameters& raw);

// INI text with [system], [bath] and [solver] sections. Doubles are written
// in shortest round-trip form so parse(serialize(c)) reproduces c exactly.
std::string serialize_config(const Configuration& config);
RawParameters parse_config(const std::string& text);
RawParameters load_config_file(const std::string& path);

} // namespace entdyn
