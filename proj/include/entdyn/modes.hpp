// modes.hpp: Localized (bound) modes below the bath continuum
//
// A localized mode is a real zero of z(w) = omega_plus - w + Delta(w) with
// w < 0. Its residue Z = 1 / (1 - Sigma'(w)) sets the non-decaying part of u.

#pragma once

#include <vector>

#include "entdyn/model.hpp"
#include "entdyn/spectral.hpp"

namespace entdyn {

struct LocalizedMode {
    double frequency{0.0};
    double residue{0.0};
};

struct ModeSearch {
    std::vector<LocalizedMode> modes;
    bool marginal{false}; // eta equals eta_c to rounding: zero-frequency mode, no residue
    double z_at_zero{0.0};
};

// omega_plus / (2 omega_c Gamma(s)).
double critical_coupling(double s, double omega_plus, double omega_c);

// z(w) = omega_plus - w + Delta(w).
double pole_function(const ModelConfig& config, const SpectralDensity& bath, double omega);

ModeSearch find_localized_modes(const ModelConfig& config, const SpectralDensity& bath);

} // namespace entdyn
