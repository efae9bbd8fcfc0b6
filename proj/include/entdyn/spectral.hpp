// spectral.hpp: Ohmic-family spectral density and derived bath functions
//
// J(w) = eta * w * (w/omega_c)^(s-1) * exp(-w/omega_c) for w > 0, zero otherwise.
// The center-of-mass mode couples through 2J, so the memory kernel is
// g(tau) = 2 * int J(w) exp(-i w tau) dw and the self-energy is
// Sigma(w) = 2 * int J(w') / (w - w') dw', with Im Sigma(w + i0) = -2 pi J(w).

#pragma once

#include <complex>

#include "entdyn/model.hpp"

namespace entdyn {

struct QuadratureSettings {
    double omega_max_factor{30.0}; // integration cutoff in units of omega_c
    double rel_tol{1e-11};
};

class SpectralDensity {
public:
    explicit SpectralDensity(SpectralParams params, QuadratureSettings quad = {});

    const SpectralParams& params() const noexcept { return params_; }
    const QuadratureSettings& quadrature() const noexcept { return quad_; }
    double omega_max() const noexcept { return params_.omega_c * quad_.omega_max_factor; }

    double density(double omega) const noexcept;
    // dJ/dw for w > 0.
    double density_slope(double omega) const noexcept;

    // Closed form 2 eta Gamma(s+1) omega_c^2 (1 + i omega_c tau)^-(s+1).
    std::complex<double> memory_kernel(double tau) const;

    // int_0^inf J = eta omega_c^2 Gamma(s+1).
    double total_weight() const;

    // Delta(w): regular integral for w <= 0, principal value for w > 0.
    double self_energy_shift(double omega) const;

    // Sigma'(w) = -2 int J(w') / (w - w')^2 dw', defined for w < 0 only.
    double self_energy_slope(double omega) const;

private:
    SpectralParams params_;
    QuadratureSettings quad_;
    double prefactor_; // eta * omega_c^(1-s)
};

// 1 / (exp(w/T) - 1); exactly 0 at T = 0. Rejects w <= 0.
double bose_occupation(double omega, double temperature);

// Gamma function used by the closed forms.
double gamma_fn(double x);

} // namespace entdyn
