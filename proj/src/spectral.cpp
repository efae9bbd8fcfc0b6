#include "entdyn/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "entdyn/errors.hpp"
#include "entdyn/quadrature.hpp"

namespace entdyn {

double gamma_fn(double x) { return std::tgamma(x); }

SpectralDensity::SpectralDensity(SpectralParams params, QuadratureSettings quad)
    : params_(make_spectral(params.eta, params.s, params.omega_c)),
      quad_(quad),
      prefactor_(params.eta * std::pow(params.omega_c, 1.0 - params.s)) {
    if (quad_.omega_max_factor < 30.0) {
        throw ValidationError("solver_invalid", "omega_max_factor must be >= 30");
    }
}

double SpectralDensity::density(double omega) const noexcept {
    if (!(omega > 0.0)) return 0.0;
    return prefactor_ * std::pow(omega, params_.s) * std::exp(-omega / params_.omega_c);
}

double SpectralDensity::density_slope(double omega) const noexcept {
    if (!(omega > 0.0)) return 0.0;
    return density(omega) * (params_.s / omega - 1.0 / params_.omega_c);
}

std::complex<double> SpectralDensity::memory_kernel(double tau) const {
    const double s = params_.s;
    const double wc = params_.omega_c;
    const std::complex<double> base(1.0, wc * tau);
    return 2.0 * params_.eta * gamma_fn(s + 1.0) * wc * wc * std::pow(base, -(s + 1.0));
}

double SpectralDensity::total_weight() const {
    return params_.eta * params_.omega_c * params_.omega_c * gamma_fn(params_.s + 1.0);
}

double SpectralDensity::self_energy_shift(double omega) const {
    if (params_.eta == 0.0) return 0.0;
    const double s = params_.s;
    const double wc = params_.omega_c;
    const double tol = quad_.rel_tol;
    const double big = omega_max();

    if (omega <= 0.0) {
        auto f = [&](double w) { return density(w) / (omega - w); };
        return 2.0 * quad::integrate_from_origin(f, big, s, wc, tol);
    }

    // Singularity subtraction: P int_0^L J(w')/(w - w') = int_0^L [J(w') - J(w)]/(w - w') + J(w) ln(w/(L - w)).
    const double upper = std::max(big, 2.0 * omega);
    const double j0 = density(omega);
    const double slope = density_slope(omega);
    auto f = [&](double w) {
        const double d = omega - w;
        if (std::abs(d) < 1e-7 * omega) return -slope;
        return (density(w) - j0) / d;
    };
    // The quotient is noisy near w = omega; judge accuracy against J(omega).
    const double floor = tol * (j0 + std::abs(slope) * omega);
    double pv = quad::integrate_from_origin(f, omega, s, omega, tol, floor);
    const double mid = std::min(upper, 2.0 * omega + wc);
    pv += quad::integrate(f, omega, mid, tol, floor);
    if (mid < upper) pv += quad::integrate(f, mid, upper, tol, floor);
    pv += j0 * std::log(omega / (upper - omega));
    return 2.0 * pv;
}

double SpectralDensity::self_energy_slope(double omega) const {
    if (!(omega < 0.0)) {
        throw ValidationError("omega_nonnegative", "self-energy slope is only defined below the continuum (w < 0)");
    }
    if (params_.eta == 0.0) return 0.0;
    auto f = [&](double w) {
        const double d = omega - w;
        return density(w) / (d * d);
    };
    return -2.0 * quad::integrate_from_origin(f, omega_max(), params_.s, params_.omega_c, quad_.rel_tol);
}

double bose_occupation(double omega, double temperature) {
    if (!(omega > 0.0)) {
        throw ValidationError("omega_nonpositive", "Bose occupation requires w > 0");
    }
    if (temperature <= 0.0) return 0.0;
    return 1.0 / std::expm1(omega / temperature);
}

} // namespace entdyn
