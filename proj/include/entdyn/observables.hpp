// observables.hpp: Gaussian-state quantities of the center-of-mass and
// relative modes built from u, v and the initial squeeze r

#pragma once

#include <complex>
#include <vector>

namespace entdyn {

// n = <a^dag a>, sigma = <a a> of a single mode.
struct ModeMoments {
    double n{0.0};
    std::complex<double> sigma{0.0, 0.0};
    // n + 1/2 - |sigma| when known in closed form; negative means "subtract".
    // Both terms grow like e^{2r}, so the subtraction loses digits at large r.
    double gap{-1.0};
};

struct SqueezeRecord {
    double magnitude{0.0};          // |r_+(t)|
    double phase{0.0};              // arg sigma, 0 when sigma = 0
    double thermal_occupation{0.0}; // nbar_+(t)
};

struct EntanglementRecord {
    double en_plus{0.0};
    double en_minus{0.0};
    double en_total{0.0};
    double en_naive{0.0};
};

// n = |u|^2 sinh^2 r + v,  sigma = -u^2 cosh r sinh r.
ModeMoments center_moments(std::complex<double> u, double v, double r);

// Relative mode is decoherence free: n = sinh^2 r, sigma = e^{-2 i omega_minus t} sinh r cosh r.
ModeMoments relative_moments(double r, double omega_minus, double t);

// nbar + 1/2 = sqrt((n + 1/2)^2 - |sigma|^2).
double effective_thermal_occupation(const ModeMoments& m);

SqueezeRecord squeeze_parameter(const ModeMoments& m);

// Smaller symplectic eigenvalue sqrt((n - |sigma| + 1/2) / 2).
double symplectic_min(const ModeMoments& m);

// max(0, -log2(2 lambda)).
double log_negativity(double lambda);

// E_N(rho_+) + r / ln 2; the relative mode always carries r / ln 2.
double total_entanglement(double en_plus, double r);

// Joint log-negativity of the original modes a_{1,2} = (a_+ +- a_-)/sqrt(2)
// from the full 4x4 covariance matrix. This is the improper route that lets
// decoherence of a_+ leak into the decoherence-free a_- share; it is kept
// to quantify that error, not as the physical total.
double joint_log_negativity_naive(const ModeMoments& plus, const ModeMoments& minus);

EntanglementRecord entanglement(const ModeMoments& plus, const ModeMoments& minus, double r);

// p_n = nbar^n / (1 + nbar)^(n+1) for n = 0..n_max.
std::vector<double> thermal_fock_distribution(double nbar, int n_max = 64);

struct QuadratureVariances {
    double squeezed{0.0};     // sqrt(nbar + 1/2) e^{-|r_+|}
    double antisqueezed{0.0}; // sqrt(nbar + 1/2) e^{+|r_+|}
};

QuadratureVariances quadrature_variances(const SqueezeRecord& record);

} // namespace entdyn
