// greens.hpp: Retarded function u(t) and fluctuation function v(t) of the
// center-of-mass mode
//
// u solves  du/dt + i omega_plus u + int_0^t g(t - tau) u(tau) dtau = 0,  u(0) = 1.
// The total Hamiltonian is time independent, so u(t, tau) = u(t - tau) and
// v(t) = 2 int dw J(w) nbar(w, T) |F(t, w)|^2  with  F(t, w) = int_0^t u(tau) e^{i w tau} dtau.

#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "entdyn/model.hpp"
#include "entdyn/modes.hpp"
#include "entdyn/quadrature.hpp"
#include "entdyn/spectral.hpp"

namespace entdyn {

using ComplexSeries = std::vector<std::complex<double>>;
using RealSeries = std::vector<double>;

struct TimeGrid {
    double dt{0.02};
    std::size_t n_steps{2500};

    // Throws ValidationError unless dt > 0 and n_steps >= 1.
    static TimeGrid covering(double dt, double t_max);
    double t_max() const noexcept { return dt * static_cast<double>(n_steps); }
    double time(std::size_t n) const noexcept { return dt * static_cast<double>(n); }
    std::size_t size() const noexcept { return n_steps + 1; }
};

struct GreensSeries {
    TimeGrid grid;
    ComplexSeries u;
    RealSeries v;
};

// Implicit trapezoidal scheme on the memory convolution (second order).
ComplexSeries propagate_u_trapezoid(const ModelConfig& config, const SpectralDensity& bath, const TimeGrid& grid);

// Internal substeps per grid step so that h * sqrt(omega_plus^2 + g(0)) <= 0.06.
int volterra_substeps(const ModelConfig& config, const SpectralDensity& bath, double dt);

// Trapezoidal runs at h and h/2 combined as (4 u_{h/2} - u_h) / 3 when
// `extrapolate` is set, sampled back onto `grid`. With `substep` off the
// scheme runs at exactly grid.dt.
ComplexSeries propagate_u(const ModelConfig& config, const SpectralDensity& bath, const TimeGrid& grid,
                          bool extrapolate = true, bool substep = true);

// Pole + branch-cut representation
//   u(t) = sum_j Z_j e^{-i w_j t} + int_0^Omega A(w) e^{-i w t} dw,
//   A(w) = 2 J(w) / ((w - omega_plus - Delta(w))^2 + 4 pi^2 J(w)^2).
// A is tabulated once on a graded mesh refined until u(0) and u(t_max)
// stop changing by more than `tol`.
class BranchCutRepresentation {
public:
    BranchCutRepresentation(const ModelConfig& config, const SpectralDensity& bath, const ModeSearch& modes,
                            double t_max, double tol = 1e-8);

    std::complex<double> operator()(double t) const;
    std::complex<double> branch_integral(double t) const;
    double pole_weight() const;                 // sum_j Z_j
    double sum_rule() const;                    // sum_j Z_j + int A
    const std::vector<LocalizedMode>& modes() const noexcept { return modes_; }
    std::size_t node_count() const noexcept { return mesh_.size(); }
    double achieved_change() const noexcept { return achieved_; }

private:
    std::vector<LocalizedMode> modes_;
    quad::FrequencyMesh mesh_;
    std::vector<double> weighted_density_; // weight_i * A(w_i)
    double achieved_{0.0};
};

std::complex<double> u_spectral(const ModelConfig& config, const SpectralDensity& bath, double t);

struct FluctuationOptions {
    int initial_nodes{400};
    int max_nodes{409600};
    double tol{1e-6};           // stop when sup |v_2N - v_N| < tol
    std::size_t first_step{0};  // steps before this are not stored (zeros)
};

struct FluctuationResult {
    std::vector<RealSeries> v; // one series per requested temperature
    std::size_t nodes{0};
    double last_change{0.0};
    bool converged{false};
};

// Frequency-domain route for several temperatures sharing one u series.
FluctuationResult fluctuation_series(const ComplexSeries& u, const TimeGrid& grid, const SpectralDensity& bath,
                                     const std::vector<double>& temperatures, const FluctuationOptions& options = {});

// Single temperature; T = 0 gives an exact zero series.
RealSeries compute_v(const SpectralDensity& bath, const BathParams& thermal, const TimeGrid& grid,
                     const ComplexSeries& u, const FluctuationOptions& options = {});

// Direct double-time quadrature of int int u(a) gtilde(b - a) u*(b) da db,
// evaluated every `stride` steps (others left as NaN). O(N^2) per sample.
RealSeries compute_v_direct(const SpectralDensity& bath, const BathParams& thermal, const TimeGrid& grid,
                            const ComplexSeries& u, std::size_t stride = 1);

// gtilde(tau) = 2 int J(w) nbar(w, T) e^{-i w tau} dw by adaptive quadrature.
std::complex<double> thermal_kernel(const SpectralDensity& bath, double temperature, double tau);

// Throws ConsistencyError when the two v routes differ by more than `tol`
// on the sampled steps; returns the largest difference otherwise.
double cross_check_v(const RealSeries& frequency_route, const RealSeries& direct_route, double tol);

// Convenience: u by Volterra, v by the frequency route.
GreensSeries evolve_greens(const Configuration& config, const TimeGrid& grid);

} // namespace entdyn
