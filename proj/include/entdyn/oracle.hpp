// oracle.hpp: Brute-force reference: a finite bath of K modes evolved exactly
//
// The center-of-mass mode couples to bath mode k with sqrt(2) g_k, so the
// single-particle matrix is M = diag(omega_plus, w_1..w_K) with M_0k = sqrt2 g_k.
// Then u(t) = [e^{-iMt}]_00 and v(t) = sum_k nbar(w_k, T) |[e^{-iMt}]_0k|^2.

#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "entdyn/model.hpp"
#include "entdyn/spectral.hpp"

namespace entdyn {

struct DiscretizedBath {
    std::vector<double> frequencies; // ascending, > 0
    std::vector<double> couplings;   // g_k >= 0

    std::size_t size() const noexcept { return frequencies.size(); }
    double total_weight() const;     // sum g_k^2
    double max_spacing() const;
};

// Midpoint rule on a uniform grid over (0, omega_max]; for s < 1 the grid is
// uniform in x = w^s instead. g_k^2 = J(w_k) * (width of cell k in w).
DiscretizedBath discretize(const SpectralDensity& bath, std::size_t modes, double omega_max);

struct OracleSeries {
    std::vector<double> times;
    std::vector<std::complex<double>> u;
    std::vector<double> v;
    double max_unitarity_defect{0.0}; // max_t | sum_k |U_0k|^2 - 1 |
};

class ExactPropagator {
public:
    ExactPropagator(const DiscretizedBath& bath, const ModelConfig& config);

    // Finite baths re-cohere after ~2 pi / dw; comparisons are refused past
    // half of that, pi / max spacing.
    double valid_until() const noexcept { return valid_until_; }

    // Throws ValidationError("recurrence_window") for times past valid_until().
    OracleSeries evolve(const std::vector<double>& times, double temperature) const;

    // Infinite-time averages for a nondegenerate spectrum:
    // mean |u|^2 = sum_l phi_0l^4 and mean v = sum_l phi_0l^2 sum_k nbar_k phi_kl^2.
    double dephased_u_sq() const;
    double dephased_v(double temperature) const;

    const Eigen::VectorXd& eigenvalues() const noexcept { return eigenvalues_; }
    int negative_eigenvalue_count() const;

private:
    DiscretizedBath bath_;
    Eigen::VectorXd eigenvalues_;
    Eigen::MatrixXd eigenvectors_;
    double valid_until_{0.0};
};

// Same infinite-time averages from the secular equation of the arrowhead
// matrix, O(K^2) with no dense eigensolve. One entry of `v` per temperature.
struct DephasedAverages {
    double u_sq{0.0};
    std::vector<double> v;
};
DephasedAverages dephased_averages(const DiscretizedBath& bath, const ModelConfig& config,
                                   const std::vector<double>& temperatures);

} // namespace entdyn
