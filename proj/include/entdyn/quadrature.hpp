// quadrature.hpp: Frequency-axis integration helpers
//
// Two tools: an adaptive Gauss-Kronrod wrapper that reports non-convergence,
// and a fixed composite Gauss-Legendre mesh on (0, omega_max] that is graded
// dyadically toward the origin. Both apply the substitution w = x^(1/s) near
// w = 0 when s < 1 so that w^(s-1) endpoint behaviour becomes smooth.

#pragma once

#include <functional>
#include <vector>

namespace entdyn::quad {

using RealFunction = std::function<double(double)>;

// Adaptive Gauss-Kronrod on [a, b]. Accepts when the error estimate is below
// max(rel_tol * |I|, abs_tol); otherwise throws NumericalError carrying the
// achieved relative error.
double integrate(const RealFunction& f, double a, double b, double rel_tol, double abs_tol = 0.0);

// Integral over [0, b] of a function with w^(s-1) or w^s behaviour at 0.
// For s < 1 the innermost dyadic segment is integrated in x = w^s.
double integrate_from_origin(const RealFunction& f, double b, double s, double scale, double rel_tol,
                             double abs_tol = 0.0);

struct FrequencyMesh {
    std::vector<double> omega;   // ascending, all > 0
    std::vector<double> weight;  // quadrature weights including any Jacobian

    std::size_t size() const noexcept { return omega.size(); }
};

// Composite 8-point Gauss-Legendre panels. Segment boundaries are
// 0, scale*2^-12, ..., scale, 2*scale, ..., omega_max; every segment gets
// `panels_per_segment` equal panels.
FrequencyMesh graded_mesh(double scale, double omega_max, double s, int panels_per_segment);

// Same rule over arbitrary ascending bounds; when bounds[0] == 0 and s < 1
// the first segment is integrated in x = w^s.
FrequencyMesh breakpoint_mesh(const std::vector<double>& bounds, double s, int panels_per_segment);

// Panels per segment that gives roughly `target_nodes` nodes.
int panels_for_nodes(double scale, double omega_max, int target_nodes);

} // namespace entdyn::quad
