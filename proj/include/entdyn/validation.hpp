// validation.hpp: Cross-checks of the main solver against the finite-bath
// oracle and against the pole + branch-cut representation of u

#pragma once

#include <string>
#include <vector>

#include "entdyn/model.hpp"

namespace entdyn {

struct ValidationCheck {
    std::string metric;
    double value{0.0};
    double tolerance{0.0};
    bool passed{false};
};

struct ValidationOptions {
    std::size_t oracle_modes{2000};
    double dt{0.02};
    bool substep{true}; // off: the Volterra scheme runs at exactly dt
    double t_max{20.0};
    double tolerance{1e-3};
    double unitarity_tolerance{1e-10};
    double sum_rule_tolerance{1e-6};
    double steady_tolerance{1e-6};
};

// Throws ValidationError("recurrence_window") before any evolution when the
// discretized bath would re-cohere inside [0, t_max].
std::vector<ValidationCheck> oracle_suite(const ValidationOptions& options);

std::vector<ValidationCheck> route_suite(const ValidationOptions& options);

// Infinite-time v of finite baths with K, 2K, 4K modes (K = oracle_modes / 2),
// extrapolated in 1/K, against the steady limit of the main solver.
double oracle_steady_v(const Configuration& config, double temperature, std::size_t base_modes);

std::vector<ValidationCheck> steady_suite(const ValidationOptions& options);

} // namespace entdyn
