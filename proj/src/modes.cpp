#include "entdyn/modes.hpp"

#include <cmath>
#include <cstdint>
#include <string>

#include <boost/math/tools/roots.hpp>

#include "entdyn/errors.hpp"

namespace entdyn {

double critical_coupling(double s, double omega_plus, double omega_c) {
    if (!(s > 0.0) || !(omega_plus > 0.0) || !(omega_c > 0.0)) {
        throw ValidationError("domain", "critical coupling needs s, omega_plus, omega_c > 0");
    }
    return omega_plus / (2.0 * omega_c * gamma_fn(s));
}

double pole_function(const ModelConfig& config, const SpectralDensity& bath, double omega) {
    return config.omega_plus - omega + bath.self_energy_shift(omega);
}

ModeSearch find_localized_modes(const ModelConfig& config, const SpectralDensity& bath) {
    const auto& p = bath.params();
    ModeSearch result;
    // Delta(0) = -2 eta omega_c Gamma(s) in closed form.
    result.z_at_zero = config.omega_plus - 2.0 * p.eta * p.omega_c * gamma_fn(p.s);
    if (std::abs(result.z_at_zero) <= 1e-14 * config.omega_plus) {
        result.marginal = true;
        return result;
    }
    if (p.eta == 0.0) return result;

    auto z = [&](double w) { return pole_function(config, bath, w); };

    // Ladder 0, -omega_c, -2 omega_c, ... until z > 0 at the far end. Every
    // sign change along the ladder is refined, so a second root would surface.
    std::vector<double> ladder{0.0};
    std::vector<double> values{result.z_at_zero};
    double edge = -p.omega_c;
    for (int k = 0; k < 60; ++k, edge *= 2.0) {
        ladder.push_back(edge);
        values.push_back(z(edge));
        if (values.back() > 0.0 && k >= 1) break;
    }
    if (values.back() <= 0.0) {
        throw NumericalError("no positive z(w) found on the bracket ladder", ladder.back());
    }

    for (std::size_t i = 0; i + 1 < ladder.size(); ++i) {
        const double fa = values[i];
        const double fb = values[i + 1];
        if ((fa > 0.0) == (fb > 0.0)) continue;
        // Bracket [ladder[i+1], ladder[i]]: left end is further below zero.
        double lo = ladder[i + 1], hi = ladder[i];
        double flo = fb, fhi = fa;
        if (hi == 0.0) {
            // Keep the solver off the branch point.
            hi = -1e-300;
        }
        std::uintmax_t iters = 200;
        auto tol = [](double a, double b) { return std::abs(a - b) <= 1e-13 * std::max(std::abs(a), std::abs(b)); };
        auto [a, b] = boost::math::tools::toms748_solve(z, lo, hi, flo, fhi, tol, iters);
        if (iters >= 200) {
            throw NumericalError("root refinement did not converge; bracket [" + std::to_string(a) + ", " +
                                     std::to_string(b) + "]",
                                 std::abs(b - a));
        }
        const double root = 0.5 * (a + b);
        LocalizedMode mode;
        mode.frequency = root;
        mode.residue = 1.0 / (1.0 - bath.self_energy_slope(root));
        result.modes.push_back(mode);
    }
    return result;
}

} // namespace entdyn
