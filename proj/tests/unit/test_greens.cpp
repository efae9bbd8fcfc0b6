#include <doctest.h>

#include <cmath>
#include <complex>

#include "entdyn/errors.hpp"
#include "entdyn/greens.hpp"
#include "entdyn/modes.hpp"

using namespace entdyn;
using doctest::Approx;

namespace {

double sup_diff(const ComplexSeries& a, const ComplexSeries& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

} // namespace

TEST_CASE("time grid") {
    auto g = TimeGrid::covering(0.02, 1.0);
    CHECK(g.n_steps == 50);
    CHECK(g.size() == 51);
    CHECK(g.t_max() == Approx(1.0));
    CHECK_THROWS_AS(TimeGrid::covering(0.0, 1.0), ValidationError);
}

TEST_CASE("decoupled mode rotates freely") {
    auto model = make_model(1.0, 0.5, 3.0);
    SpectralDensity b(make_spectral(0.0, 0.5, 3.0));
    auto g = TimeGrid::covering(0.02, 30.0);
    auto u = propagate_u(model, b, g);
    CHECK(u[0] == std::complex<double>(1.0, 0.0));
    for (std::size_t n = 0; n < g.size(); ++n) {
        CHECK(std::abs(u[n] - std::polar(1.0, -1.5 * g.time(n))) < 1e-14);
    }
}

TEST_CASE("trapezoid converges at second order, extrapolation beats it") {
    auto model = make_model(1.0, 0.5, 3.0);
    SpectralDensity b(make_spectral(0.1, 1.0, 3.0));
    auto fine = TimeGrid::covering(0.0025, 10.0);
    auto ref = propagate_u(model, b, fine);
    auto coarse_err = [&](double dt, bool extrap) {
        auto g = TimeGrid::covering(dt, 10.0);
        auto u = extrap ? propagate_u(model, b, g, true, false) : propagate_u_trapezoid(model, b, g);
        std::size_t stride = static_cast<std::size_t>(std::lround(dt / fine.dt));
        double d = 0.0;
        for (std::size_t n = 0; n < g.size(); ++n) d = std::max(d, std::abs(u[n] - ref[n * stride]));
        return d;
    };
    double e1 = coarse_err(0.04, false);
    double e2 = coarse_err(0.02, false);
    CHECK(e1 / e2 == Approx(4.0).epsilon(0.15));
    CHECK(coarse_err(0.04, true) < e1 / 20.0);
}

TEST_CASE("weak coupling decays, strong coupling plateaus at the residue") {
    auto model = make_model(1.0, 0.5, 3.0);
    {
        SpectralDensity b(make_spectral(0.05, 1.0, 3.0));
        auto g = TimeGrid::covering(0.02, 100.0);
        auto u = propagate_u(model, b, g);
        CHECK(std::abs(u.back()) < 1e-3);
    }
    {
        SpectralDensity b(make_spectral(0.3, 0.5, 3.0));
        auto g = TimeGrid::covering(0.02, 200.0);
        auto u = propagate_u(model, b, g);
        double z = find_localized_modes(model, b).modes.at(0).residue;
        CHECK(std::abs(u.back()) == Approx(z).epsilon(0.01));
    }
}

TEST_CASE("pole plus branch cut reproduces the Volterra solution") {
    auto model = make_model(1.0, 0.5, 3.0);
    for (double eta : {0.05, 0.3}) {
        SpectralDensity b(make_spectral(eta, 0.5, 3.0));
        auto modes = find_localized_modes(model, b);
        BranchCutRepresentation rep(model, b, modes, 20.0);
        CHECK(std::abs(rep.sum_rule() - 1.0) < 1e-6);
        CHECK(std::abs(rep(0.0) - 1.0) < 1e-6);
        auto g = TimeGrid::covering(0.02, 20.0);
        auto u = propagate_u(model, b, g);
        ComplexSeries us(g.size());
        for (std::size_t n = 0; n < g.size(); ++n) us[n] = rep(g.time(n));
        CHECK(sup_diff(u, us) < 1e-3);
        if (eta < critical_coupling(0.5, 1.5, 3.0)) CHECK(rep.pole_weight() == 0.0);
    }
}

TEST_CASE("late times are dominated by the localized mode") {
    auto model = make_model(1.0, 0.5, 3.0);
    SpectralDensity b(make_spectral(0.3, 0.5, 3.0));
    auto modes = find_localized_modes(model, b);
    BranchCutRepresentation rep(model, b, modes, 400.0);
    const auto& m = modes.modes.at(0);
    auto pole = m.residue * std::polar(1.0, -m.frequency * 400.0);
    CHECK(std::abs(rep(400.0) - pole) < 0.02 * m.residue);
}

TEST_CASE("fluctuation function") {
    auto model = make_model(1.0, 0.5, 3.0);
    SpectralDensity b(make_spectral(0.05, 1.0, 3.0));
    auto g = TimeGrid::covering(0.05, 20.0);
    auto u = propagate_u(model, b, g);

    auto zero = compute_v(b, make_bath(0.0), g, u);
    for (double v : zero) CHECK(v == 0.0);

    auto v = compute_v(b, make_bath(0.1), g, u);
    CHECK(v[0] == 0.0);
    for (double x : v) CHECK(x >= 0.0);
    auto direct = compute_v_direct(b, make_bath(0.1), g, u, 40);
    CHECK(cross_check_v(v, direct, 1e-4) < 1e-4);

    // Hotter bath, more fluctuations.
    auto hot = compute_v(b, make_bath(0.5), g, u);
    CHECK(hot.back() > v.back());
}

TEST_CASE("cross check raises on disagreement") {
    RealSeries a = {0.0, 1.0, 2.0};
    RealSeries b = {0.0, 1.0, 2.5};
    CHECK_THROWS_AS(cross_check_v(a, b, 1e-3), ConsistencyError);
}

TEST_CASE("thermal kernel at zero lag") {
    SpectralDensity b(make_spectral(0.05, 1.0, 3.0));
    CHECK(thermal_kernel(b, 0.0, 1.0) == std::complex<double>(0.0, 0.0));
    // High temperature, s = 1: 2 int J nbar = 2 eta wc T - eta wc^2 + eta wc^3 / (3T) + O(T^-3).
    auto k = thermal_kernel(b, 50.0, 0.0);
    const double expect = 2.0 * 0.05 * 3.0 * 50.0 - 0.05 * 9.0 + 0.05 * 27.0 / 150.0;
    CHECK(k.real() == Approx(expect).epsilon(1e-5));
}
