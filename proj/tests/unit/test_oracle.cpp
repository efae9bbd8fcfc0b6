#include <doctest.h>

#include <cmath>

#include "entdyn/errors.hpp"
#include "entdyn/greens.hpp"
#include "entdyn/modes.hpp"
#include "entdyn/oracle.hpp"

using namespace entdyn;
using doctest::Approx;

TEST_CASE("discretized bath weight") {
    for (double s : {0.5, 1.0, 2.0}) {
        SpectralDensity b(make_spectral(0.2, s, 3.0));
        double prev_err = 1e300;
        for (std::size_t k : {500, 2000, 8000}) {
            auto d = discretize(b, k, b.omega_max());
            CHECK(d.size() == k);
            double err = std::abs(d.total_weight() - b.total_weight()) / b.total_weight();
            CHECK((err < prev_err || err < 1e-11));
            prev_err = err;
        }
        CHECK(prev_err < 1e-4);
    }
    SpectralDensity none(make_spectral(0.0, 0.5, 3.0));
    for (double g : discretize(none, 50, 90.0).couplings) CHECK(g == 0.0);
}

TEST_CASE("exact propagator basics") {
    auto model = make_model(1.0, 0.5, 3.0);
    SpectralDensity free(make_spectral(0.0, 1.0, 3.0));
    ExactPropagator p0(discretize(free, 50, 90.0), model);
    auto s0 = p0.evolve({0.0, 0.5, 1.0}, 0.3);
    CHECK(std::abs(s0.u[0] - 1.0) < 1e-14);
    CHECK(s0.v[0] == Approx(0.0).epsilon(1e-14));
    for (std::size_t i = 0; i < s0.times.size(); ++i) {
        CHECK(std::abs(s0.u[i] - std::polar(1.0, -1.5 * s0.times[i])) < 1e-12);
    }

    SpectralDensity b(make_spectral(0.05, 1.0, 3.0));
    ExactPropagator p(discretize(b, 400, b.omega_max()), model);
    auto s = p.evolve({0.0, 1.0, 2.0, 5.0}, 0.1);
    CHECK(s.max_unitarity_defect < 1e-10);
    CHECK_THROWS_AS(p.evolve({p.valid_until() * 1.01}, 0.0), ValidationError);
}

TEST_CASE("negative eigenvalue count follows the localized modes") {
    auto model = make_model(1.0, 0.5, 3.0);
    const double eta_c = critical_coupling(0.5, 1.5, 3.0);
    for (double ratio : {0.5, 0.9, 1.1, 2.0}) {
        SpectralDensity b(make_spectral(ratio * eta_c, 0.5, 3.0));
        ExactPropagator p(discretize(b, 600, b.omega_max()), model);
        auto modes = find_localized_modes(model, b);
        CHECK(p.negative_eigenvalue_count() == static_cast<int>(modes.modes.size()));
        if (!modes.modes.empty() && ratio > 1.5) {
            CHECK(p.eigenvalues()(0) == Approx(modes.modes[0].frequency).epsilon(1e-2));
        }
    }
}

TEST_CASE("small oracle agrees with the main solver at early times") {
    auto model = make_model(1.0, 0.5, 3.0);
    SpectralDensity b(make_spectral(0.05, 1.0, 3.0));
    ExactPropagator p(discretize(b, 800, b.omega_max()), model);
    auto g = TimeGrid::covering(0.05, 10.0);
    std::vector<double> times(g.size());
    for (std::size_t n = 0; n < g.size(); ++n) times[n] = g.time(n);
    auto ref = p.evolve(times, 0.1);
    auto u = propagate_u(model, b, g);
    auto v = compute_v(b, make_bath(0.1), g, u);
    for (std::size_t n = 0; n < g.size(); ++n) {
        CHECK(std::abs(u[n] - ref.u[n]) < 1e-3);
        CHECK(std::abs(v[n] - ref.v[n]) < 1e-3);
    }
}

TEST_CASE("dephased averages from the secular equation") {
    auto model = make_model(1.0, 0.5, 3.0);
    SpectralDensity b(make_spectral(0.3, 0.5, 3.0));
    auto d = discretize(b, 300, b.omega_max());
    ExactPropagator exact(d, model);
    auto fast = dephased_averages(d, model, {0.0, 0.1, 0.5});
    CHECK(fast.u_sq == Approx(exact.dephased_u_sq()).epsilon(1e-10));
    CHECK(fast.v[0] == 0.0);
    CHECK(fast.v[1] == Approx(exact.dephased_v(0.1)).epsilon(1e-10));
    CHECK(fast.v[2] == Approx(exact.dephased_v(0.5)).epsilon(1e-10));
    CHECK(fast.v[2] > fast.v[1]);
}
