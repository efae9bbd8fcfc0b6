#include <doctest.h>

#include <cmath>

#include "entdyn/errors.hpp"
#include "entdyn/modes.hpp"
#include "entdyn/sweep.hpp"

using namespace entdyn;
using doctest::Approx;

namespace {

Configuration point(double eta, double s, double T) {
    RawParameters raw;
    raw.eta = eta;
    raw.s = s;
    raw.temperature = T;
    return build_config(raw);
}

} // namespace

TEST_CASE("classification") {
    const double eta_c = 0.2;
    PhasePoint p;
    p.eta = 0.1;
    p.en_inf = 5.0;
    CHECK(classify_phase(p, eta_c, 1e-3) == Phase::I);
    p.eta = 0.4;
    CHECK(classify_phase(p, eta_c, 1e-3) == Phase::II);
    p.en_inf = 1e-3;
    CHECK(classify_phase(p, eta_c, 1e-3) == Phase::III);
    CHECK(to_string(Phase::III) == "III");
}

TEST_CASE("grid validation and indexing") {
    SweepGrid g{{0.0, 0.5, 3}, {0.5, 1.5, 2}, {0.0, 0.2, 4}};
    g.validate();
    CHECK(g.size() == 24);
    CHECK(g.index(0, 0, 1) == 1);
    CHECK(g.index(0, 1, 0) == 4);
    CHECK(g.index(1, 0, 0) == 8);
    auto etas = g.eta.values();
    CHECK(etas.front() == 0.0);
    CHECK(etas.back() == 0.5);
    CHECK(Axis{0.3, 0.3, 1}.values() == std::vector<double>{0.3});

    CHECK_THROWS_AS((SweepGrid{{0.0, 0.5, 0}, {0.5, 1.5, 2}, {0.0, 0.2, 4}}.validate()), ValidationError);
    CHECK_THROWS_AS((SweepGrid{{0.5, 0.1, 2}, {0.5, 1.5, 2}, {0.0, 0.2, 4}}.validate()), ValidationError);
    CHECK_THROWS_AS((SweepGrid{{0.0, 0.5, 2}, {0.0, 1.5, 2}, {0.0, 0.2, 4}}.validate()), ValidationError);
    CHECK_THROWS_AS((SweepGrid{{-0.1, 0.5, 2}, {0.5, 1.5, 2}, {0.0, 0.2, 4}}.validate()), ValidationError);
}

TEST_CASE("near-critical points get a longer horizon") {
    auto c = point(0.141, 0.5, 0.0);
    CHECK(steady_horizon(c) == Approx(4.0 * c.solver.steady_t_max));
    CHECK(steady_horizon(point(0.3, 0.5, 0.0)) == Approx(c.solver.steady_t_max));
}

TEST_CASE("weak-coupling steady state decoheres") {
    auto ss = steady_state(point(0.05, 1.0, 0.0));
    CHECK(ss.en_inf < 1e-3);
    CHECK(ss.u_inf_abs < 0.05);
    CHECK(ss.converged);
}

TEST_CASE("strong coupling keeps entanglement at zero temperature only") {
    auto c = point(0.3, 0.5, 0.0);
    auto states = window_states(c, {0.0, 2.0});
    SpectralDensity b(c.spectral);
    double z = find_localized_modes(c.model, b).modes.at(0).residue;
    CHECK(states[0].en_inf > 0.0);
    CHECK(states[0].u_inf_abs == Approx(z).epsilon(0.01));
    CHECK(states[1].en_inf == 0.0);
    CHECK(states[1].v_inf > 0.0);
}

TEST_CASE("limit route matches late-time averages") {
    struct Case {
        double eta, s, T;
    } cases[] = {{0.05, 1.0, 0.1}, {0.3, 0.5, 0.0}, {0.5, 2.0, 0.0}};
    for (const auto& k : cases) {
        auto c = point(k.eta, k.s, k.T);
        auto lim = limit_states(c, {k.T}).front();
        auto win = window_states(c, {k.T}).front();
        CHECK(lim.converged);
        CHECK(std::isinf(lim.t_max));
        CHECK(lim.u_inf_abs == Approx(win.u_inf_abs).epsilon(0.01));
        CHECK(lim.v_inf == Approx(win.v_inf).epsilon(0.01));
        CHECK(lim.en_inf == Approx(win.en_inf).epsilon(0.02));
    }
}

TEST_CASE("limit route returns the residue") {
    auto c = point(0.3, 0.5, 0.0);
    SpectralDensity b(c.spectral);
    double z = find_localized_modes(c.model, b).modes.at(0).residue;
    CHECK(limit_states(c, {0.0}).front().u_inf_abs == Approx(z).epsilon(1e-12));
    c.solver.steady_method = SteadyMethod::window;
    CHECK(std::isfinite(steady_state(c).t_max));
}

TEST_CASE("sweep order and degenerate grid") {
    auto base = point(0.05, 1.0, 0.0);
    SweepGrid one{{0.05, 0.05, 1}, {1.0, 1.0, 1}, {0.0, 0.0, 1}};
    auto pts = run_sweep(one, base, 1);
    REQUIRE(pts.size() == 1);
    auto direct = steady_state(base);
    CHECK(pts[0].u_inf_abs == direct.u_inf_abs);
    CHECK(pts[0].en_inf == direct.en_inf);
    CHECK(pts[0].phase == Phase::I);

    SweepGrid g{{0.05, 0.3, 2}, {0.5, 1.0, 2}, {0.0, 0.1, 2}};
    auto serial = run_sweep(g, base, 1);
    auto parallel = run_sweep(g, base, 3);
    REQUIRE(serial.size() == 8);
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(serial[i].eta == parallel[i].eta);
        CHECK(serial[i].s == parallel[i].s);
        CHECK(serial[i].temperature == parallel[i].temperature);
        CHECK(serial[i].v_inf == parallel[i].v_inf);
        CHECK(serial[i].en_inf == parallel[i].en_inf);
    }
    CHECK(serial[g.index(1, 0, 1)].eta == 0.3);
    CHECK(serial[g.index(1, 0, 1)].s == 0.5);
    CHECK(serial[g.index(1, 0, 1)].temperature == 0.1);
    // Below eta_c at T = 0 everything is phase I.
    CHECK(serial[g.index(0, 0, 0)].phase == Phase::I);
    CHECK(serial[g.index(0, 1, 0)].phase == Phase::I);
}

TEST_CASE("thermal boundary interpolation") {
    SweepGrid g{{0.3, 0.3, 1}, {0.5, 0.5, 1}, {0.0, 0.3, 4}};
    std::vector<PhasePoint> pts(4);
    const double en[] = {0.2, 0.1, 0.0, 0.0};
    auto temps = g.temperature.values();
    for (int i = 0; i < 4; ++i) pts[i] = {0.3, 0.5, temps[i], 0.4, 0.0, en[i], Phase::II, true};
    auto base = point(0.3, 0.5, 0.0);
    auto tb = thermal_boundary(pts, g, base);
    REQUIRE(tb.size() == 1);
    CHECK(tb[0].critical_temperature > 0.1);
    CHECK(tb[0].critical_temperature < 0.2);
}
