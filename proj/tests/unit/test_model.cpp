#include <doctest.h>

#include <cmath>
#include <limits>

#include "entdyn/errors.hpp"
#include "entdyn/model.hpp"

using namespace entdyn;

TEST_CASE("derived frequencies") {
    auto m = make_model(1.0, 0.5, 3.0);
    CHECK(m.omega_plus == 1.5);
    CHECK(m.omega_minus == 0.5);
    CHECK(m.derived_consistent());

    auto sym = make_model(1.0, 0.0, 3.0);
    CHECK(sym.omega_plus == 1.0);
    CHECK(sym.omega_minus == 1.0);
}

TEST_CASE("kappa above omega0 builds with a warning") {
    RawParameters raw;
    raw.kappa = 1.5;
    Configuration c = build_config(raw);
    CHECK(c.model.omega_plus == 2.5);
    CHECK(c.model.omega_minus == -0.5);
    REQUIRE_FALSE(c.warnings.empty());
}

TEST_CASE("invalid parameters carry stable codes") {
    auto code_of = [](RawParameters raw) {
        try {
            build_config(raw);
        } catch (const ValidationError& e) {
            return e.code();
        }
        return std::string("accepted");
    };
    RawParameters raw;
    raw.eta = -0.1;
    CHECK(code_of(raw) == "eta_negative");
    raw = {};
    raw.s = 0.0;
    CHECK(code_of(raw) == "s_nonpositive");
    raw = {};
    raw.omega_c = -1.0;
    CHECK(code_of(raw) == "omega_c_nonpositive");
    raw = {};
    raw.temperature = -0.5;
    CHECK(code_of(raw) == "temperature_negative");
    raw = {};
    raw.r = -1.0;
    CHECK(code_of(raw) == "r_negative");
    raw = {};
    raw.omega0 = 0.1;
    raw.kappa = -0.2;
    CHECK(code_of(raw) == "omega_plus_nonpositive");
    raw = {};
    raw.eta = std::numeric_limits<double>::quiet_NaN();
    CHECK(code_of(raw) == "non_finite");
    raw = {};
    raw.dt = 0.0;
    CHECK(code_of(raw) == "solver_invalid");
}

TEST_CASE("defaults") {
    Configuration c = build_config({});
    CHECK(c.model.omega0 == 1.0);
    CHECK(c.model.kappa == 0.5);
    CHECK(c.model.r == 3.0);
    CHECK(c.spectral.omega_c == 3.0);
    CHECK(c.bath.temperature == 0.0);
}

TEST_CASE("config file round trip is exact") {
    RawParameters raw;
    raw.eta = 0.1 + 0.2; // not representable in short decimal
    raw.s = 1.0 / 3.0;
    raw.temperature = 0.07;
    raw.r = std::sqrt(2.0);
    raw.extrapolate = false;
    Configuration a = build_config(raw);
    Configuration b = build_config(parse_config(serialize_config(a)));
    CHECK(serialize_config(a) == serialize_config(b));
    CHECK(b.spectral.eta == a.spectral.eta);
    CHECK(b.spectral.s == a.spectral.s);
    CHECK(b.model.r == a.model.r);
    CHECK(b.solver.extrapolate == false);
}

TEST_CASE("flags override file values") {
    RawParameters file = parse_config("[bath]\neta = 0.2\ns = 0.7\n[system]\nr = 1\n");
    RawParameters flags;
    flags.eta = 0.3;
    file.merge(flags);
    Configuration c = build_config(file);
    CHECK(c.spectral.eta == 0.3);
    CHECK(c.spectral.s == 0.7);
    CHECK(c.model.r == 1.0);
}

TEST_CASE("malformed config text") {
    CHECK_THROWS_AS(parse_config("[bath]\neta = abc\n"), ValidationError);
    CHECK_THROWS_AS(parse_config("[bath\neta = 1\n"), ValidationError);
    CHECK_THROWS_AS(load_config_file("/nonexistent/entdyn.ini"), IoError);
}

TEST_CASE("steady route selection") {
    CHECK(build_config(RawParameters{}).solver.steady_method == SteadyMethod::limit);
    RawParameters raw = parse_config("[solver]\nsteady_method = window\n");
    Configuration c = build_config(raw);
    CHECK(c.solver.steady_method == SteadyMethod::window);
    CHECK(serialize_config(c).find("steady_method = window") != std::string::npos);
    CHECK(to_string(parse_steady_method("limit")) == "limit");
    CHECK_THROWS_AS(parse_steady_method("average"), ValidationError);
}
