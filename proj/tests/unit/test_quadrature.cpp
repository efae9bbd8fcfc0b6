#include <doctest.h>

#include <cmath>
#include <numbers>

#include "entdyn/errors.hpp"
#include "entdyn/quadrature.hpp"

using namespace entdyn;
using doctest::Approx;

TEST_CASE("adaptive integration of smooth functions") {
    CHECK(quad::integrate([](double x) { return std::exp(x); }, 0.0, 1.0, 1e-13) ==
          Approx(std::numbers::e - 1.0).epsilon(1e-13));
    CHECK(quad::integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi, 1e-12) ==
          Approx(2.0).epsilon(1e-12));
}

TEST_CASE("endpoint singularity through the origin helper") {
    // int_0^inf x^(s-1) e^-x = Gamma(s).
    for (double s : {0.1, 0.3, 0.5, 0.9}) {
        double v = quad::integrate_from_origin([&](double x) { return std::pow(x, s - 1.0) * std::exp(-x); }, 60.0,
                                               s, 1.0, 1e-11);
        CHECK(v == Approx(std::tgamma(s)).epsilon(1e-9));
    }
}

TEST_CASE("non-convergence is reported") {
    // 1/x on (0, 1] diverges; the driver must give up rather than return junk.
    CHECK_THROWS_AS(quad::integrate([](double x) { return 1.0 / x; }, 0.0, 1.0, 1e-12), NumericalError);
}

TEST_CASE("graded mesh") {
    auto mesh = quad::graded_mesh(3.0, 90.0, 0.5, 4);
    REQUIRE(mesh.size() > 0);
    double sum = 0.0;
    for (std::size_t i = 0; i < mesh.size(); ++i) {
        CHECK(mesh.omega[i] > 0.0);
        CHECK(mesh.omega[i] <= 90.0);
        if (i) CHECK(mesh.omega[i] > mesh.omega[i - 1]);
        sum += mesh.weight[i] * std::pow(mesh.omega[i], -0.5) * std::exp(-mesh.omega[i] / 3.0);
    }
    // int_0^90 w^-1/2 e^{-w/3} ~ sqrt(3 pi).
    CHECK(sum == Approx(std::sqrt(3.0 * std::numbers::pi)).epsilon(1e-6));

    int panels = quad::panels_for_nodes(3.0, 90.0, 1000);
    auto sized = quad::graded_mesh(3.0, 90.0, 1.0, panels);
    CHECK(sized.size() >= 500);
    CHECK(sized.size() <= 2000);
}
