#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "ewens/quadrature.hpp"

using ewens::quad::integrate;
using ewens::quad::integrate_right_singular;

TEST_CASE("smooth integrals") {
    CHECK(integrate([](double x) { return x * x; }, 0.0, 1.0, 1e-12) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(integrate([](double x) { return std::sin(x); }, 0.0, M_PI, 1e-12) ==
          doctest::Approx(2.0).epsilon(1e-12));
    CHECK(integrate([](double x) { return 1.0 / x; }, 0.5, 2.0, 1e-12) ==
          doctest::Approx(std::log(4.0)).epsilon(1e-12));
    CHECK(integrate([](double x) { return x; }, 1.0, 1.0, 1e-12) == 0.0);
    // orientation flip
    CHECK(integrate([](double x) { return x; }, 1.0, 0.0, 1e-12) ==
          doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("oscillatory integral needs subdivision") {
    CHECK(integrate([](double x) { return std::cos(40.0 * x); }, 0.0, 1.0, 1e-12) ==
          doctest::Approx(std::sin(40.0) / 40.0).epsilon(1e-10));
}

TEST_CASE("endpoint singularity") {
    // integral of (1-u)^(theta-1) over [0,1] equals 1/theta
    for (double theta : {0.3, 0.5, 0.9, 1.0, 2.5}) {
        CHECK(integrate_right_singular([](double) { return 1.0; }, 0.0, 1.0, theta, 1e-12) ==
              doctest::Approx(1.0 / theta).epsilon(1e-10));
    }
    // integral of u * (1-u)^(-1/2) over [0,1] = Beta(2, 1/2) = 4/3
    CHECK(integrate_right_singular([](double u) { return u; }, 0.0, 1.0, 0.5, 1e-12) ==
          doctest::Approx(4.0 / 3.0).epsilon(1e-10));
    CHECK(integrate_right_singular([](double) { return 1.0; }, 1.0, 1.0, 0.5, 1e-12) == 0.0);
}
