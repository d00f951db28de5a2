// SPDX-License-Identifier: Apache-2.0
#include "phyauth/numeric.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace phyauth::numeric;

TEST_CASE("quadrature on smooth and endpoint-singular integrands") {
  CHECK(integrate([](double x) { return x * x; }, 0.0, 1.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(integrate([](double x) { return std::exp(-x); }, 0.0, 20.0) ==
        doctest::Approx(1.0 - std::exp(-20.0)).epsilon(1e-13));
  // 1/sqrt(1-x^2) blows up at x = 1.
  const double v = integrate([](double x) { return 1.0 / std::sqrt(1.0 - x * x); }, 0.0, 1.0,
                             {1e-9, 1e-9, 20000});
  CHECK(v == doctest::Approx(std::numbers::pi / 2).epsilon(1e-7));
  CHECK(integrate([](double) { return 1.0; }, 2.0, 2.0) == 0.0);
}

TEST_CASE("quadrature gives up loudly") {
  QuadratureOptions tight{1e-300, 1e-300, 5};
  CHECK_THROWS_AS(integrate([](double x) { return std::sin(1.0 / (x + 1e-6)); }, 0.0, 1.0, tight),
                  QuadratureError);
}

TEST_CASE("brent root") {
  const double r = find_root([](double x) { return std::cos(x) - x; }, 0.0, 1.0);
  CHECK(r == doctest::Approx(0.7390851332151607).epsilon(1e-14));
  CHECK_THROWS_AS(find_root([](double x) { return x * x + 1.0; }, -1.0, 1.0), RootError);
}

TEST_CASE("gaussian tail against boost") {
  boost::math::normal z;
  for (double x : {-4.0, -1.0, 0.0, 0.3, 1.6448536269514722, 3.0, 8.0}) {
    CHECK(q_function(x) == doctest::Approx(boost::math::cdf(boost::math::complement(z, x))).epsilon(1e-13));
  }
  for (double p : {1e-10, 0.01, 0.05, 0.5, 0.9}) {
    CHECK(q_function(q_inverse(p)) == doctest::Approx(p).epsilon(1e-12));
  }
}

TEST_CASE("incomplete beta against boost ibeta") {
  struct Case {
    double x, a, b;
  };
  const Case cases[] = {{0.3, 2, 3},        {0.9, 1, 1},        {0.01, 0.5, 199.5},
                        {0.997, 0.5, 3.5},  {0.5, 199.5, 0.5},  {0.2, 10, 1990},
                        {0.99, 0.5, 0.5},   {0.002, 1.5, 400}};
  for (const auto& c : cases) {
    CAPTURE(c.x);
    CAPTURE(c.a);
    CAPTURE(c.b);
    CHECK(incomplete_beta(c.x, c.a, c.b) == doctest::Approx(boost::math::ibeta(c.a, c.b, c.x)).epsilon(1e-11));
  }
  // Integer route and continued fraction agree.
  for (int a : {1, 3, 40}) {
    for (int b : {1, 7, 300}) {
      CHECK(incomplete_beta_integer(0.11, a, b) == doctest::Approx(incomplete_beta_cf(0.11, a, b)).epsilon(1e-11));
    }
  }
  CHECK(incomplete_beta(0.0, 2, 3) == 0.0);
  CHECK(incomplete_beta(1.0, 2, 3) == 1.0);
}
