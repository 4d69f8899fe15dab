#include <doctest.h>

#include <cmath>

#include "cusp/errors.hpp"
#include "cusp/quadrature.hpp"

using namespace cusp;

TEST_CASE("graded 1-D rule on power integrands") {
  QuadConfig cfg;
  for (double eta : {-0.9, -0.5, -0.25, 0.0, 0.5, 2.0}) {
    const double got = integrate_graded_1d(
        [eta](double t) { return std::pow(t, eta); }, eta, cfg);
    CHECK(got == doctest::Approx(1.0 / (eta + 1.0)).epsilon(1e-9));
  }
}

TEST_CASE("smooth non-power integrand") {
  QuadConfig cfg;
  const double got =
      integrate_graded_1d([](double t) { return std::exp(t); }, 0.0, cfg);
  CHECK(got == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-7));
}

TEST_CASE("nonintegrable exponent rejected") {
  QuadConfig cfg;
  CHECK_THROWS_AS(integrate_graded_1d([](double t) { return 1.0 / t; }, -1.0, cfg),
                  Error);
  CHECK_THROWS_AS(
      integrate_graded_1d([](double t) { return std::pow(t, -1.5); }, -1.5, cfg),
      Error);
}

TEST_CASE("strip domain: areas under power widths") {
  QuadConfig cfg;
  for (double g1 : {1.0, 2.0, 3.0}) {
    const double got = integrate_strip_domain(
        [](double, double) { return 1.0; },
        [g1](double t) { return std::pow(t, g1); }, g1, cfg);
    CHECK(got == doctest::Approx(1.0 / (g1 + 1.0)).epsilon(1e-9));
  }
}

TEST_CASE("strip domain: first moment over the reference triangle") {
  QuadConfig cfg;
  // int_T x1 over {0 < x1 < x2 < 1} = 1/6
  const double got = integrate_strip_domain(
      [](double x1, double) { return x1; }, [](double t) { return t; }, 1.0,
      cfg);
  CHECK(got == doctest::Approx(1.0 / 6.0).epsilon(1e-9));
}

TEST_CASE("strip domain: singular weight over a cusp") {
  QuadConfig cfg;
  // int over {0 < x1 < x2^2} of x2^{-1/2} = int_0^1 t^{3/2} dt = 2/5
  const double got = integrate_strip_domain(
      [](double, double x2) { return std::pow(x2, -0.5); },
      [](double t) { return t * t; }, 1.5, cfg);
  CHECK(got == doctest::Approx(0.4).epsilon(1e-9));
}
