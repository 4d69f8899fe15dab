#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "cusp/cusp_map.hpp"

using namespace cusp;

TEST_CASE("map point values") {
  const CuspMapping id = CuspMapping::make(1.0, DomainSpec::cusp2d(1.0));
  auto y = map_point(id, {0.3, 0.7});
  CHECK(y[0] == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(y[1] == doctest::Approx(0.7).epsilon(1e-15));

  // a = 1/2, gamma1 = 2: y = (x1, sqrt(x2))
  const CuspMapping m = CuspMapping::make(0.5, DomainSpec::cusp2d(2.0));
  y = map_point(m, {0.2, 0.64});
  CHECK(y[0] == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(y[1] == doctest::Approx(0.8).epsilon(1e-14));

  // image lies in the cusp: y1 < y2^gamma1
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> uu(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double x2 = 0.05 + 0.9 * uu(rng);
    const double x1 = x2 * uu(rng);
    y = map_point(m, {x1, x2});
    CHECK(y[0] < std::pow(y[1], 2.0) + 1e-14);
    CHECK(y[1] < 1.0);
  }
}

TEST_CASE("jacobian closed form") {
  const CuspMapping m = CuspMapping::make(0.5, DomainSpec::cusp2d(2.0));
  // J = a x2^{a gamma - n} = 0.5 x2^{-1/2}
  CHECK(jacobian(m, 0.25) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(jacobian(m, 0.81) == doctest::Approx(0.5 / 0.9).epsilon(1e-14));
}

TEST_CASE("differential envelope factor") {
  // a = 1/2, gamma1 = 2: S = (a gamma1 - 1)^2 + 1 + a^2 = 0 + 1 + 1/4
  const CuspMapping m = CuspMapping::make(0.5, DomainSpec::cusp2d(2.0));
  CHECK(diff_norm_factor(m) == doctest::Approx(std::sqrt(1.25)).epsilon(1e-14));
  CHECK(diff_norm_bound(m, 0.25) ==
        doctest::Approx(std::sqrt(1.25) * std::pow(0.25, -0.5)).epsilon(1e-14));
}

TEST_CASE("finite-difference Jacobian obeys the envelope") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> uu(0.0, 1.0);
  for (double a : {0.3, 0.5, 0.9}) {
    for (double g1 : {1.0, 1.5, 2.5}) {
      const CuspMapping m = CuspMapping::make(a, DomainSpec::cusp2d(g1));
      for (int i = 0; i < 50; ++i) {
        const double x2 = 0.1 + 0.8 * uu(rng);
        const double x1 = (0.05 + 0.9 * uu(rng)) * x2;
        const double h = 1e-6;
        // columns of Dphi by central differences
        Eigen::Matrix2d D;
        for (int c = 0; c < 2; ++c) {
          std::vector<double> xp{x1, x2}, xm{x1, x2};
          xp[c] += h;
          xm[c] -= h;
          const auto yp = map_point(m, xp), ym = map_point(m, xm);
          D(0, c) = (yp[0] - ym[0]) / (2 * h);
          D(1, c) = (yp[1] - ym[1]) / (2 * h);
        }
        const double op_norm = D.jacobiSvd().singularValues()(0);
        CHECK(op_norm <= diff_norm_bound(m, x2) * (1.0 + 1e-5));
        // determinant matches the closed-form Jacobian
        CHECK(std::abs(D.determinant()) ==
              doctest::Approx(jacobian(m, x2)).epsilon(1e-4));
      }
    }
  }
}

TEST_CASE("weight envelope brackets the mapped weight") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> uu(0.0, 1.0);
  for (double alpha : {-0.5, 0.0, 0.7, 1.5}) {
    for (double a : {0.4, 0.8}) {
      const auto [c_lo, c_hi] = weight_envelope(a, alpha, 2);
      CHECK(c_lo <= c_hi);
      if (alpha == 0.0) {
        CHECK(c_lo == doctest::Approx(1.0));
        CHECK(c_hi == doctest::Approx(1.0));
      }
      const CuspMapping m = CuspMapping::make(a, DomainSpec::cusp2d(2.0));
      for (int i = 0; i < 2500; ++i) {
        const double x2 = 0.02 + 0.96 * uu(rng);
        const double x1 = (0.01 + 0.98 * uu(rng)) * x2;
        const auto y = map_point(m, {x1, x2});
        const double w = std::pow(std::hypot(y[0], y[1]), alpha);
        const double env = std::pow(x2, a * alpha);
        CHECK(w >= c_lo * env * (1.0 - 1e-12));
        CHECK(w <= c_hi * env * (1.0 + 1e-12));
      }
    }
  }
}

TEST_CASE("closed-form transfer constants") {
  const DomainSpec g3 = DomainSpec::cusp2d(2.0);
  const DomainSpec g2 = DomainSpec::cusp2d(1.0);
  const ValidatedProblem pr_g3{2.0, 2.0, 0.0, 6.0};
  const ValidatedProblem pr_g2{2.0, 2.0, 0.0, 1e300};
  const ValidatedProblem pr_a{2.0, 2.0, 0.5, 0.0};

  CHECK(kps_closed_form(0.5, 2.0, 1.2, pr_g3, g3) ==
        doctest::Approx(1.4677992676220695).epsilon(1e-13));
  CHECK(kps_closed_form(0.9, 2.0, 1.5, pr_g2, g2) ==
        doctest::Approx(1.2669012753306839).epsilon(1e-13));
  CHECK(kps_closed_form(0.5, 2.0, 1.4, pr_a, g3) ==
        doctest::Approx(2.128055055988808).epsilon(1e-13));

  CHECK(mrq_closed_form(0.5, 4.0, 2.0, g3) ==
        doctest::Approx(0.7071067811865476).epsilon(1e-13));
  CHECK(mrq_closed_form(0.6, 3.0, 2.0, g3) ==
        doctest::Approx(0.7323538223140101).epsilon(1e-13));
}

TEST_CASE("quadrature route agrees with closed forms") {
  const DomainSpec g3 = DomainSpec::cusp2d(2.0);
  QuadConfig qc;

  // M_{r,q}: the Jacobian integral is evaluated exactly by the closed form.
  for (auto [a, r] : std::vector<std::pair<double, double>>{
           {0.5, 4.0}, {0.6, 3.0}, {0.55, 3.5}}) {
    const double closed = mrq_closed_form(a, r, 2.0, g3);
    const double quad = mrq_quadrature(a, r, 2.0, g3, qc);
    CHECK(quad == doctest::Approx(closed).epsilon(1e-6));
  }

  // K_{p,s}: the quadrature route uses the exact weight, so it never
  // exceeds the envelope-based closed form (up to quadrature error).
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> ualpha(0.2, 1.2), ua(0.1, 0.6),
      us(1.05, 1.55);
  for (int i = 0; i < 20; ++i) {
    const double alpha = (i % 4 == 3) ? -0.2 - 0.05 * (i % 3) : ualpha(rng);
    const ValidatedProblem pr{2.0, 2.0, alpha, 0.0};
    const double a = ua(rng), s = us(rng);
    const double t = 4.0 / (a * (alpha + 3.0 - 2.0) + 2.0);
    if (!(s < t - 0.05)) continue;
    const double closed = kps_closed_form(a, 2.0, s, pr, g3);
    const double quad = kps_quadrature(a, 2.0, s, pr, g3, qc);
    CHECK(quad <= closed * (1.0 + 1e-9));
  }

  // alpha = 0: the weight is trivial and both routes coincide.
  const ValidatedProblem pr0{2.0, 2.0, 0.0, 6.0};
  const double closed0 = kps_closed_form(0.5, 2.0, 1.2, pr0, g3);
  const double quad0 = kps_quadrature(0.5, 2.0, 1.2, pr0, g3, qc);
  CHECK(quad0 == doctest::Approx(closed0).epsilon(1e-6));
}

TEST_CASE("composition inequality on polynomial samples") {
  const DomainSpec g3 = DomainSpec::cusp2d(2.0);
  const ValidatedProblem pr{2.0, 2.0, 0.0, 6.0};
  std::vector<SmoothFunction> fns;
  fns.push_back({[](double x, double y) { return x + 2 * y; },
                 [](double, double) { return 1.0; },
                 [](double, double) { return 2.0; }});
  fns.push_back({[](double x, double y) { return x * y; },
                 [](double, double y) { return y; },
                 [](double x, double) { return x; }});
  fns.push_back({[](double x, double y) { return x * x - y * y + 0.5 * y; },
                 [](double x, double) { return 2 * x; },
                 [](double, double y) { return -2 * y + 0.5; }});
  for (const auto& f : fns) {
    for (auto [a, s] : std::vector<std::pair<double, double>>{
             {0.5, 1.2}, {0.4, 1.3}, {0.6, 1.1}}) {
      const auto rep = composition_inequality_check(f, a, 2.0, s, pr, g3);
      CHECK(rep.holds);
      CHECK(rep.lhs <= rep.rhs * (1.0 + 1e-6));
    }
  }
}
