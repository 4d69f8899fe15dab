#include <doctest.h>

#include <cmath>

#include "cusp/bound_engine.hpp"
#include "cusp/cusp_map.hpp"
#include "cusp/mesh.hpp"

using namespace cusp;

namespace {

const DomainSpec kG3 = DomainSpec::cusp2d(2.0);
const ValidatedProblem kPr = {2.0, 2.0, 0.0, 6.0};

}  // namespace

TEST_CASE("feasibility classifier") {
  // a = 0.5 in (0, 2/3); s_hi = min{2, 2, 1.6}; r in (s, 2s/(2-s)) with
  // q < (3a/2) r, i.e. r > 8/3 at a = 0.5
  CHECK(feasible({0.5, 1.5, 4.0}, kPr, kG3).feasible);

  FeasibilityReport rep = feasible({0.9, 1.5, 4.0}, kPr, kG3);
  CHECK_FALSE(rep.feasible);
  CHECK(rep.violations[0].code == ViolationCode::AOutOfWindow);

  rep = feasible({0.5, 1.7, 4.0}, kPr, kG3);
  CHECK_FALSE(rep.feasible);
  CHECK(rep.violations[0].code == ViolationCode::SOutOfRange);

  rep = feasible({0.5, 1.5, 7.0}, kPr, kG3);  // r_hi = 6
  CHECK_FALSE(rep.feasible);
  CHECK(rep.violations[0].code == ViolationCode::ROutOfRange);

  rep = feasible({0.5, 1.5, 2.0}, kPr, kG3);  // q cap: r must exceed 8/3
  CHECK_FALSE(rep.feasible);
  CHECK(rep.violations[0].code == ViolationCode::QRInfeasible);

  const ValidatedProblem tight{1.5, 2.0, 0.0, 6.0};
  rep = feasible({1.0, 1.2, 3.0}, tight, DomainSpec::cusp2d(1.0));
  CHECK_FALSE(rep.feasible);
  CHECK(rep.violations[0].code == ViolationCode::EmptyWindow);
}

TEST_CASE("pointwise bound evaluation") {
  const PoincareProvider b{BStrategy::user, 0.4, false};
  const BoundParams bp{0.5, 1.5, 4.0};
  const BoundReport rep = eigen_bound(kPr, kG3, bp, b);
  CHECK(rep.k_ps ==
        doctest::Approx(kps_closed_form(0.5, 2.0, 1.5, kPr, kG3)).epsilon(1e-14));
  CHECK(rep.m_rq ==
        doctest::Approx(mrq_closed_form(0.5, 4.0, 2.0, kG3)).epsilon(1e-14));
  CHECK(rep.b_rs == 0.4);
  CHECK(rep.inv_lambda_bound ==
        doctest::Approx(std::pow(rep.k_ps * rep.m_rq * 0.4, 2.0)).epsilon(1e-12));
  CHECK(rep.lambda_lower_bound ==
        doctest::Approx(1.0 / rep.inv_lambda_bound).epsilon(1e-14));
  CHECK_FALSE(rep.certified);
  CHECK(std::isfinite(rep.inv_lambda_bound));
  CHECK(rep.inv_lambda_bound > 0.0);

  CHECK_THROWS_AS(eigen_bound(kPr, kG3, {0.9, 1.5, 4.0}, b), Error);
}

TEST_CASE("numeric reference constant brackets the exact value") {
  const GradedMesh ref = build_reference_mesh(12, 1.0);
  NumericBConfig cfg;
  const PoincareProvider b = poincare_constant(
      BStrategy::numeric_lower, 2.0, 2.0, &ref, std::sqrt(2.0));
  // exact B_{2,2} on the reference triangle is 1/pi; the discrete ascent is a
  // lower estimate, converging from below
  CHECK(b.value > 0.25);
  CHECK(b.value < (1.0 / M_PI) * 1.02);
  CHECK_FALSE(b.certified);
  // and it stays below the convex-domain analytic estimate d/pi
  CHECK(b.value < std::sqrt(2.0) / M_PI);
}

TEST_CASE("analytic strategy guard rails") {
  const PoincareProvider pw = poincare_constant(
      BStrategy::payne_weinberger, 2.0, 2.0, nullptr, std::sqrt(2.0));
  CHECK(pw.certified);
  CHECK(pw.value == doctest::Approx(std::sqrt(2.0) / M_PI).epsilon(1e-15));
  CHECK_THROWS_AS(poincare_constant(BStrategy::payne_weinberger, 3.0, 2.0,
                                    nullptr, std::sqrt(2.0)),
                  Error);
  CHECK_THROWS_AS(poincare_constant(BStrategy::numeric_lower, 2.0, 2.0, nullptr,
                                    std::sqrt(2.0)),
                  Error);
  const PoincareProvider user =
      poincare_constant(BStrategy::user, 3.0, 1.5, nullptr, 1.0, 0.77);
  CHECK(user.value == 0.77);
  CHECK_FALSE(user.certified);
}

TEST_CASE("constant model ignores the exponents") {
  const BoundProviderFn fn = constant_b_model({BStrategy::user, 0.9, true});
  CHECK(fn(2.0, 1.5).value == 0.9);
  CHECK(fn(5.0, 1.1).value == 0.9);
  CHECK(fn(2.0, 1.5).certified);
}

TEST_CASE("optimized bound: deterministic and better than the grid") {
  const BoundProviderFn b = constant_b_model({BStrategy::user, 0.45, false});
  SearchConfig search;
  const BoundReport r1 = optimize_bound(kPr, kG3, b, search);
  const BoundReport r2 = optimize_bound(kPr, kG3, b, search);
  CHECK(r1.inv_lambda_bound == r2.inv_lambda_bound);
  CHECK(r1.params.a == r2.params.a);
  CHECK(r1.params.s == r2.params.s);
  CHECK(r1.params.r == r2.params.r);
  CHECK(std::isfinite(r1.inv_lambda_bound));

  // the refined optimum is no worse than a feasible hand-picked point
  const BoundReport hand =
      eigen_bound(kPr, kG3, {0.5, 1.5, 4.0}, {BStrategy::user, 0.45, false});
  CHECK(r1.inv_lambda_bound <= hand.inv_lambda_bound * (1.0 + 1e-12));
}

TEST_CASE("empty window reported as such") {
  const ValidatedProblem pr{1.5, 2.0, 0.0, 6.0};
  const BoundProviderFn b = constant_b_model({BStrategy::user, 0.5, false});
  try {
    optimize_bound(pr, DomainSpec::cusp2d(1.0), b, {});
    CHECK(false);
  } catch (const Error& e) {
    CHECK(std::string(e.code()) == "EmptyWindow");
  }
}

TEST_CASE("memoized numeric model is self-consistent") {
  const BoundProviderFn b = numeric_b_model(6);
  const PoincareProvider v1 = b(3.0, 1.5);
  const PoincareProvider v2 = b(3.0000002, 1.5000004);  // same 1e-3 bucket
  CHECK(v1.value == v2.value);
  CHECK(v1.value > 0.0);
  CHECK_FALSE(v1.certified);
}
