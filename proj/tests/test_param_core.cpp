#include <doctest.h>

#include <cmath>
#include <random>

#include "cusp/param_core.hpp"

using namespace cusp;

TEST_CASE("gamma derivation and domain construction") {
  CHECK(derive_gamma(2, {1.0}) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(derive_gamma(2, {2.0}) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(derive_gamma(3, {2.0, 2.0}) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK_THROWS_AS(derive_gamma(2, {0.5}), Error);
  CHECK_THROWS_AS(derive_gamma(2, {1.0, 1.0}), Error);

  const DomainSpec lip = DomainSpec::cusp2d(1.0);
  CHECK(lip.lipschitz());
  CHECK(lip.gamma == 2.0);
  const DomainSpec cusp = DomainSpec::cusp2d(2.0);
  CHECK_FALSE(cusp.lipschitz());
  CHECK(cusp.gamma == 3.0);
}

TEST_CASE("gamma consistency recheck") {
  DomainSpec spec = DomainSpec::cusp2d(2.0);
  CHECK_NOTHROW(check_gamma(spec));
  spec.gamma = 3.1;
  CHECK_THROWS_AS(check_gamma(spec), Error);
}

TEST_CASE("critical exponent") {
  CHECK(sobolev_exponent(DomainSpec::cusp2d(2.0), 2.0, 0.0) ==
        doctest::Approx(6.0).epsilon(1e-14));
  CHECK(sobolev_exponent(DomainSpec::cusp2d(1.0), 1.5, 0.0) ==
        doctest::Approx(6.0).epsilon(1e-14));
  // Lipschitz case reduces to np/(n-p)
  const double p = 1.5, n = 2.0;
  CHECK(sobolev_exponent(DomainSpec::cusp2d(1.0), p, 0.0) ==
        doctest::Approx(n * p / (n - p)).epsilon(1e-14));
  CHECK_THROWS_AS(sobolev_exponent(DomainSpec::cusp2d(1.0), 2.0, 0.0), Error);
}

TEST_CASE("strict parameter gate") {
  const DomainSpec g3 = DomainSpec::cusp2d(2.0);
  const ValidatedProblem ok = validate_problem(g3, 2.0, 2.0, 0.0);
  CHECK(ok.p_star == doctest::Approx(6.0).epsilon(1e-14));

  // boundary p = alpha + gamma rejected
  ProblemCheck pc = try_validate(DomainSpec::cusp2d(1.0), 2.0, 2.0, 0.0);
  CHECK_FALSE(pc.ok());
  bool saw_p = false;
  for (const auto& v : pc.violations)
    if (v.code == ViolationCode::POutOfRange) saw_p = true;
  CHECK(saw_p);

  pc = try_validate(g3, 2.0, 7.0, 0.0);
  REQUIRE_FALSE(pc.ok());
  CHECK(pc.violations.size() == 1);
  CHECK(pc.violations[0].code == ViolationCode::QOutOfRange);
  CHECK(pc.violations[0].admissible.hi == doctest::Approx(6.0));

  CHECK_THROWS_AS(validate_problem(g3, 2.0, 7.0, 0.0), ValidationError);
}

TEST_CASE("solver gate accepts the classical Lipschitz configurations") {
  const DomainSpec lip = DomainSpec::cusp2d(1.0);
  CHECK(try_validate_solver(lip, 2.0, 2.0, 0.0).ok());
  CHECK(try_validate_solver(lip, 2.0, 2.0, -0.5).ok());
  CHECK(try_validate_solver(lip, 2.0, 2.0, 0.5).ok());
  CHECK_FALSE(try_validate_solver(lip, 2.0, 2.0, -2.5).ok());   // below A_p
  CHECK_FALSE(try_validate_solver(lip, 2.0, 2.0, 2.0).ok());    // A_p cap
  CHECK_FALSE(try_validate_solver(lip, 1.0, 2.0, 0.0).ok());    // p = 1
  // with finite p* the q cap still applies
  CHECK_FALSE(try_validate_solver(DomainSpec::cusp2d(2.0), 2.0, 7.0, 0.0).ok());
}

TEST_CASE("transfer window values") {
  const DomainSpec g3 = DomainSpec::cusp2d(2.0);
  TransferWindow w = transfer_window(validate_problem(g3, 2.0, 2.0, 0.0), g3);
  CHECK(w.a_lo == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(w.a_hi == doctest::Approx(2.0 / 3.0).epsilon(1e-14));

  // p > n drops the lower constraint
  w = transfer_window(validate_problem(g3, 2.5, 2.0, 0.0), g3);
  CHECK(w.a_lo == 0.0);
  CHECK(w.a_hi == doctest::Approx(2.0 / 3.0).epsilon(1e-14));

  // gamma = 2, p = 1.5: both ends collapse to 1
  const DomainSpec g2 = DomainSpec::cusp2d(1.0);
  ValidatedProblem pr{1.5, 2.0, 0.0, 6.0};
  w = transfer_window(pr, g2);
  CHECK(w.a_lo == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(w.a_hi == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(w.empty());
}

TEST_CASE("s upper bound t") {
  const DomainSpec g3 = DomainSpec::cusp2d(2.0);
  const ValidatedProblem pr = validate_problem(g3, 2.0, 2.0, 0.0);
  CHECK(s_upper(0.5, pr, g3) == doctest::Approx(1.6).epsilon(1e-14));
  const ValidatedProblem pr2 = validate_problem(g3, 2.0, 2.0, 0.5);
  CHECK(s_upper(0.5, pr2, g3) ==
        doctest::Approx(4.0 / 2.75).epsilon(1e-14));
  CHECK_THROWS_AS(s_upper(0.9, pr, g3), Error);  // outside the window
}

TEST_CASE("sampled invariants of the window") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> ug(1.0, 3.0), up(1.2, 3.0),
      ua(-0.4, 1.5), uu(0.0, 1.0);
  int accepted = 0;
  for (int i = 0; i < 1000; ++i) {
    const DomainSpec spec = DomainSpec::cusp2d(ug(rng));
    const double p = up(rng), alpha = ua(rng);
    const ProblemCheck pc = try_validate(spec, p, 2.0, alpha);
    if (!pc.ok()) continue;
    ++accepted;
    const TransferWindow w = transfer_window(*pc.problem, spec);
    CHECK(w.a_lo >= 0.0);
    if (w.empty()) continue;
    const double a = w.a_lo + uu(rng) * (w.a_hi - w.a_lo) * 0.999 + 1e-9;
    if (!w.contains(a)) continue;
    const double t = s_upper(a, *pc.problem, spec);
    CHECK(t > 1.0);
    CHECK(t < std::min(p, 2.0) + 1e-12);
  }
  CHECK(accepted > 100);
}

TEST_CASE("window upper end nonincreasing in alpha") {
  const DomainSpec spec = DomainSpec::cusp2d(2.0);
  double prev = 1e300;
  for (double alpha : {0.1, 0.4, 0.8, 1.2, 1.6}) {
    const ProblemCheck pc = try_validate(spec, 2.0, 2.0, alpha);
    REQUIRE(pc.ok());
    const TransferWindow w = transfer_window(*pc.problem, spec);
    CHECK(w.a_hi <= prev + 1e-14);
    prev = w.a_hi;
  }
}

TEST_CASE("gate matches finiteness of the critical exponent") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> ug(1.0, 3.0), up(1.2, 2.8),
      ua(-0.5, 2.0), uq(1.1, 8.0);
  for (int i = 0; i < 300; ++i) {
    const DomainSpec spec = DomainSpec::cusp2d(ug(rng));
    const double p = up(rng), alpha = ua(rng), q = uq(rng);
    const ProblemCheck pc = try_validate(spec, p, q, alpha);
    if (pc.ok()) {
      const double ps = sobolev_exponent(spec, p, alpha);
      CHECK(ps > q);
      CHECK(pc.problem->p_star == doctest::Approx(ps));
    }
  }
}
