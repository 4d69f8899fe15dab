#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cusp/errors.hpp"

namespace cusp {

// Open interval (lo, hi). Used both for admissibility checks and for
// diagnostics ("admissible q in (1, 6)").
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double x) const { return x > lo && x < hi; }
  std::string str() const;
};

// Cusp geometry: dimension n, Hoelder exponents gamma_i >= 1, and the
// total sharpness gamma = 1 + sum gamma_i (gamma = n is the Lipschitz case).
struct DomainSpec {
  int n = 2;
  std::vector<double> gamma_exps;  // n-1 entries
  double gamma = 2.0;

  static DomainSpec make(int n, std::vector<double> gamma_exps);
  static DomainSpec cusp2d(double gamma1) { return make(2, {gamma1}); }

  bool lipschitz() const;
  double gamma1() const { return gamma_exps.at(0); }
};

// gamma = 1 + sum gamma_i; rejects any gamma_i < 1.
double derive_gamma(int n, const std::vector<double>& gamma_exps);

// Rechecks the stored gamma against the recomputed sum (1e-12 relative).
void check_gamma(const DomainSpec& spec);

// (p, q, alpha) with all admissibility chains verified; carries p*.
struct ValidatedProblem {
  double p = 2.0;
  double q = 2.0;
  double alpha = 0.0;
  double p_star = 0.0;
};

enum class ViolationCode {
  AlphaOutOfRange,
  POutOfRange,
  QOutOfRange,
  EmptyWindow,
  AOutOfWindow,
  SOutOfRange,
  ROutOfRange,
  QRInfeasible,
};

struct Violation {
  ViolationCode code;
  Interval admissible;  // the interval the offending value must lie in
  double value = 0.0;
  std::string message;
};

struct ProblemCheck {
  std::optional<ValidatedProblem> problem;
  std::vector<Violation> violations;

  bool ok() const { return problem.has_value(); }
};

// p* = gamma p / (alpha + gamma - p); requires p < alpha + gamma.
double sobolev_exponent(const DomainSpec& spec, double p, double alpha);

// Non-throwing gate: returns either the validated triple or the list of
// violated chains with their admissible intervals.
ProblemCheck try_validate(const DomainSpec& spec, double p, double q,
                          double alpha);

// Throwing variant of try_validate.
ValidatedProblem validate_problem(const DomainSpec& spec, double p, double q,
                                  double alpha);

// Weaker gate for the discrete solver: requires only the A_p weight range,
// p > 1, q > 1, and q < p* when p* is finite (p < alpha + gamma). The
// analytic transfer machinery needs the strict validate_problem instead.
ProblemCheck try_validate_solver(const DomainSpec& spec, double p, double q,
                                 double alpha);
ValidatedProblem validate_solver_problem(const DomainSpec& spec, double p,
                                         double q, double alpha);

class ValidationError : public Error {
 public:
  ValidationError(std::vector<Violation> violations, const std::string& what)
      : Error("InvalidProblem", what), violations_(std::move(violations)) {}
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

// Admissible interval for the map exponent a.
struct TransferWindow {
  double a_lo = 0.0;
  double a_hi = 0.0;

  bool empty() const { return !(a_lo < a_hi); }
  bool contains(double a) const { return a > a_lo && a < a_hi; }
};

// a_lo = max{0, (n-p)/(alpha+gamma-p)}, a_hi = min{n/gamma, p(n-1)/(alpha+gamma-p)}.
TransferWindow transfer_window(const ValidatedProblem& problem,
                               const DomainSpec& spec);

// t = np / (a(alpha+gamma-p) + p); satisfies 1 < t < min{p, n} inside the window.
double s_upper(double a, const ValidatedProblem& problem,
               const DomainSpec& spec);

}  // namespace cusp
