#include "cusp/param_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace cusp {

std::string Interval::str() const {
  std::ostringstream os;
  os << "(" << lo << ", " << hi << ")";
  return os.str();
}

double derive_gamma(int n, const std::vector<double>& gamma_exps) {
  if (n < 2) throw Error("BadDimension", "dimension n must be >= 2");
  if (static_cast<int>(gamma_exps.size()) != n - 1)
    throw Error("BadDimension", "expected n-1 Hoelder exponents");
  for (double g : gamma_exps) {
    if (!(g >= 1.0))
      throw Error("GammaOutOfRange", "every gamma_i must be >= 1");
  }
  return 1.0 + std::accumulate(gamma_exps.begin(), gamma_exps.end(), 0.0);
}

DomainSpec DomainSpec::make(int n, std::vector<double> gamma_exps) {
  DomainSpec spec;
  spec.n = n;
  spec.gamma = derive_gamma(n, gamma_exps);
  spec.gamma_exps = std::move(gamma_exps);
  return spec;
}

bool DomainSpec::lipschitz() const {
  return std::all_of(gamma_exps.begin(), gamma_exps.end(),
                     [](double g) { return g == 1.0; });
}

void check_gamma(const DomainSpec& spec) {
  const double recomputed = derive_gamma(spec.n, spec.gamma_exps);
  if (std::abs(spec.gamma - recomputed) > 1e-12 * std::abs(recomputed))
    throw Error("GammaMismatch", "stored gamma disagrees with 1 + sum gamma_i");
}

double sobolev_exponent(const DomainSpec& spec, double p, double alpha) {
  const double denom = alpha + spec.gamma - p;
  if (!(denom > 0.0))
    throw Error("POutOfRange", "p* undefined: requires p < alpha + gamma");
  return spec.gamma * p / denom;
}

ProblemCheck try_validate(const DomainSpec& spec, double p, double q,
                          double alpha) {
  check_gamma(spec);
  const double n = static_cast<double>(spec.n);
  const double gamma = spec.gamma;
  ProblemCheck out;

  const Interval alpha_range{std::max(-n, p * (n - gamma) / n), n * (p - 1.0)};
  if (!alpha_range.contains(alpha)) {
    std::ostringstream os;
    os << "admissible alpha in " << alpha_range.str();
    out.violations.push_back(
        {ViolationCode::AlphaOutOfRange, alpha_range, alpha, os.str()});
  }

  const Interval p_range{1.0, alpha + gamma};
  if (!p_range.contains(p)) {
    std::ostringstream os;
    os << "admissible p in " << p_range.str();
    out.violations.push_back({ViolationCode::POutOfRange, p_range, p, os.str()});
  }

  if (out.violations.empty()) {
    const double p_star = sobolev_exponent(spec, p, alpha);
    const Interval q_range{1.0, p_star};
    if (!q_range.contains(q)) {
      std::ostringstream os;
      os << "admissible q in " << q_range.str();
      out.violations.push_back(
          {ViolationCode::QOutOfRange, q_range, q, os.str()});
    } else {
      out.problem = ValidatedProblem{p, q, alpha, p_star};
    }
  }
  return out;
}

ValidatedProblem validate_problem(const DomainSpec& spec, double p, double q,
                                  double alpha) {
  ProblemCheck check = try_validate(spec, p, q, alpha);
  if (!check.ok()) {
    std::ostringstream os;
    os << "invalid (p, q, alpha):";
    for (const auto& v : check.violations) os << " " << v.message << ";";
    throw ValidationError(std::move(check.violations), os.str());
  }
  return *check.problem;
}

ProblemCheck try_validate_solver(const DomainSpec& spec, double p, double q,
                                 double alpha) {
  check_gamma(spec);
  const double n = static_cast<double>(spec.n);
  ProblemCheck out;

  const Interval alpha_range{-n, n * (p - 1.0)};  // Muckenhoupt A_p range
  if (!alpha_range.contains(alpha)) {
    std::ostringstream os;
    os << "admissible alpha in " << alpha_range.str();
    out.violations.push_back(
        {ViolationCode::AlphaOutOfRange, alpha_range, alpha, os.str()});
  }
  const double inf = std::numeric_limits<double>::infinity();
  const Interval p_range{1.0, inf};
  if (!(p > 1.0)) {
    out.violations.push_back(
        {ViolationCode::POutOfRange, p_range, p, "requires p > 1"});
  }
  if (out.violations.empty()) {
    const double p_star =
        (alpha + spec.gamma - p > 0.0) ? sobolev_exponent(spec, p, alpha) : inf;
    const Interval q_range{1.0, p_star};
    if (!q_range.contains(q)) {
      std::ostringstream os;
      os << "admissible q in " << q_range.str();
      out.violations.push_back(
          {ViolationCode::QOutOfRange, q_range, q, os.str()});
    } else {
      out.problem = ValidatedProblem{p, q, alpha, p_star};
    }
  }
  return out;
}

ValidatedProblem validate_solver_problem(const DomainSpec& spec, double p,
                                         double q, double alpha) {
  ProblemCheck check = try_validate_solver(spec, p, q, alpha);
  if (!check.ok()) {
    std::ostringstream os;
    os << "invalid (p, q, alpha):";
    for (const auto& v : check.violations) os << " " << v.message << ";";
    throw ValidationError(std::move(check.violations), os.str());
  }
  return *check.problem;
}

TransferWindow transfer_window(const ValidatedProblem& problem,
                               const DomainSpec& spec) {
  const double n = static_cast<double>(spec.n);
  const double d = problem.alpha + spec.gamma - problem.p;  // > 0 after validation
  TransferWindow w;
  w.a_lo = std::max(0.0, (n - problem.p) / d);
  w.a_hi = std::min(n / spec.gamma, problem.p * (n - 1.0) / d);
  return w;
}

double s_upper(double a, const ValidatedProblem& problem,
               const DomainSpec& spec) {
  const TransferWindow w = transfer_window(problem, spec);
  if (w.empty())
    throw Error("EmptyWindow", "empty transfer window (a_lo >= a_hi)");
  if (!w.contains(a))
    throw Error("AOutOfWindow",
                "map exponent a outside the transfer window " +
                    Interval{w.a_lo, w.a_hi}.str());
  const double n = static_cast<double>(spec.n);
  return n * problem.p /
         (a * (problem.alpha + spec.gamma - problem.p) + problem.p);
}

}  // namespace cusp
