#include "cusp/cusp_map.hpp"

#include <cmath>

namespace cusp {
namespace {

void require_2d(const DomainSpec& spec, const char* what) {
  if (spec.n != 2)
    throw Error("UnsupportedDimension",
                std::string(what) + " is implemented for n = 2 only");
}

void require_admissible_s(double a, double p, double s,
                          const ValidatedProblem& problem,
                          const DomainSpec& spec) {
  const double t = s_upper(a, problem, spec);  // also checks a in the window
  if (!(s > 1.0 && s < t && s < p))
    throw Error("SOutOfRange",
                "requires 1 < s < min{p, np/(a(alpha+gamma-p)+p)}");
}

}  // namespace

CuspMapping CuspMapping::make(double a, DomainSpec spec) {
  if (!(a > 0.0)) throw Error("AOutOfWindow", "map exponent a must be > 0");
  check_gamma(spec);
  return CuspMapping{a, std::move(spec)};
}

std::vector<double> map_point(const CuspMapping& m,
                              const std::vector<double>& x) {
  const int n = m.spec.n;
  if (static_cast<int>(x.size()) != n)
    throw Error("BadPoint", "point dimension mismatch");
  const double xn = x[n - 1];
  if (!(xn > 0.0 && xn < 1.0))
    throw Error("BadPoint", "point outside the open reference domain");
  for (int i = 0; i < n - 1; ++i)
    if (!(x[i] > 0.0 && x[i] < xn))
      throw Error("BadPoint", "point outside the open reference domain");

  std::vector<double> y(n);
  for (int i = 0; i < n - 1; ++i)
    y[i] = x[i] / xn * std::pow(xn, m.a * m.spec.gamma_exps[i]);
  y[n - 1] = std::pow(xn, m.a);
  return y;
}

double jacobian(const CuspMapping& m, double xn) {
  if (!(xn > 0.0 && xn < 1.0))
    throw Error("BadPoint", "x_n outside (0, 1)");
  return m.a * std::pow(xn, m.a * m.spec.gamma - m.spec.n);
}

double diff_norm_factor(const CuspMapping& m) {
  double s = 0.0;
  for (double g : m.spec.gamma_exps) {
    const double d = m.a * g - 1.0;
    s += d * d;
  }
  return std::sqrt(s + (m.spec.n - 1) + m.a * m.a);
}

double diff_norm_bound(const CuspMapping& m, double xn) {
  if (!(xn > 0.0 && xn < 1.0))
    throw Error("BadPoint", "x_n outside (0, 1)");
  return std::pow(xn, m.a - 1.0) * diff_norm_factor(m);
}

std::pair<double, double> weight_envelope(double a, double alpha, int n) {
  if (!(a > 0.0)) throw Error("AOutOfWindow", "map exponent a must be > 0");
  // x_n^a <= |phi_a(x)| <= sqrt(n) x_n^a on Omega_n.
  const double half = std::pow(static_cast<double>(n), alpha / 2.0);
  if (alpha >= 0.0) return {1.0, half};
  return {half, 1.0};
}

double kps_closed_form(double a, double p, double s,
                       const ValidatedProblem& problem,
                       const DomainSpec& spec) {
  require_admissible_s(a, p, s, problem, spec);
  const double n = static_cast<double>(spec.n);
  const double d = problem.alpha + spec.gamma - p;
  const double denom = n * p - s * (a * d + p);
  if (!(denom > 0.0))
    throw Error("DenominatorNonpositive",
                "np - s(a(alpha+gamma-p)+p) must be positive");
  const CuspMapping m = CuspMapping::make(a, spec);
  const double c_a = weight_envelope(a, problem.alpha, spec.n).first;
  const double lead = diff_norm_factor(m) / std::pow(a * c_a, 1.0 / p);
  return lead * std::pow((p - s) / denom, (p - s) / (p * s));
}

double kps_quadrature(double a, double p, double s,
                      const ValidatedProblem& problem, const DomainSpec& spec,
                      const QuadConfig& quad_cfg) {
  require_2d(spec, "kps_quadrature");
  require_admissible_s(a, p, s, problem, spec);
  const double alpha = problem.alpha;
  const double gamma = spec.gamma;
  const double gamma1 = spec.gamma1();
  const double n = 2.0;
  const double exp_ratio = s / (p - s);
  // Power of x2 in the integrand; (ol1) demands eta > -1.
  const double eta =
      exp_ratio * (p * (a - 1.0) - a * (alpha + gamma) + n) + (n - 1.0);
  if (!(eta > -1.0))
    throw Error("NonintegrableSingularity",
                "exponent test fails: integrand not integrable at the cusp");

  const CuspMapping m = CuspMapping::make(a, spec);
  const double env = diff_norm_factor(m);
  auto integrand = [&](double x1, double x2) {
    const double dnorm = env * std::pow(x2, a - 1.0);
    const double jac = a * std::pow(x2, a * gamma - n);
    const double y1 = x1 * std::pow(x2, a * gamma1 - 1.0);
    const double y2 = std::pow(x2, a);
    const double weight = std::pow(y1 * y1 + y2 * y2, alpha / 2.0);
    return std::pow(std::pow(dnorm, p) / (jac * weight), exp_ratio);
  };
  const double integral = integrate_strip_domain(
      integrand, [](double t) { return t; }, eta, quad_cfg);
  return std::pow(integral, (p - s) / (p * s));
}

double mrq_closed_form(double a, double r, double q, const DomainSpec& spec) {
  if (!(a > 0.0)) throw Error("AOutOfWindow", "map exponent a must be > 0");
  const double n = static_cast<double>(spec.n);
  if (!(q >= 1.0 && q < r))
    throw Error("InfeasibleQR", "requires 1 <= q < r");
  if (!(q < a * spec.gamma / n * r))
    throw Error("InfeasibleQR", "requires q < (a gamma / n) r");
  return std::pow(a, 1.0 / q) *
         std::pow((r - q) / (a * spec.gamma * r - n * q), (r - q) / (r * q));
}

double mrq_quadrature(double a, double r, double q, const DomainSpec& spec,
                      const QuadConfig& quad_cfg) {
  require_2d(spec, "mrq_quadrature");
  mrq_closed_form(a, r, q, spec);  // same feasibility gate
  const double n = 2.0;
  const double exp_ratio = r / (r - q);
  const double eta = (a * spec.gamma - n) * exp_ratio + (n - 1.0);
  auto integrand = [&](double, double x2) {
    return std::pow(a * std::pow(x2, a * spec.gamma - n), exp_ratio);
  };
  const double integral = integrate_strip_domain(
      integrand, [](double t) { return t; }, eta, quad_cfg);
  return std::pow(integral, (r - q) / (r * q));
}

CompositionReport composition_inequality_check(const SmoothFunction& f,
                                               double a, double p, double s,
                                               const ValidatedProblem& problem,
                                               const DomainSpec& spec,
                                               const QuadConfig& quad_cfg,
                                               double tol) {
  require_2d(spec, "composition_inequality_check");
  const double gamma1 = spec.gamma1();
  const double alpha = problem.alpha;

  // lhs: gradient of f o phi_a over the reference triangle, via the chain rule.
  auto lhs_integrand = [&](double x1, double x2) {
    const double y1 = x1 * std::pow(x2, a * gamma1 - 1.0);
    const double y2 = std::pow(x2, a);
    const double fy1 = f.dx1(y1, y2);
    const double fy2 = f.dx2(y1, y2);
    const double g1 = fy1 * std::pow(x2, a * gamma1 - 1.0);
    const double g2 = fy1 * (a * gamma1 - 1.0) * x1 * std::pow(x2, a * gamma1 - 2.0) +
                      fy2 * a * std::pow(x2, a - 1.0);
    return std::pow(std::sqrt(g1 * g1 + g2 * g2), s);
  };
  const double eta_lhs = s * (a - 1.0) + 1.0;
  const double lhs = std::pow(
      integrate_strip_domain(lhs_integrand, [](double t) { return t; },
                             std::min(eta_lhs, 1.0), quad_cfg),
      1.0 / s);

  // rhs: weighted gradient norm of f over the cusp domain.
  auto rhs_integrand = [&](double y1, double y2) {
    const double fy1 = f.dx1(y1, y2);
    const double fy2 = f.dx2(y1, y2);
    const double grad = std::sqrt(fy1 * fy1 + fy2 * fy2);
    return std::pow(grad, p) * std::pow(y1 * y1 + y2 * y2, alpha / 2.0);
  };
  const double eta_rhs = alpha + gamma1;
  const double grad_norm = std::pow(
      integrate_strip_domain(rhs_integrand,
                             [&](double t) { return std::pow(t, gamma1); },
                             std::min(eta_rhs, 1.0), quad_cfg),
      1.0 / p);

  CompositionReport report;
  report.k_ps = kps_closed_form(a, p, s, problem, spec);
  report.lhs = lhs;
  report.rhs = report.k_ps * grad_norm;
  report.holds = lhs <= report.rhs * (1.0 + tol) + 1e-14;
  return report;
}

}  // namespace cusp
