#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "cusp/param_core.hpp"
#include "cusp/quadrature.hpp"

namespace cusp {

// The map phi_a from the Lipschitz reference domain Omega_n onto the
// cuspidal domain Omega_gamma:
//   y_i = (x_i / x_n) * x_n^{a gamma_i},  y_n = x_n^a.
struct CuspMapping {
  double a = 1.0;
  DomainSpec spec;

  static CuspMapping make(double a, DomainSpec spec);
};

enum class ConstantMethod { closed_form, quadrature };

// Operator-norm bound K_{p,s} and Jacobian-transfer constant M_{r,q},
// together with the weight envelope constants for |phi_a(x)|^alpha.
struct TransferConstants {
  double k_ps = 0.0;
  double m_rq = 0.0;
  double c_a = 1.0;
  double c_a_upper = 1.0;
  ConstantMethod method = ConstantMethod::closed_form;
};

// phi_a(x); x must lie strictly inside Omega_n (0 < x_i < x_n < 1).
std::vector<double> map_point(const CuspMapping& m,
                              const std::vector<double>& x);

// J(x, phi_a) = a * x_n^{a*gamma - n} > 0.
double jacobian(const CuspMapping& m, double xn);

// Envelope |D phi_a(x)| <= x_n^{a-1} sqrt(sum (a gamma_i - 1)^2 + n - 1 + a^2).
double diff_norm_bound(const CuspMapping& m, double xn);

// The dimension-only factor of the envelope above (value at x_n = 1).
double diff_norm_factor(const CuspMapping& m);

// Constants (c_a, C_a) with c_a x_n^{a alpha} <= |phi_a(x)|^alpha
// <= C_a x_n^{a alpha} on Omega_n.
std::pair<double, double> weight_envelope(double a, double alpha, int n);

// Closed-form upper bound on K_{p,s}(phi_a; Omega_n).
double kps_closed_form(double a, double p, double s,
                       const ValidatedProblem& problem, const DomainSpec& spec);

// Quadrature evaluation of K_{p,s} with the |D phi_a| envelope in the
// numerator and the exact |phi_a(x)|^alpha weight; n = 2 only.
double kps_quadrature(double a, double p, double s,
                      const ValidatedProblem& problem, const DomainSpec& spec,
                      const QuadConfig& quad_cfg = {});

// Closed-form M_{r,q}(Omega_n) = a^{1/q} ((r-q)/(a gamma r - n q))^{(r-q)/(rq)}.
double mrq_closed_form(double a, double r, double q, const DomainSpec& spec);

// Quadrature evaluation of the defining Jacobian integral; n = 2 only.
double mrq_quadrature(double a, double r, double q, const DomainSpec& spec,
                      const QuadConfig& quad_cfg = {});

// A test function on the closed cusp domain with its gradient.
struct SmoothFunction {
  std::function<double(double, double)> value;
  std::function<double(double, double)> dx1;
  std::function<double(double, double)> dx2;
};

struct CompositionReport {
  double lhs = 0.0;  // ||grad(f o phi_a)||_{L_s(Omega_2)}
  double rhs = 0.0;  // K_{p,s} * ||grad f||_{L_p(Omega_gamma, |x|^alpha)}
  double k_ps = 0.0;
  bool holds = false;
};

// Checks the composition-operator inequality for one test function; n = 2.
CompositionReport composition_inequality_check(
    const SmoothFunction& f, double a, double p, double s,
    const ValidatedProblem& problem, const DomainSpec& spec,
    const QuadConfig& quad_cfg = {}, double tol = 1e-6);

}  // namespace cusp
