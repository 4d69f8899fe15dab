#include "cusp/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace cusp {
namespace {

// 2-point Gauss-Legendre nodes on (0,1).
constexpr double kGaussA = 0.21132486540518711775;
constexpr double kGaussB = 0.78867513459481288225;

// Grading strength: with t = z^kappa, kappa = kGrade/(eta+1), the measure
// factor becomes kappa * z^{kGrade-1}, a polynomial the 2-point rule
// integrates exactly per cell.
constexpr double kGrade = 4.0;

// Below this point f(t) t^{-eta} equals its t -> 0 limit to machine
// precision, while raw power evaluations would leave the double range.
constexpr double kTFloor = 1e-60;

}  // namespace

// int_0^1 f(t) dt with f ~ t^eta near 0. Substituting t = z^kappa and
// factoring out the known power gives
//   int_0^1 [f(t) t^{-eta}] * kappa * z^{kGrade-1} dz,  t = z^kappa,
// whose bracketed factor is bounded and slowly varying; t is floored so the
// black-box integrand is never evaluated outside the double range.
double integrate_graded_1d(const std::function<double(double)>& f,
                           double singular_exponent, const QuadConfig& cfg) {
  if (!(singular_exponent > -1.0))
    throw Error("NonintegrableSingularity",
                "integrand exponent at the cusp is <= -1");
  const double eta = singular_exponent;
  const double kappa = kGrade / (eta + 1.0);
  auto g = [&](double z) {
    const double t = std::max(std::pow(z, kappa), kTFloor);
    return f(t) * std::pow(t, -eta) * kappa * std::pow(z, kGrade - 1.0);
  };

  double prev = 0.0;
  for (int level = 0; level <= cfg.max_levels; ++level) {
    const int cells = cfg.base_strips << level;
    const double h = 1.0 / cells;
    double sum = 0.0;
    for (int j = 0; j < cells; ++j) {
      const double z0 = j * h;
      sum += 0.5 * h * (g(z0 + kGaussA * h) + g(z0 + kGaussB * h));
    }
    if (level > 0) {
      const double scale = std::max(std::abs(sum), 1e-300);
      if (std::abs(sum - prev) < cfg.rel_tol * scale) return sum;
    }
    prev = sum;
  }
  throw Error("QuadratureNonconvergence",
              "graded quadrature did not converge within max_levels");
}

double integrate_strip_domain(const std::function<double(double, double)>& f,
                              const std::function<double(double)>& width,
                              double singular_exponent, const QuadConfig& cfg) {
  if (!(singular_exponent > -1.0))
    throw Error("NonintegrableSingularity",
                "integrand exponent at the cusp is <= -1");
  const double eta = singular_exponent;
  const double kappa = kGrade / (eta + 1.0);

  double prev = 0.0;
  for (int level = 0; level <= cfg.max_levels; ++level) {
    const int cells = cfg.base_strips << level;
    const int panels = cfg.base_panels << std::min(level, 4);
    const double h = 1.0 / cells;
    const double hu = 1.0 / panels;
    double sum = 0.0;
    for (int j = 0; j < cells; ++j) {
      const double z0 = j * h;
      const double zq[2] = {z0 + kGaussA * h, z0 + kGaussB * h};
      for (double z : zq) {
        const double t = std::max(std::pow(z, kappa), kTFloor);
        const double w = width(t);
        double cross = 0.0;
        for (int k = 0; k < panels; ++k) {
          const double u0 = k * hu;
          cross += f((u0 + kGaussA * hu) * w, t);
          cross += f((u0 + kGaussB * hu) * w, t);
        }
        // width * mean-of-f carries the t^eta behavior; strip it out in z
        sum += 0.5 * h * w * cross * 0.5 * hu * std::pow(t, -eta) * kappa *
               std::pow(z, kGrade - 1.0);
      }
    }
    if (level > 0) {
      const double scale = std::max(std::abs(sum), 1e-300);
      if (std::abs(sum - prev) < cfg.rel_tol * scale) return sum;
    }
    prev = sum;
  }
  throw Error("QuadratureNonconvergence",
              "graded quadrature did not converge within max_levels");
}

}  // namespace cusp
