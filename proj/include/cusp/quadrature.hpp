#pragma once

#include <functional>

#include "cusp/errors.hpp"

namespace cusp {

// Controls the composite rule used for integrals over 2-D domains
// {0 < x2 < 1, 0 < x1 < g(x2)} whose integrands are power-singular at x2 = 0.
struct QuadConfig {
  double rel_tol = 1e-7;  // stop when successive dyadic levels agree to this
  int max_levels = 10;
  int base_strips = 8;   // cells in x2 at the coarsest level
  int base_panels = 2;   // Gauss panels in the x1 cross-section
};

// 1-D integral of f over (0, 1). `singular_exponent` is the known power
// behavior f ~ t^eta near 0 (eta > -1); the substitution t = z^{1/(eta+1)}
// removes the singularity so the composite 2-point Gauss rule keeps full
// order even when eta is close to -1.
double integrate_graded_1d(const std::function<double(double)>& f,
                           double singular_exponent, const QuadConfig& cfg);

// Integral of f(x1, x2) over {0 < x2 < 1, 0 < x1 < width(x2)}, via the
// substitution x1 = u * width(t): the cross-section becomes the unit square
// and the width enters as a Jacobian factor. `singular_exponent` describes
// the combined t-power of integrand * width near t = 0.
double integrate_strip_domain(const std::function<double(double, double)>& f,
                              const std::function<double(double)>& width,
                              double singular_exponent, const QuadConfig& cfg);

}  // namespace cusp
