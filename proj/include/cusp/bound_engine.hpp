#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cusp/cusp_map.hpp"
#include "cusp/mesh.hpp"
#include "cusp/param_core.hpp"

namespace cusp {

// One (a, s, r) parameter point for the constant-transfer chain.
struct BoundParams {
  double a = 0.0;
  double s = 0.0;
  double r = 0.0;
};

enum class BStrategy { user, payne_weinberger, numeric_lower };

// Value used for the reference-domain Poincare-Sobolev constant B_{r,s}.
// Only the Payne-Weinberger route (r = s = 2, convex reference) is an
// analytic upper estimate; numeric ascent gives a lower estimate and is
// flagged uncertified.
struct PoincareProvider {
  BStrategy strategy = BStrategy::user;
  double value = 1.0;
  bool certified = false;
};

struct FeasibilityReport {
  bool feasible = false;
  std::vector<Violation> violations;
};

FeasibilityReport feasible(const BoundParams& bp,
                           const ValidatedProblem& problem,
                           const DomainSpec& spec);

struct BoundReport {
  BoundParams params;
  double k_ps = 0.0;
  double m_rq = 0.0;
  double b_rs = 0.0;
  double inv_lambda_bound = 0.0;
  double lambda_lower_bound = 0.0;
  bool certified = false;
  std::string provenance;
};

// Upper bound on 1/lambda at a fixed feasible (a, s, r); evaluates both the
// expanded product formula and K^p M^p B^p and cross-checks them.
BoundReport eigen_bound(const ValidatedProblem& problem, const DomainSpec& spec,
                        const BoundParams& bp, const PoincareProvider& b);

struct SearchConfig {
  int na = 17;
  int ns = 9;
  int nr = 9;
  int golden_passes = 3;
  double param_tol = 1e-4;
  double boundary_pad = 1e-6;
};

// B_{r,s} provider as a function of (r, s); lets the optimizer move r and s.
using BoundProviderFn = std::function<PoincareProvider(double r, double s)>;

BoundProviderFn constant_b_model(const PoincareProvider& provider);

struct NumericBConfig {
  int ref_mesh_n = 8;
  int starts = 4;  // start 0 is the p=2 eigenfunction, the rest random
  int max_iters = 60;
  unsigned seed = 2024;
};

// Discrete ascent estimate of B_{r,s} on a reference-triangle mesh; results
// are memoized on (r, s). Always uncertified.
BoundProviderFn numeric_b_model(int ref_mesh_n, const NumericBConfig& cfg = {});

// Single-point B constant per the chosen strategy.
PoincareProvider poincare_constant(BStrategy strategy, double r, double s,
                                   const GradedMesh* ref_mesh, double d,
                                   double user_value = 1.0,
                                   const NumericBConfig& cfg = {});

// Deterministic grid + golden-section minimization of the bound over the
// feasible (a, s, r) set.
BoundReport optimize_bound(const ValidatedProblem& problem,
                           const DomainSpec& spec, const BoundProviderFn& b,
                           const SearchConfig& search = {});

}  // namespace cusp
