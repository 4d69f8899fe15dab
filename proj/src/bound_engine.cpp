#include "cusp/bound_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <random>
#include <sstream>
#include <tuple>

#include "cusp/eigensolver.hpp"

namespace cusp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void push(std::vector<Violation>& out, ViolationCode code, Interval range,
          double value, const std::string& what) {
  out.push_back({code, range, value, what});
}

}  // namespace

FeasibilityReport feasible(const BoundParams& bp,
                           const ValidatedProblem& problem,
                           const DomainSpec& spec) {
  FeasibilityReport report;
  const double n = static_cast<double>(spec.n);
  const TransferWindow w = transfer_window(problem, spec);
  if (w.empty()) {
    push(report.violations, ViolationCode::EmptyWindow, {w.a_lo, w.a_hi}, bp.a,
         "empty transfer window (a_lo >= a_hi)");
    return report;
  }
  if (!w.contains(bp.a)) {
    push(report.violations, ViolationCode::AOutOfWindow, {w.a_lo, w.a_hi},
         bp.a, "a outside the transfer window " + Interval{w.a_lo, w.a_hi}.str());
    return report;
  }
  const double s_hi = std::min({problem.p, n, s_upper(bp.a, problem, spec)});
  if (!(bp.s > 1.0 && bp.s < s_hi))
    push(report.violations, ViolationCode::SOutOfRange, {1.0, s_hi}, bp.s,
         "requires 1 < s < min{p, n, np/(a(alpha+gamma-p)+p)}");
  if (report.violations.empty()) {
    const double r_hi = n * bp.s / (n - bp.s);
    if (!(bp.r > bp.s && bp.r < r_hi))
      push(report.violations, ViolationCode::ROutOfRange, {bp.s, r_hi}, bp.r,
           "requires s < r < ns/(n-s)");
    const double q_cap = bp.a * spec.gamma / n * bp.r;
    if (!(problem.q < q_cap))
      push(report.violations, ViolationCode::QRInfeasible, {problem.q, kInf},
           q_cap, "requires q < (a gamma / n) r");
  }
  report.feasible = report.violations.empty();
  return report;
}

BoundReport eigen_bound(const ValidatedProblem& problem, const DomainSpec& spec,
                        const BoundParams& bp, const PoincareProvider& b) {
  const FeasibilityReport check = feasible(bp, problem, spec);
  if (!check.feasible) {
    std::ostringstream os;
    os << "infeasible (a, s, r):";
    for (const auto& v : check.violations) os << " " << v.message << ";";
    throw Error("InfeasibleParams", os.str());
  }

  const double n = static_cast<double>(spec.n);
  const double p = problem.p, q = problem.q, alpha = problem.alpha;
  const double gamma = spec.gamma;
  const double a = bp.a, s = bp.s, r = bp.r;

  BoundReport report;
  report.params = bp;
  report.k_ps = kps_closed_form(a, p, s, problem, spec);
  report.m_rq = mrq_closed_form(a, r, q, spec);
  report.b_rs = b.value;
  const double product = std::pow(report.k_ps * report.m_rq * b.value, p);

  // Expanded form of the same bound; the two evaluation orders must agree.
  const CuspMapping m = CuspMapping::make(a, spec);
  const double c_a = weight_envelope(a, alpha, spec.n).first;
  const double sum_sq = diff_norm_factor(m) * diff_norm_factor(m);
  const double expanded =
      std::pow(a, p / q - 1.0) / c_a * std::pow(sum_sq, p / 2.0) *
      std::pow(b.value, p) *
      std::pow((p - s) / (n * p - s * (a * (alpha + gamma - p) + p)),
               (p - s) / s) *
      std::pow((r - q) / (a * gamma * r - n * q), (r - q) * p / (r * q));
  if (std::abs(product - expanded) > 1e-12 * std::max(product, expanded))
    throw Error("TwoPathMismatch",
                "expanded bound and K^p M^p B^p disagree beyond 1e-12");

  report.inv_lambda_bound = product;
  report.lambda_lower_bound = 1.0 / product;
  report.certified = b.certified;
  switch (b.strategy) {
    case BStrategy::user:
      report.provenance = "B: user-supplied";
      break;
    case BStrategy::payne_weinberger:
      report.provenance = "B: Payne-Weinberger d/pi";
      break;
    case BStrategy::numeric_lower:
      report.provenance = "B: numeric lower estimate (uncertified)";
      break;
  }
  return report;
}

namespace {

// Discrete ascent on ||f - c*(f)||_r / ||grad f||_s over nodal functions.
double numeric_poincare(const GradedMesh& mesh, double r, double s,
                        const NumericBConfig& cfg) {
  ValidatedProblem surrogate;
  surrogate.p = s;  // x_norm exponent
  surrogate.q = r;
  surrogate.alpha = 0.0;
  DiscreteProblem dp(mesh, surrogate);

  // warm start: second Neumann eigenfunction of the plain Laplacian
  GridFunction warm = dp.make_function();
  {
    ValidatedProblem lap;
    DiscreteProblem dp2(mesh, lap);
    warm.values = direct_eigensolve_p2(dp2).u.values;
  }

  double best = 0.0;
  for (int start = 0; start < cfg.starts; ++start) {
    GridFunction f =
        start == 0 ? dp.make_function(warm.values)
                   : random_function(dp, cfg.seed + 7919 * start);
    f = project_constraint(dp, f, r);

    double num = dp.lq_norm(f, r);
    double den = dp.x_norm(f);
    if (!(den > 1e-14)) continue;
    double ratio = num / den;
    double step = 0.5;

    for (int it = 0; it < cfg.max_iters; ++it) {
      // envelope-theorem gradient of the ratio
      Eigen::VectorXd gnum = Eigen::VectorXd::Zero(dp.num_vertices());
      for (int e = 0; e < dp.num_elements(); ++e) {
        const Tri& tr = mesh.triangles[e];
        const double v[3] = {f.values[tr[0]], f.values[tr[1]],
                             f.values[tr[2]]};
        const int pairs[3][2] = {{0, 1}, {1, 2}, {2, 0}};
        for (const auto& pr : pairs) {
          const double mid = 0.5 * (v[pr[0]] + v[pr[1]]);
          const double g = std::pow(std::abs(mid), r - 2.0) * mid;
          const double cell = dp.element_area(e) / 3.0;
          gnum[tr[pr[0]]] += cell * 0.5 * g;
          gnum[tr[pr[1]]] += cell * 0.5 * g;
        }
      }
      gnum *= std::pow(num, 1.0 - r);
      const Eigen::VectorXd gden = dp.a_vector(f) * std::pow(den, 1.0 - s);
      Eigen::VectorXd grad = (gnum * den - num * gden) / (den * den);

      bool improved = false;
      for (int ls = 0; ls < 25; ++ls) {
        GridFunction trial = dp.make_function(
            f.values + step * grad / std::max(grad.norm(), 1e-30));
        trial = project_constraint(dp, trial, r);
        const double tden = dp.x_norm(trial);
        if (tden > 1e-14) {
          const double tnum = dp.lq_norm(trial, r);
          if (tnum / tden > ratio) {
            f = std::move(trial);
            num = tnum;
            den = tden;
            const double prev = ratio;
            ratio = tnum / tden;
            step *= 1.6;
            improved = true;
            if (ratio - prev < 1e-10 * ratio) it = cfg.max_iters;  // converged
            break;
          }
        }
        step *= 0.5;
      }
      if (!improved) break;
    }
    best = std::max(best, ratio);
  }
  if (!(best > 0.0))
    throw Error("AscentFailed", "numeric Poincare ascent found no ratio");
  return best;
}

}  // namespace

BoundProviderFn constant_b_model(const PoincareProvider& provider) {
  return [provider](double, double) { return provider; };
}

BoundProviderFn numeric_b_model(int ref_mesh_n, const NumericBConfig& cfg) {
  auto mesh = std::make_shared<GradedMesh>(build_reference_mesh(ref_mesh_n, 1.0));
  auto cache = std::make_shared<std::map<std::pair<long long, long long>, double>>();
  return [mesh, cache, cfg](double r, double s) {
    // quantize the exponents so nearby search points share one ascent run
    const auto key = std::make_pair(
        static_cast<long long>(std::llround(r * 1e3)),
        static_cast<long long>(std::llround(s * 1e3)));
    auto it = cache->find(key);
    double value;
    if (it != cache->end()) {
      value = it->second;
    } else {
      value = numeric_poincare(*mesh, 1e-3 * static_cast<double>(key.first),
                               1e-3 * static_cast<double>(key.second), cfg);
      (*cache)[key] = value;
    }
    return PoincareProvider{BStrategy::numeric_lower, value, false};
  };
}

PoincareProvider poincare_constant(BStrategy strategy, double r, double s,
                                   const GradedMesh* ref_mesh, double d,
                                   double user_value,
                                   const NumericBConfig& cfg) {
  switch (strategy) {
    case BStrategy::payne_weinberger:
      if (r != 2.0 || s != 2.0)
        throw Error("StrategyDomainMismatch",
                    "Payne-Weinberger applies to r = s = 2 only");
      return {BStrategy::payne_weinberger, d / M_PI, true};
    case BStrategy::numeric_lower: {
      if (ref_mesh == nullptr)
        throw Error("StrategyDomainMismatch",
                    "numeric strategy needs a reference mesh");
      const double value = numeric_poincare(*ref_mesh, r, s, cfg);
      return {BStrategy::numeric_lower, value, false};
    }
    case BStrategy::user:
      return {BStrategy::user, user_value, false};
  }
  throw Error("StrategyDomainMismatch", "unknown strategy");
}

namespace {

double golden_min(const std::function<double(double)>& f, double lo, double hi,
                  double tol) {
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - gr * (hi - lo);
  double d = lo + gr * (hi - lo);
  double fc = f(c), fd = f(d);
  while (hi - lo > tol) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - gr * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + gr * (hi - lo);
      fd = f(d);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

BoundReport optimize_bound(const ValidatedProblem& problem,
                           const DomainSpec& spec, const BoundProviderFn& b,
                           const SearchConfig& search) {
  const double n = static_cast<double>(spec.n);
  const TransferWindow w = transfer_window(problem, spec);
  if (w.empty())
    throw Error("EmptyWindow",
                "empty transfer window (a_lo=" + std::to_string(w.a_lo) +
                    " a_hi=" + std::to_string(w.a_hi) + ")");

  auto evaluate = [&](const BoundParams& bp) -> double {
    if (!feasible(bp, problem, spec).feasible) return kInf;
    // stay clear of the blow-up boundaries
    const double s_hi = std::min({problem.p, n, s_upper(bp.a, problem, spec)});
    const double r_hi = n * bp.s / (n - bp.s);
    const double r_lo = std::max(bp.s, n * problem.q / (bp.a * spec.gamma));
    if (bp.a - w.a_lo < search.boundary_pad || w.a_hi - bp.a < search.boundary_pad ||
        bp.s - 1.0 < search.boundary_pad || s_hi - bp.s < search.boundary_pad ||
        bp.r - r_lo < search.boundary_pad || r_hi - bp.r < search.boundary_pad)
      return kInf;
    try {
      return eigen_bound(problem, spec, bp, b(bp.r, bp.s)).inv_lambda_bound;
    } catch (const Error&) {
      return kInf;
    }
  };

  BoundParams best;
  double best_value = kInf;
  auto consider = [&](const BoundParams& bp, double value) {
    if (value < best_value ||
        (value == best_value &&
         std::tie(bp.a, bp.s, bp.r) < std::tie(best.a, best.s, best.r))) {
      best = bp;
      best_value = value;
    }
  };

  for (int ia = 0; ia < search.na; ++ia) {
    BoundParams bp;
    bp.a = w.a_lo + (ia + 0.5) / search.na * (w.a_hi - w.a_lo);
    double s_hi;
    try {
      s_hi = std::min({problem.p, n, s_upper(bp.a, problem, spec)});
    } catch (const Error&) {
      continue;
    }
    if (!(s_hi > 1.0)) continue;
    for (int is = 0; is < search.ns; ++is) {
      bp.s = 1.0 + (is + 0.5) / search.ns * (s_hi - 1.0);
      const double r_lo =
          std::max(bp.s, n * problem.q / (bp.a * spec.gamma));
      const double r_hi = n * bp.s / (n - bp.s);
      if (!(r_lo < r_hi)) continue;
      for (int ir = 0; ir < search.nr; ++ir) {
        bp.r = r_lo + (ir + 0.5) / search.nr * (r_hi - r_lo);
        const double value = evaluate(bp);
        if (value < kInf) consider(bp, value);
      }
    }
  }
  if (!(best_value < kInf))
    throw Error("EmptyFeasibleSet", "no feasible (a, s, r) grid point");

  // coordinate-wise golden-section refinement around the grid optimum
  for (int pass = 0; pass < search.golden_passes; ++pass) {
    {
      const double lo = std::max(w.a_lo + search.boundary_pad,
                                 best.a - (w.a_hi - w.a_lo) / search.na);
      const double hi = std::min(w.a_hi - search.boundary_pad,
                                 best.a + (w.a_hi - w.a_lo) / search.na);
      if (lo < hi) {
        const double a = golden_min(
            [&](double x) {
              BoundParams bp = best;
              bp.a = x;
              return evaluate(bp);
            },
            lo, hi, search.param_tol);
        BoundParams bp = best;
        bp.a = a;
        const double v = evaluate(bp);
        if (v < best_value) consider(bp, v);
      }
    }
    {
      const double s_hi = std::min({problem.p, n, s_upper(best.a, problem, spec)});
      const double span = (s_hi - 1.0) / search.ns;
      const double lo = std::max(1.0 + search.boundary_pad, best.s - span);
      const double hi = std::min(s_hi - search.boundary_pad, best.s + span);
      if (lo < hi) {
        const double s = golden_min(
            [&](double x) {
              BoundParams bp = best;
              bp.s = x;
              return evaluate(bp);
            },
            lo, hi, search.param_tol);
        BoundParams bp = best;
        bp.s = s;
        const double v = evaluate(bp);
        if (v < best_value) consider(bp, v);
      }
    }
    {
      const double r_lo =
          std::max(best.s, n * problem.q / (best.a * spec.gamma));
      const double r_hi = n * best.s / (n - best.s);
      const double span = (r_hi - r_lo) / search.nr;
      const double lo = std::max(r_lo + search.boundary_pad, best.r - span);
      const double hi = std::min(r_hi - search.boundary_pad, best.r + span);
      if (lo < hi) {
        const double r = golden_min(
            [&](double x) {
              BoundParams bp = best;
              bp.r = x;
              return evaluate(bp);
            },
            lo, hi, search.param_tol);
        BoundParams bp = best;
        bp.r = r;
        const double v = evaluate(bp);
        if (v < best_value) consider(bp, v);
      }
    }
  }

  BoundReport report = eigen_bound(problem, spec, best, b(best.r, best.s));
  std::ostringstream os;
  os << report.provenance << "; grid " << search.na << "x" << search.ns << "x"
     << search.nr << " + " << search.golden_passes << " golden passes";
  report.provenance = os.str();
  return report;
}

}  // namespace cusp
