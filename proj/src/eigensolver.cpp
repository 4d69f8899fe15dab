#include "cusp/eigensolver.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <memory>
#include <random>

namespace cusp {
namespace {

constexpr double kTiny = 1e-300;

// Augmented zero-mean solve: [K m; m^T 0] [w; lam] = [b; 0].
Eigen::VectorXd solve_constrained(const Eigen::SparseMatrix<double>& stiffness,
                                  const Eigen::VectorXd& volume,
                                  const Eigen::VectorXd& rhs) {
  const int n = static_cast<int>(rhs.size());
  Eigen::SparseMatrix<double> aug(n + 1, n + 1);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(stiffness.nonZeros() + 2 * n);
  for (int k = 0; k < stiffness.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(stiffness, k); it; ++it)
      trip.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()),
                        it.value());
  for (int i = 0; i < n; ++i) {
    trip.emplace_back(i, n, volume[i]);
    trip.emplace_back(n, i, volume[i]);
  }
  aug.setFromTriplets(trip.begin(), trip.end());

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(aug);
  if (lu.info() != Eigen::Success)
    throw Error("SingularSystem", "constrained stiffness solve failed");
  Eigen::VectorXd ext = Eigen::VectorXd::Zero(n + 1);
  ext.head(n) = rhs;
  Eigen::VectorXd sol = lu.solve(ext);
  return sol.head(n);
}

}  // namespace

DiscreteProblem::DiscreteProblem(const GradedMesh& mesh,
                                 const ValidatedProblem& problem)
    : mesh_(&mesh), problem_(problem) {
  const int ne = static_cast<int>(mesh.triangles.size());
  const int nv = static_cast<int>(mesh.vertices.size());
  elem_grad_.resize(ne);
  elem_area_.resize(ne);
  elem_weight_.resize(ne);
  node_volume_ = Eigen::VectorXd::Zero(nv);

  for (int e = 0; e < ne; ++e) {
    const Tri& tr = mesh.triangles[e];
    const Point2& a = mesh.vertices[tr[0]];
    const Point2& b = mesh.vertices[tr[1]];
    const Point2& c = mesh.vertices[tr[2]];
    const double det =
        (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
    const double area = 0.5 * det;
    elem_area_[e] = area;
    // P1 basis gradients (constant per element)
    elem_grad_[e] = {(b[1] - c[1]) / det, (c[0] - b[0]) / det,
                     (c[1] - a[1]) / det, (a[0] - c[0]) / det,
                     (a[1] - b[1]) / det, (b[0] - a[0]) / det};
    // int_e |x|^alpha via the interior edge-midpoint rule
    double w = 0.0;
    const Point2 mids[3] = {{0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])},
                            {0.5 * (b[0] + c[0]), 0.5 * (b[1] + c[1])},
                            {0.5 * (c[0] + a[0]), 0.5 * (c[1] + a[1])}};
    for (const auto& m : mids) {
      const double r = std::hypot(m[0], m[1]);
      const double val = std::pow(r, problem_.alpha);
      if (!(std::isfinite(val) && val > 0.0))
        throw Error("NonfiniteIntegrand",
                    "weight sample not finite/positive at quadrature point");
      w += area / 3.0 * val;
    }
    elem_weight_[e] = w;
    for (int i = 0; i < 3; ++i) node_volume_[tr[i]] += area / 3.0;
  }
}

GridFunction DiscreteProblem::make_function() const {
  return {mesh_, Eigen::VectorXd::Zero(num_vertices())};
}

GridFunction DiscreteProblem::make_function(const Eigen::VectorXd& v) const {
  if (v.size() != num_vertices())
    throw Error("BadFunction", "coefficient count mismatch");
  return {mesh_, v};
}

Eigen::VectorXd DiscreteProblem::element_grad_sq(const GridFunction& u) const {
  const int ne = num_elements();
  Eigen::VectorXd out(ne);
  for (int e = 0; e < ne; ++e) {
    const Tri& tr = mesh_->triangles[e];
    const auto& g = elem_grad_[e];
    double gx = 0.0, gy = 0.0;
    for (int i = 0; i < 3; ++i) {
      gx += u.values[tr[i]] * g[2 * i];
      gy += u.values[tr[i]] * g[2 * i + 1];
    }
    out[e] = gx * gx + gy * gy;
  }
  return out;
}

double DiscreteProblem::x_norm(const GridFunction& u) const {
  const Eigen::VectorXd gsq = element_grad_sq(u);
  const double p = problem_.p;
  double sum = 0.0;
  for (int e = 0; e < num_elements(); ++e)
    sum += std::pow(gsq[e], p / 2.0) * elem_weight_[e];
  return std::pow(sum, 1.0 / p);
}

double DiscreteProblem::lq_norm(const GridFunction& u, double q) const {
  // scale out the sup to keep |m|^q in range for large q
  const double scale = u.values.cwiseAbs().maxCoeff();
  if (!(scale > 0.0)) return 0.0;
  double sum = 0.0;
  for (int e = 0; e < num_elements(); ++e) {
    const Tri& tr = mesh_->triangles[e];
    const double v0 = u.values[tr[0]], v1 = u.values[tr[1]],
                 v2 = u.values[tr[2]];
    const double mids[3] = {0.5 * (v0 + v1), 0.5 * (v1 + v2), 0.5 * (v2 + v0)};
    for (double m : mids)
      sum += elem_area_[e] / 3.0 * std::pow(std::abs(m) / scale, q);
  }
  return scale * std::pow(sum, 1.0 / q);
}

double DiscreteProblem::apply_A(const GridFunction& u,
                                const GridFunction& v) const {
  const double p = problem_.p;
  double sum = 0.0;
  for (int e = 0; e < num_elements(); ++e) {
    const Tri& tr = mesh_->triangles[e];
    const auto& g = elem_grad_[e];
    double ux = 0.0, uy = 0.0, vx = 0.0, vy = 0.0;
    for (int i = 0; i < 3; ++i) {
      ux += u.values[tr[i]] * g[2 * i];
      uy += u.values[tr[i]] * g[2 * i + 1];
      vx += v.values[tr[i]] * g[2 * i];
      vy += v.values[tr[i]] * g[2 * i + 1];
    }
    const double gsq = ux * ux + uy * uy;
    const double factor = (gsq > 0.0) ? std::pow(gsq, (p - 2.0) / 2.0) : 0.0;
    sum += factor * (ux * vx + uy * vy) * elem_weight_[e];
  }
  return sum;
}

double DiscreteProblem::apply_B(const GridFunction& u,
                                const GridFunction& v) const {
  double sum = 0.0;
  for (int e = 0; e < num_elements(); ++e) {
    const Tri& tr = mesh_->triangles[e];
    const double u0 = u.values[tr[0]], u1 = u.values[tr[1]],
                 u2 = u.values[tr[2]];
    const double v0 = v.values[tr[0]], v1 = v.values[tr[1]],
                 v2 = v.values[tr[2]];
    sum += elem_area_[e] / 3.0 *
           (0.25 * (u0 + u1) * (v0 + v1) + 0.25 * (u1 + u2) * (v1 + v2) +
            0.25 * (u2 + u0) * (v2 + v0));
  }
  return sum;
}

Eigen::VectorXd DiscreteProblem::a_vector(const GridFunction& u) const {
  const double p = problem_.p;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(num_vertices());
  for (int e = 0; e < num_elements(); ++e) {
    const Tri& tr = mesh_->triangles[e];
    const auto& g = elem_grad_[e];
    double ux = 0.0, uy = 0.0;
    for (int i = 0; i < 3; ++i) {
      ux += u.values[tr[i]] * g[2 * i];
      uy += u.values[tr[i]] * g[2 * i + 1];
    }
    const double gsq = ux * ux + uy * uy;
    const double factor = (gsq > 0.0) ? std::pow(gsq, (p - 2.0) / 2.0) : 0.0;
    for (int i = 0; i < 3; ++i)
      out[tr[i]] += factor * (ux * g[2 * i] + uy * g[2 * i + 1]) *
                    elem_weight_[e];
  }
  return out;
}

Eigen::SparseMatrix<double> DiscreteProblem::coefficient_stiffness(
    const Eigen::VectorXd& element_coeff) const {
  const int nv = num_vertices();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(9 * num_elements());
  for (int e = 0; e < num_elements(); ++e) {
    const Tri& tr = mesh_->triangles[e];
    const auto& g = elem_grad_[e];
    const double c = element_coeff[e] * elem_weight_[e];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        trip.emplace_back(tr[i], tr[j],
                          c * (g[2 * i] * g[2 * j] + g[2 * i + 1] * g[2 * j + 1]));
  }
  Eigen::SparseMatrix<double> k(nv, nv);
  k.setFromTriplets(trip.begin(), trip.end());
  return k;
}

Eigen::SparseMatrix<double> DiscreteProblem::weighted_stiffness_p2() const {
  return coefficient_stiffness(Eigen::VectorXd::Ones(num_elements()));
}

Eigen::SparseMatrix<double> DiscreteProblem::energy_hessian(
    const GridFunction& w, double eps) const {
  const double p = problem_.p;
  const int nv = num_vertices();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(9 * num_elements());
  for (int e = 0; e < num_elements(); ++e) {
    const Tri& tr = mesh_->triangles[e];
    const auto& g = elem_grad_[e];
    double ux = 0.0, uy = 0.0;
    for (int i = 0; i < 3; ++i) {
      ux += w.values[tr[i]] * g[2 * i];
      uy += w.values[tr[i]] * g[2 * i + 1];
    }
    const double gsq = ux * ux + uy * uy;
    const double c1 = std::pow(gsq + eps, (p - 2.0) / 2.0);
    const double c2 =
        (gsq > 0.0) ? (p - 2.0) * std::pow(gsq + eps, (p - 4.0) / 2.0) : 0.0;
    for (int i = 0; i < 3; ++i) {
      const double di = ux * g[2 * i] + uy * g[2 * i + 1];
      for (int j = 0; j < 3; ++j) {
        const double dj = ux * g[2 * j] + uy * g[2 * j + 1];
        const double val =
            c1 * (g[2 * i] * g[2 * j] + g[2 * i + 1] * g[2 * j + 1]) +
            c2 * di * dj;
        trip.emplace_back(tr[i], tr[j], val * elem_weight_[e]);
      }
    }
  }
  Eigen::SparseMatrix<double> h(nv, nv);
  h.setFromTriplets(trip.begin(), trip.end());
  return h;
}

Eigen::SparseMatrix<double> DiscreteProblem::mass_matrix() const {
  const int nv = num_vertices();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(9 * num_elements());
  for (int e = 0; e < num_elements(); ++e) {
    const Tri& tr = mesh_->triangles[e];
    const double a = elem_area_[e];
    // edge-midpoint rule, exact for the P1 mass matrix
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        trip.emplace_back(tr[i], tr[j], (i == j) ? a / 6.0 : a / 12.0);
  }
  Eigen::SparseMatrix<double> m(nv, nv);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

double DiscreteProblem::constraint_integral(const GridFunction& u, double c,
                                            double q) const {
  double sum = 0.0;
  for (int e = 0; e < num_elements(); ++e) {
    const Tri& tr = mesh_->triangles[e];
    const double v0 = u.values[tr[0]] - c, v1 = u.values[tr[1]] - c,
                 v2 = u.values[tr[2]] - c;
    const double mids[3] = {0.5 * (v0 + v1), 0.5 * (v1 + v2), 0.5 * (v2 + v0)};
    for (double m : mids)
      sum += elem_area_[e] / 3.0 * std::pow(std::abs(m), q - 2.0) * m;
  }
  return sum;
}

double DiscreteProblem::constraint_derivative(const GridFunction& u, double c,
                                              double q) const {
  double sum = 0.0;
  for (int e = 0; e < num_elements(); ++e) {
    const Tri& tr = mesh_->triangles[e];
    const double v0 = u.values[tr[0]] - c, v1 = u.values[tr[1]] - c,
                 v2 = u.values[tr[2]] - c;
    const double mids[3] = {0.5 * (v0 + v1), 0.5 * (v1 + v2), 0.5 * (v2 + v0)};
    for (double m : mids)
      sum += elem_area_[e] / 3.0 * std::pow(std::abs(m), q - 2.0);
  }
  return -(q - 1.0) * sum;
}

GridFunction project_constraint(const DiscreteProblem& dp,
                                const GridFunction& u, double q) {
  const double umin = u.values.minCoeff();
  const double umax = u.values.maxCoeff();
  if (umax - umin < 1e-15 * std::max(1.0, std::abs(umax)))
    throw Error("ConstantInput", "cannot project a constant function");

  double c;
  if (q == 2.0) {
    c = dp.lumped_volume().dot(u.values) / dp.lumped_volume().sum();
  } else {
    // c -> int |u-c|^{q-2}(u-c) is continuous and strictly decreasing in c;
    // safeguarded Newton with a bisection bracket
    double lo = umin, hi = umax;
    c = 0.5 * (lo + hi);
    for (int it = 0; it < 80 && hi - lo > 1e-15 * (umax - umin); ++it) {
      const double f = dp.constraint_integral(u, c, q);
      if (f > 0.0)
        lo = c;
      else
        hi = c;
      const double df = dp.constraint_derivative(u, c, q);
      double next = (std::isfinite(df) && df < 0.0) ? c - f / df : c;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      c = next;
    }
  }
  GridFunction out = u;
  out.values.array() -= c;
  return out;
}

double rayleigh_quotient(const DiscreteProblem& dp, const GridFunction& u) {
  const double q = dp.problem().q;
  const double lq = dp.lq_norm(u, q);
  if (!(lq > kTiny)) throw Error("ZeroFunction", "L_q norm vanishes");
  return std::pow(dp.x_norm(u) / lq, dp.problem().p);
}

namespace {

double inner_energy(const DiscreteProblem& dp, const GridFunction& w,
                    const GridFunction& rhs) {
  const double p = dp.problem().p;
  return std::pow(dp.x_norm(w), p) / p - dp.apply_B(rhs, w);
}

double kkt_residual(const DiscreteProblem& dp, const GridFunction& w,
                    const Eigen::VectorXd& b) {
  Eigen::VectorXd r = dp.a_vector(w) - b;
  const Eigen::VectorXd& m = dp.lumped_volume();
  r -= (r.dot(m) / m.squaredNorm()) * m;  // test space is zero-mean
  return r.norm() / std::max(b.norm(), 1e-30);
}

}  // namespace

GridFunction inner_solve(const DiscreteProblem& dp, const GridFunction& rhs,
                         const SolverConfig& cfg) {
  const double p = dp.problem().p;
  const int ne = dp.num_elements();

  const Eigen::VectorXd b = dp.mass_matrix() * rhs.values;
  if (b.norm() < kTiny)
    throw Error("ZeroFunction", "rhs vanishes after projection");

  // p = 2 start (exact solution in the linear case)
  GridFunction w = dp.make_function(
      solve_constrained(dp.weighted_stiffness_p2(), dp.lumped_volume(), b));
  if (p == 2.0) return w;

  (void)ne;
  double eps = 1e-2 * std::max(dp.element_grad_sq(w).mean(), 1e-12);
  double energy = inner_energy(dp, w, rhs);

  // damped Newton with eps-regularized Hessian (exact gradient)
  for (int k = 0; k < cfg.inner_max_iters; ++k) {
    const Eigen::VectorXd grad = dp.a_vector(w) - b;
    const double kkt = kkt_residual(dp, w, b);
    if (kkt <= cfg.kkt_tol) return w;

    const GridFunction d = dp.make_function(solve_constrained(
        dp.energy_hessian(w, eps), dp.lumped_volume(), -grad));
    const double dd = grad.dot(d.values);  // d is zero-mean

    double tau = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      GridFunction trial = dp.make_function(w.values + tau * d.values);
      const double trial_energy = inner_energy(dp, trial, rhs);
      // near the optimum the energy decrease drops below double precision;
      // accept on residual contraction as well
      if (trial_energy <= energy + 1e-4 * tau * dd +
                              1e-14 * std::abs(energy) ||
          kkt_residual(dp, trial, b) <= 0.9 * kkt) {
        w = std::move(trial);
        energy = inner_energy(dp, w, rhs);
        accepted = true;
        break;
      }
      tau *= 0.5;
    }
    eps = std::max(cfg.eps_min, eps * cfg.eps_rho);
    if (!accepted && eps <= cfg.eps_min) break;
  }
  if (kkt_residual(dp, w, b) <= cfg.kkt_tol) return w;
  throw Error("NonconvergedInner",
              "inner solve did not reach the KKT tolerance; last residual = " +
                  std::to_string(kkt_residual(dp, w, b)));
}

namespace {

double weak_residual(const DiscreteProblem& dp, const GridFunction& u,
                     double lambda) {
  const double p = dp.problem().p, q = dp.problem().q;
  const double lq = dp.lq_norm(u, q);
  // int |u|^{q-2} u phi_i via the midpoint rule; each midpoint carries basis
  // values 1/2 on its two nodes
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dp.num_vertices());
  {
    const GradedMesh& mesh = dp.mesh();
    for (int e = 0; e < dp.num_elements(); ++e) {
      const Tri& tr = mesh.triangles[e];
      const double v[3] = {u.values[tr[0]], u.values[tr[1]], u.values[tr[2]]};
      const int pairs[3][2] = {{0, 1}, {1, 2}, {2, 0}};
      for (const auto& pr : pairs) {
        const double m = 0.5 * (v[pr[0]] + v[pr[1]]);
        const double val = std::pow(std::abs(m), q - 2.0) * m;
        const double cell = dp.element_area(e) / 3.0;
        rhs[tr[pr[0]]] += cell * 0.5 * val;
        rhs[tr[pr[1]]] += cell * 0.5 * val;
      }
    }
  }
  Eigen::VectorXd r =
      dp.a_vector(u) - lambda * std::pow(lq, p - q) * rhs;
  const Eigen::VectorXd& m = dp.lumped_volume();
  r -= (r.dot(m) / m.squaredNorm()) * m;
  return r.norm() / std::max(dp.a_vector(u).norm(), 1e-30);
}

}  // namespace

EigenResult inverse_iteration(const DiscreteProblem& dp, const GridFunction& u0,
                              const SolverConfig& cfg) {
  if (dp.problem().q != 2.0)
    throw Error("UnsupportedQ", "inverse iteration requires q = 2");
  const double p = dp.problem().p;

  GridFunction phi = project_constraint(dp, u0, 2.0);
  const double y0 = dp.y_norm(phi);
  if (!(y0 > kTiny)) throw Error("ZeroFunction", "start function vanishes");
  phi.values /= y0;

  const Eigen::SparseMatrix<double> mass = dp.mass_matrix();

  // p = 2: the Picard coefficient is constant, factor once
  std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> lu_p2;
  const int nv = dp.num_vertices();
  if (p == 2.0) {
    const Eigen::SparseMatrix<double> k = dp.weighted_stiffness_p2();
    Eigen::SparseMatrix<double> aug(nv + 1, nv + 1);
    std::vector<Eigen::Triplet<double>> trip;
    for (int c = 0; c < k.outerSize(); ++c)
      for (Eigen::SparseMatrix<double>::InnerIterator it(k, c); it; ++it)
        trip.emplace_back(static_cast<int>(it.row()),
                          static_cast<int>(it.col()), it.value());
    for (int i = 0; i < nv; ++i) {
      trip.emplace_back(i, nv, dp.lumped_volume()[i]);
      trip.emplace_back(nv, i, dp.lumped_volume()[i]);
    }
    aug.setFromTriplets(trip.begin(), trip.end());
    lu_p2 = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
    lu_p2->compute(aug);
    if (lu_p2->info() != Eigen::Success)
      throw Error("SingularSystem", "stiffness factorization failed");
  }

  EigenResult result;
  double mu_prev = 0.0;
  for (int it = 0; it < cfg.max_iters; ++it) {
    GridFunction w = dp.make_function();
    if (p == 2.0) {
      Eigen::VectorXd ext = Eigen::VectorXd::Zero(nv + 1);
      ext.head(nv) = mass * phi.values;
      w.values = lu_p2->solve(ext).head(nv);
    } else {
      w = inner_solve(dp, phi, cfg);
    }

    const double wy = dp.y_norm(w);
    if (!(wy > 1e-14))
      throw Error("CollapsedIterate", "iterate collapsed in the Y norm");
    const double mu = std::pow(wy, 1.0 - p);

    phi = project_constraint(dp, w, 2.0);
    phi.values /= dp.y_norm(phi);

    result.mu_trace.push_back(mu);
    result.x_norm_trace.push_back(std::pow(dp.x_norm(phi), p));
    result.iterations = it + 1;

    if (it > 0 && std::abs(mu - mu_prev) < cfg.tol * std::abs(mu)) {
      result.lambda = mu;
      result.u = phi;
      result.residual = weak_residual(dp, phi, mu);
      result.constraint_residual =
          std::abs(dp.constraint_integral(phi, 0.0, 2.0));
      return result;
    }
    mu_prev = mu;
  }
  throw Error("MaxIterations", "inverse iteration did not converge");
}

EigenResult direct_eigensolve_p2(const DiscreteProblem& dp) {
  if (dp.problem().p != 2.0 || dp.problem().q != 2.0)
    throw Error("UnsupportedQ", "direct solve requires p = q = 2");
  const Eigen::MatrixXd k = Eigen::MatrixXd(dp.weighted_stiffness_p2());
  const Eigen::MatrixXd m = Eigen::MatrixXd(dp.mass_matrix());
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(k, m);
  if (solver.info() != Eigen::Success)
    throw Error("SingularMass", "generalized eigensolve failed");

  EigenResult result;
  result.lambda = solver.eigenvalues()[1];  // smallest is the Neumann zero mode
  GridFunction u = dp.make_function(solver.eigenvectors().col(1));
  u = project_constraint(dp, u, 2.0);
  u.values /= dp.y_norm(u);
  result.u = u;
  result.mu_trace = {result.lambda};
  result.x_norm_trace = {std::pow(dp.x_norm(u), 2.0)};
  result.iterations = 1;
  result.residual = weak_residual(dp, u, result.lambda);
  result.constraint_residual = std::abs(dp.constraint_integral(u, 0.0, 2.0));
  return result;
}

EigenResult rayleigh_descent(const DiscreteProblem& dp, const GridFunction& u0,
                             const SolverConfig& cfg) {
  const double p = dp.problem().p, q = dp.problem().q;
  GridFunction u = project_constraint(dp, u0, q);
  u.values /= dp.lq_norm(u, q);

  // H1-preconditioned descent: steps are smoothed through the augmented
  // zero-mean p=2 stiffness solve, factored once
  const int nv = dp.num_vertices();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  {
    const Eigen::SparseMatrix<double> k = dp.weighted_stiffness_p2();
    const Eigen::VectorXd& vol = dp.lumped_volume();
    std::vector<Eigen::Triplet<double>> trip;
    for (int c = 0; c < k.outerSize(); ++c)
      for (Eigen::SparseMatrix<double>::InnerIterator it(k, c); it; ++it)
        trip.emplace_back(static_cast<int>(it.row()),
                          static_cast<int>(it.col()), it.value());
    for (int i = 0; i < nv; ++i) {
      trip.emplace_back(i, nv, vol[i]);
      trip.emplace_back(nv, i, vol[i]);
    }
    Eigen::SparseMatrix<double> aug(nv + 1, nv + 1);
    aug.setFromTriplets(trip.begin(), trip.end());
    lu.compute(aug);
    if (lu.info() != Eigen::Success)
      throw Error("SingularSystem", "descent preconditioner factorization failed");
  }

  double value = rayleigh_quotient(dp, u);
  double step = 1.0;
  EigenResult result;

  for (int it = 0; it < cfg.max_iters; ++it) {
    // gradient of X(u)^p at lq_norm(u) = 1
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dp.num_vertices());
    {
      const GradedMesh& mesh = dp.mesh();
      for (int e = 0; e < dp.num_elements(); ++e) {
        const Tri& tr = mesh.triangles[e];
        const double w[3] = {u.values[tr[0]], u.values[tr[1]],
                             u.values[tr[2]]};
        const int pairs[3][2] = {{0, 1}, {1, 2}, {2, 0}};
        for (const auto& pr : pairs) {
          const double mval = 0.5 * (w[pr[0]] + w[pr[1]]);
          const double g = std::pow(std::abs(mval), q - 2.0) * mval;
          const double cell = dp.element_area(e) / 3.0;
          v[tr[pr[0]]] += cell * 0.5 * g;
          v[tr[pr[1]]] += cell * 0.5 * g;
        }
      }
    }
    const Eigen::VectorXd grad = p * (dp.a_vector(u) - value * v);
    Eigen::VectorXd ext = Eigen::VectorXd::Zero(nv + 1);
    ext.head(nv) = grad;
    const Eigen::VectorXd dir = -lu.solve(ext).head(nv);

    bool improved = false;
    for (int ls = 0; ls < 30; ++ls) {
      GridFunction trial = dp.make_function(u.values + step * dir);
      trial = project_constraint(dp, trial, q);
      const double lq = dp.lq_norm(trial, q);
      if (lq > kTiny) {
        trial.values /= lq;
        const double trial_value = rayleigh_quotient(dp, trial);
        if (trial_value < value) {
          const double drop = value - trial_value;
          u = std::move(trial);
          value = trial_value;
          improved = true;
          step *= 1.5;
          result.iterations = it + 1;
          if (drop < cfg.tol * std::max(value, 1e-30)) {
            result.lambda = value;
            result.u = u;
            result.mu_trace.push_back(value);
            result.residual = weak_residual(dp, u, value);
            result.constraint_residual =
                std::abs(dp.constraint_integral(u, 0.0, q));
            return result;
          }
          break;
        }
      }
      step *= 0.5;
    }
    result.mu_trace.push_back(value);
    if (!improved && step < 1e-18) break;
  }
  result.lambda = value;
  result.u = u;
  result.residual = weak_residual(dp, u, value);
  result.constraint_residual = std::abs(dp.constraint_integral(u, 0.0, q));
  return result;
}

double monotone_operator_check(const DiscreteProblem& dp, const GridFunction& u,
                               const GridFunction& v) {
  GridFunction d = dp.make_function(u.values - v.values);
  return (dp.a_vector(u) - dp.a_vector(v)).dot(d.values);
}

double gradient_check(const DiscreteProblem& dp, const GridFunction& u,
                      double h, unsigned seed) {
  if (!(h >= 1e-7 && h <= 1e-3))
    throw Error("BadStep", "finite-difference step must lie in [1e-7, 1e-3]");
  const double p = dp.problem().p;
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const Eigen::VectorXd au = dp.a_vector(u);

  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd delta(dp.num_vertices());
    for (int i = 0; i < delta.size(); ++i) delta[i] = unif(rng);
    delta /= delta.norm();

    const double analytic = au.dot(delta);
    GridFunction up = dp.make_function(u.values + h * delta);
    GridFunction um = dp.make_function(u.values - h * delta);
    const double fd = (std::pow(dp.x_norm(up), p) - std::pow(dp.x_norm(um), p)) /
                      (2.0 * h * p);
    const double scale =
        std::max({std::abs(analytic), std::abs(fd), 1e-12});
    worst = std::max(worst, std::abs(analytic - fd) / scale);
  }
  return worst;
}

GridFunction random_function(const DiscreteProblem& dp, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  GridFunction f = dp.make_function();
  for (int i = 0; i < f.values.size(); ++i) f.values[i] = unif(rng);
  return f;
}

}  // namespace cusp
