#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <vector>

#include "cusp/mesh.hpp"
#include "cusp/param_core.hpp"

namespace cusp {

// Nodal coefficients of a continuous piecewise-linear function on a mesh.
struct GridFunction {
  const GradedMesh* mesh = nullptr;
  Eigen::VectorXd values;
};

struct SolverConfig {
  double tol = 1e-12;       // relative mu change
  double weak_tol = 1e-6;   // weak-form defect of the returned pair
  double kkt_tol = 1e-7;    // first-order optimality of the inner solve
  int max_iters = 500;
  int inner_max_iters = 200;
  double eps_min = 1e-12;   // Picard regularization floor
  double eps_rho = 0.5;
  unsigned seed = 12345;
};

struct EigenResult {
  double lambda = 0.0;
  GridFunction u;
  std::vector<double> mu_trace;
  std::vector<double> x_norm_trace;  // ||phi_{n+1}||_X^p
  int iterations = 0;
  double residual = 0.0;             // weak-form defect, dual nodal norm
  double constraint_residual = 0.0;
};

// Assembled discretization of the weighted eigenproblem on a graded mesh:
// P1 elements, |x|^alpha sampled at interior quadrature points.
class DiscreteProblem {
 public:
  DiscreteProblem(const GradedMesh& mesh, const ValidatedProblem& problem);

  const GradedMesh& mesh() const { return *mesh_; }
  const ValidatedProblem& problem() const { return problem_; }
  int num_vertices() const { return static_cast<int>(mesh_->vertices.size()); }

  GridFunction make_function() const;
  GridFunction make_function(const Eigen::VectorXd& values) const;

  // ||u||_X = (int |grad u|^p |x|^alpha)^{1/p}
  double x_norm(const GridFunction& u) const;
  // ||u||_{L_q(Omega)} (unweighted), q from the problem or explicit
  double lq_norm(const GridFunction& u, double q) const;
  double y_norm(const GridFunction& u) const { return lq_norm(u, 2.0); }

  // <A u, v> = int |grad u|^{p-2} grad u . grad v |x|^alpha
  double apply_A(const GridFunction& u, const GridFunction& v) const;
  // <B u, v> = int u v
  double apply_B(const GridFunction& u, const GridFunction& v) const;

  // Nodal vector of <A u, phi_i>.
  Eigen::VectorXd a_vector(const GridFunction& u) const;

  Eigen::SparseMatrix<double> weighted_stiffness_p2() const;
  Eigen::SparseMatrix<double> mass_matrix() const;
  const Eigen::VectorXd& lumped_volume() const { return node_volume_; }

  // int |u - c|^{q-2}(u - c) dx for the constraint root finder.
  double constraint_integral(const GridFunction& u, double c, double q) const;
  // d/dc of the above (Newton step).
  double constraint_derivative(const GridFunction& u, double c, double q) const;

  // Stiffness with a per-element scalar multiplier (Picard coefficient).
  Eigen::SparseMatrix<double> coefficient_stiffness(
      const Eigen::VectorXd& element_coeff) const;

  // Regularized Hessian of (1/p)||w||_X^p: per element
  // (|grad w|^2+eps)^{(p-2)/2} (I + (p-2) P_{grad w} |grad w|^2/(|grad w|^2+eps));
  // positive definite on the zero-mean space for every p > 1.
  Eigen::SparseMatrix<double> energy_hessian(const GridFunction& w,
                                             double eps) const;

  // Per-element |grad u|^2.
  Eigen::VectorXd element_grad_sq(const GridFunction& u) const;

  int num_elements() const { return static_cast<int>(mesh_->triangles.size()); }
  double element_weight(int e) const { return elem_weight_[e]; }
  double element_area(int e) const { return elem_area_[e]; }

 private:
  const GradedMesh* mesh_;
  ValidatedProblem problem_;
  // per element: basis gradients, area, weight integral int_e |x|^alpha
  std::vector<std::array<double, 6>> elem_grad_;  // (gx, gy) x 3 basis fns
  std::vector<double> elem_area_;
  std::vector<double> elem_weight_;
  Eigen::VectorXd node_volume_;  // int phi_i dx
};

// u - c with int |u-c|^{q-2}(u-c) = 0, solved by bisection on c.
GridFunction project_constraint(const DiscreteProblem& dp,
                                const GridFunction& u, double q);

double rayleigh_quotient(const DiscreteProblem& dp, const GridFunction& u);

// Minimizes J(w) = (1/p)||w||_X^p - <B rhs, w> over the zero-mean nodal
// space; regularized Picard with line search.
GridFunction inner_solve(const DiscreteProblem& dp, const GridFunction& rhs,
                         const SolverConfig& cfg);

// Ercole-style inverse iteration, q = 2.
EigenResult inverse_iteration(const DiscreteProblem& dp, const GridFunction& u0,
                              const SolverConfig& cfg);

// Dense generalized symmetric eigensolve; p = q = 2 oracle.
EigenResult direct_eigensolve_p2(const DiscreteProblem& dp);

// Best-effort projected Rayleigh descent for q != 2.
EigenResult rayleigh_descent(const DiscreteProblem& dp, const GridFunction& u0,
                             const SolverConfig& cfg);

// <A u - A v, u - v>; nonnegative up to rounding.
double monotone_operator_check(const DiscreteProblem& dp, const GridFunction& u,
                               const GridFunction& v);

// Max relative error between <A u, delta> and central differences of the
// energy over random nodal directions.
double gradient_check(const DiscreteProblem& dp, const GridFunction& u,
                      double h, unsigned seed = 777);

// Deterministic pseudo-random nodal function (for tests and starts).
GridFunction random_function(const DiscreteProblem& dp, unsigned seed);

}  // namespace cusp
