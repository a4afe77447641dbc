#pragma once

#include <Eigen/Dense>
#include <functional>

namespace cran::detail {

/// min f0(x) s.t. f_i(x) <= 0 with f0, f_i twice differentiable and convex.
class SmoothConvexProgram {
 public:
  virtual ~SmoothConvexProgram() = default;
  virtual int num_vars() const = 0;
  virtual int num_constraints() const = 0;
  virtual bool in_domain(const Eigen::VectorXd& x) const = 0;
  virtual double objective(const Eigen::VectorXd& x) const = 0;
  /// Writes the gradient and, when `hess` is given, adds the objective Hessian into it.
  virtual void objective_derivatives(const Eigen::VectorXd& x, Eigen::VectorXd& grad,
                                     Eigen::MatrixXd* hess) const = 0;
  virtual void constraint_values(const Eigen::VectorXd& x, Eigen::VectorXd& f) const = 0;
  /// Rows are constraint gradients.
  virtual void constraint_jacobian(const Eigen::VectorXd& x, Eigen::MatrixXd& jac) const = 0;
  /// hess += sum_i lambda_i * Hessian(f_i).
  virtual void add_constraint_curvature(const Eigen::VectorXd& x, const Eigen::VectorXd& lambda,
                                        Eigen::MatrixXd& hess) const = 0;
};

struct IpmOptions {
  int max_iters = 400;
  double mu = 10.0;
  double gap_tol_rel = 1e-10;
  double gap_tol_abs = 1e-13;
  double feas_tol = 1e-9;
  double armijo = 0.01;
  double backtrack = 0.5;
  /// Checked after every accepted step; returning true ends the solve.
  std::function<bool(const Eigen::VectorXd&)> early_stop;
};

enum class IpmStatus { Converged, EarlyStop, Stalled, MaxIterations };

struct IpmResult {
  IpmStatus status = IpmStatus::MaxIterations;
  Eigen::VectorXd x;
  Eigen::VectorXd lambda;
  double objective = 0.0;
  double gap = 0.0;
  double dual_residual = 0.0;
  int iterations = 0;
};

/// Primal-dual interior-point method; `x0` must be strictly feasible.
IpmResult primal_dual_interior_point(const SmoothConvexProgram& program, const Eigen::VectorXd& x0,
                                     const IpmOptions& opts);

}  // namespace cran::detail
