#include "interior_point.hpp"

#include <algorithm>
#include <cmath>

namespace cran::detail {
namespace {

struct ResidualState {
  Eigen::VectorXd f;
  Eigen::MatrixXd jac;
  Eigen::VectorXd grad;
};

bool strictly_feasible(const SmoothConvexProgram& p, const Eigen::VectorXd& x, Eigen::VectorXd& f) {
  if (!p.in_domain(x)) return false;
  p.constraint_values(x, f);
  return f.allFinite() && (f.array() < 0.0).all();
}

double residual_norm(const SmoothConvexProgram& p, const Eigen::VectorXd& x,
                     const Eigen::VectorXd& lambda, double t, ResidualState& st) {
  p.constraint_jacobian(x, st.jac);
  st.grad.setZero(p.num_vars());
  p.objective_derivatives(x, st.grad, nullptr);
  const Eigen::VectorXd r_dual = st.grad + st.jac.transpose() * lambda;
  const Eigen::VectorXd r_cent = -(lambda.array() * st.f.array()).matrix() -
                                 Eigen::VectorXd::Constant(lambda.size(), 1.0 / t);
  return std::sqrt(r_dual.squaredNorm() + r_cent.squaredNorm());
}

bool solve_newton(Eigen::MatrixXd& h, const Eigen::VectorXd& rhs, Eigen::VectorXd& dx) {
  Eigen::LLT<Eigen::MatrixXd> llt(h);
  if (llt.info() == Eigen::Success) {
    dx = llt.solve(rhs);
    if (dx.allFinite()) return true;
  }
  const double base = std::max(1e-300, h.diagonal().cwiseAbs().maxCoeff());
  for (double reg = 1e-14; reg <= 1e-4; reg *= 100.0) {
    Eigen::MatrixXd hr = h;
    hr.diagonal().array() += reg * base;
    Eigen::LLT<Eigen::MatrixXd> l2(hr);
    if (l2.info() != Eigen::Success) continue;
    dx = l2.solve(rhs);
    if (dx.allFinite()) return true;
  }
  return false;
}

}  // namespace

IpmResult primal_dual_interior_point(const SmoothConvexProgram& program, const Eigen::VectorXd& x0,
                                     const IpmOptions& opts) {
  const int n = program.num_vars();
  const int m = program.num_constraints();
  IpmResult res;
  res.x = x0;

  Eigen::VectorXd f(m);
  if (!strictly_feasible(program, res.x, f)) {
    res.status = IpmStatus::Stalled;
    return res;
  }
  double f0 = program.objective(res.x);
  res.lambda = (std::max(1.0, std::abs(f0)) / m) * (-f.array()).inverse().matrix();

  Eigen::MatrixXd jac(m, n);
  Eigen::VectorXd grad(n);
  Eigen::MatrixXd hess(n, n);
  Eigen::VectorXd dx(n);
  ResidualState trial;
  trial.f.resize(m);

  for (int it = 0; it < opts.max_iters; ++it) {
    res.iterations = it;
    program.constraint_jacobian(res.x, jac);
    grad.setZero();
    hess.setZero();
    program.objective_derivatives(res.x, grad, &hess);
    const Eigen::VectorXd r_dual = grad + jac.transpose() * res.lambda;
    const double gap = -f.dot(res.lambda);
    const double scale = std::max({1.0, grad.lpNorm<Eigen::Infinity>(),
                                   (jac.transpose() * res.lambda).lpNorm<Eigen::Infinity>()});
    res.gap = gap;
    res.dual_residual = r_dual.lpNorm<Eigen::Infinity>() / scale;
    res.objective = f0;
    if (gap <= std::max(opts.gap_tol_abs, opts.gap_tol_rel * std::max(1.0, std::abs(f0))) &&
        res.dual_residual <= opts.feas_tol) {
      res.status = IpmStatus::Converged;
      return res;
    }

    const double t = opts.mu * m / gap;
    program.add_constraint_curvature(res.x, res.lambda, hess);
    const Eigen::VectorXd w = res.lambda.array() / (-f.array());
    hess.noalias() += jac.transpose() * w.asDiagonal() * jac;
    const Eigen::VectorXd inv_f = (-f.array()).inverse().matrix() / t;
    const Eigen::VectorXd rhs = -(grad + jac.transpose() * inv_f);
    if (!solve_newton(hess, rhs, dx)) {
      res.status = IpmStatus::Stalled;
      return res;
    }
    const Eigen::VectorXd jdx = jac * dx;
    Eigen::VectorXd dlambda(m);
    for (int i = 0; i < m; ++i)
      dlambda[i] = -res.lambda[i] - (1.0 / t + res.lambda[i] * jdx[i]) / f[i];

    double s_max = 1.0;
    for (int i = 0; i < m; ++i)
      if (dlambda[i] < 0.0) s_max = std::min(s_max, -res.lambda[i] / dlambda[i]);
    double s = 0.99 * s_max;

    Eigen::VectorXd x_new = res.x + s * dx;
    while (!strictly_feasible(program, x_new, trial.f)) {
      s *= opts.backtrack;
      if (s < 1e-16) {
        res.status = IpmStatus::Stalled;
        return res;
      }
      x_new = res.x + s * dx;
    }

    ResidualState cur;
    cur.f = f;
    const double r0 = residual_norm(program, res.x, res.lambda, t, cur);
    Eigen::VectorXd lambda_new = res.lambda + s * dlambda;
    while (true) {
      const double r1 = residual_norm(program, x_new, lambda_new, t, trial);
      if (r1 <= (1.0 - opts.armijo * s) * r0) break;
      s *= opts.backtrack;
      if (s < 1e-16) {
        res.status = IpmStatus::Stalled;
        return res;
      }
      x_new = res.x + s * dx;
      lambda_new = res.lambda + s * dlambda;
      strictly_feasible(program, x_new, trial.f);
    }

    res.x = x_new;
    res.lambda = lambda_new;
    f = trial.f;
    f0 = program.objective(res.x);
    res.objective = f0;
    if (opts.early_stop && opts.early_stop(res.x)) {
      res.status = IpmStatus::EarlyStop;
      res.iterations = it + 1;
      return res;
    }
  }
  res.status = IpmStatus::MaxIterations;
  return res;
}

}  // namespace cran::detail
