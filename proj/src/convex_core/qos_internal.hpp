#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "cran/convex_core.hpp"
#include "interior_point.hpp"

namespace cran::detail {

/// Instance with gains divided by sigma, so the noise power is 1 and
/// powers keep their physical unit (W).
struct NormalizedQos {
  int num_bs = 0;
  int num_users = 0;
  Eigen::MatrixXcd h;
  Eigen::VectorXd gamma;
  Eigen::VectorXd caps;
  BoolMatrix allowed;
  std::vector<std::vector<int>> support;  ///< allowed BSs per user

  explicit NormalizedQos(const QosInstance& inst);
};

/// Quadratic-plus-log objective shared by both subproblems:
/// sum weights_lk |w_lk|^2 + sum_l (psi_l q_l^2 - kappa_l ln q_l).
struct QosObjective {
  Eigen::MatrixXd weights;  ///< L x K
  bool has_q = false;
  Eigen::VectorXd psi;
  Eigen::VectorXd kappa;
};

double objective_value(const QosObjective& obj, const Eigen::MatrixXcd& w, const Eigen::VectorXd& q);

/// sum_l |h'_lk|^2 q_l^2 per user.
Eigen::VectorXd quantization_interference(const NormalizedQos& qos, const Eigen::VectorXd& q);

struct FixedPointResult {
  bool converged = false;
  bool certified_infeasible = false;
  int iterations = 0;
  Eigen::VectorXd beta;
  Eigen::MatrixXcd directions;  ///< unit-norm columns, zero outside the mask
};

/// Fixed point of the SINR multipliers for min sum D_lk |w_lk|^2 without caps.
/// `infeasible_bound` is an upper bound on the capped optimum; exceeding it
/// certifies infeasibility.
FixedPointResult dual_fixed_point(const NormalizedQos& qos, const Eigen::MatrixXd& weights,
                                  double infeasible_bound, int max_iters, double tol);

/// Powers meeting every SINR target with equality for fixed unit directions.
std::optional<Eigen::VectorXd> tight_powers(const NormalizedQos& qos, const Eigen::MatrixXcd& directions,
                                            const Eigen::VectorXd& extra_noise);

/// Rotates each column so that h_k^H w_k is real and nonnegative.
void normalize_phases(const Eigen::MatrixXcd& h, Eigen::MatrixXcd& w);

/// Barrier-form program over (Re w, Im w, q[, s]) for the interior-point method.
class QosProgram : public SmoothConvexProgram {
 public:
  enum class Mode { Optimize, Feasibility };

  QosProgram(const NormalizedQos& qos, const QosObjective& obj, Mode mode);

  int num_vars() const override { return n_; }
  int num_constraints() const override { return m_; }
  bool in_domain(const Eigen::VectorXd& x) const override;
  double objective(const Eigen::VectorXd& x) const override;
  void objective_derivatives(const Eigen::VectorXd& x, Eigen::VectorXd& grad,
                             Eigen::MatrixXd* hess) const override;
  void constraint_values(const Eigen::VectorXd& x, Eigen::VectorXd& f) const override;
  void constraint_jacobian(const Eigen::VectorXd& x, Eigen::MatrixXd& jac) const override;
  void add_constraint_curvature(const Eigen::VectorXd& x, const Eigen::VectorXd& lambda,
                                Eigen::MatrixXd& hess) const override;

  Eigen::VectorXd pack(const Eigen::MatrixXcd& w, const Eigen::VectorXd& q, double s = 0.0) const;
  Eigen::MatrixXcd unpack_w(const Eigen::VectorXd& x) const;
  Eigen::VectorXd unpack_q(const Eigen::VectorXd& x) const;
  double slack(const Eigen::VectorXd& x) const { return x[n_ - 1]; }
  /// Largest normalized constraint value at (w, q).
  double max_violation(const Eigen::MatrixXcd& w, const Eigen::VectorXd& q) const;

 private:
  struct Cross {
    Eigen::MatrixXcd z;     ///< z(k, j) = h'_k^H w_j
    Eigen::VectorXd norm;   ///< norm of the interference-plus-noise vector of user k
  };
  Cross cross_terms(const Eigen::VectorXd& x) const;
  int var(int user, int slot) const { return offset_[user] + 2 * slot; }

  const NormalizedQos& qos_;
  const QosObjective& obj_;
  Mode mode_;
  bool has_q_;
  std::vector<int> offset_;
  int n_w_ = 0;
  int q_off_ = 0;
  int n_ = 0;
  int m_ = 0;
  Eigen::VectorXd sqrt_gamma_;
};

}  // namespace cran::detail
