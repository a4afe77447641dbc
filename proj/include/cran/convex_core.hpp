#pragma once

#include <Eigen/Dense>
#include <string>

#include "cran/net_model.hpp"
#include "json.hpp"

namespace cran {

enum class SolveStatus { Optimal, Infeasible, NumericalFailure };

const char* to_string(SolveStatus status);

/// Which algorithm produced (or should produce) a subproblem solution.
///
/// Auto tries the Lagrangian fixed point first and certifies it through the
/// duality gap; when a power cap binds, or the iteration does not settle, it
/// falls back to the primal-dual interior-point method.
enum class SolverBackend { Auto, DualFixedPoint, InteriorPoint };

const char* to_string(SolverBackend backend);

/// SINR-constrained transmit problem over a fixed set of cooperating BSs.
struct QosInstance {
  Eigen::MatrixXcd gains;       ///< L x K, raw linear amplitudes
  double noise_power_w = 0.0;   ///< sigma^2
  Eigen::VectorXd sinr_targets; ///< gamma_k, linear
  Eigen::VectorXd power_caps;   ///< P_l in W
  BoolMatrix allowed;           ///< w_lk forced to 0 where false

  int num_bs() const { return static_cast<int>(gains.rows()); }
  int num_users() const { return static_cast<int>(gains.cols()); }
  void validate() const;
};

struct SolverOptions {
  SolverBackend backend = SolverBackend::Auto;
  int max_fixed_point_iters = 20000;
  double fixed_point_tol = 1e-13;
  int max_ipm_iters = 400;
  double gap_tol = 1e-10;
  double feas_tol = 1e-9;
  /// Phase-I violation (normalized units) above which the problem is infeasible.
  double infeasibility_threshold = 1e-6;
};

struct SolverSolution {
  Eigen::MatrixXcd beamformers;  ///< L x K, W
  Eigen::VectorXd quant_noise;   ///< q_l (std. deviation, sqrt(W)); zeros for data sharing
  SolveStatus status = SolveStatus::NumericalFailure;
  double objective = 0.0;
  Eigen::VectorXd achieved_sinr;
  SolverBackend backend_used = SolverBackend::Auto;
  int iterations = 0;
  double duality_gap = 0.0;
  std::string message;

  bool ok() const { return status == SolveStatus::Optimal; }
};

/// SINR_k = |h_k^H w_k|^2 / (sum_{j != k} |h_k^H w_j|^2 + sum_l |h_lk|^2 q_l^2 + sigma^2).
Eigen::VectorXd compute_sinr(const Eigen::MatrixXcd& gains, const Eigen::MatrixXcd& beamformers,
                             const Eigen::VectorXd& quant_noise, double noise_power_w);

/// min sum alpha_lk |w_lk|^2  s.t. SINR_k >= gamma_k, sum_k |w_lk|^2 <= P_l.
SolverSolution solve_weighted_power_min(const QosInstance& inst, const Eigen::MatrixXd& weights,
                                        const SolverOptions& opts = {});

/// min sum phi_l |w_lk|^2 + sum_l (psi_l q_l^2 - 2 rho_l log2 q_l)
/// s.t. SINR_k (with quantization noise) >= gamma_k, sum_k |w_lk|^2 + q_l^2 <= P_l.
SolverSolution solve_compression_subproblem(const QosInstance& inst, const Eigen::VectorXd& phi,
                                            const Eigen::VectorXd& psi, const Eigen::VectorXd& rho,
                                            const SolverOptions& opts = {});

/// Value of the compression subproblem objective at (W, q).
double compression_subproblem_objective(const Eigen::MatrixXcd& beamformers, const Eigen::VectorXd& q,
                                        const Eigen::VectorXd& phi, const Eigen::VectorXd& psi,
                                        const Eigen::VectorXd& rho);

/// Conic description of the weighted power problem in normalized units.
///
/// Schema: {"normalization": {"noise_power_w"}, "variables": [{"name", "bs", "user"}],
/// "objective": {"quadratic": [{"var", "coeff"}], "neg_log": [{"var", "coeff"}]},
/// "cones": [{"type": "soc", "user", "norm_terms": [...], "rhs": {...}}],
/// "quadratic_constraints": [{"bs", "vars", "cap"}]}.
nlohmann::json conic_problem_json(const QosInstance& inst, const Eigen::MatrixXd& weights);

/// Same schema for the compression subproblem; adds q variables and log terms.
nlohmann::json conic_problem_json(const QosInstance& inst, const Eigen::VectorXd& phi,
                                  const Eigen::VectorXd& psi, const Eigen::VectorXd& rho);

}  // namespace cran
