#pragma once

#include <vector>

#include "cran/mm_common.hpp"

namespace cran {

struct CompWeights {
  Eigen::VectorXd beta;    ///< BS activation weights
  Eigen::VectorXd lambda;  ///< expansion points of the backhaul log term
};

struct CompCoeffs {
  Eigen::VectorXd phi;  ///< weight on |w_lk|^2
  Eigen::VectorXd psi;  ///< weight on q_l^2
  Eigen::VectorXd rho;  ///< backhaul cost in W per bit/s/Hz
};

struct CompResult {
  SolveStatus status = SolveStatus::NumericalFailure;
  Eigen::MatrixXcd beamformers;
  Eigen::VectorXd quant_noise;  ///< q_l, standard deviation in sqrt(W)
  std::vector<double> backhaul_rates_mbps;
  ActivityVector activity;
  PowerBreakdown power;
  MmTrace trace;
  int iterations = 0;
  bool converged = false;
  std::vector<Eigen::MatrixXcd> iterates;
  std::vector<Eigen::VectorXd> quant_iterates;
  std::string message;

  bool ok() const { return status == SolveStatus::Optimal; }
};

/// Fronthaul rate per BS in Mbps: log2(1 + Gamma_q sum_k |w_lk|^2 / q_l^2) * B_MHz.
std::vector<double> compression_backhaul_rate(const Eigen::MatrixXcd& beamformers, const Eigen::VectorXd& q,
                                              const SimulationParams& params);

/// beta_l = f(sum_k |w_lk|^2 + q_l^2, tau3), lambda_l = q_l^2 + Gamma_q sum_k |w_lk|^2.
CompWeights update_comp_weights(const Eigen::MatrixXcd& beamformers, const Eigen::VectorXd& q,
                                const SimulationParams& params);

CompCoeffs comp_surrogate_coeffs(const CompWeights& weights, const SimulationParams& params);

/// Log-smoothed network power for the compression strategy (sleep constant excluded).
double smoothed_comp_objective(const Eigen::MatrixXcd& beamformers, const Eigen::VectorXd& q,
                               const SimulationParams& params);

/// Upper bound of the smoothed objective, tight at (w0, q0).
double comp_majorizer(const Eigen::MatrixXcd& beamformers, const Eigen::VectorXd& q, const Eigen::MatrixXcd& w0,
                      const Eigen::VectorXd& q0, const SimulationParams& params);

/// Feasible starting point (W, q) with q > 0 everywhere.
struct CompInit {
  SolveStatus status = SolveStatus::NumericalFailure;
  Eigen::MatrixXcd beamformers;
  Eigen::VectorXd quant_noise;
  std::string message;
};
CompInit compression_init(const QosInstance& inst, const SimulationParams& params, const SolverOptions& opts);

/// Reweighted-l1 plus successive convex approximation for the compression strategy.
CompResult run_algorithm2(const ChannelRealization& channel, const Eigen::VectorXd& rates_mbps,
                          const SimulationParams& params, const MmOptions& opts = MmOptions::compression());

}  // namespace cran
