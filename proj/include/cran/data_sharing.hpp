#pragma once

#include <vector>

#include "cran/mm_common.hpp"

namespace cran {

struct DsWeights {
  Eigen::VectorXd mu;  ///< BS activation weights
  Eigen::MatrixXd nu;  ///< per-link cluster weights
};

struct ClusterExtraction {
  std::vector<std::vector<int>> clusters;  ///< serving BSs per user, ascending
  ActivityVector activity;
};

struct DsResult {
  SolveStatus status = SolveStatus::NumericalFailure;
  Eigen::MatrixXcd beamformers;
  std::vector<std::vector<int>> clusters;
  ActivityVector activity;
  std::vector<double> backhaul_rates_mbps;
  PowerBreakdown power;
  MmTrace trace;
  int iterations = 0;
  bool converged = false;
  std::vector<Eigen::MatrixXcd> iterates;
  std::string message;

  bool ok() const { return status == SolveStatus::Optimal; }
};

DsWeights update_ds_weights(const Eigen::MatrixXcd& beamformers, const SimulationParams& params);

/// alpha_lk = eta + mu_l P_delta + rho nu_lk r_k.
Eigen::MatrixXd ds_surrogate_weights(const DsWeights& weights, const Eigen::VectorXd& rates_mbps,
                                     const SimulationParams& params);

/// Log-smoothed network power (sleep constant excluded).
double smoothed_ds_objective(const Eigen::MatrixXcd& beamformers, const SimulationParams& params,
                             const Eigen::VectorXd& rates_mbps);

/// Concave-log linearization of the smoothed objective around `expansion`.
double ds_majorizer(const Eigen::MatrixXcd& beamformers, const Eigen::MatrixXcd& expansion,
                    const SimulationParams& params, const Eigen::VectorXd& rates_mbps);

ClusterExtraction extract_clusters(const Eigen::MatrixXcd& beamformers, double eps_cluster,
                                   double eps_active = kDefaultEpsActive);

/// Backhaul load per BS: the summed rates of the users it serves.
std::vector<double> ds_backhaul_rates(const std::vector<std::vector<int>>& clusters,
                                      const Eigen::VectorXd& rates_mbps, int num_bs);

/// Reweighted-l1 MM for the data-sharing strategy.
DsResult run_algorithm1(const ChannelRealization& channel, const Eigen::VectorXd& rates_mbps,
                        const SimulationParams& params, const MmOptions& opts = MmOptions::data_sharing());

}  // namespace cran
