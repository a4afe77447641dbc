#pragma once

#include <vector>

#include "cran/data_sharing.hpp"

namespace cran {

struct Association {
  std::vector<int> bs_of_user;
};

/// Greedy one-to-one association: users in descending order of their best gain
/// each take their strongest unclaimed BS. Requires K <= L.
Association single_bs_assign(const ChannelRealization& channel);

/// Minimal powers for a fixed one-BS-per-user association by the standard
/// interference-function iteration, with per-BS caps.
SolverSolution single_bs_power_control(const ChannelRealization& channel, const Association& assoc,
                                       const Eigen::VectorXd& sinr_targets, const SimulationParams& params);

struct SingleBsResult {
  SolveStatus status = SolveStatus::NumericalFailure;
  Association association;
  Eigen::MatrixXcd beamformers;
  ActivityVector activity;
  std::vector<double> backhaul_rates_mbps;
  PowerBreakdown power;
  int iterations = 0;
  std::string message;

  bool ok() const { return status == SolveStatus::Optimal; }
};

/// Single-BS association scheme end to end. With `bill_backhaul` each serving BS
/// carries its user's rate on the backhaul.
SingleBsResult run_single_bs(const ChannelRealization& channel, const Eigen::VectorXd& rates_mbps,
                             const SimulationParams& params, bool bill_backhaul = true,
                             double eps_active = kDefaultEpsActive);

/// Users served jointly by every BS of their own cell; all BSs count as active.
DsResult per_cell_comp(const ChannelRealization& channel, const Eigen::VectorXd& rates_mbps,
                       const SimulationParams& params, const SolverOptions& opts = {});

}  // namespace cran
