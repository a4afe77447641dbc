#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "cran/convex_core.hpp"
#include "cran/power_model.hpp"

namespace cran {

struct MmOptions {
  int max_iter = 100;
  double conv_tol = 1e-5;
  /// Candidate cluster size L_c; 0 means every BS.
  int candidate_size = 0;
  double eps_active = kDefaultEpsActive;
  double eps_cluster = 1e-8;
  /// Keep every iterate in the result (used by certificate checks).
  bool record_iterates = false;
  SolverOptions solver;

  static MmOptions data_sharing() { return {}; }
  static MmOptions compression() {
    MmOptions o;
    o.max_iter = 150;
    return o;
  }
};

struct MmTraceRow {
  int iter = 0;
  double surrogate = 0.0;
  double smoothed = 0.0;
  double true_power = 0.0;
  int n_active = 0;
  int max_cluster = 0;
  double q_min = std::numeric_limits<double>::quiet_NaN();
  double q_max = std::numeric_limits<double>::quiet_NaN();
  double backhaul_total_mbps = std::numeric_limits<double>::quiet_NaN();
};

struct MmTrace {
  std::vector<MmTraceRow> rows;
  bool compression_columns = false;

  std::string csv_header() const;
  std::string csv() const;
};

/// Mask of the L_c strongest BSs per user (all BSs when candidate_size is 0 or >= L).
BoolMatrix mm_candidate_mask(const ChannelRealization& channel, int candidate_size);

/// Instance with per-user SINR targets derived from rate targets (Mbps).
QosInstance make_qos_instance(const ChannelRealization& channel, const Eigen::VectorXd& rates_mbps,
                              const SimulationParams& params, const BoolMatrix& mask);

/// gamma = Gamma_m * (2^(rate / B_MHz) - 1).
double rate_to_sinr_target(double rate_mbps, const SimulationParams& params);

/// f(x, tau) = 1 / ((x + tau) ln(1 + 1/tau)).
double reweight(double x, double tau);

}  // namespace cran
