#pragma once

#include <string>
#include <vector>

#include "cran/params.hpp"

namespace cran {

inline constexpr double kDefaultEpsActive = 1e-6;

struct ActivityVector {
  std::vector<bool> active;
  double threshold_used = kDefaultEpsActive;

  int count() const;
};

/// Network power split into its additive parts (all in W).
///
/// total = tx_w + activation_w + backhaul_w + sleep_w, where tx_w is the
/// eta-scaled radiated power and activation_w = (P_active - P_sleep) per
/// active BS.
struct PowerBreakdown {
  std::vector<double> per_bs_transmit;    ///< radiated power P_tx,l
  std::vector<double> per_bs_activation;  ///< P_delta or 0
  std::vector<double> per_bs_backhaul;    ///< rho * R_l
  ActivityVector activity;
  double sleep_constant = 0.0;
  double tx_w = 0.0;
  double activation_w = 0.0;
  double backhaul_w = 0.0;
  double total = 0.0;

  int n_active_bs() const { return activity.count(); }
  /// Everything except backhaul.
  double bs_power_w() const { return tx_w + activation_w + sleep_constant; }

  static std::string csv_header();
  std::string csv_row() const;
};

/// Piecewise-linear BS consumption: eta * p + P_active when transmitting, else P_sleep.
double bs_power(double p_tx_w, const SimulationParams& params, double eps_active = kDefaultEpsActive);

/// Linear backhaul consumption; rates beyond capacity are billed and logged.
double backhaul_power(double rate_mbps, const SimulationParams& params);

ActivityVector activity_from_tx(const std::vector<double>& tx_w, double eps_active);

PowerBreakdown total_power(const std::vector<double>& tx_w, const std::vector<double>& backhaul_mbps,
                           const SimulationParams& params, double eps_active = kDefaultEpsActive);

/// Same decomposition with activity imposed by the caller.
PowerBreakdown total_power(const std::vector<double>& tx_w, const std::vector<double>& backhaul_mbps,
                           const SimulationParams& params, const ActivityVector& activity);

std::string format_double(double v);

enum class LogLevel { Debug, Info, Warn, Error, Off };

/// Global threshold for library diagnostics (capacity warnings, solver fallbacks).
void set_log_level(LogLevel level);

}  // namespace cran
