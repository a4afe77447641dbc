#pragma once

#include <stdexcept>
#include <string>

namespace cran {

/// Raised for invalid parameter sets, topologies and experiment configs.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a function is called outside its mathematical domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Physical and algorithmic constants of the simulated network.
///
/// Defaults reproduce the reference setup: 10 MHz, 20 W RRHs drawing
/// 84 W active / 56 W asleep, 100 Mbps backhaul links costing at most 50 W.
struct SimulationParams {
  double bandwidth_hz = 10e6;
  double max_tx_power_w = 20.0;
  double active_power_w = 84.0;
  double sleep_power_w = 56.0;
  double eta = 2.8;
  double backhaul_capacity_mbps = 100.0;
  double backhaul_max_power_w = 50.0;
  double antenna_gain_db = 15.0;
  // Effective PSD with out-of-cell interference folded in; the thermal
  // floor alone would be kThermalNoisePsdDbmHz.
  double noise_psd_dbm_hz = -150.0;
  double pathloss_intercept_db = 128.1;
  double pathloss_slope = 37.6;
  double shadowing_std_db = 8.0;
  bool rayleigh_fading = true;
  double user_exclusion_radius_km = 0.01;
  double gamma_m_db = 0.0;
  double gamma_q_db = 4.3;
  double tau1 = 1e-5;
  double tau2 = 1e-8;
  double tau3 = 1e-5;

  static constexpr double kThermalNoisePsdDbmHz = -169.0;

  /// Throws ConfigError when an invariant is violated.
  void validate() const;

  double bandwidth_mhz() const { return bandwidth_hz * 1e-6; }
  /// P_active - P_sleep.
  double delta_power_w() const { return active_power_w - sleep_power_w; }
  /// Backhaul cost per Mbps.
  double rho_w_per_mbps() const { return backhaul_max_power_w / backhaul_capacity_mbps; }
  /// Backhaul cost per bit/s/Hz of fronthaul spectral rate.
  double rho_w_per_spectral() const { return rho_w_per_mbps() * bandwidth_mhz(); }
  double gamma_m() const;
  double gamma_q() const;
  /// Noise power over the whole band in watts.
  double noise_power_w() const;
};

double db_to_linear(double db);

}  // namespace cran
