#include "cran/params.hpp"

#include <cmath>

namespace cran {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double SimulationParams::gamma_m() const { return db_to_linear(gamma_m_db); }
double SimulationParams::gamma_q() const { return db_to_linear(gamma_q_db); }

double SimulationParams::noise_power_w() const {
  return std::pow(10.0, (noise_psd_dbm_hz - 30.0) / 10.0) * bandwidth_hz;
}

void SimulationParams::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("invalid parameter: ") + what);
  };
  auto finite = [](double v) { return std::isfinite(v); };
  require(finite(bandwidth_hz) && bandwidth_hz > 0, "bandwidth_hz must be > 0");
  require(finite(max_tx_power_w) && max_tx_power_w > 0, "max_tx_power_w must be > 0");
  require(finite(sleep_power_w) && sleep_power_w > 0, "sleep_power_w must be > 0");
  require(finite(active_power_w) && active_power_w > sleep_power_w,
          "active_power_w must exceed sleep_power_w");
  require(finite(eta) && eta > 0, "eta must be > 0");
  require(finite(backhaul_capacity_mbps) && backhaul_capacity_mbps > 0,
          "backhaul_capacity_mbps must be > 0");
  require(finite(backhaul_max_power_w) && backhaul_max_power_w > 0,
          "backhaul_max_power_w must be > 0");
  require(finite(antenna_gain_db), "antenna_gain_db must be finite");
  require(finite(noise_psd_dbm_hz), "noise_psd_dbm_hz must be finite");
  require(finite(pathloss_intercept_db), "pathloss_intercept_db must be finite");
  require(finite(pathloss_slope) && pathloss_slope > 0, "pathloss_slope must be > 0");
  require(finite(shadowing_std_db) && shadowing_std_db >= 0, "shadowing_std_db must be >= 0");
  require(finite(user_exclusion_radius_km) && user_exclusion_radius_km >= 0,
          "user_exclusion_radius_km must be >= 0");
  require(finite(gamma_m_db), "gamma_m_db must be finite");
  require(finite(gamma_q_db), "gamma_q_db must be finite");
  require(finite(tau1) && tau1 > 0, "tau1 must be > 0");
  require(finite(tau2) && tau2 > 0, "tau2 must be > 0");
  require(finite(tau3) && tau3 > 0, "tau3 must be > 0");
}

}  // namespace cran
