#include "cran/power_model.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

namespace cran {

int ActivityVector::count() const {
  return static_cast<int>(std::count(active.begin(), active.end(), true));
}

double bs_power(double p_tx_w, const SimulationParams& params, double eps_active) {
  if (!(p_tx_w >= 0.0)) throw DomainError("transmit power must be >= 0");
  if (p_tx_w > params.max_tx_power_w) throw DomainError("transmit power exceeds the BS cap");
  if (p_tx_w > eps_active) return params.eta * p_tx_w + params.active_power_w;
  return params.sleep_power_w;
}

double backhaul_power(double rate_mbps, const SimulationParams& params) {
  if (!(rate_mbps >= 0.0)) throw DomainError("backhaul rate must be >= 0");
  if (rate_mbps > params.backhaul_capacity_mbps)
    spdlog::debug("backhaul rate {:.3f} Mbps exceeds link capacity {:.3f} Mbps", rate_mbps,
                  params.backhaul_capacity_mbps);
  return params.rho_w_per_mbps() * rate_mbps;
}

ActivityVector activity_from_tx(const std::vector<double>& tx_w, double eps_active) {
  ActivityVector a;
  a.threshold_used = eps_active;
  a.active.reserve(tx_w.size());
  for (double p : tx_w) a.active.push_back(p > eps_active);
  return a;
}

PowerBreakdown total_power(const std::vector<double>& tx_w, const std::vector<double>& backhaul_mbps,
                           const SimulationParams& params, double eps_active) {
  return total_power(tx_w, backhaul_mbps, params, activity_from_tx(tx_w, eps_active));
}

PowerBreakdown total_power(const std::vector<double>& tx_w, const std::vector<double>& backhaul_mbps,
                           const SimulationParams& params, const ActivityVector& activity) {
  if (tx_w.size() != backhaul_mbps.size() || tx_w.size() != activity.active.size())
    throw DomainError("per-BS vectors must have equal length");
  PowerBreakdown b;
  b.activity = activity;
  const std::size_t n = tx_w.size();
  for (std::size_t l = 0; l < n; ++l) {
    if (!(tx_w[l] >= 0.0)) throw DomainError("transmit power must be >= 0");
    const double activation = activity.active[l] ? params.delta_power_w() : 0.0;
    const double bh = backhaul_power(backhaul_mbps[l], params);
    b.per_bs_transmit.push_back(tx_w[l]);
    b.per_bs_activation.push_back(activation);
    b.per_bs_backhaul.push_back(bh);
    b.tx_w += params.eta * tx_w[l];
    b.activation_w += activation;
    b.backhaul_w += bh;
  }
  b.sleep_constant = params.sleep_power_w * static_cast<double>(n);
  b.total = b.tx_w + b.activation_w + b.backhaul_w + b.sleep_constant;
  return b;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "";
  return fmt::format("{:.10g}", v);
}

std::string PowerBreakdown::csv_header() {
  return "total_w,tx_w,activation_w,backhaul_w,sleep_w,n_active_bs";
}

std::string PowerBreakdown::csv_row() const {
  return fmt::format("{},{},{},{},{},{}", format_double(total), format_double(tx_w),
                     format_double(activation_w), format_double(backhaul_w),
                     format_double(sleep_constant), n_active_bs());
}

}  // namespace cran

namespace cran {

void set_log_level(LogLevel level) {
  switch (level) {
    case LogLevel::Debug: spdlog::set_level(spdlog::level::debug); break;
    case LogLevel::Info: spdlog::set_level(spdlog::level::info); break;
    case LogLevel::Warn: spdlog::set_level(spdlog::level::warn); break;
    case LogLevel::Error: spdlog::set_level(spdlog::level::err); break;
    case LogLevel::Off: spdlog::set_level(spdlog::level::off); break;
  }
}

}  // namespace cran
