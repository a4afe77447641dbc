#include "cran/mm_common.hpp"

#include <fmt/format.h>

namespace cran {

std::string MmTrace::csv_header() const {
  std::string h = "iter,surrogate,smoothed,true_power,n_active,max_cluster";
  if (compression_columns) h += ",q_min,q_max,backhaul_total_mbps";
  return h;
}

std::string MmTrace::csv() const {
  std::string out = csv_header() + "\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{},{}", r.iter, format_double(r.surrogate), format_double(r.smoothed),
                       format_double(r.true_power), r.n_active, r.max_cluster);
    if (compression_columns)
      out += fmt::format(",{},{},{}", format_double(r.q_min), format_double(r.q_max),
                         format_double(r.backhaul_total_mbps));
    out += "\n";
  }
  return out;
}

BoolMatrix mm_candidate_mask(const ChannelRealization& channel, int candidate_size) {
  if (candidate_size <= 0 || candidate_size >= channel.num_bs())
    return BoolMatrix::Constant(channel.num_bs(), channel.num_users(), true);
  return candidate_mask(channel, candidate_size);
}

double rate_to_sinr_target(double rate_mbps, const SimulationParams& params) {
  if (!(rate_mbps >= 0.0)) throw DomainError("rate must be >= 0");
  return params.gamma_m() * (std::exp2(rate_mbps / params.bandwidth_mhz()) - 1.0);
}

double reweight(double x, double tau) {
  if (!(x >= 0.0) || !(tau > 0.0)) throw DomainError("reweight needs x >= 0 and tau > 0");
  return 1.0 / ((x + tau) * std::log1p(1.0 / tau));
}

QosInstance make_qos_instance(const ChannelRealization& channel, const Eigen::VectorXd& rates_mbps,
                              const SimulationParams& params, const BoolMatrix& mask) {
  if (rates_mbps.size() != channel.num_users()) throw DomainError("one rate target per user required");
  QosInstance inst;
  inst.gains = channel.gains;
  inst.noise_power_w = channel.noise_power_w;
  inst.sinr_targets.resize(channel.num_users());
  for (int k = 0; k < channel.num_users(); ++k) inst.sinr_targets[k] = rate_to_sinr_target(rates_mbps[k], params);
  inst.power_caps = Eigen::VectorXd::Constant(channel.num_bs(), params.max_tx_power_w);
  inst.allowed = mask;
  return inst;
}

}  // namespace cran
