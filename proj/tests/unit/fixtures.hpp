#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "cran/net_model.hpp"

namespace cran::testing {

/// 7 single-RRH cells with the first `num_users` dropped users.
inline ChannelRealization small_channel(std::uint64_t seed, int num_users, const SimulationParams& params = {}) {
  const NetworkTopology topo = build_hex_topology(7, 1, 0.8);
  auto users = drop_users(topo, 1, derive_seed(seed, {0}), params.user_exclusion_radius_km);
  users.resize(num_users);
  ChannelRealization ch = draw_channel(topo, users, params, derive_seed(seed, {1}));
  return ch;
}

/// Hand-built channel with i.i.d. complex Gaussian gains scaled to a given SNR per unit power.
inline ChannelRealization gaussian_channel(std::mt19937_64& rng, int L, int K, double gain_scale, double noise) {
  std::normal_distribution<double> n(0.0, 1.0);
  ChannelRealization ch;
  ch.gains.resize(L, K);
  for (int l = 0; l < L; ++l)
    for (int k = 0; k < K; ++k) ch.gains(l, k) = std::complex<double>(n(rng), n(rng)) * gain_scale;
  ch.noise_power_w = noise;
  ch.bs_cell.assign(L, 0);
  ch.user_cell.assign(K, 0);
  ch.user_positions.assign(K, Point2{});
  return ch;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(1e-300, std::abs(b)); }

}  // namespace cran::testing
