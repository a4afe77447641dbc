#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <initializer_list>
#include <vector>

#include "cran/params.hpp"
#include "json.hpp"

namespace cran {

using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Raised when a random draw cannot satisfy its geometric constraints.
class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Hexagonal layout of RRH sites. Coordinates in km.
struct NetworkTopology {
  std::vector<Point2> bs_positions;
  std::vector<int> cell_of_bs;
  std::vector<Point2> cell_centers;
  /// Translation offsets of the torus; always starts with the zero offset.
  std::vector<Point2> wrap_vectors;
  double inter_site_distance_km = 0.0;
  int num_cells = 0;
  int rrh_per_cell = 0;

  int num_bs() const { return static_cast<int>(bs_positions.size()); }
  bool wrap_enabled() const { return wrap_vectors.size() > 1; }
};

/// One random scenario: gains(l, k) is the complex amplitude from BS l to user k.
struct ChannelRealization {
  Eigen::MatrixXcd gains;
  double noise_power_w = 0.0;
  std::vector<Point2> user_positions;
  std::vector<int> user_cell;
  std::vector<int> bs_cell;
  std::uint64_t seed = 0;

  int num_bs() const { return static_cast<int>(gains.rows()); }
  int num_users() const { return static_cast<int>(gains.cols()); }
};

/// SplitMix64 finalizer; also used to derive independent substream seeds.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags);

/// Cells sit on a hex lattice with spacing `inter_site_distance_km`; the
/// 7-cell layout wraps around. Each cell hosts one RRH at its center and the
/// rest on a ring of radius ISD/(2*sqrt(3)) starting at 90 degrees.
NetworkTopology build_hex_topology(int num_cells, int rrh_per_cell, double inter_site_distance_km);

double wraparound_distance(const NetworkTopology& topology, Point2 p1, Point2 p2);

/// True when `p` lies in the hexagon of `cell` (no wrap applied).
bool in_cell_hexagon(const NetworkTopology& topology, int cell, Point2 p);

/// Uniform positions per cell, cell by cell, outside the RRH exclusion disc.
std::vector<Point2> drop_users(const NetworkTopology& topology, int users_per_cell,
                               std::uint64_t rng_seed, double exclusion_radius_km = 0.01);

double pathloss_db(double distance_km, const SimulationParams& params);

ChannelRealization draw_channel(const NetworkTopology& topology, const std::vector<Point2>& users,
                                const SimulationParams& params, std::uint64_t rng_seed);

/// The `l_c` strongest BSs of `user`, ties to the lower index, returned ascending.
std::vector<int> candidate_cluster(const ChannelRealization& channel, int user, int l_c);

/// L x K mask of candidate clusters for every user.
BoolMatrix candidate_mask(const ChannelRealization& channel, int l_c);

nlohmann::json to_json(const NetworkTopology& topology);
nlohmann::json to_json(const ChannelRealization& channel);
ChannelRealization channel_from_json(const nlohmann::json& j);

}  // namespace cran
