#include "cran/net_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

namespace cran {
namespace {

constexpr std::uint64_t kShadowingStream = 0x5348414400000001ULL;
constexpr std::uint64_t kFadingStream = 0x4641444500000002ULL;
constexpr int kMaxPlacementAttempts = 100000;

Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
Point2 scale(Point2 a, double s) { return {a.x * s, a.y * s}; }
double norm(Point2 a) { return std::hypot(a.x, a.y); }

Point2 rotate(Point2 a, double rad) {
  const double c = std::cos(rad), s = std::sin(rad);
  return {c * a.x - s * a.y, s * a.x + c * a.y};
}

int hex_ring(int i, int j) { return (std::abs(i) + std::abs(j) + std::abs(i + j)) / 2; }

// Axial lattice coordinates ordered by ring, then by angle.
std::vector<std::pair<int, int>> lattice_cells(int count) {
  std::vector<std::pair<int, int>> cells;
  for (int r = 0; static_cast<int>(cells.size()) < count; ++r) {
    std::vector<std::pair<int, int>> ring;
    for (int i = -r; i <= r; ++i)
      for (int j = -r; j <= r; ++j)
        if (hex_ring(i, j) == r) ring.emplace_back(i, j);
    auto angle = [](const std::pair<int, int>& c) {
      double a = std::atan2(c.second * std::sqrt(3.0) / 2.0, c.first + c.second / 2.0);
      return a < -1e-12 ? a + 2.0 * std::numbers::pi : a;
    };
    std::sort(ring.begin(), ring.end(),
              [&](const auto& a, const auto& b) { return angle(a) < angle(b); });
    for (const auto& c : ring) {
      if (static_cast<int>(cells.size()) == count) break;
      cells.push_back(c);
    }
  }
  return cells;
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags) {
  std::uint64_t s = splitmix64(base);
  for (std::uint64_t t : tags) s = splitmix64(s ^ splitmix64(t + 0x632BE59BD9B4E019ULL));
  return s;
}

NetworkTopology build_hex_topology(int num_cells, int rrh_per_cell, double inter_site_distance_km) {
  if (num_cells < 1) throw ConfigError("num_cells must be >= 1");
  if (rrh_per_cell < 1) throw ConfigError("rrh_per_cell must be >= 1");
  if (!(inter_site_distance_km > 0) || !std::isfinite(inter_site_distance_km))
    throw ConfigError("inter_site_distance must be > 0");

  const double d = inter_site_distance_km;
  const Point2 a1{d, 0.0};
  const Point2 a2{d / 2.0, d * std::sqrt(3.0) / 2.0};

  NetworkTopology t;
  t.inter_site_distance_km = d;
  t.num_cells = num_cells;
  t.rrh_per_cell = rrh_per_cell;

  for (const auto& [i, j] : lattice_cells(num_cells))
    t.cell_centers.push_back(scale(a1, i) + scale(a2, j));

  const double ring_radius = d / (2.0 * std::sqrt(3.0));
  const int ring_count = rrh_per_cell - 1;
  for (int c = 0; c < num_cells; ++c) {
    t.bs_positions.push_back(t.cell_centers[c]);
    t.cell_of_bs.push_back(c);
    for (int r = 0; r < ring_count; ++r) {
      const double angle = std::numbers::pi / 2.0 + 2.0 * std::numbers::pi * r / ring_count;
      t.bs_positions.push_back(t.cell_centers[c] + Point2{ring_radius * std::cos(angle),
                                                          ring_radius * std::sin(angle)});
      t.cell_of_bs.push_back(c);
    }
  }

  t.wrap_vectors.push_back({0.0, 0.0});
  if (num_cells == 7) {
    const Point2 base = scale(a1, 2.0) + a2;
    for (int r = 0; r < 6; ++r) t.wrap_vectors.push_back(rotate(base, r * std::numbers::pi / 3.0));
  }
  return t;
}

double wraparound_distance(const NetworkTopology& topology, Point2 p1, Point2 p2) {
  const Point2 delta = p1 - p2;
  double best = norm(delta);
  for (const Point2& v : topology.wrap_vectors) best = std::min(best, norm(delta + v));
  return best;
}

bool in_cell_hexagon(const NetworkTopology& topology, int cell, Point2 p) {
  const Point2 rel = p - topology.cell_centers.at(cell);
  const double apothem = topology.inter_site_distance_km / 2.0;
  for (int i = 0; i < 3; ++i) {
    const double a = i * std::numbers::pi / 3.0;
    if (std::abs(rel.x * std::cos(a) + rel.y * std::sin(a)) > apothem * (1.0 + 1e-12)) return false;
  }
  return true;
}

std::vector<Point2> drop_users(const NetworkTopology& topology, int users_per_cell,
                               std::uint64_t rng_seed, double exclusion_radius_km) {
  if (users_per_cell < 0) throw ConfigError("users_per_cell must be >= 0");
  const double d = topology.inter_site_distance_km;
  const double circumradius = d / std::sqrt(3.0);
  std::vector<Point2> users;
  users.reserve(static_cast<std::size_t>(topology.num_cells) * users_per_cell);
  for (int c = 0; c < topology.num_cells; ++c) {
    for (int u = 0; u < users_per_cell; ++u) {
      std::mt19937_64 rng(derive_seed(rng_seed, {static_cast<std::uint64_t>(c),
                                                 static_cast<std::uint64_t>(u)}));
      std::uniform_real_distribution<double> ux(-d / 2.0, d / 2.0);
      std::uniform_real_distribution<double> uy(-circumradius, circumradius);
      bool placed = false;
      for (int attempt = 0; attempt < kMaxPlacementAttempts && !placed; ++attempt) {
        const double x = ux(rng);
        const double y = uy(rng);
        const Point2 p = topology.cell_centers[c] + Point2{x, y};
        if (!in_cell_hexagon(topology, c, p)) continue;
        bool clear = true;
        for (const Point2& bs : topology.bs_positions)
          if (wraparound_distance(topology, p, bs) < exclusion_radius_km) clear = false;
        if (!clear) continue;
        users.push_back(p);
        placed = true;
      }
      if (!placed) throw GenerationError("could not place a user outside the RRH exclusion zone");
    }
  }
  return users;
}

double pathloss_db(double distance_km, const SimulationParams& params) {
  return params.pathloss_intercept_db + params.pathloss_slope * std::log10(distance_km);
}

ChannelRealization draw_channel(const NetworkTopology& topology, const std::vector<Point2>& users,
                                const SimulationParams& params, std::uint64_t rng_seed) {
  const int num_bs = topology.num_bs();
  const int num_users = static_cast<int>(users.size());
  ChannelRealization ch;
  ch.gains.resize(num_bs, num_users);
  ch.noise_power_w = params.noise_power_w();
  ch.user_positions = users;
  ch.bs_cell = topology.cell_of_bs;
  ch.seed = rng_seed;

  for (int k = 0; k < num_users; ++k) {
    int best_cell = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (int c = 0; c < topology.num_cells; ++c) {
      const double dist = wraparound_distance(topology, users[k], topology.cell_centers[c]);
      if (dist < best_dist - 1e-12) {
        best_dist = dist;
        best_cell = c;
      }
    }
    ch.user_cell.push_back(best_cell);

    std::mt19937_64 shadow_rng(derive_seed(rng_seed, {kShadowingStream, static_cast<std::uint64_t>(k)}));
    std::mt19937_64 fading_rng(derive_seed(rng_seed, {kFadingStream, static_cast<std::uint64_t>(k)}));
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int l = 0; l < num_bs; ++l) {
      const double dist = wraparound_distance(topology, users[k], topology.bs_positions[l]);
      if (dist < params.user_exclusion_radius_km || dist <= 0.0)
        throw GenerationError("user inside the exclusion disc of BS " + std::to_string(l));
      const double shadow_db = params.shadowing_std_db * normal(shadow_rng);
      const double amplitude =
          std::pow(10.0, (-pathloss_db(dist, params) - shadow_db + params.antenna_gain_db) / 20.0);
      std::complex<double> fading(1.0, 0.0);
      if (params.rayleigh_fading) {
        const double re = normal(fading_rng);
        const double im = normal(fading_rng);
        fading = std::complex<double>(re, im) / std::sqrt(2.0);
      }
      ch.gains(l, k) = fading * amplitude;
    }
  }
  return ch;
}

std::vector<int> candidate_cluster(const ChannelRealization& channel, int user, int l_c) {
  const int num_bs = channel.num_bs();
  if (l_c < 1 || l_c > num_bs) throw DomainError("candidate cluster size must be in [1, L]");
  if (user < 0 || user >= channel.num_users()) throw DomainError("user index out of range");
  std::vector<int> order(num_bs);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(channel.gains(a, user)) > std::abs(channel.gains(b, user));
  });
  order.resize(l_c);
  std::sort(order.begin(), order.end());
  return order;
}

BoolMatrix candidate_mask(const ChannelRealization& channel, int l_c) {
  BoolMatrix mask = BoolMatrix::Constant(channel.num_bs(), channel.num_users(), false);
  for (int k = 0; k < channel.num_users(); ++k)
    for (int l : candidate_cluster(channel, k, l_c)) mask(l, k) = true;
  return mask;
}

namespace {
nlohmann::json points_json(const std::vector<Point2>& pts) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Point2& p : pts) arr.push_back({p.x, p.y});
  return arr;
}
std::vector<Point2> points_from_json(const nlohmann::json& arr) {
  std::vector<Point2> pts;
  for (const auto& p : arr) pts.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  return pts;
}
}  // namespace

nlohmann::json to_json(const NetworkTopology& topology) {
  return {{"num_cells", topology.num_cells},
          {"rrh_per_cell", topology.rrh_per_cell},
          {"inter_site_distance_km", topology.inter_site_distance_km},
          {"bs_positions_km", points_json(topology.bs_positions)},
          {"cell_of_bs", topology.cell_of_bs},
          {"cell_centers_km", points_json(topology.cell_centers)},
          {"wrap_vectors_km", points_json(topology.wrap_vectors)}};
}

nlohmann::json to_json(const ChannelRealization& channel) {
  nlohmann::json gains = nlohmann::json::array();
  for (int l = 0; l < channel.num_bs(); ++l) {
    nlohmann::json row = nlohmann::json::array();
    for (int k = 0; k < channel.num_users(); ++k)
      row.push_back({channel.gains(l, k).real(), channel.gains(l, k).imag()});
    gains.push_back(row);
  }
  return {{"seed", channel.seed},
          {"noise_power_w", channel.noise_power_w},
          {"user_positions_km", points_json(channel.user_positions)},
          {"user_cell", channel.user_cell},
          {"bs_cell", channel.bs_cell},
          {"gains", gains}};
}

ChannelRealization channel_from_json(const nlohmann::json& j) {
  ChannelRealization ch;
  ch.seed = j.at("seed").get<std::uint64_t>();
  ch.noise_power_w = j.at("noise_power_w").get<double>();
  ch.user_positions = points_from_json(j.at("user_positions_km"));
  ch.user_cell = j.at("user_cell").get<std::vector<int>>();
  ch.bs_cell = j.at("bs_cell").get<std::vector<int>>();
  const auto& g = j.at("gains");
  const int rows = static_cast<int>(g.size());
  const int cols = rows > 0 ? static_cast<int>(g.at(0).size()) : 0;
  ch.gains.resize(rows, cols);
  for (int l = 0; l < rows; ++l)
    for (int k = 0; k < cols; ++k)
      ch.gains(l, k) = {g.at(l).at(k).at(0).get<double>(), g.at(l).at(k).at(1).get<double>()};
  return ch;
}

}  // namespace cran
