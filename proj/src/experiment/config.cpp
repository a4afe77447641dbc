#include <fstream>
#include <map>
#include <sstream>

#include "cran/experiment.hpp"

namespace cran {

namespace {

using nlohmann::json;
using Setter = std::function<void(const json&)>;

template <typename T>
T as(const json& v, const std::string& key) {
  try {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError("");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ConfigError("");
      if constexpr (std::is_unsigned_v<T>) {
        if (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0) throw ConfigError("");
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ConfigError("");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError("");
    }
    return v.get<T>();
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type");
  }
}

template <typename T>
Setter setter(T& field, const std::string& key) {
  return [&field, key](const json& v) { field = as<T>(v, key); };
}

void apply(const json& j, const std::map<std::string, Setter>& setters, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("unknown config key '" + where + key + "'");
    it->second(value);
  }
}

template <typename T>
std::vector<T> as_list(const json& v, const std::string& key) {
  if (!v.is_array()) throw ConfigError("config key '" + key + "' must be a list");
  std::vector<T> out;
  for (const auto& e : v) out.push_back(as<T>(e, key));
  return out;
}

std::map<std::string, Setter> param_setters(SimulationParams& p) {
  return {
      {"bandwidth_hz", setter(p.bandwidth_hz, "bandwidth_hz")},
      {"max_tx_power_w", setter(p.max_tx_power_w, "max_tx_power_w")},
      {"active_power_w", setter(p.active_power_w, "active_power_w")},
      {"sleep_power_w", setter(p.sleep_power_w, "sleep_power_w")},
      {"eta", setter(p.eta, "eta")},
      {"backhaul_capacity_mbps", setter(p.backhaul_capacity_mbps, "backhaul_capacity_mbps")},
      {"backhaul_max_power_w", setter(p.backhaul_max_power_w, "backhaul_max_power_w")},
      {"antenna_gain_db", setter(p.antenna_gain_db, "antenna_gain_db")},
      {"noise_psd_dbm_hz", setter(p.noise_psd_dbm_hz, "noise_psd_dbm_hz")},
      {"pathloss_intercept_db", setter(p.pathloss_intercept_db, "pathloss_intercept_db")},
      {"pathloss_slope", setter(p.pathloss_slope, "pathloss_slope")},
      {"shadowing_std_db", setter(p.shadowing_std_db, "shadowing_std_db")},
      {"rayleigh_fading", setter(p.rayleigh_fading, "rayleigh_fading")},
      {"user_exclusion_radius_km", setter(p.user_exclusion_radius_km, "user_exclusion_radius_km")},
      {"gamma_m_db", setter(p.gamma_m_db, "gamma_m_db")},
      {"gamma_q_db", setter(p.gamma_q_db, "gamma_q_db")},
      {"tau1", setter(p.tau1, "tau1")},
      {"tau2", setter(p.tau2, "tau2")},
      {"tau3", setter(p.tau3, "tau3")},
  };
}

}  // namespace

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::DataSharing: return "data_sharing";
    case Strategy::Compression: return "compression";
    case Strategy::SingleBs: return "single_bs";
    case Strategy::PerCellComp: return "per_cell_comp";
  }
  return "unknown";
}

Strategy parse_strategy(const std::string& name) {
  for (Strategy s : {Strategy::DataSharing, Strategy::Compression, Strategy::SingleBs, Strategy::PerCellComp})
    if (name == to_string(s)) return s;
  throw ConfigError("unknown strategy '" + name + "'");
}

void ExperimentConfig::validate() const {
  params.validate();
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError("invalid config: " + what);
  };
  require(topology.num_cells >= 1 && topology.rrh_per_cell >= 1, "topology counts must be >= 1");
  require(std::isfinite(topology.inter_site_distance_km) && topology.inter_site_distance_km > 0,
          "inter_site_distance_km must be > 0");
  require(!rates_mbps.empty(), "rates_mbps must not be empty");
  for (double r : rates_mbps) require(std::isfinite(r) && r > 0, "rates must be > 0");
  require(!users_per_cell.empty(), "users_per_cell must not be empty");
  for (int u : users_per_cell) require(u >= 1, "users_per_cell entries must be >= 1");
  require(!strategies.empty(), "strategies must not be empty");
  for (std::size_t i = 0; i < strategies.size(); ++i)
    for (std::size_t j = i + 1; j < strategies.size(); ++j)
      require(strategies[i] != strategies[j], "strategies must be distinct");
  require(n_realizations >= 1, "n_realizations must be >= 1");
  require(candidate_size >= 0 && candidate_size <= topology.num_cells * topology.rrh_per_cell,
          "candidate_size must lie in [0, L]");
  require(conv_tol > 0 && std::isfinite(conv_tol), "conv_tol must be > 0");
  require(ds_max_iter >= 1 && comp_max_iter >= 1, "max_iter must be >= 1");
  require(eps_active >= 0 && eps_cluster >= 0, "thresholds must be >= 0");
  require(threads >= 0, "threads must be >= 0");
}

MmOptions ExperimentConfig::mm_options(Strategy s) const {
  MmOptions o = s == Strategy::Compression ? MmOptions::compression() : MmOptions::data_sharing();
  o.max_iter = s == Strategy::Compression ? comp_max_iter : ds_max_iter;
  o.conv_tol = conv_tol;
  o.candidate_size = candidate_size;
  o.eps_active = eps_active;
  o.eps_cluster = eps_cluster;
  return o;
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  std::map<std::string, Setter> top{
      {"params", [&c](const json& v) { apply(v, param_setters(c.params), "params."); }},
      {"topology",
       [&c](const json& v) {
         const std::map<std::string, Setter> setters{
             {"num_cells", setter(c.topology.num_cells, "num_cells")},
             {"rrh_per_cell", setter(c.topology.rrh_per_cell, "rrh_per_cell")},
             {"inter_site_distance_km", setter(c.topology.inter_site_distance_km, "inter_site_distance_km")}};
         apply(v, setters, "topology.");
       }},
      {"rates_mbps", [&c](const json& v) { c.rates_mbps = as_list<double>(v, "rates_mbps"); }},
      {"users_per_cell", [&c](const json& v) { c.users_per_cell = as_list<int>(v, "users_per_cell"); }},
      {"strategies",
       [&c](const json& v) {
         c.strategies.clear();
         for (const auto& name : as_list<std::string>(v, "strategies")) c.strategies.push_back(parse_strategy(name));
       }},
      {"n_realizations", setter(c.n_realizations, "n_realizations")},
      {"master_seed", setter(c.master_seed, "master_seed")},
      {"candidate_size", setter(c.candidate_size, "candidate_size")},
      {"conv_tol", setter(c.conv_tol, "conv_tol")},
      {"ds_max_iter", setter(c.ds_max_iter, "ds_max_iter")},
      {"comp_max_iter", setter(c.comp_max_iter, "comp_max_iter")},
      {"eps_active", setter(c.eps_active, "eps_active")},
      {"eps_cluster", setter(c.eps_cluster, "eps_cluster")},
      {"single_bs_bill_backhaul", setter(c.single_bs_bill_backhaul, "single_bs_bill_backhaul")},
      {"write_traces", setter(c.write_traces, "write_traces")},
      {"threads", setter(c.threads, "threads")},
      {"output_dir", setter(c.output_dir, "output_dir")},
  };
  apply(j, top, "");
  c.validate();
  return c;
}

nlohmann::json to_json(const ExperimentConfig& c) {
  const SimulationParams& p = c.params;
  json strategies = json::array();
  for (Strategy s : c.strategies) strategies.push_back(to_string(s));
  return {
      {"params",
       {{"bandwidth_hz", p.bandwidth_hz},
        {"max_tx_power_w", p.max_tx_power_w},
        {"active_power_w", p.active_power_w},
        {"sleep_power_w", p.sleep_power_w},
        {"eta", p.eta},
        {"backhaul_capacity_mbps", p.backhaul_capacity_mbps},
        {"backhaul_max_power_w", p.backhaul_max_power_w},
        {"antenna_gain_db", p.antenna_gain_db},
        {"noise_psd_dbm_hz", p.noise_psd_dbm_hz},
        {"pathloss_intercept_db", p.pathloss_intercept_db},
        {"pathloss_slope", p.pathloss_slope},
        {"shadowing_std_db", p.shadowing_std_db},
        {"rayleigh_fading", p.rayleigh_fading},
        {"user_exclusion_radius_km", p.user_exclusion_radius_km},
        {"gamma_m_db", p.gamma_m_db},
        {"gamma_q_db", p.gamma_q_db},
        {"tau1", p.tau1},
        {"tau2", p.tau2},
        {"tau3", p.tau3}}},
      {"topology",
       {{"num_cells", c.topology.num_cells},
        {"rrh_per_cell", c.topology.rrh_per_cell},
        {"inter_site_distance_km", c.topology.inter_site_distance_km}}},
      {"rates_mbps", c.rates_mbps},
      {"users_per_cell", c.users_per_cell},
      {"strategies", strategies},
      {"n_realizations", c.n_realizations},
      {"master_seed", c.master_seed},
      {"candidate_size", c.candidate_size},
      {"conv_tol", c.conv_tol},
      {"ds_max_iter", c.ds_max_iter},
      {"comp_max_iter", c.comp_max_iter},
      {"eps_active", c.eps_active},
      {"eps_cluster", c.eps_cluster},
      {"single_bs_bill_backhaul", c.single_bs_bill_backhaul},
      {"write_traces", c.write_traces},
      {"threads", c.threads},
      {"output_dir", c.output_dir},
  };
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  json j;
  try {
    j = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  return config_from_json(j);
}

}  // namespace cran
