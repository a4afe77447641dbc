#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cran/mm_common.hpp"
#include "json.hpp"

namespace cran {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Strategy { DataSharing, Compression, SingleBs, PerCellComp };

const char* to_string(Strategy s);
/// Throws ConfigError on an unknown name.
Strategy parse_strategy(const std::string& name);

struct TopologyConfig {
  int num_cells = 7;
  int rrh_per_cell = 4;
  double inter_site_distance_km = 0.8;
};

struct ExperimentConfig {
  SimulationParams params;
  TopologyConfig topology;
  std::vector<double> rates_mbps{10, 20, 30, 40, 50, 60, 70};
  std::vector<int> users_per_cell{1, 2, 3};
  std::vector<Strategy> strategies{Strategy::DataSharing, Strategy::Compression, Strategy::SingleBs,
                                   Strategy::PerCellComp};
  int n_realizations = 20;
  std::uint64_t master_seed = 1;
  /// Candidate cluster size L_c for the MM strategies; 0 means every BS.
  int candidate_size = 14;
  double conv_tol = 1e-5;
  int ds_max_iter = 100;
  int comp_max_iter = 150;
  double eps_active = kDefaultEpsActive;
  double eps_cluster = 1e-8;
  bool single_bs_bill_backhaul = true;
  bool write_traces = true;
  /// Worker threads; 0 picks the hardware concurrency.
  int threads = 0;
  std::string output_dir = "results";

  /// Throws ConfigError when an invariant is violated.
  void validate() const;
  MmOptions mm_options(Strategy s) const;
};

/// Strict parse: unknown keys and wrong types raise ConfigError; absent keys keep defaults.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& cfg);
/// Reads and parses a config file; IoError when unreadable, ConfigError when malformed.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Seed of one (density, realization) channel draw.
std::uint64_t run_seed(std::uint64_t master_seed, int users_per_cell, int realization);
/// Users and channel for a run seed.
ChannelRealization realization_channel(const ExperimentConfig& cfg, int users_per_cell, std::uint64_t seed);

struct RunRecord {
  Strategy strategy = Strategy::DataSharing;
  double rate_mbps = 0.0;
  int users_per_cell = 0;
  int realization = 0;
  std::uint64_t seed = 0;
  std::string status;  ///< "optimal", "infeasible", "numerical_failure" or "error"
  int iterations = 0;
  bool converged = false;
  int n_bs = 0;
  PowerBreakdown power;
  std::optional<MmTrace> trace;
  std::string message;

  bool feasible() const { return status == "optimal"; }
};

/// Solves one strategy on one channel.
RunRecord solve_run(const ExperimentConfig& cfg, Strategy strategy, const ChannelRealization& channel,
                    double rate_mbps);

struct AggregateRow {
  Strategy strategy = Strategy::DataSharing;
  double rate_mbps = 0.0;
  int users_per_cell = 0;
  int n_realizations = 0;
  int n_feasible = 0;
  /// Means over feasible runs; empty when n_feasible is 0.
  std::optional<double> mean_total_w, mean_total_excl_sleep_w, mean_tx_w, mean_activation_w, mean_backhaul_w,
      mean_sleep_w, mean_total_no_backhaul_w, mean_active_fraction, mean_iters;

  static std::string csv_header();
  std::string csv_row() const;
};

struct ExperimentResult {
  std::vector<RunRecord> runs;
  std::vector<AggregateRow> aggregates;
};

/// Means per (strategy, rate, density) in config order.
std::vector<AggregateRow> aggregate(const ExperimentConfig& cfg, const std::vector<RunRecord>& runs);

using ProgressFn = std::function<void(int done, int total)>;

/// Full sweep. Work items run in parallel and are merged in index order, so the
/// result does not depend on the thread count.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const ProgressFn& progress = {});

std::string aggregates_csv(const std::vector<AggregateRow>& rows);
std::string runs_csv(const std::vector<RunRecord>& runs);
nlohmann::json figure_data(const ExperimentConfig& cfg, const ExperimentResult& result);
std::string trace_filename(const RunRecord& run);

/// Writes aggregates.csv, runs.csv, figdata.json and traces/ under `dir`. Throws IoError.
void emit_outputs(const ExperimentConfig& cfg, const ExperimentResult& result, const std::filesystem::path& dir);

}  // namespace cran
