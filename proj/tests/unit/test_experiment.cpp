#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "cran/experiment.hpp"
#include "doctest.h"

using namespace cran;
using nlohmann::json;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.topology = {7, 1, 0.8};
  c.rates_mbps = {10, 20, 30, 40, 50, 60, 70};
  c.users_per_cell = {1};
  c.n_realizations = 2;
  c.candidate_size = 0;
  c.comp_max_iter = 20;
  c.ds_max_iter = 20;
  return c;
}

RunRecord feasible_run(Strategy s, double rate, int realization, double tx, double act, double bh, double sleep,
                       int active, int n_bs, int iters) {
  RunRecord r;
  r.strategy = s;
  r.rate_mbps = rate;
  r.users_per_cell = 2;
  r.realization = realization;
  r.status = "optimal";
  r.iterations = iters;
  r.converged = true;
  r.n_bs = n_bs;
  r.power.tx_w = tx;
  r.power.activation_w = act;
  r.power.backhaul_w = bh;
  r.power.sleep_constant = sleep;
  r.power.total = tx + act + bh + sleep;
  r.power.activity.active.assign(n_bs, false);
  for (int l = 0; l < active; ++l) r.power.activity.active[l] = true;
  return r;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("empty config reproduces the defaults") {
  const ExperimentConfig c = config_from_json(json::object());
  const ExperimentConfig d;
  CHECK(c.rates_mbps == d.rates_mbps);
  CHECK(c.users_per_cell == d.users_per_cell);
  CHECK(c.strategies.size() == 4);
  CHECK(c.n_realizations == 20);
  CHECK(c.candidate_size == 14);
  CHECK(c.params.max_tx_power_w == 20.0);
  CHECK(c.topology.num_cells == 7);
  CHECK(to_json(c) == to_json(d));
}

TEST_CASE("config round-trips through JSON") {
  ExperimentConfig c = small_config();
  c.strategies = {Strategy::Compression, Strategy::SingleBs};
  c.master_seed = 99;
  c.params.gamma_q_db = 6.0;
  c.output_dir = "elsewhere";
  const ExperimentConfig back = config_from_json(to_json(c));
  CHECK(to_json(back) == to_json(c));
  CHECK(back.strategies == c.strategies);
}

TEST_CASE("config parsing is strict") {
  CHECK_THROWS_AS(config_from_json(json{{"bogus", 1}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(json{{"params", {{"bogus", 1}}}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(json{{"topology", {{"cells", 7}}}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(json{{"n_realizations", "20"}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(json{{"n_realizations", 2.5}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(json{{"n_realizations", 0}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(json{{"master_seed", -1}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(json{{"rates_mbps", {10, -5}}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(json{{"rates_mbps", json::array()}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(json{{"rates_mbps", 10}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(json{{"strategies", {"data_sharing", "magic"}}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(json{{"strategies", {"compression", "compression"}}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(json{{"write_traces", 1}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(json{{"candidate_size", 29}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(json::array()), ConfigError);
  CHECK(config_from_json(json{{"params", {{"eta", 3}}}}).params.eta == 3.0);
}

TEST_CASE("loading reports missing files and bad JSON distinctly") {
  const auto dir = std::filesystem::temp_directory_path() / "cran_cfg_test";
  std::filesystem::create_directories(dir);
  CHECK_THROWS_AS(load_config(dir / "missing.json"), IoError);
  std::ofstream(dir / "broken.json") << "{\"rates_mbps\": [10,";
  CHECK_THROWS_AS(load_config(dir / "broken.json"), ConfigError);
  std::ofstream(dir / "ok.json") << "{\"n_realizations\": 3}";
  CHECK(load_config(dir / "ok.json").n_realizations == 3);
  std::filesystem::remove_all(dir);
}

TEST_CASE("strategy names") {
  for (Strategy s : {Strategy::DataSharing, Strategy::Compression, Strategy::SingleBs, Strategy::PerCellComp})
    CHECK(parse_strategy(to_string(s)) == s);
  CHECK_THROWS_AS(parse_strategy("Data_Sharing"), ConfigError);
}

TEST_CASE("aggregation averages feasible runs only") {
  ExperimentConfig c;
  c.strategies = {Strategy::DataSharing};
  c.rates_mbps = {10, 20};
  c.users_per_cell = {2};
  std::vector<RunRecord> runs{
      feasible_run(Strategy::DataSharing, 10, 0, 1.0, 56.0, 10.0, 560.0, 2, 10, 12),
      feasible_run(Strategy::DataSharing, 10, 1, 3.0, 84.0, 20.0, 560.0, 3, 10, 20),
  };
  RunRecord failed;
  failed.strategy = Strategy::DataSharing;
  failed.rate_mbps = 10;
  failed.users_per_cell = 2;
  failed.realization = 2;
  failed.status = "infeasible";
  failed.n_bs = 10;
  runs.push_back(failed);
  RunRecord failed20 = failed;
  failed20.rate_mbps = 20;
  runs.push_back(failed20);

  const auto rows = aggregate(c, runs);
  REQUIRE(rows.size() == 2);
  const AggregateRow& r = rows[0];
  CHECK(r.n_realizations == 3);
  CHECK(r.n_feasible == 2);
  CHECK(*r.mean_tx_w == doctest::Approx(2.0));
  CHECK(*r.mean_activation_w == doctest::Approx(70.0));
  CHECK(*r.mean_backhaul_w == doctest::Approx(15.0));
  CHECK(*r.mean_total_w == doctest::Approx((627.0 + 667.0) / 2.0));
  CHECK(*r.mean_total_no_backhaul_w == doctest::Approx((617.0 + 647.0) / 2.0));
  CHECK(*r.mean_active_fraction == doctest::Approx(0.25));
  CHECK(*r.mean_iters == doctest::Approx(16.0));

  CHECK(rows[1].n_feasible == 0);
  CHECK_FALSE(rows[1].mean_total_w.has_value());
  const std::string line = rows[1].csv_row();
  CHECK(line == "data_sharing,20,2,1,0,,,,,,,,,");
}

TEST_CASE("empty outputs are headers only") {
  CHECK(aggregates_csv({}) == AggregateRow::csv_header() + "\n");
  const std::string runs = runs_csv({});
  CHECK(runs.find('\n') == runs.size() - 1);
  CHECK(AggregateRow::csv_header() ==
        "strategy,rate_mbps,users_per_cell,n_realizations,n_feasible,mean_total_w,mean_total_excl_sleep_w,"
        "mean_tx_w,mean_activation_w,mean_backhaul_w,mean_sleep_w,mean_total_no_backhaul_w,"
        "mean_active_fraction,mean_iters");
  CHECK(runs ==
        "strategy,rate_mbps,users_per_cell,realization,seed,status,iterations,converged,total_w,tx_w,activation_w,"
        "backhaul_w,sleep_w,n_active_bs,n_bs\n");
}

TEST_CASE("sweep shape, fairness and determinism") {
  ExperimentConfig c = small_config();
  c.threads = 1;
  const ExperimentResult a = run_experiment(c);
  CHECK(a.aggregates.size() == 4 * 7);
  CHECK(a.runs.size() == 4 * 7 * 2);
  std::set<std::uint64_t> seeds;
  for (const auto& r : a.runs) {
    if (r.realization == 0) seeds.insert(r.seed);
    CHECK(r.status != "error");
  }
  CHECK(seeds.size() == 1);
  for (const auto& row : a.aggregates) CHECK(row.n_feasible <= row.n_realizations);

  c.threads = 4;
  const ExperimentResult b = run_experiment(c);
  CHECK(aggregates_csv(a.aggregates) == aggregates_csv(b.aggregates));
  CHECK(runs_csv(a.runs) == runs_csv(b.runs));

  ExperimentConfig other = c;
  other.master_seed = 2;
  CHECK(runs_csv(run_experiment(other).runs) != runs_csv(a.runs));
}

TEST_CASE("figure data is internally consistent") {
  ExperimentConfig c = small_config();
  c.rates_mbps = {10, 40};
  const ExperimentResult res = run_experiment(c);
  const json fig = figure_data(c, res);
  for (const char* key : {"fig2_active_bs_trajectory", "fig3_objective_trajectory", "fig4_total_power",
                          "fig5_power_decomposition", "fig6_active_fraction"})
    CHECK(fig.contains(key));
  CHECK(fig["fig4_total_power"].size() == 4);
  CHECK(fig["fig5_power_decomposition"].size() == 2);
  for (const auto& series : fig["fig5_power_decomposition"]) {
    const auto& fig4 = fig["fig4_total_power"];
    const auto match = std::find_if(fig4.begin(), fig4.end(), [&](const json& s) {
      return s["strategy"] == series["strategy"] && s["users_per_cell"] == series["users_per_cell"];
    });
    REQUIRE(match != fig4.end());
    for (std::size_t i = 0; i < series["rates_mbps"].size(); ++i) {
      if (series["total_w"][i].is_null()) continue;
      const double sum = series["bs_power_w"][i].get<double>() + series["backhaul_w"][i].get<double>();
      CHECK(sum == doctest::Approx((*match)["mean_total_w"][i].get<double>()).epsilon(1e-12));
    }
  }
  CHECK(fig["fig2_active_bs_trajectory"].size() == 2 * 2);
}

TEST_CASE("outputs land on disk and unwritable targets raise") {
  ExperimentConfig c = small_config();
  c.rates_mbps = {20};
  c.strategies = {Strategy::DataSharing, Strategy::SingleBs};
  const ExperimentResult res = run_experiment(c);
  const auto dir = std::filesystem::temp_directory_path() / "cran_out_test";
  std::filesystem::remove_all(dir);
  emit_outputs(c, res, dir);
  CHECK(slurp(dir / "aggregates.csv") == aggregates_csv(res.aggregates));
  CHECK(slurp(dir / "runs.csv") == runs_csv(res.runs));
  CHECK(json::parse(slurp(dir / "figdata.json")) == figure_data(c, res));
  for (const auto& r : res.runs)
    if (r.strategy == Strategy::DataSharing) {
      CHECK(std::filesystem::exists(dir / "traces" / trace_filename(r)));
      CHECK(trace_filename(r) == "data_sharing_20_" + std::to_string(r.seed) + ".csv");
    }
  std::filesystem::remove_all(dir);

  std::ofstream(dir.string() + "_file") << "x";
  CHECK_THROWS_AS(emit_outputs(c, res, std::filesystem::path(dir.string() + "_file") / "sub"), IoError);
  std::filesystem::remove(dir.string() + "_file");
}

TEST_CASE("trace run reproduces the sweep record") {
  ExperimentConfig c = small_config();
  c.rates_mbps = {30};
  c.strategies = {Strategy::Compression};
  const ExperimentResult res = run_experiment(c);
  const RunRecord& first = res.runs.front();
  const auto channel = realization_channel(c, first.users_per_cell, first.seed);
  const RunRecord again = solve_run(c, Strategy::Compression, channel, 30.0);
  CHECK(again.status == first.status);
  CHECK(again.iterations == first.iterations);
  CHECK(again.power.total == first.power.total);
}

TEST_CASE("shipped reference config equals the defaults") {
  ExperimentConfig c = load_config(std::filesystem::path(CRAN_SOURCE_DIR) / "configs" / "reference.json");
  ExperimentConfig d;
  d.output_dir = c.output_dir;
  CHECK(to_json(c) == to_json(d));
}
