#include <fmt/format.h>

#include <fstream>

#include "cran/experiment.hpp"

namespace cran {

namespace {

using nlohmann::json;

std::string opt_field(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

bool is_mm(Strategy s) { return s == Strategy::DataSharing || s == Strategy::Compression; }

}  // namespace

std::string AggregateRow::csv_header() {
  return "strategy,rate_mbps,users_per_cell,n_realizations,n_feasible,mean_total_w,mean_total_excl_sleep_w,"
         "mean_tx_w,mean_activation_w,mean_backhaul_w,mean_sleep_w,mean_total_no_backhaul_w,"
         "mean_active_fraction,mean_iters";
}

std::string AggregateRow::csv_row() const {
  return fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{}", to_string(strategy), format_double(rate_mbps),
                     users_per_cell, n_realizations, n_feasible, opt_field(mean_total_w),
                     opt_field(mean_total_excl_sleep_w), opt_field(mean_tx_w), opt_field(mean_activation_w),
                     opt_field(mean_backhaul_w), opt_field(mean_sleep_w), opt_field(mean_total_no_backhaul_w),
                     opt_field(mean_active_fraction), opt_field(mean_iters));
}

std::string aggregates_csv(const std::vector<AggregateRow>& rows) {
  std::string out = AggregateRow::csv_header() + "\n";
  for (const auto& r : rows) out += r.csv_row() + "\n";
  return out;
}

std::string runs_csv(const std::vector<RunRecord>& runs) {
  std::string out =
      "strategy,rate_mbps,users_per_cell,realization,seed,status,iterations,converged,total_w,tx_w,activation_w,"
      "backhaul_w,sleep_w,n_active_bs,n_bs\n";
  for (const auto& r : runs) {
    out += fmt::format("{},{},{},{},{},{},{},{},", to_string(r.strategy), format_double(r.rate_mbps), r.users_per_cell,
                       r.realization, r.seed, r.status, r.iterations, r.converged ? 1 : 0);
    if (r.feasible())
      out += fmt::format("{},{},{},{},{},{},{}\n", format_double(r.power.total), format_double(r.power.tx_w),
                         format_double(r.power.activation_w), format_double(r.power.backhaul_w),
                         format_double(r.power.sleep_constant), r.power.n_active_bs(), r.n_bs);
    else
      out += fmt::format(",,,,,,{}\n", r.n_bs);
  }
  return out;
}

std::string trace_filename(const RunRecord& run) {
  return fmt::format("{}_{}_{}.csv", to_string(run.strategy), format_double(run.rate_mbps), run.seed);
}

json figure_data(const ExperimentConfig& cfg, const ExperimentResult& result) {
  json fig4 = json::array(), fig5 = json::array(), fig6 = json::array();
  for (Strategy s : cfg.strategies)
    for (int upc : cfg.users_per_cell) {
      json rates = json::array(), total = json::array(), feasible = json::array();
      json bs = json::array(), bh = json::array(), frac = json::array();
      for (const auto& row : result.aggregates) {
        if (row.strategy != s || row.users_per_cell != upc) continue;
        rates.push_back(row.rate_mbps);
        total.push_back(opt_json(row.mean_total_w));
        feasible.push_back(row.n_feasible);
        bh.push_back(opt_json(row.mean_backhaul_w));
        bs.push_back(opt_json(row.mean_total_no_backhaul_w));
        frac.push_back(opt_json(row.mean_active_fraction));
      }
      fig4.push_back({{"strategy", to_string(s)},
                      {"users_per_cell", upc},
                      {"rates_mbps", rates},
                      {"mean_total_w", total},
                      {"n_feasible", feasible}});
      if (!is_mm(s)) continue;
      fig5.push_back({{"strategy", to_string(s)},
                      {"users_per_cell", upc},
                      {"rates_mbps", rates},
                      {"bs_power_w", bs},
                      {"backhaul_w", bh},
                      {"total_w", total}});
      fig6.push_back({{"strategy", to_string(s)},
                      {"users_per_cell", upc},
                      {"rates_mbps", rates},
                      {"mean_active_fraction", frac}});
    }

  json fig2 = json::array(), fig3 = json::array();
  for (const auto& run : result.runs) {
    if (run.realization != 0 || !run.trace || !is_mm(run.strategy)) continue;
    json active = json::array(), smoothed = json::array(), surrogate = json::array(), truth = json::array();
    for (const auto& row : run.trace->rows) {
      active.push_back(row.n_active);
      smoothed.push_back(row.smoothed);
      surrogate.push_back(row.surrogate);
      truth.push_back(row.true_power);
    }
    const json key = {{"strategy", to_string(run.strategy)},
                      {"users_per_cell", run.users_per_cell},
                      {"rate_mbps", run.rate_mbps},
                      {"seed", run.seed}};
    json a = key, o = key;
    a["n_active"] = active;
    o["smoothed"] = smoothed;
    o["surrogate"] = surrogate;
    o["true_power"] = truth;
    fig2.push_back(a);
    fig3.push_back(o);
  }
  return {{"fig2_active_bs_trajectory", fig2},
          {"fig3_objective_trajectory", fig3},
          {"fig4_total_power", fig4},
          {"fig5_power_decomposition", fig5},
          {"fig6_active_fraction", fig6}};
}

void emit_outputs(const ExperimentConfig& cfg, const ExperimentResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  write_file(dir / "aggregates.csv", aggregates_csv(result.aggregates));
  write_file(dir / "runs.csv", runs_csv(result.runs));
  write_file(dir / "figdata.json", figure_data(cfg, result).dump(1) + "\n");
  if (!cfg.write_traces) return;
  const auto traces = dir / "traces";
  std::filesystem::create_directories(traces, ec);
  if (ec) throw IoError("cannot create trace directory " + traces.string() + ": " + ec.message());
  for (const auto& run : result.runs)
    if (run.trace) write_file(traces / trace_filename(run), run.trace->csv());
}

}  // namespace cran
