#include <algorithm>
#include <atomic>
#include <mutex>
#include <thread>

#include "cran/baselines.hpp"
#include "cran/compression.hpp"
#include "cran/experiment.hpp"

namespace cran {

std::uint64_t run_seed(std::uint64_t master_seed, int users_per_cell, int realization) {
  return derive_seed(master_seed, {static_cast<std::uint64_t>(users_per_cell), static_cast<std::uint64_t>(realization)});
}

ChannelRealization realization_channel(const ExperimentConfig& cfg, int users_per_cell, std::uint64_t seed) {
  const NetworkTopology topo =
      build_hex_topology(cfg.topology.num_cells, cfg.topology.rrh_per_cell, cfg.topology.inter_site_distance_km);
  const auto users = drop_users(topo, users_per_cell, derive_seed(seed, {0}), cfg.params.user_exclusion_radius_km);
  return draw_channel(topo, users, cfg.params, derive_seed(seed, {1}));
}

RunRecord solve_run(const ExperimentConfig& cfg, Strategy strategy, const ChannelRealization& channel,
                    double rate_mbps) {
  RunRecord rec;
  rec.strategy = strategy;
  rec.rate_mbps = rate_mbps;
  rec.seed = channel.seed;
  rec.n_bs = channel.num_bs();
  const Eigen::VectorXd rates = Eigen::VectorXd::Constant(channel.num_users(), rate_mbps);
  try {
    switch (strategy) {
      case Strategy::DataSharing: {
        DsResult r = run_algorithm1(channel, rates, cfg.params, cfg.mm_options(strategy));
        rec.status = to_string(r.status);
        rec.iterations = r.iterations;
        rec.converged = r.converged;
        rec.power = r.power;
        rec.trace = std::move(r.trace);
        rec.message = r.message;
        break;
      }
      case Strategy::Compression: {
        CompResult r = run_algorithm2(channel, rates, cfg.params, cfg.mm_options(strategy));
        rec.status = to_string(r.status);
        rec.iterations = r.iterations;
        rec.converged = r.converged;
        rec.power = r.power;
        rec.trace = std::move(r.trace);
        rec.message = r.message;
        break;
      }
      case Strategy::SingleBs: {
        const SingleBsResult r = run_single_bs(channel, rates, cfg.params, cfg.single_bs_bill_backhaul, cfg.eps_active);
        rec.status = to_string(r.status);
        rec.iterations = r.iterations;
        rec.converged = r.ok();
        rec.power = r.power;
        rec.message = r.message;
        break;
      }
      case Strategy::PerCellComp: {
        const DsResult r = per_cell_comp(channel, rates, cfg.params);
        rec.status = to_string(r.status);
        rec.iterations = r.iterations;
        rec.converged = r.converged;
        rec.power = r.power;
        rec.message = r.message;
        break;
      }
    }
  } catch (const std::exception& e) {
    rec.status = "error";
    rec.message = e.what();
  }
  return rec;
}

std::vector<AggregateRow> aggregate(const ExperimentConfig& cfg, const std::vector<RunRecord>& runs) {
  std::vector<AggregateRow> rows;
  for (Strategy s : cfg.strategies)
    for (int upc : cfg.users_per_cell)
      for (double rate : cfg.rates_mbps) {
        AggregateRow row;
        row.strategy = s;
        row.rate_mbps = rate;
        row.users_per_cell = upc;
        double total = 0, tx = 0, act = 0, bh = 0, sleep = 0, frac = 0, iters = 0;
        for (const auto& r : runs) {
          if (r.strategy != s || r.users_per_cell != upc || r.rate_mbps != rate) continue;
          ++row.n_realizations;
          if (!r.feasible()) continue;
          ++row.n_feasible;
          total += r.power.total;
          tx += r.power.tx_w;
          act += r.power.activation_w;
          bh += r.power.backhaul_w;
          sleep += r.power.sleep_constant;
          frac += static_cast<double>(r.power.n_active_bs()) / r.n_bs;
          iters += r.iterations;
        }
        if (row.n_feasible > 0) {
          const double n = row.n_feasible;
          row.mean_total_w = total / n;
          row.mean_tx_w = tx / n;
          row.mean_activation_w = act / n;
          row.mean_backhaul_w = bh / n;
          row.mean_sleep_w = sleep / n;
          row.mean_total_excl_sleep_w = (total - sleep) / n;
          row.mean_total_no_backhaul_w = (total - bh) / n;
          row.mean_active_fraction = frac / n;
          row.mean_iters = iters / n;
        }
        rows.push_back(row);
      }
  return rows;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const ProgressFn& progress) {
  cfg.validate();
  struct Item {
    int users_per_cell;
    int realization;
  };
  std::vector<Item> items;
  for (int upc : cfg.users_per_cell)
    for (int r = 0; r < cfg.n_realizations; ++r) items.push_back({upc, r});

  std::vector<std::vector<RunRecord>> slots(items.size());
  std::atomic<std::size_t> next{0};
  std::mutex progress_mutex;
  int done = 0;
  auto worker = [&]() {
    for (std::size_t i = next++; i < items.size(); i = next++) {
      const Item it = items[i];
      const std::uint64_t seed = run_seed(cfg.master_seed, it.users_per_cell, it.realization);
      std::vector<RunRecord> out;
      ChannelRealization channel;
      std::string failure;
      try {
        channel = realization_channel(cfg, it.users_per_cell, seed);
      } catch (const std::exception& e) {
        failure = e.what();
      }
      for (Strategy s : cfg.strategies)
        for (double rate : cfg.rates_mbps) {
          RunRecord rec;
          if (failure.empty()) {
            rec = solve_run(cfg, s, channel, rate);
          } else {
            rec.strategy = s;
            rec.rate_mbps = rate;
            rec.status = "error";
            rec.message = failure;
          }
          rec.users_per_cell = it.users_per_cell;
          rec.realization = it.realization;
          rec.seed = seed;
          if (!cfg.write_traces && rec.realization != 0) rec.trace.reset();
          out.push_back(std::move(rec));
        }
      slots[i] = std::move(out);
      if (progress) {
        std::lock_guard<std::mutex> lock(progress_mutex);
        progress(++done, static_cast<int>(items.size()));
      }
    }
  };

  int threads = cfg.threads > 0 ? cfg.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, std::max(1, static_cast<int>(items.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  ExperimentResult result;
  for (auto& slot : slots)
    for (auto& rec : slot) result.runs.push_back(std::move(rec));
  result.aggregates = aggregate(cfg, result.runs);
  return result;
}

}  // namespace cran
