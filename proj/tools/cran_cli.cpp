#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "cran/experiment.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kIoError = 3;

struct TraceRequest {
  double rate_mbps = 0.0;
  int users_per_cell = 0;
  std::uint64_t seed = 0;
  cran::Strategy strategy = cran::Strategy::DataSharing;
};

TraceRequest parse_single(const std::vector<std::string>& tokens) {
  std::map<std::string, std::string> kv;
  for (const auto& t : tokens) {
    const auto eq = t.find('=');
    if (eq == std::string::npos || eq == 0) throw cran::ConfigError("expected key=value, got '" + t + "'");
    kv[t.substr(0, eq)] = t.substr(eq + 1);
  }
  for (const char* key : {"rate", "users", "seed", "strategy"})
    if (!kv.count(key)) throw cran::ConfigError(std::string("--single is missing ") + key + "=");
  if (kv.size() != 4) throw cran::ConfigError("--single accepts only rate, users, seed and strategy");
  TraceRequest req;
  try {
    std::size_t pos = 0;
    req.rate_mbps = std::stod(kv["rate"], &pos);
    if (pos != kv["rate"].size()) throw std::invalid_argument("rate");
    req.users_per_cell = std::stoi(kv["users"], &pos);
    if (pos != kv["users"].size()) throw std::invalid_argument("users");
    req.seed = std::stoull(kv["seed"], &pos);
    if (pos != kv["seed"].size()) throw std::invalid_argument("seed");
  } catch (const std::exception&) {
    throw cran::ConfigError("malformed numeric value in --single");
  }
  if (!(req.rate_mbps > 0)) throw cran::ConfigError("rate must be > 0");
  if (req.users_per_cell < 1) throw cran::ConfigError("users must be >= 1");
  req.strategy = cran::parse_strategy(kv["strategy"]);
  return req;
}

void print_summary(const cran::RunRecord& r) {
  std::cerr << "strategy=" << cran::to_string(r.strategy) << " rate=" << cran::format_double(r.rate_mbps)
            << " users=" << r.users_per_cell << " seed=" << r.seed << " status=" << r.status
            << " iterations=" << r.iterations << " converged=" << (r.converged ? 1 : 0) << "\n";
  if (r.feasible())
    std::cerr << "total_w=" << cran::format_double(r.power.total) << " tx_w=" << cran::format_double(r.power.tx_w)
              << " activation_w=" << cran::format_double(r.power.activation_w)
              << " backhaul_w=" << cran::format_double(r.power.backhaul_w)
              << " active_bs=" << r.power.n_active_bs() << "/" << r.n_bs << "\n";
  if (!r.message.empty()) std::cerr << "message: " << r.message << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"C-RAN energy minimization experiment runner"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> realizations;
  std::optional<std::string> out_dir;
  bool verbose = false;
  std::vector<std::string> single;

  auto* run = app.add_subcommand("run", "Run the configured sweep and write outputs");
  run->add_option("--config", config_path, "JSON config file")->required();
  run->add_option("--seed", seed, "Override master_seed");
  run->add_option("--realizations", realizations, "Override n_realizations");
  run->add_option("--out", out_dir, "Override output_dir");
  run->add_flag("--verbose", verbose, "Debug logging");

  auto* validate = app.add_subcommand("validate", "Check a config file");
  validate->add_option("--config", config_path, "JSON config file")->required();

  auto* trace = app.add_subcommand("trace", "Run one strategy on one channel and print its trace");
  trace->add_option("--config", config_path, "JSON config file")->required();
  trace->add_option("--single", single, "rate=R users=U seed=S strategy=X")->required()->expected(4);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  cran::set_log_level(verbose ? cran::LogLevel::Debug : cran::LogLevel::Warn);
  try {
    cran::ExperimentConfig cfg = cran::load_config(config_path);

    if (*validate) {
      std::cout << "config ok: " << cfg.strategies.size() << " strategies, " << cfg.rates_mbps.size() << " rates, "
                << cfg.users_per_cell.size() << " densities, " << cfg.n_realizations << " realizations\n";
      return kOk;
    }

    if (*trace) {
      const TraceRequest req = parse_single(single);
      cran::set_log_level(cran::LogLevel::Debug);
      const auto channel = cran::realization_channel(cfg, req.users_per_cell, req.seed);
      cran::RunRecord rec = cran::solve_run(cfg, req.strategy, channel, req.rate_mbps);
      rec.users_per_cell = req.users_per_cell;
      rec.seed = req.seed;
      if (rec.trace) std::cout << rec.trace->csv();
      print_summary(rec);
      return kOk;
    }

    if (seed) cfg.master_seed = *seed;
    if (realizations) cfg.n_realizations = *realizations;
    if (out_dir) cfg.output_dir = *out_dir;
    cfg.validate();
    const auto result = cran::run_experiment(cfg, [](int done, int total) {
      std::fprintf(stderr, "\r%d/%d work items", done, total);
      if (done == total) std::fprintf(stderr, "\n");
    });
    cran::emit_outputs(cfg, result, cfg.output_dir);
    int feasible = 0;
    for (const auto& r : result.runs) feasible += r.feasible() ? 1 : 0;
    std::cout << "wrote " << cfg.output_dir << ": " << result.runs.size() << " runs, " << feasible << " feasible\n";
    return kOk;
  } catch (const cran::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIoError;
  } catch (const cran::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }
}
