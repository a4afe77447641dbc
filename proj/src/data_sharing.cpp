#include "cran/data_sharing.hpp"

#include <algorithm>
#include <cmath>

namespace cran {

DsWeights update_ds_weights(const Eigen::MatrixXcd& beamformers, const SimulationParams& params) {
  const Eigen::MatrixXd p = beamformers.cwiseAbs2();
  DsWeights w;
  w.mu.resize(p.rows());
  w.nu.resize(p.rows(), p.cols());
  for (int l = 0; l < p.rows(); ++l) {
    w.mu[l] = reweight(p.row(l).sum(), params.tau1);
    for (int k = 0; k < p.cols(); ++k) w.nu(l, k) = reweight(p(l, k), params.tau2);
  }
  return w;
}

Eigen::MatrixXd ds_surrogate_weights(const DsWeights& weights, const Eigen::VectorXd& rates_mbps,
                                     const SimulationParams& params) {
  const int L = static_cast<int>(weights.nu.rows()), K = static_cast<int>(weights.nu.cols());
  if (weights.mu.size() != L || rates_mbps.size() != K) throw DomainError("weight dimensions mismatch");
  Eigen::MatrixXd alpha(L, K);
  const double rho = params.rho_w_per_mbps();
  for (int l = 0; l < L; ++l)
    for (int k = 0; k < K; ++k)
      alpha(l, k) = params.eta + weights.mu[l] * params.delta_power_w() + rho * weights.nu(l, k) * rates_mbps[k];
  return alpha;
}

double smoothed_ds_objective(const Eigen::MatrixXcd& beamformers, const SimulationParams& params,
                             const Eigen::VectorXd& rates_mbps) {
  const Eigen::MatrixXd p = beamformers.cwiseAbs2();
  const double c1 = std::log1p(1.0 / params.tau1), c2 = std::log1p(1.0 / params.tau2);
  const double rho = params.rho_w_per_mbps();
  double v = 0.0;
  for (int l = 0; l < p.rows(); ++l) {
    const double load = p.row(l).sum();
    v += params.eta * load + params.delta_power_w() * std::log1p(load / params.tau1) / c1;
    for (int k = 0; k < p.cols(); ++k) v += rho * rates_mbps[k] * std::log1p(p(l, k) / params.tau2) / c2;
  }
  return v;
}

double ds_majorizer(const Eigen::MatrixXcd& beamformers, const Eigen::MatrixXcd& expansion,
                    const SimulationParams& params, const Eigen::VectorXd& rates_mbps) {
  const Eigen::MatrixXd p = beamformers.cwiseAbs2();
  const Eigen::MatrixXd p0 = expansion.cwiseAbs2();
  const double c1 = std::log1p(1.0 / params.tau1), c2 = std::log1p(1.0 / params.tau2);
  const double rho = params.rho_w_per_mbps();
  double v = 0.0;
  for (int l = 0; l < p.rows(); ++l) {
    const double load = p.row(l).sum();
    const double x = 1.0 + p0.row(l).sum() / params.tau1;
    v += params.eta * load + params.delta_power_w() * (std::log(x) + (1.0 + load / params.tau1) / x - 1.0) / c1;
    for (int k = 0; k < p.cols(); ++k) {
      const double y = 1.0 + p0(l, k) / params.tau2;
      v += rho * rates_mbps[k] * (std::log(y) + (1.0 + p(l, k) / params.tau2) / y - 1.0) / c2;
    }
  }
  return v;
}

ClusterExtraction extract_clusters(const Eigen::MatrixXcd& beamformers, double eps_cluster, double eps_active) {
  const Eigen::MatrixXd p = beamformers.cwiseAbs2();
  ClusterExtraction out;
  out.clusters.resize(p.cols());
  for (int k = 0; k < p.cols(); ++k)
    for (int l = 0; l < p.rows(); ++l)
      if (p(l, k) > eps_cluster) out.clusters[k].push_back(l);
  std::vector<double> tx(p.rows());
  for (int l = 0; l < p.rows(); ++l) tx[l] = p.row(l).sum();
  out.activity = activity_from_tx(tx, eps_active);
  return out;
}

std::vector<double> ds_backhaul_rates(const std::vector<std::vector<int>>& clusters, const Eigen::VectorXd& rates_mbps,
                                      int num_bs) {
  std::vector<double> r(num_bs, 0.0);
  for (std::size_t k = 0; k < clusters.size(); ++k)
    for (int l : clusters[k]) r[l] += rates_mbps[static_cast<int>(k)];
  return r;
}

namespace {

struct Evaluation {
  ClusterExtraction clusters;
  std::vector<double> backhaul;
  PowerBreakdown power;
  int max_cluster = 0;
};

Evaluation evaluate(const Eigen::MatrixXcd& w, const Eigen::VectorXd& rates, const SimulationParams& params,
                    const MmOptions& opts) {
  Evaluation e;
  e.clusters = extract_clusters(w, opts.eps_cluster, opts.eps_active);
  e.backhaul = ds_backhaul_rates(e.clusters.clusters, rates, static_cast<int>(w.rows()));
  std::vector<double> tx(w.rows());
  for (int l = 0; l < w.rows(); ++l) tx[l] = w.row(l).squaredNorm();
  e.power = total_power(tx, e.backhaul, params, e.clusters.activity);
  for (const auto& c : e.clusters.clusters) e.max_cluster = std::max(e.max_cluster, static_cast<int>(c.size()));
  return e;
}

MmTraceRow trace_row(int iter, double surrogate, double smoothed, const Evaluation& e) {
  MmTraceRow r;
  r.iter = iter;
  r.surrogate = surrogate;
  r.smoothed = smoothed;
  r.true_power = e.power.total;
  r.n_active = e.power.n_active_bs();
  r.max_cluster = e.max_cluster;
  return r;
}

}  // namespace

DsResult run_algorithm1(const ChannelRealization& channel, const Eigen::VectorXd& rates_mbps,
                        const SimulationParams& params, const MmOptions& opts) {
  const int L = channel.num_bs(), K = channel.num_users();
  DsResult res;
  const BoolMatrix mask = mm_candidate_mask(channel, opts.candidate_size);
  const QosInstance inst = make_qos_instance(channel, rates_mbps, params, mask);

  const auto init = solve_weighted_power_min(inst, Eigen::MatrixXd::Constant(L, K, params.eta), opts.solver);
  if (!init.ok()) {
    res.status = init.status;
    res.message = "initialization: " + init.message;
    return res;
  }
  Eigen::MatrixXcd w = init.beamformers;
  double f_prev = smoothed_ds_objective(w, params, rates_mbps);
  res.trace.rows.push_back(trace_row(0, f_prev, f_prev, evaluate(w, rates_mbps, params, opts)));
  if (opts.record_iterates) res.iterates.push_back(w);

  res.status = SolveStatus::Optimal;
  for (int it = 1; it <= opts.max_iter; ++it) {
    const Eigen::MatrixXd alpha = ds_surrogate_weights(update_ds_weights(w, params), rates_mbps, params);
    const auto sol = solve_weighted_power_min(inst, alpha, opts.solver);
    res.iterations = it;
    if (!sol.ok()) {
      res.status = sol.status;
      res.message = "iteration " + std::to_string(it) + ": " + sol.message;
      break;
    }
    const double g = ds_majorizer(sol.beamformers, w, params, rates_mbps);
    if (g > f_prev) {
      // Solver round-off only; the previous iterate already minimizes the surrogate.
      res.converged = true;
      break;
    }
    w = sol.beamformers;
    const double f = smoothed_ds_objective(w, params, rates_mbps);
    res.trace.rows.push_back(trace_row(it, g, f, evaluate(w, rates_mbps, params, opts)));
    if (opts.record_iterates) res.iterates.push_back(w);
    const bool done = std::abs(f_prev - f) <= opts.conv_tol * std::max(std::abs(f_prev), 1e-300);
    f_prev = f;
    if (done) {
      res.converged = true;
      break;
    }
  }
  if (res.status != SolveStatus::Optimal) {
    res.beamformers = w;
    return res;
  }

  // Re-solve with plain transmit-power weights on the thresholded support.
  const ClusterExtraction support = extract_clusters(w, opts.eps_cluster, opts.eps_active);
  QosInstance pruned = inst;
  pruned.allowed.setConstant(false);
  bool usable = true;
  for (int k = 0; k < K; ++k) {
    if (support.clusters[k].empty()) usable = false;
    for (int l : support.clusters[k]) pruned.allowed(l, k) = true;
  }
  if (usable) {
    const auto polished = solve_weighted_power_min(pruned, Eigen::MatrixXd::Constant(L, K, params.eta), opts.solver);
    if (polished.ok()) w = polished.beamformers;
  }

  const Evaluation fin = evaluate(w, rates_mbps, params, opts);
  res.beamformers = w;
  res.clusters = fin.clusters.clusters;
  res.activity = fin.clusters.activity;
  res.backhaul_rates_mbps = fin.backhaul;
  res.power = fin.power;
  return res;
}

}  // namespace cran
