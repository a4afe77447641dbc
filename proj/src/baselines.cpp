#include "cran/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cran {

Association single_bs_assign(const ChannelRealization& channel) {
  const int L = channel.num_bs(), K = channel.num_users();
  if (K > L) throw DomainError("single-BS association needs K <= L");
  const Eigen::MatrixXd g = channel.gains.cwiseAbs2();
  std::vector<int> order(K);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&g](int a, int b) { return g.col(a).maxCoeff() > g.col(b).maxCoeff(); });
  Association assoc;
  assoc.bs_of_user.assign(K, -1);
  std::vector<bool> taken(L, false);
  for (int k : order) {
    int best = -1;
    for (int l = 0; l < L; ++l)
      if (!taken[l] && (best < 0 || g(l, k) > g(best, k))) best = l;
    assoc.bs_of_user[k] = best;
    taken[best] = true;
  }
  return assoc;
}

SolverSolution single_bs_power_control(const ChannelRealization& channel, const Association& assoc,
                                       const Eigen::VectorXd& sinr_targets, const SimulationParams& params) {
  const int L = channel.num_bs(), K = channel.num_users();
  if (static_cast<int>(assoc.bs_of_user.size()) != K || sinr_targets.size() != K)
    throw DomainError("association and targets must cover every user");
  SolverSolution sol;
  sol.beamformers = Eigen::MatrixXcd::Zero(L, K);
  sol.quant_noise = Eigen::VectorXd::Zero(L);
  sol.backend_used = SolverBackend::Auto;

  // g(k, j) = |h_{a(j), k}|^2: gain from user j's serving BS to user k.
  Eigen::MatrixXd g(K, K);
  for (int k = 0; k < K; ++k)
    for (int j = 0; j < K; ++j) g(k, j) = std::norm(channel.gains(assoc.bs_of_user[j], k));
  const double sigma2 = channel.noise_power_w;
  const double cap = params.max_tx_power_w;

  Eigen::VectorXd p = Eigen::VectorXd::Zero(K);
  bool converged = false;
  for (int it = 1; it <= 10000 && !converged; ++it) {
    Eigen::VectorXd next(K);
    for (int k = 0; k < K; ++k)
      next[k] = sinr_targets[k] * (g.row(k).dot(p) - g(k, k) * p[k] + sigma2) / g(k, k);
    sol.iterations = it;
    double change = 0.0;
    for (int k = 0; k < K; ++k) change = std::max(change, std::abs(next[k] - p[k]) / next[k]);
    p = next;
    if ((p.array() > cap).any()) {
      sol.status = SolveStatus::Infeasible;
      sol.message = "required transmit power exceeds the BS cap";
      return sol;
    }
    converged = change <= 1e-9;
  }
  if (!converged) {
    sol.status = SolveStatus::Infeasible;
    sol.message = "power iteration did not settle";
    return sol;
  }

  Eigen::MatrixXd a = -g;
  for (int k = 0; k < K; ++k) a(k, k) = g(k, k) / sinr_targets[k];
  const Eigen::VectorXd exact = a.partialPivLu().solve(Eigen::VectorXd::Constant(K, sigma2));
  if (exact.allFinite() && (exact.array() > 0.0).all() && (exact.array() <= cap).all()) p = exact;

  for (int k = 0; k < K; ++k) {
    const int l = assoc.bs_of_user[k];
    const std::complex<double> h = channel.gains(l, k);
    sol.beamformers(l, k) = std::sqrt(p[k]) * h / std::abs(h);
  }
  sol.achieved_sinr = compute_sinr(channel.gains, sol.beamformers, sol.quant_noise, sigma2);
  sol.objective = p.sum();
  sol.status = SolveStatus::Optimal;
  return sol;
}

SingleBsResult run_single_bs(const ChannelRealization& channel, const Eigen::VectorXd& rates_mbps,
                             const SimulationParams& params, bool bill_backhaul, double eps_active) {
  const int L = channel.num_bs(), K = channel.num_users();
  if (rates_mbps.size() != K) throw DomainError("one rate target per user required");
  SingleBsResult res;
  if (K > L) {
    res.status = SolveStatus::Infeasible;
    res.message = "more users than BSs";
    return res;
  }
  res.association = single_bs_assign(channel);
  Eigen::VectorXd gamma(K);
  for (int k = 0; k < K; ++k) gamma[k] = rate_to_sinr_target(rates_mbps[k], params);
  const SolverSolution sol = single_bs_power_control(channel, res.association, gamma, params);
  res.status = sol.status;
  res.iterations = sol.iterations;
  res.message = sol.message;
  if (!sol.ok()) return res;

  res.beamformers = sol.beamformers;
  std::vector<double> tx(L, 0.0);
  res.backhaul_rates_mbps.assign(L, 0.0);
  for (int k = 0; k < K; ++k) {
    const int l = res.association.bs_of_user[k];
    tx[l] = std::norm(sol.beamformers(l, k));
    if (bill_backhaul) res.backhaul_rates_mbps[l] = rates_mbps[k];
  }
  res.power = total_power(tx, res.backhaul_rates_mbps, params, eps_active);
  res.activity = res.power.activity;
  return res;
}

DsResult per_cell_comp(const ChannelRealization& channel, const Eigen::VectorXd& rates_mbps,
                       const SimulationParams& params, const SolverOptions& opts) {
  const int L = channel.num_bs(), K = channel.num_users();
  if (static_cast<int>(channel.bs_cell.size()) != L || static_cast<int>(channel.user_cell.size()) != K)
    throw DomainError("channel lacks cell labels");
  BoolMatrix mask(L, K);
  for (int l = 0; l < L; ++l)
    for (int k = 0; k < K; ++k) mask(l, k) = channel.bs_cell[l] == channel.user_cell[k];

  DsResult res;
  res.iterations = 1;
  const QosInstance inst = make_qos_instance(channel, rates_mbps, params, mask);
  const auto sol = solve_weighted_power_min(inst, Eigen::MatrixXd::Constant(L, K, params.eta), opts);
  res.status = sol.status;
  res.message = sol.message;
  if (!sol.ok()) return res;

  res.converged = true;
  res.beamformers = sol.beamformers;
  res.clusters.resize(K);
  res.backhaul_rates_mbps.assign(L, 0.0);
  for (int k = 0; k < K; ++k)
    for (int l = 0; l < L; ++l)
      if (mask(l, k)) {
        res.clusters[k].push_back(l);
        res.backhaul_rates_mbps[l] += rates_mbps[k];
      }
  std::vector<double> tx(L);
  for (int l = 0; l < L; ++l) tx[l] = sol.beamformers.row(l).squaredNorm();
  res.activity.active.assign(L, true);
  res.activity.threshold_used = 0.0;
  res.power = total_power(tx, res.backhaul_rates_mbps, params, res.activity);
  return res;
}

}  // namespace cran
