#include "cran/compression.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cran {

std::vector<double> compression_backhaul_rate(const Eigen::MatrixXcd& beamformers, const Eigen::VectorXd& q,
                                              const SimulationParams& params) {
  if (q.size() != beamformers.rows()) throw DomainError("one quantization level per BS required");
  std::vector<double> r(q.size(), 0.0);
  const double gq = params.gamma_q();
  for (int l = 0; l < q.size(); ++l) {
    const double signal = beamformers.row(l).squaredNorm();
    if (signal == 0.0) continue;
    if (!(q[l] > 0.0)) throw DomainError("quantization noise must be > 0 on a transmitting BS");
    r[l] = std::log2(1.0 + gq * signal / (q[l] * q[l])) * params.bandwidth_mhz();
  }
  return r;
}

CompWeights update_comp_weights(const Eigen::MatrixXcd& beamformers, const Eigen::VectorXd& q,
                                const SimulationParams& params) {
  const int L = static_cast<int>(beamformers.rows());
  if (q.size() != L) throw DomainError("one quantization level per BS required");
  CompWeights w;
  w.beta.resize(L);
  w.lambda.resize(L);
  for (int l = 0; l < L; ++l) {
    const double signal = beamformers.row(l).squaredNorm();
    w.beta[l] = reweight(signal + q[l] * q[l], params.tau3);
    w.lambda[l] = q[l] * q[l] + params.gamma_q() * signal;
  }
  return w;
}

CompCoeffs comp_surrogate_coeffs(const CompWeights& weights, const SimulationParams& params) {
  const int L = static_cast<int>(weights.beta.size());
  if (weights.lambda.size() != L) throw DomainError("weight dimensions mismatch");
  if ((weights.lambda.array() <= 0.0).any()) throw DomainError("lambda must be > 0");
  CompCoeffs c;
  c.rho = Eigen::VectorXd::Constant(L, params.rho_w_per_spectral());
  const Eigen::ArrayXd base = params.eta + weights.beta.array() * params.delta_power_w();
  const Eigen::ArrayXd bh = c.rho.array() / (weights.lambda.array() * std::numbers::ln2);
  c.phi = base + params.gamma_q() * bh;
  c.psi = base + bh;
  return c;
}

double smoothed_comp_objective(const Eigen::MatrixXcd& beamformers, const Eigen::VectorXd& q,
                               const SimulationParams& params) {
  if (q.size() != beamformers.rows()) throw DomainError("one quantization level per BS required");
  if ((q.array() <= 0.0).any()) throw DomainError("quantization noise must be > 0");
  const double c3 = std::log1p(1.0 / params.tau3);
  const double rho = params.rho_w_per_spectral();
  double v = 0.0;
  for (int l = 0; l < q.size(); ++l) {
    const double signal = beamformers.row(l).squaredNorm();
    const double q2 = q[l] * q[l];
    const double ptx = signal + q2;
    v += params.eta * ptx + params.delta_power_w() * std::log1p(ptx / params.tau3) / c3 +
         rho * std::log2(1.0 + params.gamma_q() * signal / q2);
  }
  return v;
}

double comp_majorizer(const Eigen::MatrixXcd& beamformers, const Eigen::VectorXd& q, const Eigen::MatrixXcd& w0,
                      const Eigen::VectorXd& q0, const SimulationParams& params) {
  if (q.size() != beamformers.rows() || q0.size() != w0.rows()) throw DomainError("one quantization level per BS required");
  if ((q.array() <= 0.0).any() || (q0.array() <= 0.0).any()) throw DomainError("quantization noise must be > 0");
  const double c3 = std::log1p(1.0 / params.tau3);
  const double rho = params.rho_w_per_spectral();
  const double gq = params.gamma_q();
  constexpr double ln2 = std::numbers::ln2;
  double v = 0.0;
  for (int l = 0; l < q.size(); ++l) {
    const double signal = beamformers.row(l).squaredNorm();
    const double q2 = q[l] * q[l];
    const double ptx = signal + q2;
    const double signal0 = w0.row(l).squaredNorm();
    const double z = 1.0 + (signal0 + q0[l] * q0[l]) / params.tau3;
    const double lambda0 = q0[l] * q0[l] + gq * signal0;
    v += params.eta * ptx - 2.0 * rho * std::log2(q[l]) +
         params.delta_power_w() * (std::log(z) + (1.0 + ptx / params.tau3) / z - 1.0) / c3 +
         rho * (std::log2(lambda0) + (q2 + gq * signal) / (lambda0 * ln2) - 1.0 / ln2);
  }
  return v;
}

namespace {

// Smallest c^2 >= 1 such that c W meets every SINR target under quantization noise q.
double restoring_scale(const QosInstance& inst, const Eigen::MatrixXcd& w, const Eigen::VectorXd& q) {
  const Eigen::MatrixXd g = (inst.gains.adjoint() * w).cwiseAbs2();  // g(k, j) = |h_k^H w_j|^2
  double c2 = 1.0;
  for (int k = 0; k < inst.num_users(); ++k) {
    const double gamma = inst.sinr_targets[k];
    const double signal = g(k, k);
    const double interference = g.row(k).sum() - signal;
    double quant = 0.0;
    for (int l = 0; l < inst.num_bs(); ++l) quant += std::norm(inst.gains(l, k)) * q[l] * q[l];
    const double margin = signal - gamma * interference;
    if (!(margin > 0.0)) return std::numeric_limits<double>::infinity();
    c2 = std::max(c2, gamma * (quant + inst.noise_power_w) / margin);
  }
  return c2;
}

}  // namespace

CompInit compression_init(const QosInstance& inst, const SimulationParams& params, const SolverOptions& opts) {
  const int L = inst.num_bs(), K = inst.num_users();
  CompInit out;
  const auto ds = solve_weighted_power_min(inst, Eigen::MatrixXd::Constant(L, K, params.eta), opts);
  if (ds.status == SolveStatus::Infeasible) {
    out.status = SolveStatus::Infeasible;
    out.message = "no feasible beamformer without quantization noise: " + ds.message;
    return out;
  }
  if (ds.ok()) {
    const Eigen::VectorXd load = ds.beamformers.rowwise().squaredNorm();
    Eigen::VectorXd q2(L);
    bool positive = true;
    for (int l = 0; l < L; ++l) {
      const double headroom = inst.power_caps[l] - load[l];
      q2[l] = std::min(std::max(0.01 * inst.power_caps[l], headroom / 2.0), headroom);
      positive = positive && q2[l] > 0.0;
    }
    for (double theta = 1.0; positive && theta * q2.maxCoeff() >= 1e-12; theta *= 0.5) {
      const Eigen::VectorXd q = (theta * q2).cwiseSqrt();
      const double c2 = restoring_scale(inst, ds.beamformers, q);
      if (!std::isfinite(c2)) break;
      if (((c2 * load + q.cwiseAbs2()).array() <= inst.power_caps.array()).all()) {
        out.status = SolveStatus::Optimal;
        out.beamformers = std::sqrt(c2) * ds.beamformers;
        out.quant_noise = q;
        return out;
      }
    }
  }
  // Caps too tight for the recipe above: take the subproblem optimum with plain power weights.
  const Eigen::VectorXd eta = Eigen::VectorXd::Constant(L, params.eta);
  const auto sol = solve_compression_subproblem(inst, eta, eta, Eigen::VectorXd::Constant(L, params.rho_w_per_spectral()),
                                                opts);
  out.status = sol.status;
  out.message = sol.message;
  if (sol.ok()) {
    out.beamformers = sol.beamformers;
    out.quant_noise = sol.quant_noise;
  }
  return out;
}

namespace {

struct Evaluation {
  std::vector<double> backhaul;
  PowerBreakdown power;
  int max_cluster = 0;
};

Evaluation evaluate(const Eigen::MatrixXcd& w, const Eigen::VectorXd& q, const SimulationParams& params,
                    const MmOptions& opts) {
  Evaluation e;
  e.backhaul = compression_backhaul_rate(w, q, params);
  std::vector<double> tx(w.rows());
  for (int l = 0; l < w.rows(); ++l) tx[l] = w.row(l).squaredNorm() + q[l] * q[l];
  e.power = total_power(tx, e.backhaul, params, opts.eps_active);
  const Eigen::MatrixXd p = w.cwiseAbs2();
  for (int k = 0; k < p.cols(); ++k)
    e.max_cluster = std::max(e.max_cluster, static_cast<int>((p.col(k).array() > opts.eps_cluster).count()));
  return e;
}

MmTraceRow trace_row(int iter, double surrogate, double smoothed, const Eigen::VectorXd& q, const Evaluation& e) {
  MmTraceRow r;
  r.iter = iter;
  r.surrogate = surrogate;
  r.smoothed = smoothed;
  r.true_power = e.power.total;
  r.n_active = e.power.n_active_bs();
  r.max_cluster = e.max_cluster;
  r.q_min = q.minCoeff();
  r.q_max = q.maxCoeff();
  r.backhaul_total_mbps = 0.0;
  for (double b : e.backhaul) r.backhaul_total_mbps += b;
  return r;
}

}  // namespace

CompResult run_algorithm2(const ChannelRealization& channel, const Eigen::VectorXd& rates_mbps,
                          const SimulationParams& params, const MmOptions& opts) {
  CompResult res;
  res.trace.compression_columns = true;
  const BoolMatrix mask = mm_candidate_mask(channel, opts.candidate_size);
  const QosInstance inst = make_qos_instance(channel, rates_mbps, params, mask);

  const CompInit init = compression_init(inst, params, opts.solver);
  if (init.status != SolveStatus::Optimal) {
    res.status = init.status;
    res.message = "initialization: " + init.message;
    return res;
  }
  Eigen::MatrixXcd w = init.beamformers;
  Eigen::VectorXd q = init.quant_noise;
  double f_prev = smoothed_comp_objective(w, q, params);
  res.trace.rows.push_back(trace_row(0, f_prev, f_prev, q, evaluate(w, q, params, opts)));
  if (opts.record_iterates) {
    res.iterates.push_back(w);
    res.quant_iterates.push_back(q);
  }

  res.status = SolveStatus::Optimal;
  for (int it = 1; it <= opts.max_iter; ++it) {
    const CompCoeffs c = comp_surrogate_coeffs(update_comp_weights(w, q, params), params);
    const auto sol = solve_compression_subproblem(inst, c.phi, c.psi, c.rho, opts.solver);
    res.iterations = it;
    if (!sol.ok()) {
      res.status = sol.status;
      res.message = "iteration " + std::to_string(it) + ": " + sol.message;
      break;
    }
    const double g = comp_majorizer(sol.beamformers, sol.quant_noise, w, q, params);
    if (g > f_prev) {
      res.converged = true;
      break;
    }
    w = sol.beamformers;
    q = sol.quant_noise;
    const double f = smoothed_comp_objective(w, q, params);
    res.trace.rows.push_back(trace_row(it, g, f, q, evaluate(w, q, params, opts)));
    if (opts.record_iterates) {
      res.iterates.push_back(w);
      res.quant_iterates.push_back(q);
    }
    const bool done = std::abs(f_prev - f) <= opts.conv_tol * std::max(std::abs(f_prev), 1e-300);
    f_prev = f;
    if (done) {
      res.converged = true;
      break;
    }
  }
  res.beamformers = w;
  res.quant_noise = q;
  if (res.status != SolveStatus::Optimal) return res;

  const Evaluation fin = evaluate(w, q, params, opts);
  res.backhaul_rates_mbps = fin.backhaul;
  res.activity = fin.power.activity;
  res.power = fin.power;
  return res;
}

}  // namespace cran
