#include <cmath>
#include <numbers>

#include "cran/convex_core.hpp"
#include "qos_internal.hpp"

namespace cran {

using detail::NormalizedQos;
using detail::QosObjective;
using detail::QosProgram;

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::NumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

const char* to_string(SolverBackend backend) {
  switch (backend) {
    case SolverBackend::Auto: return "auto";
    case SolverBackend::DualFixedPoint: return "dual_fixed_point";
    case SolverBackend::InteriorPoint: return "interior_point";
  }
  return "unknown";
}

void QosInstance::validate() const {
  const int L = num_bs(), K = num_users();
  if (!(noise_power_w > 0.0) || !std::isfinite(noise_power_w)) throw DomainError("noise power must be > 0");
  if (sinr_targets.size() != K) throw DomainError("one SINR target per user required");
  if (power_caps.size() != L) throw DomainError("one power cap per BS required");
  if (allowed.rows() != L || allowed.cols() != K) throw DomainError("mask must be L x K");
  if (!gains.allFinite()) throw DomainError("gains must be finite");
  for (int k = 0; k < K; ++k) {
    if (!(sinr_targets[k] > 0.0) || !std::isfinite(sinr_targets[k]))
      throw DomainError("SINR targets must be > 0");
    if (!allowed.col(k).any()) throw DomainError("every user needs an allowed BS");
  }
  for (int l = 0; l < L; ++l)
    if (!(power_caps[l] > 0.0)) throw DomainError("power caps must be > 0");
}

Eigen::VectorXd compute_sinr(const Eigen::MatrixXcd& gains, const Eigen::MatrixXcd& beamformers,
                             const Eigen::VectorXd& quant_noise, double noise_power_w) {
  const int K = static_cast<int>(gains.cols());
  const Eigen::MatrixXd g = (gains.adjoint() * beamformers).cwiseAbs2();  // g(k, j) = |h_k^H w_j|^2
  Eigen::VectorXd sinr(K);
  for (int k = 0; k < K; ++k) {
    double denom = noise_power_w + g.row(k).sum() - g(k, k);
    if (quant_noise.size() > 0) denom += gains.col(k).cwiseAbs2().dot(quant_noise.cwiseAbs2());
    sinr[k] = g(k, k) / denom;
  }
  return sinr;
}

double compression_subproblem_objective(const Eigen::MatrixXcd& beamformers, const Eigen::VectorXd& q,
                                        const Eigen::VectorXd& phi, const Eigen::VectorXd& psi,
                                        const Eigen::VectorXd& rho) {
  double v = 0.0;
  const Eigen::VectorXd load = beamformers.cwiseAbs2().rowwise().sum();
  for (int l = 0; l < q.size(); ++l)
    v += phi[l] * load[l] + psi[l] * q[l] * q[l] - 2.0 * rho[l] * std::log2(q[l]);
  return v;
}

namespace {

bool caps_hold(const NormalizedQos& qos, const Eigen::MatrixXcd& w, const Eigen::VectorXd& q, double rel) {
  const Eigen::VectorXd load = w.cwiseAbs2().rowwise().sum() + q.cwiseAbs2();
  for (int l = 0; l < qos.num_bs; ++l)
    if (load[l] > qos.caps[l] * (1.0 + rel)) return false;
  return true;
}

SolverSolution finish(const QosInstance& inst, const QosObjective& obj, Eigen::MatrixXcd w,
                      Eigen::VectorXd q, SolverBackend backend, int iterations, double gap) {
  SolverSolution sol;
  detail::normalize_phases(inst.gains, w);
  sol.beamformers = std::move(w);
  sol.quant_noise = std::move(q);
  sol.objective = detail::objective_value(obj, sol.beamformers, sol.quant_noise);
  sol.achieved_sinr = compute_sinr(inst.gains, sol.beamformers, obj.has_q ? sol.quant_noise : Eigen::VectorXd(),
                                   inst.noise_power_w);
  sol.backend_used = backend;
  sol.iterations = iterations;
  sol.duality_gap = gap;
  sol.status = SolveStatus::Optimal;
  for (int k = 0; k < inst.num_users(); ++k)
    if (sol.achieved_sinr[k] < inst.sinr_targets[k] * (1.0 - 1e-6)) {
      sol.status = SolveStatus::NumericalFailure;
      sol.message = "SINR target missed after solve";
    }
  return sol;
}

SolverSolution failure(SolveStatus status, SolverBackend backend, std::string message, int L, int K) {
  SolverSolution sol;
  sol.status = status;
  sol.backend_used = backend;
  sol.message = std::move(message);
  sol.beamformers = Eigen::MatrixXcd::Zero(L, K);
  sol.quant_noise = Eigen::VectorXd::Zero(L);
  sol.achieved_sinr = Eigen::VectorXd::Zero(K);
  return sol;
}

struct FastPathOutcome {
  std::optional<SolverSolution> solution;
  bool infeasible = false;
  Eigen::MatrixXcd w;  // best guess for warm-starting the interior-point method
  Eigen::VectorXd q;
};

FastPathOutcome fast_path(const QosInstance& inst, const NormalizedQos& qos, const QosObjective& obj,
                          const SolverOptions& opts) {
  FastPathOutcome out;
  double bound = 0.0;
  for (int l = 0; l < qos.num_bs; ++l) {
    double wmax = 0.0;
    for (int k = 0; k < qos.num_users; ++k)
      if (qos.allowed(l, k)) wmax = std::max(wmax, obj.weights(l, k));
    bound += wmax * qos.caps[l];
  }
  const auto fp = detail::dual_fixed_point(qos, obj.weights, bound, opts.max_fixed_point_iters,
                                           opts.fixed_point_tol);
  if (fp.certified_infeasible) {
    out.infeasible = true;
    return out;
  }
  if (!fp.converged) return out;

  Eigen::VectorXd q = Eigen::VectorXd::Zero(qos.num_bs);
  double dual = fp.beta.sum();
  if (obj.has_q) {
    for (int l = 0; l < qos.num_bs; ++l) {
      double a = obj.psi[l];
      for (int k = 0; k < qos.num_users; ++k) a += fp.beta[k] * std::norm(qos.h(l, k));
      const double half_kappa = obj.kappa[l] / 2.0;
      q[l] = std::sqrt(half_kappa / a);
      dual += half_kappa * (1.0 - std::log(half_kappa / a));
    }
  }
  const auto p = detail::tight_powers(qos, fp.directions, detail::quantization_interference(qos, q));
  if (!p) return out;
  Eigen::MatrixXcd w = fp.directions * p->cwiseSqrt().asDiagonal();
  out.w = w;
  out.q = q;
  if (!caps_hold(qos, w, q, 1e-12)) return out;
  const double primal = detail::objective_value(obj, w, q);
  const double gap = primal - dual;
  if (std::abs(gap) > 1e-7 * std::max(1.0, std::abs(primal))) return out;
  out.solution = finish(inst, obj, std::move(w), std::move(q), SolverBackend::DualFixedPoint,
                        fp.iterations, gap);
  return out;
}

SolverSolution interior_point_path(const QosInstance& inst, const NormalizedQos& qos, const QosObjective& obj,
                                   const SolverOptions& opts, Eigen::MatrixXcd w0, Eigen::VectorXd q0) {
  const int L = qos.num_bs, K = qos.num_users;
  if (w0.size() == 0) w0 = Eigen::MatrixXcd::Zero(L, K);
  if (q0.size() == 0) q0 = Eigen::VectorXd::Zero(L);
  if (obj.has_q)
    for (int l = 0; l < L; ++l)
      if (!(q0[l] > 0.0)) q0[l] = std::sqrt(qos.caps[l]) * 0.1;

  int total_iters = 0;
  QosProgram feas(qos, obj, QosProgram::Mode::Feasibility);
  QosProgram opt(qos, obj, QosProgram::Mode::Optimize);
  Eigen::VectorXd x;
  const double v0 = feas.max_violation(w0, q0);
  if (v0 < -1e-3 && (!obj.has_q || (q0.array() > 0.0).all())) {
    x = opt.pack(w0, q0);
  } else {
    detail::IpmOptions p1;
    p1.max_iters = opts.max_ipm_iters;
    p1.gap_tol_rel = 0.0;
    p1.gap_tol_abs = 1e-10;
    p1.feas_tol = opts.feas_tol;
    p1.early_stop = [&feas](const Eigen::VectorXd& xx) { return feas.slack(xx) <= -0.05; };
    const auto r1 = detail::primal_dual_interior_point(feas, feas.pack(w0, q0, v0 + 1.0), p1);
    total_iters += r1.iterations;
    const double s = feas.slack(r1.x);
    if (s >= 0.0) {
      const bool settled = r1.status == detail::IpmStatus::Converged;
      if ((settled && s > opts.infeasibility_threshold) || s - r1.gap > opts.infeasibility_threshold)
        return failure(SolveStatus::Infeasible, SolverBackend::InteriorPoint,
                       "phase I violation " + std::to_string(s), L, K);
      return failure(SolveStatus::NumericalFailure, SolverBackend::InteriorPoint,
                     "no strictly feasible point found", L, K);
    }
    x = opt.pack(feas.unpack_w(r1.x), feas.unpack_q(r1.x));
  }

  detail::IpmOptions p2;
  p2.max_iters = opts.max_ipm_iters;
  p2.gap_tol_rel = opts.gap_tol;
  p2.feas_tol = opts.feas_tol;
  const auto r2 = detail::primal_dual_interior_point(opt, x, p2);
  total_iters += r2.iterations;
  const bool accept = r2.status == detail::IpmStatus::Converged ||
                      (r2.gap <= 1e-7 * std::max(1.0, std::abs(r2.objective)) && r2.dual_residual <= 1e-6);
  if (!accept)
    return failure(SolveStatus::NumericalFailure, SolverBackend::InteriorPoint,
                   "interior-point tolerance not reached", L, K);

  Eigen::MatrixXcd w = opt.unpack_w(r2.x);
  Eigen::VectorXd q = opt.unpack_q(r2.x);
  Eigen::MatrixXcd dirs = w;
  for (int k = 0; k < K; ++k) dirs.col(k) /= dirs.col(k).norm();
  if (const auto p = detail::tight_powers(qos, dirs, detail::quantization_interference(qos, q))) {
    Eigen::MatrixXcd polished = dirs * p->cwiseSqrt().asDiagonal();
    if (caps_hold(qos, polished, q, 1e-10)) w = std::move(polished);
  }
  return finish(inst, obj, std::move(w), obj.has_q ? q : Eigen::VectorXd::Zero(L),
                SolverBackend::InteriorPoint, total_iters, r2.gap);
}

SolverSolution solve_qos(const QosInstance& inst, const QosObjective& obj, const SolverOptions& opts) {
  inst.validate();
  const int L = inst.num_bs(), K = inst.num_users();
  if (K == 0) {
    QosObjective o = obj;
    Eigen::VectorXd q = Eigen::VectorXd::Zero(L);
    if (obj.has_q)
      for (int l = 0; l < L; ++l) q[l] = std::min(std::sqrt(obj.kappa[l] / (2.0 * obj.psi[l])),
                                                  std::sqrt(inst.power_caps[l]));
    return finish(inst, o, Eigen::MatrixXcd::Zero(L, 0), q, SolverBackend::DualFixedPoint, 0, 0.0);
  }
  const NormalizedQos qos(inst);
  FastPathOutcome fast;
  if (opts.backend != SolverBackend::InteriorPoint) {
    fast = fast_path(inst, qos, obj, opts);
    if (fast.solution) return *fast.solution;
    if (fast.infeasible)
      return failure(SolveStatus::Infeasible, SolverBackend::DualFixedPoint,
                     "multiplier iteration exceeded the feasibility bound", L, K);
    if (opts.backend == SolverBackend::DualFixedPoint)
      return failure(SolveStatus::NumericalFailure, SolverBackend::DualFixedPoint,
                     "fixed point unavailable or a power cap binds", L, K);
  }
  return interior_point_path(inst, qos, obj, opts, fast.w, fast.q);
}

}  // namespace

SolverSolution solve_weighted_power_min(const QosInstance& inst, const Eigen::MatrixXd& weights,
                                        const SolverOptions& opts) {
  if (weights.rows() != inst.num_bs() || weights.cols() != inst.num_users())
    throw DomainError("weights must be L x K");
  for (int k = 0; k < inst.num_users(); ++k)
    for (int l = 0; l < inst.num_bs(); ++l)
      if (inst.allowed(l, k) && !(weights(l, k) > 0.0)) throw DomainError("weights must be > 0 on the mask");
  QosObjective obj;
  obj.weights = weights;
  return solve_qos(inst, obj, opts);
}

SolverSolution solve_compression_subproblem(const QosInstance& inst, const Eigen::VectorXd& phi,
                                            const Eigen::VectorXd& psi, const Eigen::VectorXd& rho,
                                            const SolverOptions& opts) {
  const int L = inst.num_bs();
  if (phi.size() != L || psi.size() != L || rho.size() != L) throw DomainError("coefficients must have length L");
  if ((phi.array() <= 0.0).any() || (psi.array() <= 0.0).any() || (rho.array() <= 0.0).any())
    throw DomainError("phi, psi, rho must be > 0");
  QosObjective obj;
  obj.weights = phi.replicate(1, inst.num_users());
  obj.has_q = true;
  obj.psi = psi;
  obj.kappa = 2.0 * rho / std::numbers::ln2;
  return solve_qos(inst, obj, opts);
}

}  // namespace cran
