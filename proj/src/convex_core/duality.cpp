#include <cmath>
#include <limits>

#include "qos_internal.hpp"

namespace cran::detail {
namespace {

// A_j = D_j + sum_k beta_k h_k h_k^H restricted to the support of user j.
Eigen::MatrixXcd restricted_matrix(const NormalizedQos& qos, const Eigen::MatrixXcd& gram,
                                   const Eigen::MatrixXd& weights, int j) {
  const auto& sup = qos.support[j];
  const int s = static_cast<int>(sup.size());
  Eigen::MatrixXcd a(s, s);
  for (int r = 0; r < s; ++r)
    for (int c = 0; c < s; ++c) a(r, c) = gram(sup[r], sup[c]);
  for (int r = 0; r < s; ++r) a(r, r) += weights(sup[r], j);
  return a;
}

Eigen::VectorXcd restricted_channel(const NormalizedQos& qos, int j) {
  const auto& sup = qos.support[j];
  Eigen::VectorXcd v(sup.size());
  for (std::size_t i = 0; i < sup.size(); ++i) v[i] = qos.h(sup[i], j);
  return v;
}

}  // namespace

namespace {

struct Sweep {
  Eigen::VectorXd next;     ///< T(beta)
  Eigen::MatrixXd jacobian; ///< dT/dbeta, filled on request
};

Sweep evaluate_map(const NormalizedQos& qos, const Eigen::MatrixXd& weights, const std::vector<Eigen::VectorXcd>& hj,
                   const Eigen::VectorXd& beta, bool with_jacobian) {
  const int K = qos.num_users;
  Sweep out;
  out.next.resize(K);
  if (with_jacobian) out.jacobian.resize(K, K);
  const Eigen::MatrixXcd gram = qos.h * beta.asDiagonal() * qos.h.adjoint();
  for (int j = 0; j < K; ++j) {
    const Eigen::LLT<Eigen::MatrixXcd> llt(restricted_matrix(qos, gram, weights, j));
    const double scale = 1.0 + 1.0 / qos.gamma[j];
    if (!with_jacobian) {
      out.next[j] = 1.0 / (scale * hj[j].dot(llt.solve(hj[j])).real());
      continue;
    }
    const auto& sup = qos.support[j];
    Eigen::MatrixXcd hs(sup.size(), K);
    for (std::size_t i = 0; i < sup.size(); ++i) hs.row(i) = qos.h.row(sup[i]);
    const Eigen::RowVectorXcd v = hj[j].adjoint() * llt.solve(hs);
    const double t = 1.0 / (scale * v[j].real());
    out.next[j] = t;
    out.jacobian.row(j) = scale * t * t * v.cwiseAbs2();
  }
  return out;
}

double relative_change(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  double change = 0.0;
  for (int j = 0; j < a.size(); ++j) change = std::max(change, std::abs(a[j] - b[j]) / a[j]);
  return change;
}

// Newton's method on beta - T(beta) = 0. T is concave and monotone, so once a
// step lands above the fixed point the iterates decrease towards it.
bool newton_solve(const NormalizedQos& qos, const Eigen::MatrixXd& weights, const std::vector<Eigen::VectorXcd>& hj,
                  double infeasible_bound, double tol, FixedPointResult& res) {
  const int K = qos.num_users;
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(K);
  double best = std::numeric_limits<double>::infinity();
  int stalled = 0;
  for (int it = 1; it <= 200; ++it) {
    const Sweep sw = evaluate_map(qos, weights, hj, beta, true);
    res.iterations = it;
    if (!sw.next.allFinite() || !sw.jacobian.allFinite()) return false;
    const double change = relative_change(sw.next, beta);
    if (change <= tol || (change < 1e-10 && ++stalled >= 3)) {
      res.beta = sw.next;
      return true;
    }
    if (change < best) {
      best = change;
      stalled = 0;
    }
    const Eigen::MatrixXd jac = Eigen::MatrixXd::Identity(K, K) - sw.jacobian;
    const Eigen::VectorXd step = jac.partialPivLu().solve(beta - sw.next);
    const Eigen::VectorXd candidate = beta - step;
    const bool usable = candidate.allFinite() && (candidate.array() > 0.0).all() && candidate.sum() <= infeasible_bound;
    // Far below the fixed point the linearization can point outside the cone; fall back to a plain step.
    beta = usable ? candidate : sw.next;
  }
  return false;
}

}  // namespace

FixedPointResult dual_fixed_point(const NormalizedQos& qos, const Eigen::MatrixXd& weights,
                                  double infeasible_bound, int max_iters, double tol) {
  const int K = qos.num_users;
  FixedPointResult res;
  std::vector<Eigen::VectorXcd> hj(K);
  for (int j = 0; j < K; ++j) hj[j] = restricted_channel(qos, j);

  res.converged = newton_solve(qos, weights, hj, infeasible_bound, tol, res);
  const int newton_iters = res.iterations;
  if (!res.converged) {
    // Plain monotone iteration from zero; also certifies infeasibility.
    res.beta = Eigen::VectorXd::Zero(K);
    for (int it = 1; it <= max_iters; ++it) {
      const Eigen::VectorXd next = evaluate_map(qos, weights, hj, res.beta, false).next;
      res.iterations = newton_iters + it;
      const double change = relative_change(next, res.beta);
      res.beta = next;
      if (!res.beta.allFinite()) return res;
      if (res.beta.sum() > infeasible_bound) {
        res.certified_infeasible = true;
        return res;
      }
      if (change <= tol) {
        res.converged = true;
        break;
      }
    }
  }
  if (!res.converged) return res;

  const Eigen::MatrixXcd gram = qos.h * res.beta.asDiagonal() * qos.h.adjoint();
  res.directions = Eigen::MatrixXcd::Zero(qos.num_bs, K);
  for (int j = 0; j < K; ++j) {
    const Eigen::LLT<Eigen::MatrixXcd> llt(restricted_matrix(qos, gram, weights, j));
    Eigen::VectorXcd v = llt.solve(hj[j]);
    v /= v.norm();
    for (std::size_t i = 0; i < qos.support[j].size(); ++i) res.directions(qos.support[j][i], j) = v[i];
  }
  return res;
}

std::optional<Eigen::VectorXd> tight_powers(const NormalizedQos& qos, const Eigen::MatrixXcd& directions,
                                            const Eigen::VectorXd& extra_noise) {
  const int K = qos.num_users;
  const Eigen::MatrixXd g = (qos.h.adjoint() * directions).cwiseAbs2();  // g(k, j) = |h_k^H u_j|^2
  Eigen::MatrixXd a = -g;
  for (int k = 0; k < K; ++k) a(k, k) = g(k, k) / qos.gamma[k];
  const Eigen::VectorXd rhs = Eigen::VectorXd::Ones(K) + extra_noise;
  const Eigen::VectorXd p = a.partialPivLu().solve(rhs);
  if (!p.allFinite() || (p.array() <= 0.0).any()) return std::nullopt;
  return p;
}

void normalize_phases(const Eigen::MatrixXcd& h, Eigen::MatrixXcd& w) {
  for (int k = 0; k < w.cols(); ++k) {
    const std::complex<double> s = h.col(k).dot(w.col(k));  // h_k^H w_k
    if (std::abs(s) > 0.0) w.col(k) *= std::conj(s) / std::abs(s);
  }
}

}  // namespace cran::detail
