#include <cmath>

#include "qos_internal.hpp"

namespace cran::detail {

NormalizedQos::NormalizedQos(const QosInstance& inst)
    : num_bs(inst.num_bs()),
      num_users(inst.num_users()),
      h(inst.gains / std::sqrt(inst.noise_power_w)),
      gamma(inst.sinr_targets),
      caps(inst.power_caps),
      allowed(inst.allowed),
      support(inst.num_users()) {
  for (int k = 0; k < num_users; ++k)
    for (int l = 0; l < num_bs; ++l)
      if (allowed(l, k)) support[k].push_back(l);
}

double objective_value(const QosObjective& obj, const Eigen::MatrixXcd& w, const Eigen::VectorXd& q) {
  double v = (obj.weights.array() * w.cwiseAbs2().array()).sum();
  if (obj.has_q)
    for (int l = 0; l < q.size(); ++l) v += obj.psi[l] * q[l] * q[l] - obj.kappa[l] * std::log(q[l]);
  return v;
}

Eigen::VectorXd quantization_interference(const NormalizedQos& qos, const Eigen::VectorXd& q) {
  Eigen::VectorXd extra = Eigen::VectorXd::Zero(qos.num_users);
  if (q.size() == 0) return extra;
  const Eigen::VectorXd q2 = q.cwiseAbs2();
  for (int k = 0; k < qos.num_users; ++k) extra[k] = qos.h.col(k).cwiseAbs2().dot(q2);
  return extra;
}

QosProgram::QosProgram(const NormalizedQos& qos, const QosObjective& obj, Mode mode)
    : qos_(qos), obj_(obj), mode_(mode), has_q_(obj.has_q) {
  offset_.resize(qos.num_users);
  int off = 0;
  for (int k = 0; k < qos.num_users; ++k) {
    offset_[k] = off;
    off += 2 * static_cast<int>(qos.support[k].size());
  }
  n_w_ = off;
  q_off_ = n_w_;
  n_ = n_w_ + (has_q_ ? qos.num_bs : 0) + (mode_ == Mode::Feasibility ? 1 : 0);
  m_ = qos.num_users + qos.num_bs + (mode_ == Mode::Feasibility && has_q_ ? qos.num_bs : 0);
  sqrt_gamma_ = qos.gamma.cwiseSqrt();
}

Eigen::VectorXd QosProgram::pack(const Eigen::MatrixXcd& w, const Eigen::VectorXd& q, double s) const {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n_);
  for (int k = 0; k < qos_.num_users; ++k)
    for (std::size_t i = 0; i < qos_.support[k].size(); ++i) {
      const std::complex<double> v = w(qos_.support[k][i], k);
      x[var(k, static_cast<int>(i))] = v.real();
      x[var(k, static_cast<int>(i)) + 1] = v.imag();
    }
  if (has_q_) x.segment(q_off_, qos_.num_bs) = q;
  if (mode_ == Mode::Feasibility) x[n_ - 1] = s;
  return x;
}

Eigen::MatrixXcd QosProgram::unpack_w(const Eigen::VectorXd& x) const {
  Eigen::MatrixXcd w = Eigen::MatrixXcd::Zero(qos_.num_bs, qos_.num_users);
  for (int k = 0; k < qos_.num_users; ++k)
    for (std::size_t i = 0; i < qos_.support[k].size(); ++i) {
      const int v = var(k, static_cast<int>(i));
      w(qos_.support[k][i], k) = {x[v], x[v + 1]};
    }
  return w;
}

Eigen::VectorXd QosProgram::unpack_q(const Eigen::VectorXd& x) const {
  if (!has_q_) return Eigen::VectorXd::Zero(qos_.num_bs);
  return x.segment(q_off_, qos_.num_bs);
}

bool QosProgram::in_domain(const Eigen::VectorXd& x) const {
  if (!x.allFinite()) return false;
  if (mode_ == Mode::Optimize && has_q_)
    return (x.segment(q_off_, qos_.num_bs).array() > 0.0).all();
  return true;
}

double QosProgram::objective(const Eigen::VectorXd& x) const {
  if (mode_ == Mode::Feasibility) return x[n_ - 1];
  double v = 0.0;
  for (int k = 0; k < qos_.num_users; ++k)
    for (std::size_t i = 0; i < qos_.support[k].size(); ++i) {
      const int p = var(k, static_cast<int>(i));
      v += obj_.weights(qos_.support[k][i], k) * (x[p] * x[p] + x[p + 1] * x[p + 1]);
    }
  if (has_q_)
    for (int l = 0; l < qos_.num_bs; ++l) {
      const double q = x[q_off_ + l];
      v += obj_.psi[l] * q * q - obj_.kappa[l] * std::log(q);
    }
  return v;
}

void QosProgram::objective_derivatives(const Eigen::VectorXd& x, Eigen::VectorXd& grad,
                                       Eigen::MatrixXd* hess) const {
  grad.setZero(n_);
  if (mode_ == Mode::Feasibility) {
    grad[n_ - 1] = 1.0;
    return;
  }
  for (int k = 0; k < qos_.num_users; ++k)
    for (std::size_t i = 0; i < qos_.support[k].size(); ++i) {
      const int p = var(k, static_cast<int>(i));
      const double a = obj_.weights(qos_.support[k][i], k);
      grad[p] = 2.0 * a * x[p];
      grad[p + 1] = 2.0 * a * x[p + 1];
      if (hess) {
        (*hess)(p, p) += 2.0 * a;
        (*hess)(p + 1, p + 1) += 2.0 * a;
      }
    }
  if (has_q_)
    for (int l = 0; l < qos_.num_bs; ++l) {
      const int p = q_off_ + l;
      const double q = x[p];
      grad[p] = 2.0 * obj_.psi[l] * q - obj_.kappa[l] / q;
      if (hess) (*hess)(p, p) += 2.0 * obj_.psi[l] + obj_.kappa[l] / (q * q);
    }
}

QosProgram::Cross QosProgram::cross_terms(const Eigen::VectorXd& x) const {
  const int K = qos_.num_users;
  Cross c;
  c.z = Eigen::MatrixXcd::Zero(K, K);
  for (int j = 0; j < K; ++j)
    for (std::size_t i = 0; i < qos_.support[j].size(); ++i) {
      const int l = qos_.support[j][i];
      const int p = var(j, static_cast<int>(i));
      const std::complex<double> wv(x[p], x[p + 1]);
      c.z.col(j) += qos_.h.row(l).conjugate().transpose() * wv;
    }
  c.norm.resize(K);
  for (int k = 0; k < K; ++k) {
    double s = 1.0 + c.z.row(k).cwiseAbs2().sum() - std::norm(c.z(k, k));
    if (has_q_)
      for (int l = 0; l < qos_.num_bs; ++l) {
        const double q = x[q_off_ + l];
        s += std::norm(qos_.h(l, k)) * q * q;
      }
    c.norm[k] = std::sqrt(s);
  }
  return c;
}

void QosProgram::constraint_values(const Eigen::VectorXd& x, Eigen::VectorXd& f) const {
  const int K = qos_.num_users;
  const int L = qos_.num_bs;
  const double s = mode_ == Mode::Feasibility ? x[n_ - 1] : 0.0;
  f.resize(m_);
  const Cross c = cross_terms(x);
  for (int k = 0; k < K; ++k) f[k] = c.norm[k] - c.z(k, k).real() / sqrt_gamma_[k] - s;
  Eigen::VectorXd load = Eigen::VectorXd::Zero(L);
  for (int k = 0; k < K; ++k)
    for (std::size_t i = 0; i < qos_.support[k].size(); ++i) {
      const int p = var(k, static_cast<int>(i));
      load[qos_.support[k][i]] += x[p] * x[p] + x[p + 1] * x[p + 1];
    }
  for (int l = 0; l < L; ++l) {
    if (has_q_) load[l] += x[q_off_ + l] * x[q_off_ + l];
    f[K + l] = load[l] / qos_.caps[l] - 1.0 - s;
  }
  if (mode_ == Mode::Feasibility && has_q_)
    for (int l = 0; l < L; ++l) f[K + L + l] = -x[q_off_ + l] - s;
}

void QosProgram::constraint_jacobian(const Eigen::VectorXd& x, Eigen::MatrixXd& jac) const {
  const int K = qos_.num_users;
  const int L = qos_.num_bs;
  jac.setZero(m_, n_);
  const Cross c = cross_terms(x);
  for (int j = 0; j < K; ++j)
    for (std::size_t i = 0; i < qos_.support[j].size(); ++i) {
      const int l = qos_.support[j][i];
      const int p = var(j, static_cast<int>(i));
      for (int k = 0; k < K; ++k) {
        const std::complex<double> g =
            k == j ? -qos_.h(l, k) / sqrt_gamma_[k] : c.z(k, j) * qos_.h(l, k) / c.norm[k];
        jac(k, p) = g.real();
        jac(k, p + 1) = g.imag();
      }
      jac(K + l, p) = 2.0 * x[p] / qos_.caps[l];
      jac(K + l, p + 1) = 2.0 * x[p + 1] / qos_.caps[l];
    }
  if (has_q_)
    for (int l = 0; l < L; ++l) {
      const double q = x[q_off_ + l];
      for (int k = 0; k < K; ++k) jac(k, q_off_ + l) = std::norm(qos_.h(l, k)) * q / c.norm[k];
      jac(K + l, q_off_ + l) = 2.0 * q / qos_.caps[l];
    }
  if (mode_ == Mode::Feasibility) {
    jac.col(n_ - 1).setConstant(-1.0);
    if (has_q_)
      for (int l = 0; l < L; ++l) jac(K + L + l, q_off_ + l) = -1.0;
  }
}

void QosProgram::add_constraint_curvature(const Eigen::VectorXd& x, const Eigen::VectorXd& lambda,
                                          Eigen::MatrixXd& hess) const {
  const int K = qos_.num_users;
  const int L = qos_.num_bs;
  const Cross c = cross_terms(x);
  Eigen::VectorXd coef(K);
  for (int k = 0; k < K; ++k) coef[k] = std::max(0.0, lambda[k]) / c.norm[k];
  const Eigen::VectorXd root = coef.cwiseSqrt();

  // A^T A of every cone, one dense block per user.
  for (int j = 0; j < K; ++j) {
    const int s = static_cast<int>(qos_.support[j].size());
    if (s == 0) continue;
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(2 * K, 2 * s);
    for (int k = 0; k < K; ++k) {
      if (k == j) continue;
      for (int i = 0; i < s; ++i) {
        const std::complex<double> hk = qos_.h(qos_.support[j][i], k) * root[k];
        r(2 * k, 2 * i) = hk.real();
        r(2 * k, 2 * i + 1) = hk.imag();
        r(2 * k + 1, 2 * i) = -hk.imag();
        r(2 * k + 1, 2 * i + 1) = hk.real();
      }
    }
    hess.block(offset_[j], offset_[j], 2 * s, 2 * s).noalias() += r.transpose() * r;
  }
  if (has_q_)
    for (int l = 0; l < L; ++l) {
      double d = 0.0;
      for (int k = 0; k < K; ++k) d += coef[k] * std::norm(qos_.h(l, k));
      hess(q_off_ + l, q_off_ + l) += d;
    }

  // Minus the outer product of each norm gradient.
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(K, n_);
  for (int j = 0; j < K; ++j)
    for (std::size_t i = 0; i < qos_.support[j].size(); ++i) {
      const int l = qos_.support[j][i];
      const int p = var(j, static_cast<int>(i));
      for (int k = 0; k < K; ++k) {
        if (k == j) continue;
        const std::complex<double> gr = c.z(k, j) * qos_.h(l, k) / c.norm[k] * root[k];
        g(k, p) = gr.real();
        g(k, p + 1) = gr.imag();
      }
    }
  if (has_q_)
    for (int l = 0; l < L; ++l) {
      const double q = x[q_off_ + l];
      for (int k = 0; k < K; ++k) g(k, q_off_ + l) = std::norm(qos_.h(l, k)) * q / c.norm[k] * root[k];
    }
  hess.noalias() -= g.transpose() * g;

  for (int k = 0; k < K; ++k)
    for (std::size_t i = 0; i < qos_.support[k].size(); ++i) {
      const int l = qos_.support[k][i];
      const double d = 2.0 * std::max(0.0, lambda[K + l]) / qos_.caps[l];
      const int p = var(k, static_cast<int>(i));
      hess(p, p) += d;
      hess(p + 1, p + 1) += d;
    }
  if (has_q_)
    for (int l = 0; l < L; ++l) hess(q_off_ + l, q_off_ + l) += 2.0 * std::max(0.0, lambda[K + l]) / qos_.caps[l];
}

double QosProgram::max_violation(const Eigen::MatrixXcd& w, const Eigen::VectorXd& q) const {
  Eigen::VectorXd f;
  constraint_values(pack(w, q, 0.0), f);
  return f.maxCoeff();
}

}  // namespace cran::detail
