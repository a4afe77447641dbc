#include <cmath>
#include <numbers>

#include "cran/convex_core.hpp"

namespace cran {
namespace {

nlohmann::json describe(const QosInstance& inst, const Eigen::MatrixXd& weights, const Eigen::VectorXd* psi,
                        const Eigen::VectorXd* kappa) {
  inst.validate();
  const int L = inst.num_bs(), K = inst.num_users();
  const double scale = 1.0 / std::sqrt(inst.noise_power_w);
  const bool has_q = psi != nullptr;

  nlohmann::json vars = nlohmann::json::array();
  nlohmann::json quad = nlohmann::json::array();
  nlohmann::json neg_log = nlohmann::json::array();
  std::vector<std::vector<int>> index(L, std::vector<int>(K, -1));
  for (int k = 0; k < K; ++k)
    for (int l = 0; l < L; ++l) {
      if (!inst.allowed(l, k)) continue;
      index[l][k] = static_cast<int>(vars.size());
      vars.push_back({{"name", "w"}, {"bs", l}, {"user", k}, {"complex", true}});
      quad.push_back({{"var", index[l][k]}, {"coeff", weights(l, k)}});
    }
  std::vector<int> q_index(L, -1);
  if (has_q)
    for (int l = 0; l < L; ++l) {
      q_index[l] = static_cast<int>(vars.size());
      vars.push_back({{"name", "q"}, {"bs", l}, {"complex", false}});
      quad.push_back({{"var", q_index[l]}, {"coeff", (*psi)[l]}});
      neg_log.push_back({{"var", q_index[l]}, {"coeff", (*kappa)[l]}});
    }

  nlohmann::json channel = nlohmann::json::array();
  for (int l = 0; l < L; ++l) {
    nlohmann::json row = nlohmann::json::array();
    for (int k = 0; k < K; ++k) {
      const auto h = inst.gains(l, k) * scale;
      row.push_back({h.real(), h.imag()});
    }
    channel.push_back(row);
  }

  nlohmann::json cones = nlohmann::json::array();
  for (int k = 0; k < K; ++k) {
    nlohmann::json terms = nlohmann::json::array();
    for (int j = 0; j < K; ++j)
      if (j != k) terms.push_back({{"kind", "inner_product"}, {"channel_user", k}, {"beam_user", j}});
    if (has_q)
      for (int l = 0; l < L; ++l)
        terms.push_back({{"kind", "scaled_var"}, {"var", q_index[l]}, {"coeff", std::abs(inst.gains(l, k)) * scale}});
    terms.push_back({{"kind", "constant"}, {"value", 1.0}});
    cones.push_back({{"type", "soc"},
                     {"user", k},
                     {"norm_terms", terms},
                     {"rhs", {{"kind", "real_inner_product"}, {"channel_user", k}, {"beam_user", k},
                              {"coeff", 1.0 / std::sqrt(inst.sinr_targets[k])}}}});
  }

  nlohmann::json caps = nlohmann::json::array();
  for (int l = 0; l < L; ++l) {
    nlohmann::json members = nlohmann::json::array();
    for (int k = 0; k < K; ++k)
      if (index[l][k] >= 0) members.push_back(index[l][k]);
    if (has_q) members.push_back(q_index[l]);
    caps.push_back({{"bs", l}, {"vars", members}, {"cap", inst.power_caps[l]}});
  }

  return {{"normalization", {{"noise_power_w", inst.noise_power_w}, {"gain_scale", scale}}},
          {"channel_normalized", channel},
          {"variables", vars},
          {"objective", {{"quadratic", quad}, {"neg_log", neg_log}}},
          {"cones", cones},
          {"quadratic_constraints", caps}};
}

}  // namespace

nlohmann::json conic_problem_json(const QosInstance& inst, const Eigen::MatrixXd& weights) {
  return describe(inst, weights, nullptr, nullptr);
}

nlohmann::json conic_problem_json(const QosInstance& inst, const Eigen::VectorXd& phi, const Eigen::VectorXd& psi,
                                  const Eigen::VectorXd& rho) {
  const Eigen::VectorXd kappa = 2.0 * rho / std::numbers::ln2;
  return describe(inst, phi.replicate(1, inst.num_users()), &psi, &kappa);
}

}  // namespace cran
