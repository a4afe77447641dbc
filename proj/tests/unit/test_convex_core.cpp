#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "cran/convex_core.hpp"
#include "doctest.h"

using namespace cran;
using cd = std::complex<double>;

namespace {

QosInstance make_instance(const Eigen::MatrixXcd& h, double noise, const Eigen::VectorXd& gamma,
                          const Eigen::VectorXd& caps) {
  QosInstance inst;
  inst.gains = h;
  inst.noise_power_w = noise;
  inst.sinr_targets = gamma;
  inst.power_caps = caps;
  inst.allowed = BoolMatrix::Constant(h.rows(), h.cols(), true);
  return inst;
}

SolverOptions with_backend(SolverBackend b) {
  SolverOptions o;
  o.backend = b;
  return o;
}

Eigen::MatrixXcd random_gains(std::mt19937_64& rng, int L, int K, double scale) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXcd h(L, K);
  for (int l = 0; l < L; ++l)
    for (int k = 0; k < K; ++k) h(l, k) = cd(n(rng), n(rng)) * scale;
  return h;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1e-300, std::abs(b)); }

// Exhaustive grid over (|w|, q) for the single-link compression problem, zoomed in repeatedly.
double grid_oracle_1x1(double h2, double sigma2, double gamma, double cap, double phi, double psi, double rho) {
  auto objective = [&](double a, double q) -> double {
    if (q <= 0.0) return INFINITY;
    if (a * a + q * q > cap) return INFINITY;
    if (a * a * h2 / gamma < h2 * q * q + sigma2) return INFINITY;
    return phi * a * a + psi * q * q - 2.0 * rho * std::log2(q);
  };
  double a_lo = 0.0, a_hi = std::sqrt(cap), q_lo = 0.0, q_hi = std::sqrt(cap);
  double best = INFINITY, best_a = 0.0, best_q = 0.0;
  for (int round = 0; round < 10; ++round) {
    const int n = 400;
    const double da = (a_hi - a_lo) / n, dq = (q_hi - q_lo) / n;
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j) {
        const double a = a_lo + i * da, q = q_lo + j * dq;
        const double v = objective(a, q);
        if (v < best) {
          best = v;
          best_a = a;
          best_q = q;
        }
      }
    a_lo = std::max(0.0, best_a - 3 * da);
    a_hi = std::min(std::sqrt(cap), best_a + 3 * da);
    q_lo = std::max(0.0, best_q - 3 * dq);
    q_hi = std::min(std::sqrt(cap), best_q + 3 * dq);
  }
  return best;
}

}  // namespace

TEST_CASE("compute_sinr") {
  Eigen::MatrixXcd h(1, 1);
  h(0, 0) = cd(0.6, 0.8);
  Eigen::MatrixXcd w(1, 1);
  w(0, 0) = std::sqrt(0.1);
  CHECK(compute_sinr(h, w, Eigen::VectorXd(), 0.1)[0] == doctest::Approx(1.0));
  Eigen::VectorXd q(1);
  q[0] = std::sqrt(0.1);
  CHECK(compute_sinr(h, w, q, 0.1)[0] == doctest::Approx(0.5));
  CHECK(compute_sinr(h, Eigen::MatrixXcd::Zero(1, 1), Eigen::VectorXd(), 0.1)[0] == 0.0);
}

TEST_CASE("single link closed form on both backends") {
  Eigen::MatrixXcd h(1, 1);
  h(0, 0) = 1.0;
  const auto inst = make_instance(h, 0.1, Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Constant(1, 20.0));
  for (auto b : {SolverBackend::Auto, SolverBackend::DualFixedPoint, SolverBackend::InteriorPoint}) {
    const auto sol = solve_weighted_power_min(inst, Eigen::MatrixXd::Constant(1, 1, 3.0), with_backend(b));
    REQUIRE(sol.ok());
    CHECK(rel(std::norm(sol.beamformers(0, 0)), 0.1) < 1e-6);
    CHECK(rel(sol.objective, 0.3) < 1e-6);
    CHECK(sol.beamformers(0, 0).imag() == doctest::Approx(0.0));
    CHECK(sol.beamformers(0, 0).real() > 0.0);
  }
}

TEST_CASE("orthogonal channels decouple") {
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(2, 2);
  h(0, 0) = cd(0.3, -0.4);
  h(1, 1) = cd(0.0, 2.0);
  Eigen::VectorXd gamma(2);
  gamma << 3.0, 0.5;
  const auto inst = make_instance(h, 0.01, gamma, Eigen::VectorXd::Constant(2, 20.0));
  Eigen::MatrixXd alpha(2, 2);
  alpha << 2.0, 5.0, 7.0, 1.5;
  for (auto b : {SolverBackend::DualFixedPoint, SolverBackend::InteriorPoint}) {
    const auto sol = solve_weighted_power_min(inst, alpha, with_backend(b));
    REQUIRE(sol.ok());
    const double p1 = 3.0 * 0.01 / 0.25, p2 = 0.5 * 0.01 / 4.0;
    CHECK(rel(std::norm(sol.beamformers(0, 0)), p1) < 1e-6);
    CHECK(rel(std::norm(sol.beamformers(1, 1)), p2) < 1e-6);
    CHECK(std::norm(sol.beamformers(1, 0)) < 1e-10 * p1);
    CHECK(std::norm(sol.beamformers(0, 1)) < 1e-10 * p2);
    CHECK(rel(sol.objective, 2.0 * p1 + 1.5 * p2) < 1e-6);
  }
}

TEST_CASE("cap violation on a single link is infeasible") {
  Eigen::MatrixXcd h(1, 1);
  h(0, 0) = 1e-6;
  const auto inst = make_instance(h, 1e-11, Eigen::VectorXd::Constant(1, 127.0), Eigen::VectorXd::Constant(1, 1.0));
  for (auto b : {SolverBackend::Auto, SolverBackend::InteriorPoint}) {
    const auto sol = solve_weighted_power_min(inst, Eigen::MatrixXd::Ones(1, 1), with_backend(b));
    CHECK(sol.status == SolveStatus::Infeasible);
  }
}

TEST_CASE("binding cap matches the water-level closed form") {
  // One user, two BSs; the strong BS saturates its cap and the weak one tops up.
  Eigen::MatrixXcd h(2, 1);
  h(0, 0) = cd(0.0, 1.0);
  h(1, 0) = cd(0.2, 0.0);
  const double sigma2 = 1.0, gamma = 4.0, cap0 = 1.0;
  Eigen::VectorXd caps(2);
  caps << cap0, 100.0;
  const auto inst = make_instance(h, sigma2, Eigen::VectorXd::Constant(1, gamma), caps);
  const auto sol = solve_weighted_power_min(inst, Eigen::MatrixXd::Ones(2, 1));
  REQUIRE(sol.ok());
  CHECK(sol.backend_used == SolverBackend::InteriorPoint);
  const double a2 = (std::sqrt(gamma * sigma2) - 1.0 * std::sqrt(cap0)) / 0.2;
  CHECK(rel(std::norm(sol.beamformers(0, 0)), cap0) < 1e-6);
  CHECK(rel(std::norm(sol.beamformers(1, 0)), a2 * a2) < 1e-6);
  CHECK(rel(sol.objective, cap0 + a2 * a2) < 1e-6);
}

TEST_CASE("backends agree on random coordinated instances") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.2, 3.0);
  std::bernoulli_distribution keep(0.7);
  for (int trial = 0; trial < 25; ++trial) {
    const int L = 2 + trial % 4, K = 1 + trial % 3;
    auto inst = make_instance(random_gains(rng, L, K, 1e-5), 1e-11, Eigen::VectorXd::NullaryExpr(K, [&] { return u(rng); }),
                              Eigen::VectorXd::Constant(L, 20.0));
    for (int k = 0; k < K; ++k)
      for (int l = 1; l < L; ++l) inst.allowed(l, k) = keep(rng);
    Eigen::MatrixXd alpha = Eigen::MatrixXd::NullaryExpr(L, K, [&] { return u(rng); });
    const auto a = solve_weighted_power_min(inst, alpha, with_backend(SolverBackend::DualFixedPoint));
    const auto b = solve_weighted_power_min(inst, alpha, with_backend(SolverBackend::InteriorPoint));
    INFO(trial, " ", a.message, " / ", b.message);
    CHECK(a.status == b.status);
    if (a.status == SolveStatus::Infeasible) continue;
    REQUIRE(a.ok());
    REQUIRE(b.ok());
    CHECK(rel(a.objective, b.objective) < 1e-7);
    for (int k = 0; k < K; ++k)
      for (int l = 0; l < L; ++l)
        if (!inst.allowed(l, k)) CHECK(a.beamformers(l, k) == cd(0.0, 0.0));
  }
}

TEST_CASE("solution properties: tight SINR, phase, scaling, monotonicity") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(0.5, 4.0);
  for (int trial = 0; trial < 10; ++trial) {
    const int L = 4, K = 3;
    const Eigen::MatrixXcd h = random_gains(rng, L, K, 3e-6);
    const Eigen::VectorXd gamma = Eigen::VectorXd::NullaryExpr(K, [&] { return u(rng); });
    const auto inst = make_instance(h, 1e-11, gamma, Eigen::VectorXd::Constant(L, 20.0));
    const Eigen::MatrixXd alpha = Eigen::MatrixXd::NullaryExpr(L, K, [&] { return u(rng); });
    const auto sol = solve_weighted_power_min(inst, alpha);
    REQUIRE(sol.ok());
    for (int k = 0; k < K; ++k) {
      CHECK(rel(sol.achieved_sinr[k], gamma[k]) < 1e-5);
      const cd s = h.col(k).dot(sol.beamformers.col(k));
      CHECK(s.real() >= 0.0);
      CHECK(std::abs(s.imag()) <= 1e-9 * std::abs(s));
    }
    const auto doubled = solve_weighted_power_min(inst, 2.0 * alpha);
    REQUIRE(doubled.ok());
    CHECK(rel(doubled.objective, 2.0 * sol.objective) < 1e-7);
    CHECK((doubled.beamformers - sol.beamformers).norm() <= 1e-6 * sol.beamformers.norm());

    Eigen::MatrixXcd rotated = sol.beamformers;
    rotated.col(1) *= std::polar(1.0, 1.1);
    CHECK((compute_sinr(h, rotated, Eigen::VectorXd(), 1e-11) - sol.achieved_sinr).norm() < 1e-9 * sol.achieved_sinr.norm());

    auto relaxed = inst;
    relaxed.sinr_targets[trial % K] *= 0.7;
    const auto r = solve_weighted_power_min(relaxed, alpha);
    REQUIRE(r.ok());
    CHECK(r.objective <= sol.objective * (1.0 + 1e-9));
  }
}

TEST_CASE("compression subproblem on single links matches the grid oracle") {
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const double h2 = 0.5 + 1.5 * u(rng);
    const double sigma2 = 0.05 + 0.1 * u(rng);
    const double gamma = 0.2 + 1.5 * u(rng);
    const double cap = 1.0 + 3.0 * u(rng);
    const double phi = 1.0 + 4.0 * u(rng), psi = 1.0 + 4.0 * u(rng), rho = 0.1 + 1.5 * u(rng);
    Eigen::MatrixXcd h(1, 1);
    h(0, 0) = std::polar(std::sqrt(h2), 6.0 * u(rng));
    const auto inst = make_instance(h, sigma2, Eigen::VectorXd::Constant(1, gamma), Eigen::VectorXd::Constant(1, cap));
    const Eigen::VectorXd vphi = Eigen::VectorXd::Constant(1, phi), vpsi = Eigen::VectorXd::Constant(1, psi),
                          vrho = Eigen::VectorXd::Constant(1, rho);
    const double oracle = grid_oracle_1x1(h2, sigma2, gamma, cap, phi, psi, rho);
    for (auto b : {SolverBackend::Auto, SolverBackend::InteriorPoint}) {
      const auto sol = solve_compression_subproblem(inst, vphi, vpsi, vrho, with_backend(b));
      REQUIRE(sol.ok());
      CHECK(std::abs(sol.objective - oracle) <= 1e-4 * std::max(1.0, std::abs(oracle)));
      CHECK(sol.objective <= oracle + 1e-9);
      CHECK(sol.quant_noise[0] > 0.0);
    }
  }
}

TEST_CASE("compression subproblem with a binding cap") {
  Eigen::MatrixXcd h(1, 1);
  h(0, 0) = 1.0;
  const auto inst = make_instance(h, 0.1, Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Constant(1, 0.5));
  const Eigen::VectorXd phi = Eigen::VectorXd::Constant(1, 1.0), psi = Eigen::VectorXd::Constant(1, 0.1),
                        rho = Eigen::VectorXd::Constant(1, 5.0);
  const double oracle = grid_oracle_1x1(1.0, 0.1, 1.0, 0.5, 1.0, 0.1, 5.0);
  const auto sol = solve_compression_subproblem(inst, phi, psi, rho);
  REQUIRE(sol.ok());
  CHECK(sol.backend_used == SolverBackend::InteriorPoint);
  CHECK(std::abs(sol.objective - oracle) <= 1e-4 * std::max(1.0, std::abs(oracle)));
  CHECK(std::norm(sol.beamformers(0, 0)) + sol.quant_noise[0] * sol.quant_noise[0] <= 0.5 * (1 + 1e-8));
}

TEST_CASE("compression subproblem on small networks matches reduced oracles") {
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SUBCASE("two BSs, one user: grid over (q1, q2), closed-form beam") {
    for (int trial = 0; trial < 4; ++trial) {
      Eigen::MatrixXcd h(2, 1);
      h(0, 0) = std::polar(0.5 + u(rng), 6.0 * u(rng));
      h(1, 0) = std::polar(0.5 + u(rng), 6.0 * u(rng));
      const double sigma2 = 0.1, gamma = 0.5 + u(rng);
      Eigen::VectorXd phi(2), psi(2), rho(2);
      phi << 1.0 + 2.0 * u(rng), 1.0 + 2.0 * u(rng);
      psi << 1.0 + 2.0 * u(rng), 1.0 + 2.0 * u(rng);
      rho << 0.2 + u(rng), 0.2 + u(rng);
      const auto inst = make_instance(h, sigma2, Eigen::VectorXd::Constant(1, gamma), Eigen::VectorXd::Constant(2, 50.0));
      const double g0 = std::norm(h(0, 0)), g1 = std::norm(h(1, 0));
      const double s = g0 / phi[0] + g1 / phi[1];
      auto f = [&](double q0, double q1) {
        const double need = gamma * (g0 * q0 * q0 + g1 * q1 * q1 + sigma2);
        return need / s + psi[0] * q0 * q0 + psi[1] * q1 * q1 - 2 * rho[0] * std::log2(q0) - 2 * rho[1] * std::log2(q1);
      };
      double lo0 = 1e-4, hi0 = 3.0, lo1 = 1e-4, hi1 = 3.0, best = INFINITY, b0 = 0, b1 = 0;
      for (int round = 0; round < 10; ++round) {
        const int n = 300;
        for (int i = 0; i <= n; ++i)
          for (int j = 0; j <= n; ++j) {
            const double q0 = lo0 + (hi0 - lo0) * i / n, q1 = lo1 + (hi1 - lo1) * j / n;
            const double v = f(q0, q1);
            if (v < best) best = v, b0 = q0, b1 = q1;
          }
        const double w0 = 3 * (hi0 - lo0) / n, w1 = 3 * (hi1 - lo1) / n;
        lo0 = std::max(1e-9, b0 - w0), hi0 = b0 + w0, lo1 = std::max(1e-9, b1 - w1), hi1 = b1 + w1;
      }
      const auto sol = solve_compression_subproblem(inst, phi, psi, rho);
      REQUIRE(sol.ok());
      CHECK(std::abs(sol.objective - best) <= 1e-6 * std::max(1.0, std::abs(best)));
    }
  }
  SUBCASE("one BS, two users: grid over q, exact powers") {
    for (int trial = 0; trial < 4; ++trial) {
      Eigen::MatrixXcd h(1, 2);
      h(0, 0) = std::polar(0.5 + u(rng), 6.0 * u(rng));
      h(0, 1) = std::polar(0.5 + u(rng), 6.0 * u(rng));
      const double sigma2 = 0.1, g1 = 0.3 + 0.3 * u(rng), g2 = 0.3 + 0.3 * u(rng);
      Eigen::VectorXd gamma(2);
      gamma << g1, g2;
      const Eigen::VectorXd phi = Eigen::VectorXd::Constant(1, 1.0 + u(rng)), psi = Eigen::VectorXd::Constant(1, 1.0 + u(rng)),
                            rho = Eigen::VectorXd::Constant(1, 0.2 + u(rng));
      const auto inst = make_instance(h, sigma2, gamma, Eigen::VectorXd::Constant(1, 50.0));
      const double a1 = std::norm(h(0, 0)), a2 = std::norm(h(0, 1));
      auto f = [&](double q) {
        // p1 = g1 (p2 + q^2 + s/a1), p2 = g2 (p1 + q^2 + s/a2)
        const double c1 = g1 * (q * q + sigma2 / a1), c2 = g2 * (q * q + sigma2 / a2);
        const double det = 1.0 - g1 * g2;
        const double p1 = (c1 + g1 * c2) / det, p2 = (c2 + g2 * c1) / det;
        return phi[0] * (p1 + p2) + psi[0] * q * q - 2 * rho[0] * std::log2(q);
      };
      double lo = 1e-4, hi = 5.0, best = INFINITY, bq = 0;
      for (int round = 0; round < 12; ++round) {
        const int n = 2000;
        for (int i = 0; i <= n; ++i) {
          const double q = lo + (hi - lo) * i / n;
          const double v = f(q);
          if (v < best) best = v, bq = q;
        }
        const double w = 3 * (hi - lo) / n;
        lo = std::max(1e-9, bq - w), hi = bq + w;
      }
      const auto sol = solve_compression_subproblem(inst, phi, psi, rho);
      REQUIRE(sol.ok());
      CHECK(std::abs(sol.objective - best) <= 1e-6 * std::max(1.0, std::abs(best)));
    }
  }
}

TEST_CASE("vanishing backhaul weight reduces to weighted power minimization") {
  std::mt19937_64 rng(77);
  const int L = 3, K = 2;
  const auto inst = make_instance(random_gains(rng, L, K, 1.0), 0.1, Eigen::VectorXd::Constant(K, 1.0),
                                  Eigen::VectorXd::Constant(L, 20.0));
  const Eigen::VectorXd phi = Eigen::VectorXd::LinSpaced(L, 1.0, 2.0);
  const Eigen::VectorXd psi = Eigen::VectorXd::Constant(L, 1.0);
  const Eigen::VectorXd rho = Eigen::VectorXd::Constant(L, 1e-10);
  const auto comp = solve_compression_subproblem(inst, phi, psi, rho);
  const auto ds = solve_weighted_power_min(inst, phi.replicate(1, K));
  REQUIRE(comp.ok());
  REQUIRE(ds.ok());
  CHECK(comp.quant_noise.maxCoeff() < 1e-4);
  const double beam_part = (phi.replicate(1, K).array() * comp.beamformers.cwiseAbs2().array()).sum();
  CHECK(rel(beam_part, ds.objective) < 1e-6);
}

TEST_CASE("symmetric compression instance yields equal quantization noise") {
  Eigen::MatrixXcd h(2, 1);
  h(0, 0) = cd(0.7, 0.1);
  h(1, 0) = cd(-0.1, 0.7);
  const auto inst = make_instance(h, 0.2, Eigen::VectorXd::Constant(1, 2.0), Eigen::VectorXd::Constant(2, 20.0));
  const Eigen::VectorXd c = Eigen::VectorXd::Constant(2, 1.5);
  for (auto b : {SolverBackend::Auto, SolverBackend::InteriorPoint}) {
    const auto sol = solve_compression_subproblem(inst, c, c, Eigen::VectorXd::Constant(2, 0.7), with_backend(b));
    REQUIRE(sol.ok());
    CHECK(std::abs(sol.quant_noise[0] - sol.quant_noise[1]) < 1e-6);
  }
}

TEST_CASE("infeasible compression instance") {
  Eigen::MatrixXcd h(1, 1);
  h(0, 0) = 1.0;
  const auto inst = make_instance(h, 1.0, Eigen::VectorXd::Constant(1, 10.0), Eigen::VectorXd::Constant(1, 5.0));
  const Eigen::VectorXd c = Eigen::VectorXd::Ones(1);
  CHECK(solve_compression_subproblem(inst, c, c, c).status == SolveStatus::Infeasible);
  CHECK(solve_compression_subproblem(inst, c, c, c, with_backend(SolverBackend::InteriorPoint)).status ==
        SolveStatus::Infeasible);
}

TEST_CASE("input validation") {
  Eigen::MatrixXcd h(1, 1);
  h(0, 0) = 1.0;
  auto inst = make_instance(h, 0.1, Eigen::VectorXd::Constant(1, 0.0), Eigen::VectorXd::Constant(1, 1.0));
  CHECK_THROWS_AS(solve_weighted_power_min(inst, Eigen::MatrixXd::Ones(1, 1)), DomainError);
  inst.sinr_targets[0] = 1.0;
  CHECK_THROWS_AS(solve_weighted_power_min(inst, Eigen::MatrixXd::Zero(1, 1)), DomainError);
  inst.allowed(0, 0) = false;
  CHECK_THROWS_AS(solve_weighted_power_min(inst, Eigen::MatrixXd::Ones(1, 1)), DomainError);
}

TEST_CASE("conic description") {
  Eigen::MatrixXcd h(2, 2);
  h << cd(1, 0), cd(0, 1), cd(0.5, 0.5), cd(2, 0);
  auto inst = make_instance(h, 0.25, Eigen::VectorXd::Constant(2, 4.0), Eigen::VectorXd::Constant(2, 3.0));
  inst.allowed(1, 0) = false;
  const auto j = conic_problem_json(inst, Eigen::MatrixXd::Ones(2, 2));
  CHECK(j.at("variables").size() == 3);
  CHECK(j.at("cones").size() == 2);
  CHECK(j.at("cones")[0].at("rhs").at("coeff").get<double>() == doctest::Approx(0.5));
  CHECK(j.at("normalization").at("gain_scale").get<double>() == doctest::Approx(2.0));
  const auto jc = conic_problem_json(inst, Eigen::VectorXd::Ones(2), Eigen::VectorXd::Ones(2), Eigen::VectorXd::Ones(2));
  CHECK(jc.at("variables").size() == 5);
  CHECK(jc.at("objective").at("neg_log").size() == 2);
  CHECK(jc.at("objective").at("neg_log")[0].at("coeff").get<double>() == doctest::Approx(2.0 / std::numbers::ln2));
}
