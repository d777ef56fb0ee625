#include <mfgirl/model.hpp>
#include <mfgirl/rkhs.hpp>
#include <mfgirl/soft_mdp.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "../support/oracles.hpp"

using namespace mfgirl;

namespace {

RewardParams reported_theta() {
  RewardParams t{Vector(2), Vector(4)};
  t.lambda << -0.072, 0.072;
  t.alpha << -0.9016, 0.8307, 0.6536, -0.5828;
  return t;
}

Matrix traffic_reported_reward() {
  const MfgModel m = traffic_routing_model();
  const FeatureMap fm = FeatureMap::all_state_action_pairs({KernelKind::gaussian, 0.5}, 2, 2, m.mean_field());
  return reward_matrix(fm, reported_theta());
}

}  // namespace

TEST(SoftValueIteration, ZeroRewardClosedForm) {
  std::mt19937_64 rng(1);
  for (int nx : {1, 2, 5}) {
    const MfgModel m = oracle::random_model(rng, nx, 2, 0.8);
    const auto res = soft_value_iteration(m, Matrix::Zero(nx, 2));
    ASSERT_TRUE(res.converged);
    for (int x = 0; x < nx; ++x) EXPECT_NEAR(res.v(x), 5.0 * std::log(2.0), 1e-9);
  }
}

TEST(SoftValueIteration, SingleActionIsPolicyEvaluation) {
  std::mt19937_64 rng(2);
  const MfgModel m = oracle::random_model(rng, 4, 1, 0.8);
  Matrix r(4, 1);
  r << 1.0, -2.0, 0.5, 3.0;
  const auto res = soft_value_iteration(m, r);
  const Matrix p = m.transition();  // 4x4 with one action
  const Vector exact = (Matrix::Identity(4, 4) - 0.8 * p).lu().solve(Vector(r.col(0)));
  EXPECT_LE((res.v - exact).lpNorm<Eigen::Infinity>(), 1e-10);
}

TEST(SoftValueIteration, MatchesNaiveLongRunOracle) {
  const MfgModel m = traffic_routing_model();
  const Matrix r = traffic_reported_reward();
  const Vector oracle_v = oracle::soft_values_naive(m, r, 1e-13);
  const auto res = soft_value_iteration(m, r);
  ASSERT_TRUE(res.converged);
  EXPECT_LE((res.v - oracle_v).lpNorm<Eigen::Infinity>(), 1e-10);
  // the stopping rule itself
  const Vector next = soft_bellman_backup(m, r, res.v);
  EXPECT_LE((next - res.v).lpNorm<Eigen::Infinity>(), 1e-10 * 0.2 / 0.8);
}

TEST(SoftValueIteration, ReportsNonConvergenceInsteadOfThrowing) {
  const MfgModel m = traffic_routing_model();
  const auto res = soft_value_iteration(m, traffic_reported_reward(), {1e-10, 3});
  EXPECT_FALSE(res.converged);
  EXPECT_EQ(res.iterations, 3);
  EXPECT_GT(res.residual, 0.0);
}

TEST(SoftValueIteration, RejectsNonFiniteReward) {
  Matrix r = Matrix::Zero(2, 2);
  r(1, 0) = std::nan("");
  EXPECT_THROW(soft_value_iteration(traffic_routing_model(), r), NumericError);
  r(1, 0) = INFINITY;
  EXPECT_THROW(soft_value_iteration(traffic_routing_model(), r), NumericError);
}

TEST(SoftValueIteration, LargeRewardsDoNotOverflow) {
  Matrix r(2, 2);
  r << 800.0, 790.0, -900.0, 805.0;
  const auto s = solve_soft(traffic_routing_model(), r);
  EXPECT_TRUE(s.v.allFinite());
  EXPECT_TRUE(s.policy.probs.allFinite());
}

TEST(SoftBellman, IsBetaContraction) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 3.0);
  for (int trial = 0; trial < 300; ++trial) {
    const int nx = 1 + static_cast<int>(rng() % 6);
    const int na = 1 + static_cast<int>(rng() % 6);
    const double beta = 0.05 + 0.9 * static_cast<double>(rng() % 1000) / 1000.0;
    const MfgModel m = oracle::random_model(rng, nx, na, beta);
    Matrix r(nx, na);
    for (int i = 0; i < r.size(); ++i) r.data()[i] = n(rng);
    Vector v1(nx), v2(nx);
    for (int i = 0; i < nx; ++i) {
      v1(i) = n(rng);
      v2(i) = n(rng);
    }
    const double lhs = (soft_bellman_backup(m, r, v1) - soft_bellman_backup(m, r, v2)).lpNorm<Eigen::Infinity>();
    EXPECT_LE(lhs, beta * (v1 - v2).lpNorm<Eigen::Infinity>() * (1 + 1e-12) + 1e-15);
  }
}

TEST(SoftBellman, UpdateMagnitudesDecayGeometrically) {
  std::mt19937_64 rng(6);
  const MfgModel m = oracle::random_model(rng, 5, 3, 0.9);
  Matrix r = Matrix::Random(5, 3);
  Vector v = Vector::Zero(5);
  Vector next = soft_bellman_backup(m, r, v);
  const double initial = (next - v).lpNorm<Eigen::Infinity>();
  double scale = 1.0;
  for (int t = 1; t < 150; ++t) {
    v = next;
    next = soft_bellman_backup(m, r, v);
    scale *= 0.9;
    EXPECT_LE((next - v).lpNorm<Eigen::Infinity>(), scale * initial * (1 + 1e-9) + 1e-15) << t;
  }
}

TEST(SoftQ, ConstantValuePropagates) {
  const MfgModel m = traffic_routing_model();
  const Matrix q = soft_q_from_v(m, Matrix::Zero(2, 2), Vector::Constant(2, 3.0));
  for (int i = 0; i < q.size(); ++i) EXPECT_NEAR(q.data()[i], 0.8 * 3.0, 1e-15);
}

TEST(SoftQ, HandArithmetic) {
  Matrix p = Matrix::Constant(4, 2, 0.5);
  const MfgModel m(2, 2, p, 0.8, Vector::Constant(2, 0.5));
  Matrix r(2, 2);
  r << 1, -1, 0.25, 2;
  Vector v(2);
  v << 1, 2;
  const Matrix q = soft_q_from_v(m, r, v);
  for (int x = 0; x < 2; ++x)
    for (int a = 0; a < 2; ++a) EXPECT_NEAR(q(x, a), r(x, a) + 0.8 * 1.5, 1e-15);
}

TEST(SoftQ, RejectsDimensionMismatch) {
  EXPECT_THROW(soft_q_from_v(traffic_routing_model(), Matrix::Zero(2, 2), Vector::Zero(3)), DimensionError);
}

TEST(Softmax, ConstantRowIsUniform) {
  Matrix q = Matrix::Constant(2, 3, 1.7);
  Vector v = Vector::Constant(2, 1.7 + std::log(3.0));
  const Policy pi = softmax_policy(q, v);
  for (int i = 0; i < pi.probs.size(); ++i) EXPECT_NEAR(pi.probs.data()[i], 1.0 / 3.0, 1e-15);
}

TEST(Softmax, TwoActionValues) {
  Matrix q(1, 2);
  q << 1.0, 0.0;
  Vector v(1);
  v << std::log(std::exp(1.0) + 1.0);
  const Policy pi = softmax_policy(q, v);
  EXPECT_NEAR(pi.probs(0, 0), 0.7310585786300049, 1e-15);
  EXPECT_NEAR(pi.probs(0, 1), 0.2689414213699951, 1e-15);
}

TEST(Softmax, ShiftInvariant) {
  Matrix q(2, 2);
  q << 0.3, -1.2, 4.0, 2.5;
  Vector v(2);
  for (int x = 0; x < 2; ++x) v(x) = log_sum_exp(q.row(x).transpose());
  const Policy a = softmax_policy(q, v);
  const Policy b = softmax_policy(q.array() + 17.0, v.array() + 17.0);
  EXPECT_LE((a.probs - b.probs).lpNorm<Eigen::Infinity>(), 1e-14);
}

TEST(Softmax, RejectsInconsistentPair) {
  Matrix q = Matrix::Zero(1, 2);
  Vector v(1);
  v << 0.0;  // should be log 2
  EXPECT_THROW(softmax_policy(q, v), NumericError);
}

TEST(SolveSoft, SolutionInvariantsOnReportedReward) {
  const MfgModel m = traffic_routing_model();
  const SoftSolution s = solve_soft(m, traffic_reported_reward());
  for (int x = 0; x < 2; ++x) {
    EXPECT_NEAR(s.v(x), log_sum_exp(s.q.row(x).transpose()), 1e-10);
    EXPECT_NEAR(s.policy.probs.row(x).sum(), 1.0, 1e-12);
    for (int a = 0; a < 2; ++a) EXPECT_NEAR(s.policy.probs(x, a), std::exp(s.q(x, a) - s.v(x)), 1e-12);
  }
}

TEST(SolveSoft, RewardShiftGauge) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const MfgModel m = oracle::random_model(rng, 3, 3, 0.8);
    const Matrix r = Matrix::Random(3, 3);
    const double c = 2.5;
    const SoftSolution a = solve_soft(m, r);
    const SoftSolution b = solve_soft(m, r.array() + c);
    EXPECT_LE((b.v - a.v - Vector::Constant(3, c / 0.2)).lpNorm<Eigen::Infinity>(), 1e-9);
    EXPECT_LE((b.policy.probs - a.policy.probs).lpNorm<Eigen::Infinity>(), 1e-10);
  }
}

TEST(SolveSoft, WarmStartReachesSameFixedPoint) {
  const MfgModel m = traffic_routing_model();
  const Matrix r = traffic_reported_reward();
  const SoftSolution cold = solve_soft(m, r);
  const SoftSolution warm = solve_soft(m, r, {}, cold.v);
  EXPECT_LE(warm.iterations, 2);
  EXPECT_LE((warm.v - cold.v).lpNorm<Eigen::Infinity>(), 1e-10);
}
