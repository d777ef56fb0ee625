#include <mfgirl/demonstrations.hpp>
#include <mfgirl/occupation.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "../support/oracles.hpp"

using namespace mfgirl;

namespace {

FeatureMap traffic_features() {
  return FeatureMap::all_state_action_pairs({KernelKind::gaussian, 0.5}, 2, 2, traffic_routing_model().mean_field());
}

TrajectorySet from_states(std::initializer_list<std::initializer_list<int>> rows) {
  TrajectorySet d;
  for (const auto& r : rows) {
    Trajectory t;
    for (int x : r) t.push_back({x, 0});
    d.trajectories.push_back(std::move(t));
  }
  return d;
}

}  // namespace

TEST(Simulate, DegenerateChainIsConstant) {
  const MfgModel m(1, 1, Matrix::Ones(1, 1), 0.9, Vector::Ones(1));
  for (std::uint64_t seed : {0ull, 1ull, 99ull}) {
    const TrajectorySet d = simulate_trajectories(m, Policy::uniform(1, 1), 3, 10, seed);
    for (const auto& t : d.trajectories) {
      ASSERT_EQ(t.size(), 11u);
      for (const auto& sa : t) EXPECT_EQ(sa, (StateAction{0, 0}));
    }
  }
}

TEST(Simulate, RejectsBadSizes) {
  const MfgModel m = traffic_routing_model();
  EXPECT_THROW(simulate_trajectories(m, traffic_routing_expert(), 0, 5, 1), std::invalid_argument);
  EXPECT_THROW(simulate_trajectories(m, traffic_routing_expert(), 1, -1, 1), std::invalid_argument);
}

TEST(Simulate, DeterministicAcrossSeedsAndThreads) {
  const MfgModel m = traffic_routing_model();
  const Policy pi = traffic_routing_expert();
  const TrajectorySet a = simulate_trajectories(m, pi, 50, 30, 42);
  const TrajectorySet b = simulate_trajectories(m, pi, 50, 30, 42);
  const TrajectorySet c = simulate_trajectories(m, pi, 50, 30, 42, 4);
  const TrajectorySet other = simulate_trajectories(m, pi, 50, 30, 43);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, c);
  EXPECT_NE(a, other);
  // substream i does not depend on d
  const TrajectorySet longer = simulate_trajectories(m, pi, 80, 30, 42);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a.trajectories[i], longer.trajectories[i]);
}

TEST(Simulate, EmpiricalFrequenciesApproachStationaryDistribution) {
  const MfgModel m = traffic_routing_model();
  const Policy pi = traffic_routing_expert();
  const TrajectorySet d = simulate_trajectories(m, pi, 1000, 500, 42);
  const Vector stationary = oracle::stationary_power(policy_transition_matrix(m, pi));
  EXPECT_NEAR(stationary(0), 0.7741935483870968, 1e-12);
  const Vector mu = empirical_mean_field(d, 2);
  EXPECT_NEAR(mu(0), stationary(0), 0.01);
  EXPECT_NEAR(mu(1), stationary(1), 0.01);
  EXPECT_NEAR(mu.sum(), 1.0, 1e-12);
}

TEST(EmpiricalMeanField, DirectCounts) {
  const Vector a = empirical_mean_field(from_states({{0, 0, 1, 1}}), 2);
  EXPECT_EQ(a(0), 0.5);
  EXPECT_EQ(a(1), 0.5);
  const Vector b = empirical_mean_field(from_states({{0, 0, 0}, {0}, {0, 0}}), 2);
  EXPECT_EQ(b(0), 1.0);
  EXPECT_EQ(b(1), 0.0);
  const Vector c = empirical_mean_field(from_states({{0, 1, 2}, {2, 2}}), 3);
  EXPECT_NEAR(c.sum(), 1.0, 1e-12);
  EXPECT_THROW(empirical_mean_field(TrajectorySet{}, 2), std::invalid_argument);
  EXPECT_THROW(empirical_mean_field(from_states({{}}), 2), std::invalid_argument);
}

TEST(EmpiricalFeatureExpectation, SingleRecordAndMyopic) {
  const FeatureMap fm = traffic_features();
  TrajectorySet one;
  one.trajectories.push_back({{1, 0}});
  EXPECT_LE((empirical_feature_expectation(one, fm, 0.8) - joint_feature(fm, 1, 0)).norm(), 1e-15);

  TrajectorySet two;
  two.trajectories.push_back({{0, 1}, {1, 1}, {1, 0}});
  two.trajectories.push_back({{1, 1}, {0, 0}});
  const Vector myopic = empirical_feature_expectation(two, fm, 0.0);
  const Vector want = 0.5 * (joint_feature(fm, 0, 1) + joint_feature(fm, 1, 1));
  EXPECT_LE((myopic - want).norm(), 1e-15);
  EXPECT_THROW(empirical_feature_expectation(TrajectorySet{}, fm, 0.8), std::invalid_argument);
}

TEST(EmpiricalFeatureExpectation, TruncationBiasBound) {
  const MfgModel m = traffic_routing_model();
  const Policy pi = traffic_routing_expert();
  const FeatureMap fm = traffic_features();
  const Vector infinite = discounted_feature_expectation(occupation_measure(m, pi, m.mean_field()).state_action_occ, fm);
  const Matrix chain = policy_transition_matrix(m, pi);
  for (int horizon : {0, 1, 5, 20}) {
    // exact expectation of the truncated sum: sum_{t<=T} beta^t E[f(x_t, a_t)]
    Vector dist = m.mean_field();
    Vector truncated = Vector::Zero(fm.dim());
    double w = 1.0;
    for (int t = 0; t <= horizon; ++t) {
      for (int x = 0; x < 2; ++x)
        for (int a = 0; a < 2; ++a) truncated += w * dist(x) * pi.probs(x, a) * joint_feature(fm, x, a);
      dist = chain.transpose() * dist;
      w *= 0.8;
    }
    const double bound = std::pow(0.8, horizon + 1) * feature_bound(fm) / 0.2;
    EXPECT_LE((infinite - truncated).norm(), bound) << horizon;

    const auto est = estimate_feature_expectation(simulate_trajectories(m, pi, 5, horizon, 1), fm, 0.8);
    EXPECT_NEAR(est.truncation_bias_bound, bound, 1e-12);
  }
}

TEST(EmpiricalFeatureExpectation, MonteCarloMatchesOccupation) {
  const MfgModel m = traffic_routing_model();
  const Policy pi = traffic_routing_expert();
  const FeatureMap fm = traffic_features();
  const Vector exact = discounted_feature_expectation(occupation_measure(m, pi, m.mean_field()).state_action_occ, fm);
  const auto est = estimate_feature_expectation(simulate_trajectories(m, pi, 100000, 200, 7), fm, 0.8);
  for (int i = 0; i < fm.dim(); ++i) {
    EXPECT_GT(est.standard_error(i), 0.0);
    EXPECT_LE(std::abs(est.mean(i) - exact(i)), 3.0 * est.standard_error(i)) << i;
  }
}

TEST(EmpiricalOccupation, MatchesLinearSolve) {
  const MfgModel m = traffic_routing_model();
  const Policy pi = traffic_routing_expert();
  const Matrix exact = occupation_measure(m, pi, m.mean_field()).state_action_occ;
  const Matrix est = empirical_occupation(simulate_trajectories(m, pi, 20000, 150, 3), 2, 2, 0.8);
  EXPECT_LE((est - exact).lpNorm<Eigen::Infinity>(), 0.05);
}

TEST(TrajectoryFile, RoundTrip) {
  const TrajectorySet d = simulate_trajectories(traffic_routing_model(), traffic_routing_expert(), 4, 6, 11);
  std::stringstream ss;
  write_trajectories(ss, d);
  const TrajectorySet back = read_trajectories(ss, 2, 2);
  EXPECT_EQ(back, d);
  ASSERT_TRUE(back.seed.has_value());
  EXPECT_EQ(*back.seed, 11u);
}

TEST(TrajectoryFile, MinimalRecord) {
  const TrajectorySet d = simulate_trajectories(traffic_routing_model(), traffic_routing_expert(), 1, 0, 5);
  std::stringstream ss;
  write_trajectories(ss, d);
  std::string header, traj, row;
  std::getline(ss, header);
  std::getline(ss, traj);
  std::getline(ss, row);
  EXPECT_EQ(traj, "traj 0 0");
  EXPECT_EQ(row.substr(0, 2), "0 ");
  EXPECT_FALSE(std::getline(ss, row));
}

TEST(TrajectoryFile, ValidationErrors) {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return read_trajectories(in, 2, 2);
  };
  EXPECT_NO_THROW(parse("traj 0 1\n0 0 1\n1 1 0\n"));
  const std::pair<std::string, int> bad[] = {
      {"traj 0 1\n0 0 1\n2 1 0\n", 3},          // t jumps
      {"traj 0 1\n1 0 1\n0 1 0\n", 2},          // t not starting at 0
      {"traj 0 1\n0 0 1\n1 2 0\n", 3},          // state out of range
      {"traj 0 0\n0 0 5\n", 2},                 // action out of range
      {"traj 0 2\n0 0 1\n1 1 0\n", 3},          // missing rows at EOF
      {"traj 0 0\n0 0 1\ntraj 2 0\n0 0 0\n", 3},  // index out of sequence
      {"0 0 1\n", 1},                           // row before header
      {"traj zero 1\n", 1},                     // malformed header
      {"traj 0 0\n0 0 1\n1 0 1\n", 3},          // extra row
  };
  for (const auto& [text, line] : bad) {
    try {
      parse(text);
      ADD_FAILURE() << "accepted: " << text;
    } catch (const ParseError& e) {
      EXPECT_EQ(e.line(), line) << text << " -> " << e.what();
    }
  }
}
