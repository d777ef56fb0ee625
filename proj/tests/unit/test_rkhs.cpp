#include <mfgirl/model.hpp>
#include <mfgirl/rkhs.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace mfgirl;

namespace {

FeatureMap traffic_features() {
  return FeatureMap::all_state_action_pairs({KernelKind::gaussian, 0.5}, 2, 2, traffic_routing_model().mean_field());
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double d : v) out(i++) = d;
  return out;
}

}  // namespace

TEST(Kernel, SelfSimilarityIsOne) {
  const Vector z = vec({0.3, -1.0, 2.0});
  EXPECT_EQ(kernel_eval({KernelKind::gaussian, 0.5}, z, z), 1.0);
}

TEST(Kernel, GaussianClosedForms) {
  const KernelSpec k{KernelKind::gaussian, 0.5};
  EXPECT_NEAR(kernel_eval(k, vec({0, 0, 0.6, 0.4}), vec({1, 0, 0.6, 0.4})), std::exp(-2.0), 1e-16);
  EXPECT_NEAR(kernel_eval(k, vec({0, 0, 0.6, 0.4}), vec({1, 0, 0.6, 0.4})), 0.135335283236613, 1e-14);
  EXPECT_NEAR(kernel_eval(k, vec({0, 0, 0.6, 0.4}), vec({1, 1, 0.6, 0.4})), 0.018315638888734, 1e-14);
}

TEST(Kernel, RejectsDimensionMismatchAndBadBandwidth) {
  EXPECT_THROW(kernel_eval({KernelKind::gaussian, 0.5}, vec({0}), vec({0, 1})), DimensionError);
  EXPECT_THROW(kernel_eval({KernelKind::gaussian, 0.0}, vec({0}), vec({1})), std::invalid_argument);
}

TEST(Kernel, SymmetricAndInUnitInterval) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> bw(0.1, 3.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const KernelSpec k{KernelKind::gaussian, bw(rng)};
    Vector z1(3), z2(3);
    for (int i = 0; i < 3; ++i) {
      z1(i) = n(rng);
      z2(i) = n(rng);
    }
    const double a = kernel_eval(k, z1, z2);
    EXPECT_EQ(a, kernel_eval(k, z2, z1));
    EXPECT_GE(a, 0.0);
    EXPECT_LE(a, 1.0);
  }
}

TEST(FeatureMap, TrafficFeatures) {
  const FeatureMap fm = traffic_features();
  ASSERT_EQ(fm.n_anchors(), 4);
  ASSERT_EQ(fm.input_dim(), 4);
  const double e2 = std::exp(-2.0);
  const double e4 = std::exp(-4.0);
  const Vector f00 = feature_map(fm, 0, 0);
  const Vector f11 = feature_map(fm, 1, 1);
  const Vector want00 = vec({1.0, e2, e2, e4});
  const Vector want11 = vec({e4, e2, e2, 1.0});
  for (int j = 0; j < 4; ++j) {
    EXPECT_NEAR(f00(j), want00(j), 1e-15);
    EXPECT_NEAR(f11(j), want11(j), 1e-15);
  }
  for (int x = 0; x < 2; ++x)
    for (int a = 0; a < 2; ++a) {
      const Vector f = feature_map(fm, x, a);
      EXPECT_EQ(f(x * 2 + a), 1.0);
      EXPECT_TRUE((f.array() > 0.0).all() && (f.array() <= 1.0).all());
    }
}

TEST(FeatureMap, SingleSelfAnchor) {
  const FeatureMap fm = FeatureMap::all_state_action_pairs({KernelKind::gaussian, 0.7}, 1, 1, Vector::Ones(1));
  const Vector f = feature_map(fm, 0, 0);
  ASSERT_EQ(f.size(), 1);
  EXPECT_EQ(f(0), 1.0);
}

TEST(FeatureMap, RejectsBadIndicesAndAnchors) {
  const FeatureMap fm = traffic_features();
  EXPECT_THROW(feature_map(fm, 2, 0), std::out_of_range);
  EXPECT_THROW(joint_feature(fm, 0, -1), std::out_of_range);
  EXPECT_THROW(FeatureMap({KernelKind::gaussian, 0.5}, {vec({0, 0, 0.6})}, FeatureMap::index_encoding(2),
                          FeatureMap::index_encoding(2), vec({0.6, 0.4})),
               DimensionError);
  EXPECT_THROW(FeatureMap({KernelKind::gaussian, 0.5}, {}, FeatureMap::index_encoding(2),
                          FeatureMap::index_encoding(2), vec({0.6, 0.4})),
               DimensionError);
}

TEST(FeatureMap, CustomEncodingShiftsKernelInput) {
  // one-hot action encoding: anchors become 5-dimensional
  std::vector<Vector> actions{vec({1, 0}), vec({0, 1})};
  const FeatureMap fm = FeatureMap::all_state_action_pairs({KernelKind::gaussian, 0.5}, FeatureMap::index_encoding(2),
                                                           actions, vec({0.6, 0.4}));
  EXPECT_EQ(fm.input_dim(), 5);
  // (0,0) vs anchor (0,1): squared distance 2 -> exp(-4)
  EXPECT_NEAR(feature_map(fm, 0, 0)(1), std::exp(-4.0), 1e-16);
}

TEST(JointFeature, TrafficPair00) {
  const Vector f = joint_feature(traffic_features(), 0, 0);
  const double e2 = std::exp(-2.0);
  const Vector want = vec({1, 0, 1, e2, e2, std::exp(-4.0)});
  ASSERT_EQ(f.size(), 6);
  for (int i = 0; i < 6; ++i) EXPECT_NEAR(f(i), want(i), 1e-15);
}

TEST(JointFeature, OneHotBlock) {
  const FeatureMap fm = traffic_features();
  const Vector f10 = joint_feature(fm, 1, 0);
  EXPECT_EQ(f10(0), 0.0);
  EXPECT_EQ(f10(1), 1.0);
  for (int x = 0; x < 2; ++x)
    for (int a = 0; a < 2; ++a) EXPECT_EQ(joint_feature(fm, x, a).head(2).sum(), 1.0);
}

TEST(RewardEval, ZeroAndPassthrough) {
  const FeatureMap fm = traffic_features();
  const RewardParams zero = RewardParams::zeros(2, 4);
  for (int x = 0; x < 2; ++x)
    for (int a = 0; a < 2; ++a) EXPECT_EQ(reward_eval(fm, zero, x, a), 0.0);
  const RewardParams lam{vec({1, 2}), Vector::Zero(4)};
  EXPECT_EQ(reward_eval(fm, lam, 1, 0), 2.0);
  EXPECT_EQ(reward_eval(fm, lam, 1, 1), 2.0);
}

TEST(RewardEval, ReportedParametersAtPair00) {
  const RewardParams theta{vec({-0.072, 0.072}), vec({-0.9016, 0.8307, 0.6536, -0.5828})};
  // -0.072 - 0.9016 + (0.8307 + 0.6536) e^-2 - 0.5828 e^-4
  EXPECT_NEAR(reward_eval(traffic_features(), theta, 0, 0), -0.7833961934362499, 1e-14);
}

TEST(RewardEval, RejectsDimensionMismatch) {
  EXPECT_THROW(reward_eval(traffic_features(), RewardParams::zeros(2, 3), 0, 0), DimensionError);
}

TEST(RewardEval, EqualsInnerProductWithJointFeature) {
  const FeatureMap fm = traffic_features();
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n(0.0, 2.0);
  for (int trial = 0; trial < 500; ++trial) {
    RewardParams theta{Vector(2), Vector(4)};
    for (int i = 0; i < 2; ++i) theta.lambda(i) = n(rng);
    for (int i = 0; i < 4; ++i) theta.alpha(i) = n(rng);
    for (int x = 0; x < 2; ++x)
      for (int a = 0; a < 2; ++a)
        EXPECT_NEAR(reward_eval(fm, theta, x, a), theta.concat().dot(joint_feature(fm, x, a)), 1e-14);
  }
}

TEST(FeatureBound, Traffic) {
  // brute force: max over pairs of sqrt(1 + ||Phi||^2); every pair ties here
  const double e2 = std::exp(-2.0);
  const double e4 = std::exp(-4.0);
  const double brute = std::sqrt(1.0 + 1.0 + 2 * e2 * e2 + e4 * e4);
  EXPECT_NEAR(feature_bound(traffic_features()), brute, 1e-15);
  EXPECT_NEAR(feature_bound(traffic_features()), 1.4272234374495714, 1e-14);
}

TEST(FeatureBound, SelfAnchorIsSqrtTwoAndAlwaysAtLeastOne) {
  const FeatureMap single = FeatureMap::all_state_action_pairs({KernelKind::gaussian, 1.0}, 1, 1, Vector::Ones(1));
  EXPECT_NEAR(feature_bound(single), std::sqrt(2.0), 1e-15);
  for (double bw : {0.01, 0.5, 10.0}) {
    const FeatureMap fm = FeatureMap::all_state_action_pairs({KernelKind::gaussian, bw}, 3, 4, Vector::Constant(3, 1.0 / 3));
    EXPECT_GE(feature_bound(fm), 1.0);
  }
}

TEST(AnchorGram, SymmetricPositiveSemidefinite) {
  const Matrix g = anchor_gram(traffic_features());
  EXPECT_EQ((g - g.transpose()).norm(), 0.0);
  Eigen::SelfAdjointEigenSolver<Matrix> es(g);
  EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10);
  EXPECT_NEAR(es.eigenvalues()(0), 0.7476450724155087, 1e-12);
  EXPECT_NEAR(es.eigenvalues()(3), 1.2889862053619594, 1e-12);
}
