#pragma once

#include "mfgirl/types.hpp"

#include <vector>

namespace mfgirl {

enum class KernelKind { gaussian };

/// k(z1, z2) = exp(-||z1 - z2||^2 / (2 sigma^2)) for KernelKind::gaussian.
struct KernelSpec {
  KernelKind kind = KernelKind::gaussian;
  double bandwidth = 1.0;
};

double kernel_eval(const KernelSpec& spec, const Vector& z1, const Vector& z2);

/// Reward parameters theta = (lambda, alpha): per-state offsets and the
/// coefficients of h = sum_j alpha_j k(., z'_j) over the anchors.
struct RewardParams {
  Vector lambda;
  Vector alpha;

  static RewardParams zeros(int n_states, int n_anchors);
  /// [lambda; alpha] as one vector, matching the joint feature layout.
  Vector concat() const;
  static RewardParams split(const Vector& theta, int n_states);
  bool all_finite() const { return lambda.allFinite() && alpha.allFinite(); }
};

/// Anchor-based kernel feature map.
///
/// A state-action pair is embedded as z = [enc(x); enc(a); mu_E] and mapped
/// to Phi(x, a)_j = k(z, z'_j). The joint feature used by the reward model is
/// f(x, a) = [e_x; Phi(x, a)] of length |X| + m, so that
/// r_theta(x, a) = <theta, f(x, a)>.
class FeatureMap {
 public:
  /// Default encodings: each state/action index as a one-element vector.
  static std::vector<Vector> index_encoding(int n);

  FeatureMap(KernelSpec kernel, std::vector<Vector> anchors, std::vector<Vector> state_encoding,
             std::vector<Vector> action_encoding, Vector mean_field);

  /// Anchors at every (x, a) pair in row-major order (x outer, a inner).
  static FeatureMap all_state_action_pairs(KernelSpec kernel, int n_states, int n_actions,
                                           const Vector& mean_field);
  static FeatureMap all_state_action_pairs(KernelSpec kernel, std::vector<Vector> state_encoding,
                                           std::vector<Vector> action_encoding, const Vector& mean_field);

  int n_states() const { return static_cast<int>(state_encoding_.size()); }
  int n_actions() const { return static_cast<int>(action_encoding_.size()); }
  int n_anchors() const { return static_cast<int>(anchors_.size()); }
  int dim() const { return n_states() + n_anchors(); }
  int input_dim() const { return static_cast<int>(anchors_.front().size()); }

  const KernelSpec& kernel() const { return kernel_; }
  const std::vector<Vector>& anchors() const { return anchors_; }
  const std::vector<Vector>& state_encoding() const { return state_encoding_; }
  const std::vector<Vector>& action_encoding() const { return action_encoding_; }
  const Vector& mean_field() const { return mean_field_; }

  /// Kernel input z for (x, a).
  Vector embed(int x, int a) const;
  /// Phi(x, a), length m. Served from a table built at construction.
  const Vector& features(int x, int a) const;
  /// f(x, a) = [e_x; Phi(x, a)], length |X| + m.
  Vector joint(int x, int a) const;

 private:
  void check_index(int x, int a) const;

  KernelSpec kernel_;
  std::vector<Vector> anchors_;
  std::vector<Vector> state_encoding_;
  std::vector<Vector> action_encoding_;
  Vector mean_field_;
  std::vector<Vector> table_;  // Phi(x, a) at x * |A| + a
};

Vector feature_map(const FeatureMap& fm, int x, int a);
Vector joint_feature(const FeatureMap& fm, int x, int a);

/// r_theta(x, a) = lambda(x) + sum_j alpha_j Phi(x, a)_j.
double reward_eval(const FeatureMap& fm, const RewardParams& theta, int x, int a);
/// Reward table over all pairs, shape |X| x |A|.
Matrix reward_matrix(const FeatureMap& fm, const RewardParams& theta);

/// K = max_{(x,a)} ||f(x, a)||_2.
double feature_bound(const FeatureMap& fm);

/// [k(z'_i, z'_j)] over the anchors.
Matrix anchor_gram(const FeatureMap& fm);

}  // namespace mfgirl
