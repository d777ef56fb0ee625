#include "mfgirl/rkhs.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mfgirl {

double kernel_eval(const KernelSpec& spec, const Vector& z1, const Vector& z2) {
  if (z1.size() != z2.size()) throw DimensionError("kernel_eval: inputs differ in dimension");
  switch (spec.kind) {
    case KernelKind::gaussian: {
      if (!(spec.bandwidth > 0.0)) throw std::invalid_argument("kernel bandwidth must be positive");
      const double d2 = (z1 - z2).squaredNorm();
      return std::exp(-d2 / (2.0 * spec.bandwidth * spec.bandwidth));
    }
  }
  throw std::invalid_argument("unknown kernel kind");
}

RewardParams RewardParams::zeros(int n_states, int n_anchors) {
  return RewardParams{Vector::Zero(n_states), Vector::Zero(n_anchors)};
}

Vector RewardParams::concat() const {
  Vector theta(lambda.size() + alpha.size());
  theta << lambda, alpha;
  return theta;
}

RewardParams RewardParams::split(const Vector& theta, int n_states) {
  if (n_states < 0 || theta.size() < n_states) throw DimensionError("theta shorter than n_states");
  return RewardParams{theta.head(n_states), theta.tail(theta.size() - n_states)};
}

std::vector<Vector> FeatureMap::index_encoding(int n) {
  std::vector<Vector> enc;
  enc.reserve(n);
  for (int i = 0; i < n; ++i) enc.push_back(Vector::Constant(1, static_cast<double>(i)));
  return enc;
}

FeatureMap::FeatureMap(KernelSpec kernel, std::vector<Vector> anchors, std::vector<Vector> state_encoding,
                       std::vector<Vector> action_encoding, Vector mean_field)
    : kernel_(kernel),
      anchors_(std::move(anchors)),
      state_encoding_(std::move(state_encoding)),
      action_encoding_(std::move(action_encoding)),
      mean_field_(std::move(mean_field)) {
  if (!(kernel_.bandwidth > 0.0)) throw std::invalid_argument("kernel bandwidth must be positive");
  if (anchors_.empty()) throw DimensionError("feature map needs at least one anchor");
  if (state_encoding_.empty() || action_encoding_.empty()) throw DimensionError("empty state or action encoding");
  if (mean_field_.size() != n_states()) throw DimensionError("mean_field must have one entry per state");

  const auto sdim = state_encoding_.front().size();
  const auto adim = action_encoding_.front().size();
  for (const auto& e : state_encoding_) {
    if (e.size() != sdim) throw DimensionError("state encodings differ in dimension");
  }
  for (const auto& e : action_encoding_) {
    if (e.size() != adim) throw DimensionError("action encodings differ in dimension");
  }
  const auto zdim = sdim + adim + mean_field_.size();
  for (std::size_t j = 0; j < anchors_.size(); ++j) {
    if (anchors_[j].size() != zdim) {
      throw DimensionError("anchor " + std::to_string(j) + " has dimension " + std::to_string(anchors_[j].size()) +
                           ", expected " + std::to_string(zdim));
    }
  }

  table_.reserve(static_cast<std::size_t>(n_states()) * n_actions());
  for (int x = 0; x < n_states(); ++x) {
    for (int a = 0; a < n_actions(); ++a) {
      const Vector z = embed(x, a);
      Vector phi(n_anchors());
      for (int j = 0; j < n_anchors(); ++j) phi(j) = kernel_eval(kernel_, z, anchors_[j]);
      table_.push_back(std::move(phi));
    }
  }
}

FeatureMap FeatureMap::all_state_action_pairs(KernelSpec kernel, int n_states, int n_actions,
                                              const Vector& mean_field) {
  return all_state_action_pairs(kernel, index_encoding(n_states), index_encoding(n_actions), mean_field);
}

FeatureMap FeatureMap::all_state_action_pairs(KernelSpec kernel, std::vector<Vector> state_encoding,
                                              std::vector<Vector> action_encoding, const Vector& mean_field) {
  std::vector<Vector> anchors;
  for (const auto& s : state_encoding) {
    for (const auto& a : action_encoding) {
      Vector z(s.size() + a.size() + mean_field.size());
      z << s, a, mean_field;
      anchors.push_back(std::move(z));
    }
  }
  return FeatureMap(kernel, std::move(anchors), std::move(state_encoding), std::move(action_encoding), mean_field);
}

void FeatureMap::check_index(int x, int a) const {
  if (x < 0 || x >= n_states() || a < 0 || a >= n_actions()) {
    throw std::out_of_range("state/action index (" + std::to_string(x) + "," + std::to_string(a) + ") out of range");
  }
}

Vector FeatureMap::embed(int x, int a) const {
  check_index(x, a);
  const Vector& s = state_encoding_[x];
  const Vector& u = action_encoding_[a];
  Vector z(s.size() + u.size() + mean_field_.size());
  z << s, u, mean_field_;
  return z;
}

const Vector& FeatureMap::features(int x, int a) const {
  check_index(x, a);
  return table_[static_cast<std::size_t>(x) * n_actions() + a];
}

Vector FeatureMap::joint(int x, int a) const {
  Vector f = Vector::Zero(dim());
  f(x) = 1.0;
  f.tail(n_anchors()) = features(x, a);
  return f;
}

Vector feature_map(const FeatureMap& fm, int x, int a) { return fm.features(x, a); }

Vector joint_feature(const FeatureMap& fm, int x, int a) { return fm.joint(x, a); }

double reward_eval(const FeatureMap& fm, const RewardParams& theta, int x, int a) {
  if (theta.lambda.size() != fm.n_states() || theta.alpha.size() != fm.n_anchors()) {
    throw DimensionError("reward parameters do not match feature map");
  }
  return theta.lambda(x) + theta.alpha.dot(fm.features(x, a));
}

Matrix reward_matrix(const FeatureMap& fm, const RewardParams& theta) {
  Matrix r(fm.n_states(), fm.n_actions());
  for (int x = 0; x < fm.n_states(); ++x) {
    for (int a = 0; a < fm.n_actions(); ++a) r(x, a) = reward_eval(fm, theta, x, a);
  }
  return r;
}

double feature_bound(const FeatureMap& fm) {
  double k = 0.0;
  for (int x = 0; x < fm.n_states(); ++x) {
    for (int a = 0; a < fm.n_actions(); ++a) k = std::max(k, std::sqrt(1.0 + fm.features(x, a).squaredNorm()));
  }
  return k;
}

Matrix anchor_gram(const FeatureMap& fm) {
  const int m = fm.n_anchors();
  Matrix g(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) g(i, j) = kernel_eval(fm.kernel(), fm.anchors()[i], fm.anchors()[j]);
  }
  return g;
}

}  // namespace mfgirl
