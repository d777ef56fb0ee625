#pragma once

#include "mfgirl/types.hpp"

#include <string>
#include <vector>

namespace mfgirl {

/// Row-stochastic policy matrix, probs(x, a) = pi(a | x).
struct Policy {
  Matrix probs;

  int n_states() const { return static_cast<int>(probs.rows()); }
  int n_actions() const { return static_cast<int>(probs.cols()); }

  static Policy uniform(int n_states, int n_actions);
  /// Throws DimensionError if any row is not a distribution within kStochasticTol.
  void check() const;
};

/// A stationary mean-field game with the dynamics already evaluated at the
/// fixed mean-field term mu_E.
///
/// Transitions are stored as a (|X|*|A|) x |X| matrix; row x*|A| + a is the
/// next-state distribution p(. | x, a, mu_E). With this layout the Bellman
/// backup r + beta * P * V is a single matrix-vector product.
class MfgModel {
 public:
  MfgModel() = default;
  MfgModel(int n_states, int n_actions, Matrix transition, double discount, Vector mean_field);

  int n_states() const { return n_states_; }
  int n_actions() const { return n_actions_; }
  double discount() const { return discount_; }
  const Vector& mean_field() const { return mean_field_; }
  const Matrix& transition() const { return transition_; }

  double p(int x, int a, int y) const { return transition_(row(x, a), y); }
  auto next_state_dist(int x, int a) const { return transition_.row(row(x, a)); }
  int row(int x, int a) const { return x * n_actions_ + a; }

  std::vector<std::string> state_labels;
  std::vector<std::string> action_labels;

 private:
  int n_states_ = 0;
  int n_actions_ = 0;
  Matrix transition_;
  double discount_ = 0.0;
  Vector mean_field_;
};

struct Violation {
  std::string message;
  double magnitude = 0.0;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
};

/// Checks every invariant of the model and reports; never throws.
ValidationReport validate_model(const MfgModel& model);

/// Rescales transition rows and the mean field whose mass is off by at most
/// max_defect. Anything further off is left alone (and will still fail
/// validation). Returns the number of rows touched.
int renormalize(MfgModel& model, double max_defect = 1e-9);

/// A[x, y] = sum_a p(y | x, a) pi(a | x).
Matrix policy_transition_matrix(const MfgModel& model, const Policy& policy);

/// || mu - mu^T A_pi ||_1: zero iff mu is invariant under the policy dynamics.
double stationarity_residual(const MfgModel& model, const Policy& policy, const Vector& mu);

/// Stationary distribution of a row-stochastic matrix (left eigenvector for
/// eigenvalue 1), computed with a direct solve of the balance equations.
Vector stationary_distribution(const Matrix& chain);

/// The two-state traffic-routing instance used throughout the tests and
/// the shipped example configuration.
MfgModel traffic_routing_model();
/// Expert policy of the traffic-routing instance.
Policy traffic_routing_expert();

}  // namespace mfgirl
