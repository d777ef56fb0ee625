#pragma once

#include "mfgirl/model.hpp"
#include "mfgirl/rkhs.hpp"

namespace mfgirl {

/// Discounted occupation of a policy from an initial distribution.
///
/// Un-normalized (the default): state_occ sums to 1/(1 - beta).
/// Normalized: both arrays are scaled by (1 - beta) and sum to one.
struct OccupationMeasure {
  Vector state_occ;        // gamma^X(x)
  Matrix state_action_occ; // gamma(x, a) = gamma^X(x) pi(a|x)
  bool normalized = false;

  OccupationMeasure normalized_copy(double discount) const;
};

/// Solves gamma = mu0 + beta A_pi^T gamma with a dense LU factorization.
/// Entries in [-1e-12, 0) are clamped to zero; anything more negative, or a
/// singular system, raises NumericError.
Vector discounted_state_occupation(const MfgModel& model, const Policy& policy, const Vector& mu0);

/// gamma(x, a) = state_occ(x) * pi(a|x).
Matrix state_action_occupation(const Vector& state_occ, const Policy& policy);

/// Both arrays at once.
OccupationMeasure occupation_measure(const MfgModel& model, const Policy& policy, const Vector& mu0);

/// sum_{(x,a)} f(x, a) occ(x, a), a vector of length |X| + m.
Vector discounted_feature_expectation(const Matrix& occ, const FeatureMap& fm);

/// ||gamma - mu0 - beta A^T gamma||_inf.
double bellman_flow_residual(const MfgModel& model, const Policy& policy, const Vector& mu0,
                             const Vector& state_occ);

}  // namespace mfgirl
