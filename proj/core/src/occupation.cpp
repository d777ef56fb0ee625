#include "mfgirl/occupation.hpp"

#include <sstream>

namespace mfgirl {

OccupationMeasure OccupationMeasure::normalized_copy(double discount) const {
  if (normalized) return *this;
  return OccupationMeasure{(1.0 - discount) * state_occ, (1.0 - discount) * state_action_occ, true};
}

Vector discounted_state_occupation(const MfgModel& m, const Policy& policy, const Vector& mu0) {
  if (mu0.size() != m.n_states()) throw DimensionError("initial distribution must have n_states entries");
  const Matrix chain = policy_transition_matrix(m, policy);
  const Eigen::Index n = m.n_states();
  const Matrix lhs = Matrix::Identity(n, n) - m.discount() * chain.transpose();

  Eigen::PartialPivLU<Matrix> lu(lhs);
  // I - beta A^T is strictly diagonally dominant by columns for a stochastic
  // A and beta < 1, so a vanishing pivot only happens on bad input.
  const auto& lu_mat = lu.matrixLU();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(std::abs(lu_mat(i, i)) > 1e-14)) throw NumericError("occupation system is singular");
  }
  Vector gamma = lu.solve(mu0);

  for (Eigen::Index x = 0; x < n; ++x) {
    if (gamma(x) < 0.0) {
      if (gamma(x) >= -1e-12) {
        gamma(x) = 0.0;
      } else {
        std::ostringstream os;
        os << "negative state occupation " << gamma(x) << " at x=" << x;
        throw NumericError(os.str());
      }
    }
  }
  if (!gamma.allFinite()) throw NumericError("non-finite state occupation");
  return gamma;
}

Matrix state_action_occupation(const Vector& state_occ, const Policy& policy) {
  if (state_occ.size() != policy.n_states()) throw DimensionError("state occupation and policy disagree on n_states");
  return state_occ.asDiagonal() * policy.probs;
}

OccupationMeasure occupation_measure(const MfgModel& m, const Policy& policy, const Vector& mu0) {
  OccupationMeasure occ;
  occ.state_occ = discounted_state_occupation(m, policy, mu0);
  occ.state_action_occ = state_action_occupation(occ.state_occ, policy);
  return occ;
}

Vector discounted_feature_expectation(const Matrix& occ, const FeatureMap& fm) {
  if (occ.rows() != fm.n_states() || occ.cols() != fm.n_actions()) {
    throw DimensionError("occupation matrix does not match feature map");
  }
  Vector out = Vector::Zero(fm.dim());
  for (int x = 0; x < fm.n_states(); ++x) {
    for (int a = 0; a < fm.n_actions(); ++a) {
      out(x) += occ(x, a);
      out.tail(fm.n_anchors()) += occ(x, a) * fm.features(x, a);
    }
  }
  return out;
}

double bellman_flow_residual(const MfgModel& m, const Policy& policy, const Vector& mu0, const Vector& state_occ) {
  const Matrix chain = policy_transition_matrix(m, policy);
  return (state_occ - mu0 - m.discount() * chain.transpose() * state_occ).lpNorm<Eigen::Infinity>();
}

}  // namespace mfgirl
