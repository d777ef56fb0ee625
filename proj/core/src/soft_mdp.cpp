#include "mfgirl/soft_mdp.hpp"

#include <cmath>
#include <sstream>

namespace mfgirl {

namespace {

void check_reward(const MfgModel& m, const Matrix& reward) {
  if (reward.rows() != m.n_states() || reward.cols() != m.n_actions()) {
    throw DimensionError("reward must be n_states x n_actions");
  }
  if (!reward.allFinite()) throw NumericError("reward has non-finite entries");
}

}  // namespace

Matrix soft_q_from_v(const MfgModel& m, const Matrix& reward, const Vector& v) {
  if (reward.rows() != m.n_states() || reward.cols() != m.n_actions()) {
    throw DimensionError("reward must be n_states x n_actions");
  }
  if (v.size() != m.n_states()) throw DimensionError("value vector must have n_states entries");
  const Vector next = m.transition() * v;  // row x*|A|+a
  Matrix q(m.n_states(), m.n_actions());
  for (int x = 0; x < m.n_states(); ++x) {
    for (int a = 0; a < m.n_actions(); ++a) q(x, a) = reward(x, a) + m.discount() * next(m.row(x, a));
  }
  return q;
}

Vector soft_bellman_backup(const MfgModel& m, const Matrix& reward, const Vector& v) {
  const Matrix q = soft_q_from_v(m, reward, v);
  Vector out(m.n_states());
  for (int x = 0; x < m.n_states(); ++x) out(x) = log_sum_exp(q.row(x).transpose());
  return out;
}

SoftViResult soft_value_iteration(const MfgModel& m, const Matrix& reward, const SoftViOptions& opts,
                                  const Vector& v0) {
  check_reward(m, reward);
  if (!(opts.tol > 0.0)) throw std::invalid_argument("soft_value_iteration: tol must be positive");
  const double beta = m.discount();
  const double stop = opts.tol * (1.0 - beta) / beta;

  SoftViResult res;
  res.v = v0.size() == 0 ? Vector::Zero(m.n_states()) : v0;
  if (res.v.size() != m.n_states()) throw DimensionError("initial value vector must have n_states entries");

  res.residual = INFINITY;
  while (res.iterations < opts.max_iter) {
    Vector next = soft_bellman_backup(m, reward, res.v);
    res.residual = (next - res.v).lpNorm<Eigen::Infinity>();
    res.v = std::move(next);
    ++res.iterations;
    if (!std::isfinite(res.residual)) throw NumericError("soft value iteration diverged");
    if (res.residual <= stop) {
      res.converged = true;
      break;
    }
  }
  return res;
}

Policy softmax_policy(const Matrix& q, const Vector& v, double consistency_tol) {
  if (v.size() != q.rows()) throw DimensionError("softmax_policy: v and q disagree on n_states");
  Policy pi{Matrix(q.rows(), q.cols())};
  for (Eigen::Index x = 0; x < q.rows(); ++x) {
    const double lse = log_sum_exp(q.row(x).transpose());
    if (!(std::abs(lse - v(x)) <= consistency_tol)) {
      std::ostringstream os;
      os << "softmax_policy: v(" << x << ") = " << v(x) << " but logsumexp q = " << lse;
      throw NumericError(os.str());
    }
    // Normalizing by the exact log-sum-exp keeps rows stochastic to rounding
    // even when v carries a small solver error.
    pi.probs.row(x) = (q.row(x).array() - lse).exp();
  }
  return pi;
}

SoftSolution solve_soft(const MfgModel& m, const Matrix& reward, const SoftViOptions& opts, const Vector& v0) {
  SoftViResult vi = soft_value_iteration(m, reward, opts, v0);
  SoftSolution s;
  s.q = soft_q_from_v(m, reward, vi.v);
  // V is taken as the row log-sum-exp of Q (one more backup of the last
  // iterate), so the returned (q, v, policy) triple is exactly consistent.
  s.v.resize(m.n_states());
  for (int x = 0; x < m.n_states(); ++x) s.v(x) = log_sum_exp(s.q.row(x).transpose());
  s.policy = softmax_policy(s.q, s.v);
  s.iterations = vi.iterations;
  s.residual = vi.residual;
  s.converged = vi.converged;
  return s;
}

}  // namespace mfgirl
