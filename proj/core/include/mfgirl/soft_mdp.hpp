#pragma once

#include "mfgirl/model.hpp"

namespace mfgirl {

/// Stopping rule for soft value iteration. The sweep stops once
/// ||L V - V||_inf <= tol * (1 - beta) / beta, which by the contraction
/// bound puts V within tol of the fixed point in sup norm.
struct SoftViOptions {
  double tol = 1e-10;
  int max_iter = 100000;
};

struct SoftViResult {
  Vector v;
  int iterations = 0;
  double residual = 0.0;  // sup-norm of the last update
  bool converged = false;
};

struct SoftSolution {
  Vector v;       // V(x)
  Matrix q;       // Q(x, a)
  Policy policy;  // pi(a|x) = exp(Q(x,a) - V(x))
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

/// One Jacobi sweep of the soft Bellman operator:
///   (L V)(x) = log sum_a exp(r(x,a) + beta sum_y p(y|x,a) V(y)).
/// reward is |X| x |A|.
Vector soft_bellman_backup(const MfgModel& model, const Matrix& reward, const Vector& v);

/// Iterates soft_bellman_backup from `v0` (zeros when empty) until the
/// stopping rule holds or max_iter sweeps have run. Non-convergence is
/// reported through the result, not thrown. Throws NumericError on
/// non-finite rewards.
SoftViResult soft_value_iteration(const MfgModel& model, const Matrix& reward, const SoftViOptions& opts = {},
                                  const Vector& v0 = Vector());

/// Q(x, a) = r(x, a) + beta sum_y p(y|x,a) V(y).
Matrix soft_q_from_v(const MfgModel& model, const Matrix& reward, const Vector& v);

/// pi(a|x) = exp(q(x,a) - v(x)). Throws NumericError if v(x) differs from
/// logsumexp_a q(x, a) by more than consistency_tol.
Policy softmax_policy(const Matrix& q, const Vector& v, double consistency_tol = 1e-8);

/// Full pipeline: value iteration, Q recovery, policy extraction.
SoftSolution solve_soft(const MfgModel& model, const Matrix& reward, const SoftViOptions& opts = {},
                        const Vector& v0 = Vector());

}  // namespace mfgirl
