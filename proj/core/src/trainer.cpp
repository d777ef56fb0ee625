#include "mfgirl/trainer.hpp"

#include <cmath>
#include <sstream>

namespace mfgirl {

Vector expert_expectation_exact(const MfgModel& m, const Policy& expert, const FeatureMap& fm, ExpertBlock block) {
  if (fm.n_states() != m.n_states() || fm.n_actions() != m.n_actions()) {
    throw DimensionError("feature map does not match model");
  }
  const OccupationMeasure occ = occupation_measure(m, expert, m.mean_field());
  Vector out = discounted_feature_expectation(occ.state_action_occ, fm);
  if (block == ExpertBlock::meanfield) out.head(m.n_states()) = m.mean_field() / (1.0 - m.discount());
  return out;
}

GradientResult gradient(const MfgModel& m, const FeatureMap& fm, const RewardParams& theta,
                        const Vector& expert_expectation, const SoftViOptions& inner, const Vector& v0) {
  if (expert_expectation.size() != fm.dim()) throw DimensionError("expert expectation has wrong length");
  if (!theta.all_finite()) throw NumericError("theta has non-finite entries");

  GradientResult g;
  g.solution = solve_soft(m, reward_matrix(fm, theta), inner, v0);
  const OccupationMeasure occ = occupation_measure(m, g.solution.policy, m.mean_field());
  g.expectation = discounted_feature_expectation(occ.state_action_occ, fm);
  g.grad = expert_expectation - g.expectation;
  return g;
}

double policy_log_likelihood(const Policy& policy, const Matrix& expert_occ) {
  if (expert_occ.rows() != policy.n_states() || expert_occ.cols() != policy.n_actions()) {
    throw DimensionError("expert occupation does not match policy");
  }
  double ll = 0.0;
  for (Eigen::Index x = 0; x < expert_occ.rows(); ++x) {
    for (Eigen::Index a = 0; a < expert_occ.cols(); ++a) {
      if (expert_occ(x, a) != 0.0) ll += std::log(policy.probs(x, a)) * expert_occ(x, a);
    }
  }
  return ll;
}

double log_likelihood(const MfgModel& m, const FeatureMap& fm, const RewardParams& theta, const Matrix& expert_occ,
                      const SoftViOptions& inner) {
  const SoftSolution s = solve_soft(m, reward_matrix(fm, theta), inner);
  return policy_log_likelihood(s.policy, expert_occ);
}

double lipschitz_constant(double beta, int n_actions, double feature_bound) {
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("lipschitz_constant: beta must lie in (0, 1)");
  if (n_actions < 1) throw std::invalid_argument("lipschitz_constant: n_actions must be positive");
  if (!(feature_bound > 0.0)) throw std::invalid_argument("lipschitz_constant: feature bound must be positive");
  const double sqrt_a = std::sqrt(static_cast<double>(n_actions));
  const double gap = 1.0 - beta;
  return feature_bound * feature_bound * sqrt_a / (gap * gap) * (2.0 * sqrt_a * beta / gap + 1.0);
}

Vector central_difference(const std::function<double(const Vector&)>& fn, const Vector& at, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite difference step must be positive");
  Vector grad(at.size());
  Vector probe = at;
  for (Eigen::Index i = 0; i < at.size(); ++i) {
    probe(i) = at(i) + h;
    const double up = fn(probe);
    probe(i) = at(i) - h;
    const double down = fn(probe);
    probe(i) = at(i);
    grad(i) = (up - down) / (2.0 * h);
  }
  return grad;
}

Vector finite_difference_gradient(const MfgModel& m, const FeatureMap& fm, const RewardParams& theta,
                                  const Matrix& expert_occ, double h, const SoftViOptions& inner) {
  const int ns = fm.n_states();
  auto fn = [&](const Vector& t) { return log_likelihood(m, fm, RewardParams::split(t, ns), expert_occ, inner); };
  return central_difference(fn, theta.concat(), h);
}

TrainResult train(const MfgModel& m, const FeatureMap& fm, const Vector& expert_expectation, const Matrix& expert_occ,
                  const TrainConfig& cfg, const std::function<void(const TrainRecord&)>& on_record) {
  if (cfg.max_iters < 0) throw std::invalid_argument("max_iters must be non-negative");
  if (cfg.log_every < 1) throw std::invalid_argument("log_every must be at least 1");
  if (cfg.grad_tol < 0.0) throw std::invalid_argument("grad_tol must be non-negative");
  if (cfg.reference_policy &&
      (cfg.reference_policy->n_states() != m.n_states() || cfg.reference_policy->n_actions() != m.n_actions())) {
    throw DimensionError("reference policy shape does not match model");
  }

  TrainResult res;
  res.feature_bound = feature_bound(fm);
  res.lipschitz = lipschitz_constant(m.discount(), m.n_actions(), res.feature_bound);
  res.step_size = cfg.step_size.value_or(1.0 / res.lipschitz);
  if (!(res.step_size > 0.0)) throw std::invalid_argument("step_size must be positive");
  if (res.step_size > 1.0 / res.lipschitz) {
    std::ostringstream os;
    os << "step_size " << res.step_size << " exceeds 1/L = " << 1.0 / res.lipschitz
       << " (L = " << res.lipschitz << "); ascent is not guaranteed to be monotone";
    res.warnings.push_back(os.str());
  }
  res.expert_expectation = expert_expectation;

  RewardParams theta = cfg.theta0.value_or(RewardParams::zeros(fm.n_states(), fm.n_anchors()));
  if (theta.lambda.size() != fm.n_states() || theta.alpha.size() != fm.n_anchors()) {
    throw DimensionError("theta0 does not match feature map");
  }

  Vector warm;
  for (int k = 0;; ++k) {
    GradientResult g = gradient(m, fm, theta, expert_expectation, cfg.inner, cfg.warm_start ? warm : Vector());
    if (!g.grad.allFinite()) {
      throw NumericError("non-finite gradient at iteration " + std::to_string(k));
    }
    if (cfg.warm_start) warm = g.solution.v;

    const double gnorm = g.grad.norm();
    const bool last = k == cfg.max_iters || (cfg.grad_tol > 0.0 && gnorm <= cfg.grad_tol);
    if (k % cfg.log_every == 0 || last) {
      TrainRecord rec;
      rec.iter = k;
      rec.grad_norm = gnorm;
      rec.log_likelihood = policy_log_likelihood(g.policy(), expert_occ);
      if (cfg.reference_policy) rec.policy_err = (g.policy().probs - cfg.reference_policy->probs).norm();
      res.trace.push_back(rec);
      if (on_record) on_record(rec);
    }

    if (last) {
      res.stopped_on_grad_tol = k < cfg.max_iters;
      res.iterations_run = k;
      res.final_grad_norm = gnorm;
      res.final_expectation_gap = std::move(g.grad);
      res.policy_final = std::move(g.solution.policy);
      res.theta_final = std::move(theta);
      return res;
    }

    theta.lambda += res.step_size * g.grad.head(fm.n_states());
    theta.alpha += res.step_size * g.grad.tail(fm.n_anchors());
  }
}

DiagnosticReport mfe_check(const MfgModel& m, const Policy& policy, const Vector& mu, const Vector& expectation_gap) {
  DiagnosticReport r;
  r.stationarity_residual = stationarity_residual(m, policy, mu);
  r.expectation_gap_norm = expectation_gap.norm();
  return r;
}

}  // namespace mfgirl
