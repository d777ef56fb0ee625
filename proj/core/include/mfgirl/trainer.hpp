#pragma once

#include "mfgirl/model.hpp"
#include "mfgirl/occupation.hpp"
#include "mfgirl/rkhs.hpp"
#include "mfgirl/soft_mdp.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace mfgirl {

/// How the state block of the expert feature expectation is formed.
///  - occupation: the expert's actual discounted state occupation from mu_E.
///  - meanfield:  mu_E / (1 - beta), exact only when mu_E is invariant
///                under the expert's dynamics.
enum class ExpertBlock { occupation, meanfield };

/// Discounted expert feature expectation <f>_{pi_E, mu_E}, length |X| + m.
Vector expert_expectation_exact(const MfgModel& model, const Policy& expert, const FeatureMap& fm,
                                ExpertBlock block = ExpertBlock::occupation);

struct GradientResult {
  Vector grad;         // <f>_E - E^{pi_theta}[sum_t beta^t f]
  Vector expectation;  // E^{pi_theta}[sum_t beta^t f]
  SoftSolution solution;

  const Policy& policy() const { return solution.policy; }
};

/// Gradient of the expert log-likelihood at theta: soft value iteration,
/// Q recovery, softmax policy, occupation solve and feature expectation.
GradientResult gradient(const MfgModel& model, const FeatureMap& fm, const RewardParams& theta,
                        const Vector& expert_expectation, const SoftViOptions& inner = {},
                        const Vector& v0 = Vector());

/// sum_{(x,a)} log pi(a|x) occ(x, a).
double policy_log_likelihood(const Policy& policy, const Matrix& expert_occ);

/// V(theta) = sum_{(x,a)} log pi_theta(a|x) gamma_E(x, a).
double log_likelihood(const MfgModel& model, const FeatureMap& fm, const RewardParams& theta,
                      const Matrix& expert_occ, const SoftViOptions& inner = {});

/// Smoothness constant of the log-likelihood:
///   L = K^2 sqrt(|A|) / (1-beta)^2 * (2 sqrt(|A|) beta / (1-beta) + 1).
double lipschitz_constant(double beta, int n_actions, double feature_bound);

/// Central differences of an arbitrary scalar function, one coordinate at a time.
Vector central_difference(const std::function<double(const Vector&)>& fn, const Vector& at, double h);

/// Central differences of log_likelihood over theta = [lambda; alpha].
Vector finite_difference_gradient(const MfgModel& model, const FeatureMap& fm, const RewardParams& theta,
                                  const Matrix& expert_occ, double h,
                                  const SoftViOptions& inner = {1e-13, 100000});

struct TrainConfig {
  std::optional<double> step_size;        // unset: 1/L with the exact feature bound
  int max_iters = 10000;                  // K; 0 only evaluates theta0
  double grad_tol = 0.0;                  // stop when ||grad||_2 <= grad_tol; 0 disables
  std::optional<RewardParams> theta0;     // unset: zeros
  int log_every = 1;
  SoftViOptions inner{};
  bool warm_start = false;                // seed each inner solve with the previous V
  std::optional<Policy> reference_policy; // enables the policy_err column
};

struct TrainRecord {
  int iter = 0;
  double grad_norm = 0.0;
  double log_likelihood = 0.0;
  std::optional<double> policy_err;  // ||pi_theta - reference||_F
};

struct TrainResult {
  RewardParams theta_final;
  Policy policy_final;
  int iterations_run = 0;
  std::vector<TrainRecord> trace;
  Vector expert_expectation;
  Vector final_expectation_gap;  // gradient at theta_final
  double final_grad_norm = 0.0;
  double step_size = 0.0;
  double lipschitz = 0.0;
  double feature_bound = 0.0;
  bool stopped_on_grad_tol = false;
  std::vector<std::string> warnings;
};

/// Constant-step gradient ascent theta_{k+1} = theta_k + step * grad(theta_k),
/// k = 0..max_iters-1. Records iterations 0, log_every, 2*log_every, ... and
/// always the final iterate; `on_record` sees each record as it is produced.
/// Throws NumericError on a non-finite gradient.
TrainResult train(const MfgModel& model, const FeatureMap& fm, const Vector& expert_expectation,
                  const Matrix& expert_occ, const TrainConfig& config,
                  const std::function<void(const TrainRecord&)>& on_record = {});

/// Constraint residuals of the IRL problem for a (policy, mu) pair. No
/// thresholds are applied.
struct DiagnosticReport {
  double stationarity_residual = 0.0;  // ||mu - mu^T A_pi||_1
  double expectation_gap_norm = 0.0;   // ||<f>_E - <f>_pi||_2
};

DiagnosticReport mfe_check(const MfgModel& model, const Policy& policy, const Vector& mu,
                           const Vector& expectation_gap);

}  // namespace mfgirl
