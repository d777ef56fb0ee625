#include "commands.hpp"

#include "experiment.hpp"

#include <mfgirl/demonstrations.hpp>
#include <mfgirl/occupation.hpp>
#include <mfgirl/soft_mdp.hpp>

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace mfgirl::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kToolVersion = "0.1.0";

/// Raised when the model block violates its invariants.
class InvalidModel : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ExperimentConfig load(const Options& opts) {
  ExperimentConfig cfg = load_experiment(opts.config, opts.renormalize);
  if (!cfg.model_report.ok()) {
    std::ostringstream os;
    os << "model is invalid (" << cfg.model_report.violations.size() << " violation(s))";
    for (const auto& v : cfg.model_report.violations) os << "\n  - " << v.message;
    throw InvalidModel(os.str());
  }
  if (opts.expert_block) cfg.expert_block = *opts.expert_block;
  if (opts.log_every) {
    if (*opts.log_every < 1) throw ConfigError({"--log-every must be at least 1"});
    cfg.train.log_every = *opts.log_every;
  }
  if (opts.max_iters) {
    if (*opts.max_iters < 0) throw ConfigError({"--max-iters must be non-negative"});
    cfg.train.max_iters = *opts.max_iters;
  }
  if (opts.step_size) {
    if (!(*opts.step_size > 0.0)) throw ConfigError({"--step-size must be positive"});
    cfg.train.step_size = *opts.step_size;
  }
  return cfg;
}

fs::path output_dir(const Options& opts, const ExperimentConfig& cfg) {
  fs::path dir = opts.out.value_or(cfg.output_dir);
  fs::create_directories(dir);
  return dir;
}

void write_json(const fs::path& path, const json& doc) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << doc.dump(2) << '\n';
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

RewardParams theta_or_zeros(const Options& opts, const FeatureMap& fm) {
  if (!opts.theta) return RewardParams::zeros(fm.n_states(), fm.n_anchors());
  return load_theta(*opts.theta, fm.n_states(), fm.n_anchors());
}

std::optional<Policy> reference_policy(const Options& opts, const ExperimentConfig& cfg) {
  if (!opts.reference) return std::nullopt;
  if (*opts.reference == "expert") {
    if (!cfg.expert_policy) throw ConfigError({"--reference expert needs an explicit expert policy"});
    return cfg.expert_policy;
  }
  return load_policy(*opts.reference, cfg.model.n_states(), cfg.model.n_actions());
}

std::string timestamp_utc() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::string label(const std::vector<std::string>& labels, int i) {
  return i < static_cast<int>(labels.size()) ? labels[static_cast<std::size_t>(i)] : std::to_string(i);
}

/// Side-by-side policy table with per-entry absolute differences.
json compare_policies(const MfgModel& model, const Policy& reference, const Policy& learned, std::ostream& out) {
  const Matrix diff = (learned.probs - reference.probs).cwiseAbs();
  out << "state          action         reference   learned     |diff|\n";
  for (int x = 0; x < model.n_states(); ++x) {
    for (int a = 0; a < model.n_actions(); ++a) {
      out << std::left << std::setw(15) << label(model.state_labels, x) << std::setw(15)
          << label(model.action_labels, a) << std::right << std::fixed << std::setprecision(6) << std::setw(9)
          << reference.probs(x, a) << "   " << std::setw(9) << learned.probs(x, a) << "   " << std::setw(9)
          << diff(x, a) << '\n';
    }
  }
  out << std::defaultfloat << std::setprecision(6);
  return {{"reference", to_json(reference.probs)},
          {"learned", to_json(learned.probs)},
          {"abs_difference", to_json(diff)},
          {"max_abs_difference", diff.maxCoeff()},
          {"frobenius_error", (learned.probs - reference.probs).norm()}};
}

json diagnostics_json(const DiagnosticReport& d) {
  return {{"stationarity_residual", d.stationarity_residual}, {"expectation_gap_norm", d.expectation_gap_norm}};
}

}  // namespace

int cmd_validate(const Options& opts, std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg = load_experiment(opts.config, opts.renormalize);
  if (opts.renormalize && cfg.renormalized_rows > 0) {
    out << "renormalized " << cfg.renormalized_rows << " transition row(s)\n";
  }
  if (!cfg.model_report.ok()) {
    err << "model: " << cfg.model_report.violations.size() << " violation(s)\n";
    for (const auto& v : cfg.model_report.violations) err << "  - " << v.message << '\n';
    return kValidationFailure;
  }
  const ExpertData expert = prepare_expert(cfg);
  out << "model: " << cfg.model.n_states() << " states, " << cfg.model.n_actions() << " actions, discount "
      << cfg.model.discount() << '\n';
  out << "features: " << expert.features.n_anchors() << " anchors, K = " << feature_bound(expert.features) << '\n';
  out << "expert: " << (cfg.expert_policy ? "policy" : "trajectories (" + std::to_string(expert.demos->size()) + ")")
      << '\n';
  out << "config ok\n";
  return kSuccess;
}

int cmd_solve(const Options& opts, std::ostream& out, std::ostream& err) {
  const ExperimentConfig cfg = load(opts);
  const ExpertData expert = prepare_expert(cfg);
  const RewardParams theta = theta_or_zeros(opts, expert.features);
  const Matrix reward = reward_matrix(expert.features, theta);
  const SoftSolution s = solve_soft(expert.model, reward, cfg.train.inner);

  const json doc = {{"theta", to_json(theta)},
                    {"reward", to_json(reward)},
                    {"v", to_json(s.v)},
                    {"q", to_json(s.q)},
                    {"policy", to_json(s.policy.probs)},
                    {"iterations", s.iterations},
                    {"residual", s.residual},
                    {"converged", s.converged}};
  const fs::path path = output_dir(opts, cfg) / "solve.json";
  write_json(path, doc);
  out << "wrote " << path.string() << '\n';
  if (!s.converged) {
    err << "soft value iteration did not converge (residual " << s.residual << ")\n";
    return kRuntimeFailure;
  }
  return kSuccess;
}

int cmd_occupation(const Options& opts, std::ostream& out, std::ostream&) {
  const ExperimentConfig cfg = load(opts);
  const ExpertData expert = prepare_expert(cfg);
  const MfgModel& model = expert.model;

  json doc;
  Matrix occ;
  Vector state_occ;
  if (opts.theta || cfg.expert_policy) {
    Policy policy;
    if (opts.theta) {
      const RewardParams theta = load_theta(*opts.theta, expert.features.n_states(), expert.features.n_anchors());
      policy = solve_soft(model, reward_matrix(expert.features, theta), cfg.train.inner).policy;
      doc["policy_source"] = "theta";
    } else {
      policy = *cfg.expert_policy;
      doc["policy_source"] = "expert";
    }
    const OccupationMeasure m = occupation_measure(model, policy, model.mean_field());
    occ = m.state_action_occ;
    state_occ = m.state_occ;
    doc["policy"] = to_json(policy.probs);
    doc["bellman_flow_residual"] = bellman_flow_residual(model, policy, model.mean_field(), state_occ);
  } else {
    occ = expert.occupation;
    state_occ = occ.rowwise().sum();
    doc["policy_source"] = "empirical";
  }
  doc["initial_distribution"] = to_json(model.mean_field());
  doc["state_occupation"] = to_json(state_occ);
  doc["state_action_occupation"] = to_json(occ);
  doc["total_mass"] = state_occ.sum();
  doc["expected_total_mass"] = 1.0 / (1.0 - model.discount());
  doc["feature_expectation"] = to_json(discounted_feature_expectation(occ, expert.features));

  const fs::path path = output_dir(opts, cfg) / "occupation.json";
  write_json(path, doc);
  out << "wrote " << path.string() << '\n';
  return kSuccess;
}

int cmd_train(const Options& opts, std::ostream& out, std::ostream& err) {
  const ExperimentConfig cfg = load(opts);
  const ExpertData expert = prepare_expert(cfg);
  const fs::path dir = output_dir(opts, cfg);

  const fs::path trace_path = dir / "trace.csv";
  std::ofstream trace(trace_path);
  if (!trace) throw std::runtime_error("cannot write " + trace_path.string());
  trace << "iter,grad_norm,log_likelihood,policy_err\n" << std::setprecision(17);
  trace.flush();

  const std::string started = timestamp_utc();
  const auto t0 = std::chrono::steady_clock::now();
  TrainResult res;
  try {
    res = train(expert.model, expert.features, expert.expectation, expert.occupation, cfg.train,
                [&](const TrainRecord& r) {
                  trace << r.iter << ',' << r.grad_norm << ',' << r.log_likelihood << ',';
                  if (r.policy_err) trace << *r.policy_err;
                  trace << '\n';
                  trace.flush();
                });
  } catch (...) {
    trace.flush();
    throw;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  for (const auto& w : res.warnings) err << "warning: " << w << '\n';

  const DiagnosticReport diag = mfe_check(expert.model, res.policy_final, expert.model.mean_field(),
                                          res.final_expectation_gap);
  json doc = {
      {"metadata",
       {{"tool_version", kToolVersion}, {"started_at", started}, {"wall_time_seconds", wall},
        {"config_path", cfg.source.string()}}},
      {"config", cfg.raw},
      {"expert_block", cfg.expert_block == ExpertBlock::occupation ? "occupation" : "meanfield"},
      {"step_size", res.step_size},
      {"lipschitz", res.lipschitz},
      {"feature_bound", res.feature_bound},
      {"warnings", res.warnings},
      {"iterations_run", res.iterations_run},
      {"stopped_on_grad_tol", res.stopped_on_grad_tol},
      {"theta_final", to_json(res.theta_final)},
      {"policy_final", to_json(res.policy_final.probs)},
      {"final_grad_norm", res.final_grad_norm},
      {"final_log_likelihood", res.trace.back().log_likelihood},
      {"expert_expectation", to_json(res.expert_expectation)},
      {"final_expectation_gap", to_json(res.final_expectation_gap)},
      {"diagnostics", diagnostics_json(diag)},
  };
  if (res.trace.back().policy_err) doc["policy_frobenius_error"] = *res.trace.back().policy_err;
  if (cfg.train.reference_policy) {
    out << "policy comparison:\n";
    doc["comparison"] = compare_policies(expert.model, *cfg.train.reference_policy, res.policy_final, out);
  }

  write_json(dir / "result.json", doc);
  write_json(dir / "theta.json", to_json(res.theta_final));
  out << "iterations " << res.iterations_run << ", final grad norm " << res.final_grad_norm;
  if (res.trace.back().policy_err) out << ", policy error " << *res.trace.back().policy_err;
  out << "\nwrote " << (dir / "result.json").string() << ", " << (dir / "theta.json").string() << ", "
      << trace_path.string() << '\n';
  return kSuccess;
}

int cmd_gen_demos(const Options& opts, std::ostream& out, std::ostream&) {
  const ExperimentConfig cfg = load(opts);
  if (!cfg.expert_policy) throw ConfigError({"gen-demos needs an explicit expert policy in the config"});
  const json block = cfg.raw.value("demos", json::object());
  const int d = opts.num_trajectories.value_or(block.value("num_trajectories", 1000));
  const int horizon = opts.horizon.value_or(block.value("horizon", 100));
  const std::uint64_t seed = opts.seed.value_or(block.value("seed", std::uint64_t{0}));
  const int threads = opts.threads.value_or(1);
  if (d < 1) throw ConfigError({"number of trajectories must be at least 1"});
  if (horizon < 0) throw ConfigError({"horizon must be non-negative"});
  if (threads < 1) throw ConfigError({"threads must be at least 1"});

  const TrajectorySet demos = simulate_trajectories(cfg.model, *cfg.expert_policy, d, horizon, seed, threads);
  const fs::path path = output_dir(opts, cfg) / block.value("file", std::string("demos.txt"));
  save_trajectories(path, demos);
  out << "wrote " << d << " trajectories of horizon " << horizon << " to " << path.string() << '\n';
  return kSuccess;
}

int cmd_eval(const Options& opts, std::ostream& out, std::ostream&) {
  const ExperimentConfig cfg = load(opts);
  const ExpertData expert = prepare_expert(cfg);
  const RewardParams theta = theta_or_zeros(opts, expert.features);
  const GradientResult g = gradient(expert.model, expert.features, theta, expert.expectation, cfg.train.inner);
  const DiagnosticReport diag = mfe_check(expert.model, g.policy(), expert.model.mean_field(), g.grad);

  json doc = {{"theta", to_json(theta)},
              {"policy", to_json(g.policy().probs)},
              {"log_likelihood", policy_log_likelihood(g.policy(), expert.occupation)},
              {"grad_norm", g.grad.norm()},
              {"diagnostics", diagnostics_json(diag)}};
  out << "stationarity residual " << diag.stationarity_residual << ", expectation gap " << diag.expectation_gap_norm
      << '\n';
  if (const auto ref = reference_policy(opts, cfg)) {
    doc["comparison"] = compare_policies(expert.model, *ref, g.policy(), out);
  }
  const fs::path path = output_dir(opts, cfg) / "eval.json";
  write_json(path, doc);
  out << "wrote " << path.string() << '\n';
  return kSuccess;
}

int run_command(const std::string& name, const Options& opts, std::ostream& out, std::ostream& err) {
  try {
    if (!fs::is_regular_file(opts.config)) {
      err << "error: config file not found: " << opts.config.string() << '\n';
      return kValidationFailure;
    }
    if (name == "validate") return cmd_validate(opts, out, err);
    if (name == "solve") return cmd_solve(opts, out, err);
    if (name == "occupation") return cmd_occupation(opts, out, err);
    if (name == "train") return cmd_train(opts, out, err);
    if (name == "gen-demos") return cmd_gen_demos(opts, out, err);
    if (name == "eval") return cmd_eval(opts, out, err);
    err << "unknown subcommand: " << name << '\n';
    return kValidationFailure;
  } catch (const InvalidModel& e) {
    err << "error: " << e.what() << '\n';
    return kValidationFailure;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kValidationFailure;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kValidationFailure;
  } catch (const DimensionError& e) {
    err << "error: " << e.what() << '\n';
    return kValidationFailure;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kValidationFailure;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kRuntimeFailure;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << '\n';
    return kRuntimeFailure;
  }
}

}  // namespace mfgirl::cli
