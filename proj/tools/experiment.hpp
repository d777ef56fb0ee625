#pragma once

#include <mfgirl/demonstrations.hpp>
#include <mfgirl/model.hpp>
#include <mfgirl/rkhs.hpp>
#include <mfgirl/trainer.hpp>

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mfgirl::cli {

/// Feature block as written in the config; turned into a FeatureMap
/// once the mean-field term is known.
struct FeatureSpec {
  KernelSpec kernel;
  bool all_pairs = true;
  std::vector<Vector> anchors;                 // explicit anchors when !all_pairs
  std::optional<std::vector<Vector>> state_encoding;
  std::optional<std::vector<Vector>> action_encoding;

  FeatureMap build(int n_states, int n_actions, const Vector& mean_field) const;
};

/// Everything one experiment file describes. Paths are resolved against the
/// directory holding the config file.
struct ExperimentConfig {
  std::filesystem::path source;
  nlohmann::json raw;

  MfgModel model;
  ValidationReport model_report;
  int renormalized_rows = 0;

  FeatureSpec features;

  std::optional<Policy> expert_policy;
  std::optional<std::filesystem::path> trajectories_path;
  bool estimate_mean_field = true;  // trajectory input: embed with the pooled estimate of mu_E
  ExpertBlock expert_block = ExpertBlock::occupation;

  TrainConfig train;
  std::filesystem::path output_dir = ".";
};

/// Thrown when a config is syntactically fine but semantically unusable.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

/// Parses and checks the experiment file. Throws ParseError for malformed
/// text (with line/column) and ConfigError for semantic problems that make
/// the file unusable. Model-invariant violations are collected into
/// model_report rather than thrown, so `validate` can list all of them.
ExperimentConfig load_experiment(const std::filesystem::path& path, bool renormalize = false);

/// Expert data prepared for training: the expected features and the
/// occupation weights of the log-likelihood.
struct ExpertData {
  MfgModel model;
  FeatureMap features;  // embedding may use the pooled mean-field estimate
  Vector expectation;
  Matrix occupation;
  std::optional<TrajectorySet> demos;
  std::optional<FeatureExpectationEstimate> estimate;
};

ExpertData prepare_expert(const ExperimentConfig& cfg);

// JSON helpers shared by the subcommands.
nlohmann::json to_json(const Vector& v);
nlohmann::json to_json(const Matrix& m);
nlohmann::json to_json(const RewardParams& theta);
Vector vector_from_json(const nlohmann::json& j, const std::string& what);
Matrix matrix_from_json(const nlohmann::json& j, const std::string& what);
RewardParams theta_from_json(const nlohmann::json& j, int n_states, int n_anchors);
RewardParams load_theta(const std::filesystem::path& path, int n_states, int n_anchors);
Policy load_policy(const std::filesystem::path& path, int n_states, int n_actions);
/// Parses JSON text with comments; errors carry line/column.
nlohmann::json parse_json_text(const std::string& text, const std::string& origin);

}  // namespace mfgirl::cli
