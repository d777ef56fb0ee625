#include "experiment.hpp"

#include <mfgirl/model_io.hpp>
#include <mfgirl/occupation.hpp>

#include <sstream>

namespace mfgirl::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::vector<Vector> vectors_from_json(const json& j, const std::string& what) {
  if (!j.is_array()) throw ConfigError({what + " must be an array of arrays"});
  std::vector<Vector> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(vector_from_json(j[i], what + "[" + std::to_string(i) + "]"));
  return out;
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback, std::vector<std::string>& problems, const std::string& ctx) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    problems.push_back(ctx + "." + key + " has the wrong type");
    return fallback;
  }
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << "invalid experiment config:";
        for (const auto& p : problems) os << "\n  - " << p;
        return os.str();
      }()),
      problems_(std::move(problems)) {}

json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    // Drop nlohmann's "[json.exception...] parse error at line L, column C:" prefix.
    std::string msg = e.what();
    if (const auto pos = msg.find("syntax error"); pos != std::string::npos) msg = msg.substr(pos);
    throw ParseError(origin + ": " + msg, line, col);
  }
}

json to_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(to_json(Vector(m.row(r).transpose())));
  return rows;
}

json to_json(const RewardParams& theta) { return {{"lambda", to_json(theta.lambda)}, {"alpha", to_json(theta.alpha)}}; }

Vector vector_from_json(const json& j, const std::string& what) {
  if (!j.is_array()) throw ConfigError({what + " must be an array of numbers"});
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError({what + " must contain only numbers"});
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

Matrix matrix_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw ConfigError({what + " must be a non-empty array of rows"});
  const std::vector<Vector> rows = vectors_from_json(j, what);
  Matrix m(static_cast<Eigen::Index>(rows.size()), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != m.cols()) throw ConfigError({what + " has ragged rows"});
    m.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
  }
  return m;
}

RewardParams theta_from_json(const json& j, int n_states, int n_anchors) {
  if (!j.is_object() || !j.contains("lambda") || !j.contains("alpha")) {
    throw ParseError("theta must be an object with 'lambda' and 'alpha' arrays");
  }
  RewardParams t{vector_from_json(j["lambda"], "theta.lambda"), vector_from_json(j["alpha"], "theta.alpha")};
  if (t.lambda.size() != n_states || t.alpha.size() != n_anchors) {
    std::ostringstream os;
    os << "theta has " << t.lambda.size() << "+" << t.alpha.size() << " entries, expected " << n_states << "+"
       << n_anchors;
    throw ConfigError({os.str()});
  }
  if (!t.all_finite()) throw ConfigError({"theta has non-finite entries"});
  return t;
}

RewardParams load_theta(const fs::path& path, int n_states, int n_anchors) {
  const json j = parse_json_text(read_text_file(path), path.string());
  return theta_from_json(j.contains("theta") ? j["theta"] : j, n_states, n_anchors);
}

Policy load_policy(const fs::path& path, int n_states, int n_actions) {
  const json j = parse_json_text(read_text_file(path), path.string());
  Policy pi{matrix_from_json(j.is_object() && j.contains("policy") ? j["policy"] : j, "policy")};
  if (pi.n_states() != n_states || pi.n_actions() != n_actions) throw ConfigError({"policy shape does not match model"});
  try {
    pi.check();
  } catch (const DimensionError& e) {
    throw ConfigError({e.what()});
  }
  return pi;
}

FeatureMap FeatureSpec::build(int n_states, int n_actions, const Vector& mean_field) const {
  std::vector<Vector> states = state_encoding.value_or(FeatureMap::index_encoding(n_states));
  std::vector<Vector> actions = action_encoding.value_or(FeatureMap::index_encoding(n_actions));
  if (static_cast<int>(states.size()) != n_states) throw ConfigError({"features.state_encoding needs one entry per state"});
  if (static_cast<int>(actions.size()) != n_actions) {
    throw ConfigError({"features.action_encoding needs one entry per action"});
  }
  if (all_pairs) return FeatureMap::all_state_action_pairs(kernel, std::move(states), std::move(actions), mean_field);
  return FeatureMap(kernel, anchors, std::move(states), std::move(actions), mean_field);
}

ExperimentConfig load_experiment(const fs::path& path, bool renormalize_model) {
  ExperimentConfig cfg;
  cfg.source = path;
  const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
  cfg.raw = parse_json_text(read_text_file(path), path.string());
  const json& root = cfg.raw;
  if (!root.is_object()) throw ConfigError({"top level must be an object"});

  std::vector<std::string> problems;

  // model
  if (!root.contains("model")) throw ConfigError({"missing 'model' block"});
  const json& mj = root["model"];
  if (mj.is_string()) {
    const fs::path mp = resolve(base, mj.get<std::string>());
    if (!fs::exists(mp)) throw ConfigError({"model file not found: " + mp.string()});
    cfg.model = load_model(mp);
  } else {
    cfg.model = parse_model(mj.dump());
  }
  if (renormalize_model) cfg.renormalized_rows = renormalize(cfg.model);
  cfg.model_report = validate_model(cfg.model);
  const int ns = cfg.model.n_states();
  const int na = cfg.model.n_actions();

  // features
  const json fj = root.value("features", json::object());
  const std::string kind = get_or<std::string>(fj, "kernel", "gaussian", problems, "features");
  if (kind != "gaussian") problems.push_back("features.kernel '" + kind + "' is not supported (gaussian only)");
  cfg.features.kernel.bandwidth = get_or<double>(fj, "bandwidth", 1.0, problems, "features");
  if (!(cfg.features.kernel.bandwidth > 0.0)) problems.push_back("features.bandwidth must be positive");
  if (fj.contains("anchors") && !fj["anchors"].is_string()) {
    cfg.features.all_pairs = false;
    try {
      cfg.features.anchors = vectors_from_json(fj["anchors"], "features.anchors");
    } catch (const ConfigError& e) {
      problems.insert(problems.end(), e.problems().begin(), e.problems().end());
    }
  } else if (fj.contains("anchors") && fj["anchors"].get<std::string>() != "all_state_action_pairs") {
    problems.push_back("features.anchors must be 'all_state_action_pairs' or a list of vectors");
  }
  try {
    if (fj.contains("state_encoding")) cfg.features.state_encoding = vectors_from_json(fj["state_encoding"], "features.state_encoding");
    if (fj.contains("action_encoding")) cfg.features.action_encoding = vectors_from_json(fj["action_encoding"], "features.action_encoding");
  } catch (const ConfigError& e) {
    problems.insert(problems.end(), e.problems().begin(), e.problems().end());
  }
  int n_anchors = 0;
  if (problems.empty()) {
    try {
      n_anchors = cfg.features.build(ns, na, cfg.model.mean_field()).n_anchors();
    } catch (const ConfigError& e) {
      problems.insert(problems.end(), e.problems().begin(), e.problems().end());
    } catch (const std::exception& e) {
      problems.push_back(std::string("features: ") + e.what());
    }
  }

  // expert
  const json ej = root.value("expert", json::object());
  const bool has_policy = ej.contains("policy");
  const bool has_traj = ej.contains("trajectories");
  if (has_policy == has_traj) {
    problems.push_back("expert block must contain exactly one of 'policy' or 'trajectories'");
  } else if (has_policy) {
    try {
      Policy pi{matrix_from_json(ej["policy"], "expert.policy")};
      if (pi.n_states() != ns || pi.n_actions() != na) {
        problems.push_back("expert.policy must be n_states x n_actions");
      } else {
        pi.check();
        cfg.expert_policy = std::move(pi);
      }
    } catch (const ConfigError& e) {
      problems.insert(problems.end(), e.problems().begin(), e.problems().end());
    } catch (const DimensionError& e) {
      problems.push_back(std::string("expert.policy: ") + e.what());
    }
  } else {
    const fs::path tp = resolve(base, ej["trajectories"].get<std::string>());
    if (!fs::exists(tp)) problems.push_back("trajectory file not found: " + tp.string());
    cfg.trajectories_path = tp;
    const std::string mf = get_or<std::string>(ej, "mean_field", "estimate", problems, "expert");
    if (mf != "estimate" && mf != "model") problems.push_back("expert.mean_field must be 'estimate' or 'model'");
    cfg.estimate_mean_field = mf == "estimate";
  }
  const std::string block = get_or<std::string>(ej, "expert_block", "occupation", problems, "expert");
  if (block == "occupation") {
    cfg.expert_block = ExpertBlock::occupation;
  } else if (block == "meanfield") {
    cfg.expert_block = ExpertBlock::meanfield;
  } else {
    problems.push_back("expert.expert_block must be 'occupation' or 'meanfield'");
  }

  // train
  const json tj = root.value("train", json::object());
  TrainConfig& tc = cfg.train;
  if (tj.contains("step_size") && tj["step_size"].is_number()) {
    tc.step_size = tj["step_size"].get<double>();
    if (!(*tc.step_size > 0.0)) problems.push_back("train.step_size must be positive");
  } else if (tj.contains("step_size") && tj["step_size"] != "inverse_lipschitz") {
    problems.push_back("train.step_size must be a number or 'inverse_lipschitz'");
  }
  tc.max_iters = get_or<int>(tj, "max_iters", tc.max_iters, problems, "train");
  if (tc.max_iters < 0) problems.push_back("train.max_iters must be non-negative");
  tc.grad_tol = get_or<double>(tj, "grad_tol", tc.grad_tol, problems, "train");
  if (tc.grad_tol < 0.0) problems.push_back("train.grad_tol must be non-negative");
  tc.log_every = get_or<int>(tj, "log_every", 100, problems, "train");
  if (tc.log_every < 1) problems.push_back("train.log_every must be at least 1");
  tc.inner.tol = get_or<double>(tj, "inner_tol", tc.inner.tol, problems, "train");
  tc.inner.max_iter = get_or<int>(tj, "inner_max_iter", tc.inner.max_iter, problems, "train");
  if (!(tc.inner.tol > 0.0)) problems.push_back("train.inner_tol must be positive");
  tc.warm_start = get_or<bool>(tj, "warm_start", false, problems, "train");
  if (tj.contains("theta0") && tj["theta0"] != "zeros" && n_anchors > 0) {
    try {
      tc.theta0 = theta_from_json(tj["theta0"], ns, n_anchors);
    } catch (const std::exception& e) {
      problems.push_back(std::string("train.theta0: ") + e.what());
    }
  }
  const json ref = tj.value("reference_policy", json("expert"));
  if (ref == "expert") {
    tc.reference_policy = cfg.expert_policy;
  } else if (ref.is_array()) {
    try {
      Policy pi{matrix_from_json(ref, "train.reference_policy")};
      pi.check();
      if (pi.n_states() != ns || pi.n_actions() != na) throw ConfigError({"train.reference_policy has the wrong shape"});
      tc.reference_policy = std::move(pi);
    } catch (const ConfigError& e) {
      problems.insert(problems.end(), e.problems().begin(), e.problems().end());
    } catch (const DimensionError& e) {
      problems.push_back(std::string("train.reference_policy: ") + e.what());
    }
  } else if (ref != "none") {
    problems.push_back("train.reference_policy must be 'expert', 'none' or a matrix");
  }

  // output
  const json oj = root.value("output", json::object());
  cfg.output_dir = resolve(base, get_or<std::string>(oj, "dir", ".", problems, "output"));

  if (!problems.empty()) throw ConfigError(std::move(problems));
  return cfg;
}

ExpertData prepare_expert(const ExperimentConfig& cfg) {
  if (cfg.expert_policy) {
    ExpertData d{cfg.model, cfg.features.build(cfg.model.n_states(), cfg.model.n_actions(), cfg.model.mean_field()),
                 Vector(), Matrix(), std::nullopt, std::nullopt};
    d.expectation = expert_expectation_exact(d.model, *cfg.expert_policy, d.features, cfg.expert_block);
    d.occupation = occupation_measure(d.model, *cfg.expert_policy, d.model.mean_field()).state_action_occ;
    return d;
  }

  TrajectorySet demos = load_trajectories(*cfg.trajectories_path, cfg.model.n_states(), cfg.model.n_actions());
  if (demos.empty()) throw ConfigError({"trajectory file holds no trajectories"});
  // The pooled estimate enters only the kernel embedding; the learner's
  // occupation still starts from the model's mean field, as the demos do.
  const MfgModel& model = cfg.model;
  const Vector mu_hat = empirical_mean_field(demos, model.n_states());
  FeatureMap fm = cfg.features.build(model.n_states(), model.n_actions(),
                                     cfg.estimate_mean_field ? mu_hat : model.mean_field());
  FeatureExpectationEstimate est = estimate_feature_expectation(demos, fm, model.discount());
  Vector expectation = est.mean;
  if (cfg.expert_block == ExpertBlock::meanfield) {
    const Vector& mu = cfg.estimate_mean_field ? mu_hat : model.mean_field();
    expectation.head(model.n_states()) = mu / (1.0 - model.discount());
  }
  Matrix occ = empirical_occupation(demos, model.n_states(), model.n_actions(), model.discount());
  return ExpertData{model, std::move(fm), std::move(expectation), std::move(occ), std::move(demos), std::move(est)};
}

}  // namespace mfgirl::cli
