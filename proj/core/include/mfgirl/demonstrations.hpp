#pragma once

#include "mfgirl/model.hpp"
#include "mfgirl/rkhs.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

namespace mfgirl {

struct StateAction {
  int x = 0;
  int a = 0;

  friend bool operator==(const StateAction&, const StateAction&) = default;
};

/// One expert record (x(t), a(t)) for t = 0..T_i, so horizon() == size() - 1.
using Trajectory = std::vector<StateAction>;

struct TrajectorySet {
  std::vector<Trajectory> trajectories;
  std::optional<std::uint64_t> seed;

  std::size_t size() const { return trajectories.size(); }
  bool empty() const { return trajectories.empty(); }
  friend bool operator==(const TrajectorySet&, const TrajectorySet&) = default;
};

/// Identifier of the sampling scheme below; written into trajectory files.
inline constexpr std::string_view kRngScheme = "mt19937_64/seed_seq-v1";

/// Trajectory i draws from its own std::mt19937_64 seeded with
/// std::seed_seq{seed_lo, seed_hi, i_lo, i_hi}; uniforms use the top 53 bits
/// of each draw. Output is therefore independent of d's chunking and of
/// `threads`. x(0) ~ mu_E, a(t) ~ pi(.|x(t)), x(t+1) ~ p(.|x(t), a(t)).
TrajectorySet simulate_trajectories(const MfgModel& model, const Policy& policy, int d, int horizon,
                                    std::uint64_t seed, int threads = 1);

/// (1/d) sum_i (1/(T_i + 1)) sum_t 1{x_i(t) = x}.
Vector empirical_mean_field(const TrajectorySet& data, int n_states);

struct FeatureExpectationEstimate {
  Vector mean;            // (1/d) sum_i sum_t beta^t f(x_i(t), a_i(t))
  Vector standard_error;  // per-component sample std / sqrt(d); zero when d == 1
  double truncation_bias_bound = 0.0;  // max_i beta^(T_i + 1) K / (1 - beta)
};

FeatureExpectationEstimate estimate_feature_expectation(const TrajectorySet& data, const FeatureMap& fm,
                                                        double beta);

Vector empirical_feature_expectation(const TrajectorySet& data, const FeatureMap& fm, double beta);

/// (1/d) sum_i sum_t beta^t 1{(x_i(t), a_i(t)) = (x, a)}: the empirical
/// counterpart of the un-normalized state-action occupation.
Matrix empirical_occupation(const TrajectorySet& data, int n_states, int n_actions, double beta);

/// Line-oriented trajectory file:
///   # optional comment lines
///   traj <i> <T_i>
///   <t> <x> <a>        (T_i + 1 rows, t = 0..T_i)
void write_trajectories(std::ostream& out, const TrajectorySet& data);
void save_trajectories(const std::filesystem::path& path, const TrajectorySet& data);

/// Throws ParseError (with line number) on malformed headers, non-monotone
/// t, row-count mismatch, or indices outside [0, n_states) / [0, n_actions).
TrajectorySet read_trajectories(std::istream& in, int n_states, int n_actions);
TrajectorySet load_trajectories(const std::filesystem::path& path, int n_states, int n_actions);

}  // namespace mfgirl
