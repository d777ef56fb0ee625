#pragma once

#include <mfgirl/trainer.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace mfgirl::cli {

enum ExitCode : int { kSuccess = 0, kValidationFailure = 1, kRuntimeFailure = 2 };

/// Command-line options shared by the subcommands. Unset values fall back to
/// the experiment file.
struct Options {
  std::filesystem::path config;
  std::optional<std::filesystem::path> theta;
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
  bool renormalize = false;
  std::optional<ExpertBlock> expert_block;
  std::optional<int> log_every;
  std::optional<int> max_iters;
  std::optional<double> step_size;
  std::optional<int> num_trajectories;
  std::optional<int> horizon;
  std::optional<int> threads;
  std::optional<std::string> reference;  // "expert" or a policy file
};

int cmd_validate(const Options& opts, std::ostream& out, std::ostream& err);
int cmd_solve(const Options& opts, std::ostream& out, std::ostream& err);
int cmd_occupation(const Options& opts, std::ostream& out, std::ostream& err);
int cmd_train(const Options& opts, std::ostream& out, std::ostream& err);
int cmd_gen_demos(const Options& opts, std::ostream& out, std::ostream& err);
int cmd_eval(const Options& opts, std::ostream& out, std::ostream& err);

/// Dispatches by subcommand name and maps exceptions to exit codes:
/// parse/config/dimension problems -> 1, numeric and I/O failures -> 2.
int run_command(const std::string& name, const Options& opts, std::ostream& out, std::ostream& err);

}  // namespace mfgirl::cli
