#include "commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  using namespace mfgirl::cli;

  CLI::App app{"Maximum causal entropy inverse RL for stationary mean-field games"};
  app.require_subcommand(1);
  Options opts;

  std::string theta, out, reference, block;

  struct Spec {
    const char* name;
    const char* help;
  };
  const Spec specs[] = {
      {"validate", "Load and check every block of an experiment file"},
      {"solve", "Soft value iteration for a reward parameter (zeros by default)"},
      {"occupation", "Discounted occupation measure of the expert or of pi_theta"},
      {"train", "Gradient ascent on the expert log-likelihood"},
      {"gen-demos", "Simulate expert trajectories"},
      {"eval", "Equilibrium diagnostics and policy comparison for a reward parameter"},
  };
  for (const auto& s : specs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    sub->add_option("--config", opts.config, "Experiment file (JSON)")->required();
    sub->add_option("--out", out, "Output directory (overrides the config)");
    sub->add_flag("--renormalize", opts.renormalize, "Renormalize transition rows off by at most 1e-9");
    sub->add_option("--expert-block", block, "State block of the expert expectation")
        ->check(CLI::IsMember({"occupation", "meanfield"}));
    const std::string name = s.name;
    if (name == "solve" || name == "occupation" || name == "eval") {
      sub->add_option("--theta", theta, "Reward parameter file (JSON with lambda, alpha)");
    }
    if (name == "train") {
      sub->add_option("--log-every", opts.log_every, "Trace cadence");
      sub->add_option("--max-iters", opts.max_iters, "Number of ascent steps");
      sub->add_option("--step-size", opts.step_size, "Constant step size");
    }
    if (name == "gen-demos") {
      sub->add_option("--seed", opts.seed, "Sampler seed");
      sub->add_option("-d,--num-trajectories", opts.num_trajectories, "Number of trajectories");
      sub->add_option("-T,--horizon", opts.horizon, "Last time index of each trajectory");
      sub->add_option("--threads", opts.threads, "Worker threads");
    }
    if (name == "eval") {
      sub->add_option("--reference", reference, "Reference policy file, or 'expert'");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kSuccess : kValidationFailure;
  }

  if (!theta.empty()) opts.theta = theta;
  if (!out.empty()) opts.out = out;
  if (!reference.empty()) opts.reference = reference;
  if (!block.empty()) {
    opts.expert_block = block == "meanfield" ? mfgirl::ExpertBlock::meanfield : mfgirl::ExpertBlock::occupation;
  }
  return run_command(app.get_subcommands().front()->get_name(), opts, std::cout, std::cerr);
}
