#include <mfgirl/demonstrations.hpp>
#include <mfgirl/occupation.hpp>
#include <mfgirl/soft_mdp.hpp>
#include <mfgirl/trainer.hpp>

#include <benchmark/benchmark.h>

#include <random>

using namespace mfgirl;

namespace {

MfgModel random_model(int nx, int na, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> e(1.0);
  Matrix p(nx * na, nx);
  for (Eigen::Index i = 0; i < p.size(); ++i) p.data()[i] = e(rng);
  for (Eigen::Index r = 0; r < p.rows(); ++r) p.row(r) /= p.row(r).sum();
  return MfgModel(nx, na, std::move(p), 0.8, Vector::Constant(nx, 1.0 / nx));
}

void BM_SoftValueIteration(benchmark::State& state) {
  const int nx = static_cast<int>(state.range(0));
  const MfgModel m = random_model(nx, 4, 1);
  const Matrix r = Matrix::Random(nx, 4);
  for (auto _ : state) benchmark::DoNotOptimize(soft_value_iteration(m, r));
}
BENCHMARK(BM_SoftValueIteration)->Arg(2)->Arg(16)->Arg(128);

void BM_OccupationSolve(benchmark::State& state) {
  const int nx = static_cast<int>(state.range(0));
  const MfgModel m = random_model(nx, 4, 2);
  const Policy pi = Policy::uniform(nx, 4);
  for (auto _ : state) benchmark::DoNotOptimize(discounted_state_occupation(m, pi, m.mean_field()));
}
BENCHMARK(BM_OccupationSolve)->Arg(2)->Arg(16)->Arg(128);

void BM_GoldenGradient(benchmark::State& state) {
  const MfgModel m = traffic_routing_model();
  const FeatureMap fm = FeatureMap::all_state_action_pairs({KernelKind::gaussian, 0.5}, 2, 2, m.mean_field());
  const Vector target = expert_expectation_exact(m, traffic_routing_expert(), fm);
  const RewardParams theta = RewardParams::zeros(2, fm.n_anchors());
  for (auto _ : state) benchmark::DoNotOptimize(gradient(m, fm, theta, target));
}
BENCHMARK(BM_GoldenGradient);

void BM_GoldenTrain(benchmark::State& state) {
  const MfgModel m = traffic_routing_model();
  const Policy expert = traffic_routing_expert();
  const FeatureMap fm = FeatureMap::all_state_action_pairs({KernelKind::gaussian, 0.5}, 2, 2, m.mean_field());
  const Vector target = expert_expectation_exact(m, expert, fm);
  const Matrix occ = occupation_measure(m, expert, m.mean_field()).state_action_occ;
  TrainConfig cfg;
  cfg.step_size = 0.001;
  cfg.max_iters = 10000;
  cfg.log_every = 10000;
  cfg.warm_start = state.range(0) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(train(m, fm, target, occ, cfg));
}
BENCHMARK(BM_GoldenTrain)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_SimulateTrajectories(benchmark::State& state) {
  const MfgModel m = traffic_routing_model();
  const Policy expert = traffic_routing_expert();
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulate_trajectories(m, expert, 10000, 200, 7, threads));
  state.SetItemsProcessed(state.iterations() * 10000 * 201);
}
BENCHMARK(BM_SimulateTrajectories)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
