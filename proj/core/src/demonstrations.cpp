#include "mfgirl/demonstrations.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <thread>

namespace mfgirl {

namespace {

class Substream {
 public:
  Substream(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    engine_.seed(seq);
  }

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Inverse-CDF draw from a probability row.
  template <typename Row>
  int categorical(const Row& probs) {
    const double u = uniform();
    double acc = 0.0;
    const int n = static_cast<int>(probs.size());
    for (int i = 0; i < n; ++i) {
      acc += probs(i);
      if (u < acc) return i;
    }
    // u landed in the rounding gap above the last partial sum.
    for (int i = n - 1; i >= 0; --i) {
      if (probs(i) > 0.0) return i;
    }
    return n - 1;
  }

 private:
  std::mt19937_64 engine_;
};

Trajectory simulate_one(const MfgModel& m, const Policy& pi, int horizon, std::uint64_t seed, std::uint64_t index) {
  Substream rng(seed, index);
  Trajectory traj;
  traj.reserve(static_cast<std::size_t>(horizon) + 1);
  int x = rng.categorical(m.mean_field());
  for (int t = 0; t <= horizon; ++t) {
    const int a = rng.categorical(pi.probs.row(x));
    traj.push_back({x, a});
    if (t < horizon) x = rng.categorical(m.next_state_dist(x, a));
  }
  return traj;
}

}  // namespace

TrajectorySet simulate_trajectories(const MfgModel& m, const Policy& pi, int d, int horizon, std::uint64_t seed,
                                    int threads) {
  if (d < 1) throw std::invalid_argument("simulate_trajectories: d must be at least 1");
  if (horizon < 0) throw std::invalid_argument("simulate_trajectories: T must be non-negative");
  if (pi.n_states() != m.n_states() || pi.n_actions() != m.n_actions()) {
    throw DimensionError("policy shape does not match model");
  }

  TrajectorySet out;
  out.seed = seed;
  out.trajectories.resize(static_cast<std::size_t>(d));
  auto work = [&](int begin, int end) {
    for (int i = begin; i < end; ++i) {
      out.trajectories[static_cast<std::size_t>(i)] = simulate_one(m, pi, horizon, seed, static_cast<std::uint64_t>(i));
    }
  };

  threads = std::max(1, std::min(threads, d));
  if (threads == 1) {
    work(0, d);
  } else {
    std::vector<std::jthread> pool;
    const int chunk = (d + threads - 1) / threads;
    for (int begin = 0; begin < d; begin += chunk) pool.emplace_back(work, begin, std::min(d, begin + chunk));
  }
  return out;
}

Vector empirical_mean_field(const TrajectorySet& data, int n_states) {
  if (data.empty()) throw std::invalid_argument("empirical_mean_field: no trajectories");
  Vector mu = Vector::Zero(n_states);
  for (const auto& traj : data.trajectories) {
    if (traj.empty()) throw std::invalid_argument("empirical_mean_field: empty trajectory");
    Vector counts = Vector::Zero(n_states);
    for (const auto& sa : traj) {
      if (sa.x < 0 || sa.x >= n_states) throw std::out_of_range("trajectory state out of range");
      counts(sa.x) += 1.0;
    }
    mu += counts / static_cast<double>(traj.size());
  }
  return mu / static_cast<double>(data.size());
}

FeatureExpectationEstimate estimate_feature_expectation(const TrajectorySet& data, const FeatureMap& fm,
                                                        double beta) {
  if (data.empty()) throw std::invalid_argument("empirical_feature_expectation: no trajectories");
  if (!(beta >= 0.0 && beta < 1.0)) throw std::invalid_argument("discount must lie in [0, 1)");

  const int dim = fm.dim();
  const int ns = fm.n_states();
  Vector sum = Vector::Zero(dim);
  Vector sum_sq = Vector::Zero(dim);
  std::size_t shortest = std::numeric_limits<std::size_t>::max();

  Vector per = Vector::Zero(dim);
  for (const auto& traj : data.trajectories) {
    if (traj.empty()) throw std::invalid_argument("empirical_feature_expectation: empty trajectory");
    per.setZero();
    double w = 1.0;
    for (const auto& sa : traj) {
      per(sa.x) += w;
      per.tail(dim - ns) += w * fm.features(sa.x, sa.a);
      w *= beta;
    }
    sum += per;
    sum_sq += per.cwiseAbs2();
    shortest = std::min(shortest, traj.size());
  }

  const double n = static_cast<double>(data.size());
  FeatureExpectationEstimate est;
  est.mean = sum / n;
  if (data.size() > 1) {
    const Vector var = ((sum_sq - n * est.mean.cwiseAbs2()) / (n - 1.0)).cwiseMax(0.0);
    est.standard_error = (var / n).cwiseSqrt();
  } else {
    est.standard_error = Vector::Zero(dim);
  }
  // Shortest record has the largest tail; its length is T_i + 1.
  est.truncation_bias_bound =
      beta == 0.0 ? 0.0 : std::pow(beta, static_cast<double>(shortest)) * feature_bound(fm) / (1.0 - beta);
  return est;
}

Vector empirical_feature_expectation(const TrajectorySet& data, const FeatureMap& fm, double beta) {
  return estimate_feature_expectation(data, fm, beta).mean;
}

Matrix empirical_occupation(const TrajectorySet& data, int n_states, int n_actions, double beta) {
  if (data.empty()) throw std::invalid_argument("empirical_occupation: no trajectories");
  Matrix occ = Matrix::Zero(n_states, n_actions);
  for (const auto& traj : data.trajectories) {
    double w = 1.0;
    for (const auto& sa : traj) {
      if (sa.x < 0 || sa.x >= n_states || sa.a < 0 || sa.a >= n_actions) {
        throw std::out_of_range("trajectory index out of range");
      }
      occ(sa.x, sa.a) += w;
      w *= beta;
    }
  }
  return occ / static_cast<double>(data.size());
}

void write_trajectories(std::ostream& out, const TrajectorySet& data) {
  out << "# rng " << kRngScheme;
  if (data.seed) out << " seed " << *data.seed;
  out << "\n";
  for (std::size_t i = 0; i < data.trajectories.size(); ++i) {
    const auto& traj = data.trajectories[i];
    out << "traj " << i << ' ' << (traj.empty() ? 0 : traj.size() - 1) << '\n';
    for (std::size_t t = 0; t < traj.size(); ++t) out << t << ' ' << traj[t].x << ' ' << traj[t].a << '\n';
  }
}

void save_trajectories(const std::filesystem::path& path, const TrajectorySet& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_trajectories(out, data);
}

TrajectorySet read_trajectories(std::istream& in, int n_states, int n_actions) {
  TrajectorySet data;
  std::string line;
  int lineno = 0;
  long expected_rows = 0;  // rows still owed by the current block
  long next_t = 0;

  auto fail = [&](const std::string& msg) -> ParseError { return ParseError("trajectory file: " + msg, lineno, 1); };

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    if (line[first] == '#') {
      std::istringstream meta(line.substr(first + 1));
      std::string key;
      while (meta >> key) {
        if (key == "seed") {
          std::uint64_t s = 0;
          if (meta >> s) data.seed = s;
        }
      }
      continue;
    }

    std::istringstream ls(line);
    if (line.compare(first, 4, "traj") == 0) {
      if (expected_rows != 0) throw fail("previous trajectory is missing " + std::to_string(expected_rows) + " rows");
      std::string tag;
      long idx = -1;
      long horizon = -1;
      std::string extra;
      if (!(ls >> tag >> idx >> horizon) || tag != "traj" || (ls >> extra)) throw fail("malformed header '" + line + "'");
      if (idx != static_cast<long>(data.trajectories.size())) {
        throw fail("trajectory index " + std::to_string(idx) + " out of sequence");
      }
      if (horizon < 0) throw fail("negative horizon");
      data.trajectories.emplace_back();
      data.trajectories.back().reserve(static_cast<std::size_t>(horizon) + 1);
      expected_rows = horizon + 1;
      next_t = 0;
      continue;
    }

    if (data.trajectories.empty()) throw fail("row before first 'traj' header");
    long t = 0;
    long x = 0;
    long a = 0;
    std::string extra;
    if (!(ls >> t >> x >> a) || (ls >> extra)) throw fail("malformed row '" + line + "'");
    if (expected_rows == 0) throw fail("more rows than the header declares");
    if (t != next_t) throw fail("expected t=" + std::to_string(next_t) + ", got t=" + std::to_string(t));
    if (x < 0 || x >= n_states) throw fail("state " + std::to_string(x) + " out of range");
    if (a < 0 || a >= n_actions) throw fail("action " + std::to_string(a) + " out of range");
    data.trajectories.back().push_back({static_cast<int>(x), static_cast<int>(a)});
    ++next_t;
    --expected_rows;
  }
  if (expected_rows != 0) throw fail("last trajectory is missing " + std::to_string(expected_rows) + " rows");
  return data;
}

TrajectorySet load_trajectories(const std::filesystem::path& path, int n_states, int n_actions) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  return read_trajectories(in, n_states, n_actions);
}

}  // namespace mfgirl
