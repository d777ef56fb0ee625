#include "mfgirl/model.hpp"

#include <cmath>
#include <sstream>

namespace mfgirl {

Policy Policy::uniform(int n_states, int n_actions) {
  return Policy{Matrix::Constant(n_states, n_actions, 1.0 / n_actions)};
}

void Policy::check() const {
  for (Eigen::Index x = 0; x < probs.rows(); ++x) {
    const double s = probs.row(x).sum();
    if (std::abs(s - 1.0) > kStochasticTol || (probs.row(x).array() < 0.0).any() ||
        !probs.row(x).allFinite()) {
      std::ostringstream os;
      os << "policy row x=" << x << " is not a distribution (sum " << s << ")";
      throw DimensionError(os.str());
    }
  }
}

MfgModel::MfgModel(int n_states, int n_actions, Matrix transition, double discount,
                   Vector mean_field)
    : n_states_(n_states),
      n_actions_(n_actions),
      transition_(std::move(transition)),
      discount_(discount),
      mean_field_(std::move(mean_field)) {
  if (n_states <= 0 || n_actions <= 0) throw DimensionError("n_states and n_actions must be positive");
  if (transition_.rows() != static_cast<Eigen::Index>(n_states) * n_actions ||
      transition_.cols() != n_states) {
    throw DimensionError("transition must be (n_states*n_actions) x n_states");
  }
  if (mean_field_.size() != n_states) throw DimensionError("mean_field must have n_states entries");
}

ValidationReport validate_model(const MfgModel& m) {
  ValidationReport report;
  auto add = [&](std::string msg, double mag) { report.violations.push_back({std::move(msg), mag}); };

  if (!(m.discount() > 0.0 && m.discount() < 1.0)) {
    std::ostringstream os;
    os << "discount not in (0,1): " << m.discount();
    add(os.str(), m.discount());
  }

  for (int x = 0; x < m.n_states(); ++x) {
    for (int a = 0; a < m.n_actions(); ++a) {
      const auto row = m.next_state_dist(x, a);
      for (int y = 0; y < m.n_states(); ++y) {
        const double v = row(y);
        if (!std::isfinite(v) || v < 0.0) {
          std::ostringstream os;
          os << "transition p(y=" << y << "|x=" << x << ",a=" << a << ") = " << v << " is negative or non-finite";
          add(os.str(), std::isfinite(v) ? -v : INFINITY);
        }
      }
      const double s = row.sum();
      if (!(std::abs(s - 1.0) <= kStochasticTol)) {
        std::ostringstream os;
        os << "row (x=" << x << ",a=" << a << ") sums to " << s;
        add(os.str(), std::abs(s - 1.0));
      }
    }
  }

  const Vector& mu = m.mean_field();
  for (int x = 0; x < m.n_states(); ++x) {
    if (!std::isfinite(mu(x)) || mu(x) < 0.0) {
      std::ostringstream os;
      os << "mean_field[" << x << "] = " << mu(x) << " is negative or non-finite";
      add(os.str(), std::isfinite(mu(x)) ? -mu(x) : INFINITY);
    }
  }
  const double mass = mu.sum();
  if (!(std::abs(mass - 1.0) <= kStochasticTol)) {
    std::ostringstream os;
    os << "mean_field sums to " << mass;
    add(os.str(), std::abs(mass - 1.0));
  }
  return report;
}

int renormalize(MfgModel& m, double max_defect) {
  Matrix p = m.transition();
  int touched = 0;
  for (Eigen::Index r = 0; r < p.rows(); ++r) {
    const double s = p.row(r).sum();
    if (s != 1.0 && std::abs(s - 1.0) <= max_defect && (p.row(r).array() >= 0.0).all()) {
      p.row(r) /= s;
      ++touched;
    }
  }
  Vector mu = m.mean_field();
  const double mass = mu.sum();
  if (mass != 1.0 && std::abs(mass - 1.0) <= max_defect && (mu.array() >= 0.0).all()) {
    mu /= mass;
    ++touched;
  }
  MfgModel out(m.n_states(), m.n_actions(), std::move(p), m.discount(), std::move(mu));
  out.state_labels = std::move(m.state_labels);
  out.action_labels = std::move(m.action_labels);
  m = std::move(out);
  return touched;
}

Matrix policy_transition_matrix(const MfgModel& m, const Policy& policy) {
  if (policy.n_states() != m.n_states() || policy.n_actions() != m.n_actions()) {
    throw DimensionError("policy shape does not match model");
  }
  Matrix chain = Matrix::Zero(m.n_states(), m.n_states());
  for (int x = 0; x < m.n_states(); ++x) {
    for (int a = 0; a < m.n_actions(); ++a) {
      chain.row(x) += policy.probs(x, a) * m.next_state_dist(x, a);
    }
  }
  return chain;
}

double stationarity_residual(const MfgModel& m, const Policy& policy, const Vector& mu) {
  if (mu.size() != m.n_states()) throw DimensionError("mu must have n_states entries");
  const Matrix chain = policy_transition_matrix(m, policy);
  const Vector pushed = chain.transpose() * mu;
  return (mu - pushed).lpNorm<1>();
}

Vector stationary_distribution(const Matrix& chain) {
  const Eigen::Index n = chain.rows();
  if (chain.cols() != n) throw DimensionError("chain must be square");
  // (A^T - I) mu = 0 with the last balance equation replaced by sum(mu) = 1.
  Matrix lhs = chain.transpose() - Matrix::Identity(n, n);
  lhs.row(n - 1).setOnes();
  Vector rhs = Vector::Zero(n);
  rhs(n - 1) = 1.0;
  Eigen::FullPivLU<Matrix> lu(lhs);
  if (!lu.isInvertible()) throw NumericError("chain has no unique stationary distribution");
  return lu.solve(rhs);
}

MfgModel traffic_routing_model() {
  Matrix p(4, 2);
  // rows: (x=0,a=0), (x=0,a=1), (x=1,a=0), (x=1,a=1)
  p << 0.9, 0.1,
       0.7, 0.3,
       0.2, 0.8,
       0.6, 0.4;
  Vector mu(2);
  mu << 0.6, 0.4;
  MfgModel m(2, 2, std::move(p), 0.8, std::move(mu));
  m.state_labels = {"light", "heavy"};
  m.action_labels = {"main", "alternative"};
  return m;
}

Policy traffic_routing_expert() {
  Matrix probs(2, 2);
  probs << 0.8, 0.2,
           0.3, 0.7;
  return Policy{std::move(probs)};
}

}  // namespace mfgirl
