#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace mfgirl {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Stochasticity tolerance used by every row-sum / mass check in the library.
inline constexpr double kStochasticTol = 1e-12;

/// Raised when operands disagree on |X|, |A| or the feature dimension.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a numeric routine produces or receives non-finite or
/// inconsistent values (singular solves, NaN rewards, (q, v) mismatch).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Text-format error carrying a 1-based line/column position.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line = 0, int column = 0)
      : std::runtime_error(format(what, line, column)), line_(line), column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& what, int line, int column) {
    if (line <= 0) return what;
    return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what;
  }

  int line_;
  int column_;
};

/// Numerically stable log(sum(exp(v))).
inline double log_sum_exp(const Eigen::Ref<const Vector>& v) {
  const double m = v.maxCoeff();
  return m + std::log((v.array() - m).exp().sum());
}

}  // namespace mfgirl
