#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace bqrrp {

/// Operand shapes do not conform.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed permutation / swap list, or a malformed matrix file.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller broke a usage contract (aliasing buffers, bad counts).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Invalid algorithm configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Exact zero on the diagonal of a triangular factor used as a divisor.
class SingularError : public std::runtime_error {
 public:
  SingularError(const std::string& what, std::int64_t index)
      : std::runtime_error(what + " (zero diagonal at index " +
                           std::to_string(index) + ")"),
        index_(index) {}
  std::int64_t index() const noexcept { return index_; }

 private:
  std::int64_t index_;
};

/// Cholesky met a non-positive pivot; index is zero-based.
class CholeskyBreakdown : public std::runtime_error {
 public:
  explicit CholeskyBreakdown(std::int64_t index)
      : std::runtime_error("Cholesky breakdown at pivot " +
                           std::to_string(index)),
        index_(index) {}
  std::int64_t index() const noexcept { return index_; }

 private:
  std::int64_t index_;
};

/// An iterative routine failed to reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double achieved)
      : std::runtime_error(what + " (achieved " + std::to_string(achieved) +
                           ")"),
        achieved_(achieved) {}
  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

}  // namespace bqrrp
