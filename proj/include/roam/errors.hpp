#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace roam {

/// Invalid configuration or arguments (CLI exit code 2).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical failure: dimension mismatch, non-PSD input, singular matrix.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The MLE solver ran out of iterations. Carries the last iterate so callers
/// can inspect how far off it was (CLI exit code 3).
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, Eigen::VectorXd last_iterate, double residual)
      : std::runtime_error(what), last_iterate_(std::move(last_iterate)), residual_(residual) {}

  const Eigen::VectorXd& last_iterate() const noexcept { return last_iterate_; }
  double residual() const noexcept { return residual_; }

 private:
  Eigen::VectorXd last_iterate_;
  double residual_;
};

/// File read/write failure; the message names the path (CLI exit code 4).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kExitConfig = 2;
inline constexpr int kExitConvergence = 3;
inline constexpr int kExitIo = 4;

/// Process exit status for an error that ends a CLI command; 1 for anything
/// outside the library's error types.
inline int exit_code(const std::exception& e) noexcept {
  if (dynamic_cast<const ConvergenceError*>(&e)) return kExitConvergence;
  if (dynamic_cast<const IoError*>(&e)) return kExitIo;
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const NumericError*>(&e)) return kExitConfig;
  return 1;
}

}  // namespace roam
