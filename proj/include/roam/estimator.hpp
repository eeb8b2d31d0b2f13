#pragma once

#include <optional>
#include <vector>

#include "roam/choice.hpp"
#include "roam/linalg.hpp"

namespace roam {

/// One comparison: probe z = x - y and outcome o (1 when x won).
struct ComparisonRecord {
  Vec z;
  int o;
};

using Dataset = std::vector<ComparisonRecord>;

struct MleConfig {
  double reg_lambda = 0.0;
  double tol = 1e-8;
  int max_iter = 100;
  /// Starting point for Newton; zero when absent.
  std::optional<Vec> init;

  void validate() const;
};

struct MleResult {
  Vec theta;
  /// ||score(theta)||
  double residual = 0.0;
  int iterations = 0;
  /// Set when a singular Hessian forced a 1e-8 ridge on some Newton step.
  bool regularized_fallback = false;
};

/// sum_i (F(<z_i, theta>) - o_i) z_i + reg_lambda * theta. This is the
/// gradient of the negative log-likelihood plus (reg_lambda / 2) ||theta||^2.
Vec score(const Vec& theta, const Dataset& data, const LinkFunction& link, double reg_lambda);

/// -sum_i [o_i log F(u_i) + (1 - o_i) log(1 - F(u_i))] + (reg_lambda / 2) ||theta||^2
double negative_log_likelihood(const Vec& theta, const Dataset& data, const LinkFunction& link,
                               double reg_lambda);

/// Solves score(theta) = 0 by damped Newton. The step is halved (at most 30
/// times) while the score norm fails to decrease. Throws ConvergenceError when
/// max_iter steps do not bring the residual under cfg.tol, and ConfigError
/// when the data is empty and reg_lambda is zero.
MleResult solve_mle(const Dataset& data, const LinkFunction& link, const MleConfig& cfg,
                    Eigen::Index dim);

/// Convenience overload; the dimension is taken from the data or cfg.init.
MleResult solve_mle(const Dataset& data, const LinkFunction& link, const MleConfig& cfg);

}  // namespace roam
