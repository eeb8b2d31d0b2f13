#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "roam/choice.hpp"
#include "roam/env.hpp"
#include "roam/estimator.hpp"
#include "roam/linalg.hpp"
#include "roam/random.hpp"

namespace roam {

/// Mutable state of one bandit run.
///
/// Rounds are 1-based. `history` holds every recommended item in order, so
/// |history| == t - 1 at the start of round t. The design matrix stays empty
/// until round tau + 1, when it is built from the exploration records.
struct PolicyState {
  Eigen::Index dim = 0;
  int tau = 0;
  int t = 1;
  /// Added to the identity part of the initial design (the MLE ridge weight).
  double design_ridge = 0.0;
  std::vector<Vec> history;
  Dataset dataset;
  std::optional<DesignState> design;
  std::optional<Vec> theta_hat;
  /// lambda_min of sum z z^T over the exploration records, before ridge.
  std::optional<double> initial_design_lambda_min;
  /// Set when the initial design was singular and needed a jitter term.
  bool design_jittered = false;

  bool exploring() const noexcept { return t <= tau; }
};

/// Fresh state; with tau == 0 the design is initialized immediately.
PolicyState make_policy_state(Eigen::Index dim, int tau, double design_ridge = 0.0);

/// x_t plus the optional comparison item and probe z_t = x_t - y_t.
///
/// `recommend_index` indexes the context set. `compare_index` indexes the
/// history for ROAM and the context set for CoLSTIM and the random policy.
struct StepDecision {
  Vec recommend;
  std::size_t recommend_index = 0;
  std::optional<Vec> compare_with;
  std::optional<std::size_t> compare_index;
  std::optional<Vec> probe;
};

enum class Perturbation { gumbel_clipped, uniform };

struct ColstimParams {
  double c1 = 10.0;
  double c2 = 1.0;
  Perturbation perturbation = Perturbation::gumbel_clipped;

  void validate() const;
};

/// Exploration round: uniform recommendation, compared against the previous
/// item. Round 1 has no previous item and issues no comparison.
StepDecision roam_explore_step(const PolicyState& state, const ContextSet& ctx, RandomStream& rng);

/// Exploit round: greedy recommendation under theta_hat; the comparison item
/// is the history element farthest from it in the V^{-1} norm. Ties resolve to
/// the lowest context index and the earliest history item.
StepDecision roam_exploit_step(const PolicyState& state, const ContextSet& ctx);

/// Records the round: appends x_t to the history and (z_t, o_t) to the
/// dataset, rank-one updates the design after exploration, advances t, and
/// builds V_{tau+1} when exploration ends.
void roam_update(PolicyState& state, const StepDecision& decision, std::optional<int> outcome);

/// Recomputes theta_hat over the dataset, warm-started from the previous
/// estimate.
MleResult refit_estimate(PolicyState& state, const LinkFunction& link, const MleConfig& cfg);

/// CoLSTIM step. x maximizes <x, theta_hat> + eps_x ||x||_{V^{-1}} with i.i.d.
/// perturbations bounded by c2; y maximizes <y - x, theta_hat> +
/// c1 ||x - y||_{V^{-1}}. Both come from the context set.
StepDecision colstim_step(const PolicyState& state, const ContextSet& ctx,
                          const ColstimParams& params, RandomStream& rng);

/// Both items uniform and independent from the context set.
StepDecision random_policy_step(const ContextSet& ctx, RandomStream& rng);

}  // namespace roam
