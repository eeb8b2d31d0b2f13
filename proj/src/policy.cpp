#include "roam/policy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "roam/errors.hpp"

namespace roam {

namespace {

// Added to V_{tau+1} only when the exploration probes do not span R^d.
constexpr double kDesignJitter = 1e-6;

void initialize_design(PolicyState& state) {
  const Eigen::Index d = state.dim;
  SymMatrix raw = SymMatrix::Zero(d, d);
  for (const auto& rec : state.dataset) raw.noalias() += rec.z * rec.z.transpose();
  symmetrize(raw);
  state.initial_design_lambda_min = extreme_eigenvalues(raw).lambda_min;

  SymMatrix v = raw;
  v.diagonal().array() += state.design_ridge;
  if (extreme_eigenvalues(v).lambda_min <= 1e-10) {
    v.diagonal().array() += kDesignJitter;
    state.design_jittered = true;
  }
  state.design.emplace(std::move(v));
}

void require_nonempty(const ContextSet& ctx, const char* what) {
  if (ctx.empty()) throw ConfigError(std::string(what) + ": empty context set");
}

// sqrt(diag(D^T M D)) for the columns of D.
Eigen::VectorXd column_norms(const Eigen::MatrixXd& cols, const SymMatrix& m) {
  const Eigen::MatrixXd mc = m * cols;
  return cols.cwiseProduct(mc).colwise().sum().transpose().cwiseMax(0.0).cwiseSqrt();
}

std::size_t argmax_first(const Eigen::VectorXd& values) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < values.size(); ++i) {
    if (values(i) > values(best)) best = i;
  }
  return static_cast<std::size_t>(best);
}

}  // namespace

PolicyState make_policy_state(Eigen::Index dim, int tau, double design_ridge) {
  if (dim < 1) throw ConfigError("make_policy_state: dim must be >= 1");
  if (tau < 0) throw ConfigError("make_policy_state: tau must be >= 0");
  if (!(design_ridge >= 0.0)) throw ConfigError("make_policy_state: ridge must be >= 0");
  PolicyState state;
  state.dim = dim;
  state.tau = tau;
  state.design_ridge = design_ridge;
  if (tau == 0) initialize_design(state);
  return state;
}

void ColstimParams::validate() const {
  if (!(c1 >= 0.0)) throw ConfigError("ColstimParams: c1 must be >= 0");
  if (!(c2 >= 0.0)) throw ConfigError("ColstimParams: c2 must be >= 0");
}

StepDecision roam_explore_step(const PolicyState& state, const ContextSet& ctx,
                               RandomStream& rng) {
  require_nonempty(ctx, "roam_explore_step");
  StepDecision dec;
  dec.recommend_index = rng.index(ctx.size());
  dec.recommend = ctx.item(dec.recommend_index);
  if (!state.history.empty()) {
    dec.compare_index = state.history.size() - 1;
    dec.compare_with = state.history.back();
    dec.probe = dec.recommend - *dec.compare_with;
  }
  return dec;
}

StepDecision roam_exploit_step(const PolicyState& state, const ContextSet& ctx) {
  require_nonempty(ctx, "roam_exploit_step");
  if (state.history.empty()) {
    throw ConfigError("roam_exploit_step: empty history (exploration phase was skipped)");
  }
  if (!state.theta_hat) throw ConfigError("roam_exploit_step: no estimate; refit first");
  if (!state.design) throw ConfigError("roam_exploit_step: design matrix not initialized");
  if (ctx.dim() != state.dim) throw NumericError("roam_exploit_step: dimension mismatch");

  StepDecision dec;
  dec.recommend_index = argmax_first(ctx.items.transpose() * *state.theta_hat);
  dec.recommend = ctx.item(dec.recommend_index);

  Eigen::MatrixXd diffs(state.dim, static_cast<Eigen::Index>(state.history.size()));
  for (std::size_t i = 0; i < state.history.size(); ++i) {
    diffs.col(static_cast<Eigen::Index>(i)) = dec.recommend - state.history[i];
  }
  const std::size_t best = argmax_first(column_norms(diffs, state.design->v_inv()));
  dec.compare_index = best;
  dec.compare_with = state.history[best];
  dec.probe = dec.recommend - *dec.compare_with;
  return dec;
}

void roam_update(PolicyState& state, const StepDecision& decision, std::optional<int> outcome) {
  if (decision.compare_with.has_value() != outcome.has_value()) {
    throw ConfigError("roam_update: outcome must be present exactly when a comparison was made");
  }
  if (decision.recommend.size() != state.dim) throw NumericError("roam_update: dimension mismatch");
  if (outcome) {
    if (*outcome != 0 && *outcome != 1) throw ConfigError("roam_update: outcome must be 0 or 1");
    const Vec probe = decision.probe ? *decision.probe : Vec(decision.recommend - *decision.compare_with);
    state.dataset.push_back({probe, *outcome});
    if (state.t > state.tau && state.design) state.design->rank_one_update(probe);
  }
  state.history.push_back(decision.recommend);
  ++state.t;
  if (state.t == state.tau + 1 && !state.design) initialize_design(state);
}

MleResult refit_estimate(PolicyState& state, const LinkFunction& link, const MleConfig& cfg) {
  MleConfig warm = cfg;
  if (state.theta_hat) warm.init = *state.theta_hat;
  MleResult res = solve_mle(state.dataset, link, warm, state.dim);
  state.theta_hat = res.theta;
  return res;
}

StepDecision colstim_step(const PolicyState& state, const ContextSet& ctx,
                          const ColstimParams& params, RandomStream& rng) {
  require_nonempty(ctx, "colstim_step");
  params.validate();
  if (!state.theta_hat) throw ConfigError("colstim_step: no estimate; refit first");
  if (!state.design) throw ConfigError("colstim_step: design matrix not initialized");
  if (ctx.dim() != state.dim) throw NumericError("colstim_step: dimension mismatch");

  const Vec& theta = *state.theta_hat;
  const SymMatrix& v_inv = state.design->v_inv();
  const Eigen::Index k = ctx.items.cols();

  Eigen::VectorXd eps(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    if (params.perturbation == Perturbation::gumbel_clipped) {
      eps(i) = std::clamp(rng.gumbel(), -params.c2, params.c2);
    } else {
      eps(i) = params.c2 * (2.0 * rng.uniform() - 1.0);
    }
  }
  const Eigen::VectorXd util = ctx.items.transpose() * theta;
  const Eigen::VectorXd x_score = util + eps.cwiseProduct(column_norms(ctx.items, v_inv));

  StepDecision dec;
  dec.recommend_index = argmax_first(x_score);
  dec.recommend = ctx.item(dec.recommend_index);

  const Eigen::MatrixXd diffs = ctx.items.colwise() - dec.recommend;
  const double x_util = util(static_cast<Eigen::Index>(dec.recommend_index));
  const Eigen::VectorXd y_score =
      (util.array() - x_util).matrix() + params.c1 * column_norms(diffs, v_inv);
  const std::size_t y = argmax_first(y_score);
  dec.compare_index = y;
  dec.compare_with = ctx.item(y);
  dec.probe = dec.recommend - *dec.compare_with;
  return dec;
}

StepDecision random_policy_step(const ContextSet& ctx, RandomStream& rng) {
  require_nonempty(ctx, "random_policy_step");
  StepDecision dec;
  dec.recommend_index = rng.index(ctx.size());
  dec.recommend = ctx.item(dec.recommend_index);
  const std::size_t y = rng.index(ctx.size());
  dec.compare_index = y;
  dec.compare_with = ctx.item(y);
  dec.probe = dec.recommend - *dec.compare_with;
  return dec;
}

}  // namespace roam
