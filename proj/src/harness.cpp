#include "roam/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "roam/choice.hpp"
#include "roam/errors.hpp"

namespace roam {

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::roam: return "roam";
    case PolicyKind::colstim: return "colstim";
    case PolicyKind::random: return "random";
  }
  return "unknown";
}

PolicyKind parse_policy_kind(std::string_view name) {
  if (name == "roam") return PolicyKind::roam;
  if (name == "colstim") return PolicyKind::colstim;
  if (name == "random") return PolicyKind::random;
  throw ConfigError("unknown policy '" + std::string(name) + "'");
}

std::string_view to_string(ThetaMode mode) {
  switch (mode) {
    case ThetaMode::unit_sphere: return "unit_sphere";
    case ThetaMode::unit_ball_then_normalize: return "unit_ball_then_normalize";
  }
  return "unknown";
}

ThetaMode parse_theta_mode(std::string_view name) {
  if (name == "unit_sphere") return ThetaMode::unit_sphere;
  if (name == "unit_ball_then_normalize") return ThetaMode::unit_ball_then_normalize;
  throw ConfigError("unknown theta_mode '" + std::string(name) + "'");
}

RunConfig RunConfig::defaults() {
  RunConfig cfg;
  cfg.tau = 10 * cfg.env.d;
  cfg.mle.reg_lambda = default_reg_lambda(cfg.tau);
  return cfg;
}

void RunConfig::validate() const {
  env.validate();
  mle.validate();
  colstim.validate();
  if (T < 1) throw ConfigError("RunConfig: T must be >= 1");
  if (tau < 0 || tau >= T) throw ConfigError("RunConfig: tau must satisfy 0 <= tau < T");
  if (n_runs < 1) throw ConfigError("RunConfig: n_runs must be >= 1");
  // Exploration records tau - 1 comparisons; with no ridge the first
  // estimate needs at least one of them.
  if (tau <= 1 && mle.reg_lambda == 0.0) {
    throw ConfigError("RunConfig: tau <= 1 requires reg_lambda > 0");
  }
}

std::optional<double> critical_ratio(const Vec& x_t, const Vec& x_star, const Vec& y_t,
                                     const SymMatrix& v_inv) {
  const double denom = weighted_norm(x_t - y_t, v_inv);
  if (denom < 1e-12) return std::nullopt;
  return weighted_norm(x_t - x_star, v_inv) / denom;
}

namespace {

struct RunStreams {
  RandomStream theta;
  RandomStream contexts;
  RandomStream policy;
  RandomStream user;

  RunStreams(std::uint64_t seed, int run_index)
      : theta(RandomStream::derive(seed, static_cast<std::uint64_t>(run_index), StreamTag::theta)),
        contexts(RandomStream::derive(seed, static_cast<std::uint64_t>(run_index), StreamTag::contexts)),
        policy(RandomStream::derive(seed, static_cast<std::uint64_t>(run_index), StreamTag::policy)),
        user(RandomStream::derive(seed, static_cast<std::uint64_t>(run_index), StreamTag::user)) {}
};

StepDecision explore_decision(const RunConfig& cfg, const PolicyState& state, const ContextSet& ctx,
                              RandomStream& rng) {
  if (cfg.policy == PolicyKind::random) return random_policy_step(ctx, rng);
  return roam_explore_step(state, ctx, rng);
}

}  // namespace

ExplorationResult run_exploration(const RunConfig& cfg, int run_index) {
  cfg.validate();
  RunStreams streams(cfg.master_seed, run_index);
  ExplorationResult out;
  out.theta_star = sample_theta_star(cfg.env, streams.theta);
  const UserModel user(out.theta_star);
  PolicyState state;
  state.dim = cfg.env.d;
  state.tau = cfg.tau;
  for (int t = 1; t <= cfg.tau; ++t) {
    const ContextSet ctx = sample_context_set(cfg.env, streams.contexts);
    const StepDecision dec = explore_decision(cfg, state, ctx, streams.policy);
    std::optional<int> outcome;
    if (dec.compare_with) outcome = sample_comparison(user, dec.recommend, *dec.compare_with, streams.user);
    if (outcome) state.dataset.push_back({*dec.probe, *outcome});
    state.history.push_back(dec.recommend);
    ++state.t;
  }
  out.history = std::move(state.history);
  out.dataset = std::move(state.dataset);
  out.design = SymMatrix::Zero(cfg.env.d, cfg.env.d);
  for (const auto& rec : out.dataset) out.design.noalias() += rec.z * rec.z.transpose();
  symmetrize(out.design);
  return out;
}

Trajectory run_single(const RunConfig& cfg, int run_index) {
  cfg.validate();
  RunStreams streams(cfg.master_seed, run_index);

  Trajectory traj;
  traj.run_index = run_index;
  traj.theta_star = sample_theta_star(cfg.env, streams.theta);
  const UserModel user(traj.theta_star);
  PolicyState state = make_policy_state(cfg.env.d, cfg.tau, cfg.mle.reg_lambda);
  traj.steps.reserve(static_cast<std::size_t>(cfg.T));

  double cum = 0.0;
  for (int t = 1; t <= cfg.T; ++t) {
    const ContextSet ctx = sample_context_set(cfg.env, streams.contexts);
    const Eigen::VectorXd util = ctx.items.transpose() * traj.theta_star;
    const BestArm best = best_arm(ctx, traj.theta_star);

    StepMetrics m;
    m.t = t;
    StepDecision dec;
    const bool exploring = state.exploring();
    if (!exploring) {
      try {
        const MleResult fit = refit_estimate(state, user.link, cfg.mle);
        if (fit.regularized_fallback) ++traj.mle_fallbacks;
      } catch (const ConvergenceError& e) {
        std::ostringstream msg;
        msg << "run " << run_index << ", step " << t << ": " << e.what();
        throw ConvergenceError(msg.str(), e.last_iterate(), e.residual());
      }
      m.est_error = (*state.theta_hat - traj.theta_star).norm();
    }

    switch (cfg.policy) {
      case PolicyKind::roam:
        if (exploring) {
          dec = roam_explore_step(state, ctx, streams.policy);
        } else if (state.history.empty()) {
          // tau = 0: the first greedy pick has nothing to be compared with.
          dec.recommend_index = best_arm(ctx, *state.theta_hat).index;
          dec.recommend = ctx.item(dec.recommend_index);
        } else {
          dec = roam_exploit_step(state, ctx);
        }
        break;
      case PolicyKind::colstim:
        dec = exploring ? roam_explore_step(state, ctx, streams.policy)
                        : colstim_step(state, ctx, cfg.colstim, streams.policy);
        break;
      case PolicyKind::random:
        dec = random_policy_step(ctx, streams.policy);
        break;
    }

    const auto best_i = static_cast<Eigen::Index>(best.index);
    m.regret_x = util(best_i) - util(static_cast<Eigen::Index>(dec.recommend_index));
    const bool y_from_context =
        cfg.policy == PolicyKind::random || (cfg.policy == PolicyKind::colstim && !exploring);
    if (y_from_context) {
      m.regret_y = util(best_i) - util(static_cast<Eigen::Index>(*dec.compare_index));
      m.inst_regret = 0.5 * (m.regret_x + *m.regret_y);
    } else {
      m.inst_regret = m.regret_x;
    }
    cum += m.inst_regret;
    m.cum_regret = cum;

    if (!exploring && dec.compare_with) {
      m.critical_ratio = critical_ratio(dec.recommend, best.item, *dec.compare_with, state.design->v_inv());
    }

    std::optional<int> outcome;
    if (dec.compare_with) outcome = sample_comparison(user, dec.recommend, *dec.compare_with, streams.user);
    roam_update(state, dec, outcome);
    traj.steps.push_back(std::move(m));
  }
  traj.initial_design_lambda_min = state.initial_design_lambda_min;
  return traj;
}

std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::inst_regret: return "inst_regret";
    case Metric::cum_regret: return "cum_regret";
    case Metric::est_error: return "est_error";
    case Metric::critical_ratio: return "critical_ratio";
  }
  return "unknown";
}

Metric parse_metric(std::string_view name) {
  for (Metric m : kAllMetrics) {
    if (to_string(m) == name) return m;
  }
  throw ConfigError("unknown metric '" + std::string(name) + "'");
}

namespace {

std::optional<double> metric_value(const StepMetrics& s, Metric m) {
  switch (m) {
    case Metric::inst_regret: return s.inst_regret;
    case Metric::cum_regret: return s.cum_regret;
    case Metric::est_error: return s.est_error;
    case Metric::critical_ratio: return s.critical_ratio;
  }
  return std::nullopt;
}

}  // namespace

AggregateStats aggregate(std::span<const Trajectory> runs) {
  AggregateStats out;
  if (runs.empty()) return out;
  const std::size_t horizon = runs.front().steps.size();
  for (const auto& r : runs) {
    if (r.steps.size() != horizon) throw ConfigError("aggregate: trajectories differ in length");
  }
  std::vector<double> values;
  values.reserve(runs.size());
  for (Metric m : kAllMetrics) {
    auto& series = out.at(m);
    series.resize(horizon);
    for (std::size_t i = 0; i < horizon; ++i) {
      values.clear();
      for (const auto& r : runs) {
        if (auto v = metric_value(r.steps[i], m)) values.push_back(*v);
      }
      if (values.empty()) continue;
      const double n = static_cast<double>(values.size());
      double mean = 0.0;
      for (double v : values) mean += v;
      mean /= n;
      double ss = 0.0;
      for (double v : values) ss += (v - mean) * (v - mean);
      const double sd = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
      series[i] = StatPoint{mean, sd, 2.0 * sd / std::sqrt(n)};
    }
  }
  return out;
}

BatchResult run_batch(const RunConfig& cfg, const BatchOptions& options) {
  cfg.validate();
  const int n = cfg.n_runs;
  std::vector<int> order = options.order;
  if (order.empty()) {
    order.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  } else {
    std::vector<int> sorted = order;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < n; ++i) {
      if (sorted.size() != static_cast<std::size_t>(n) || sorted[static_cast<std::size_t>(i)] != i) {
        throw ConfigError("run_batch: order must be a permutation of 0..n_runs-1");
      }
    }
  }

  BatchResult result;
  result.config = cfg;
  result.trajectories.resize(static_cast<std::size_t>(n));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};

  auto worker = [&] {
    for (;;) {
      const std::size_t slot = next.fetch_add(1);
      if (slot >= order.size() || failed.load()) return;
      const int run = order[slot];
      try {
        result.trajectories[static_cast<std::size_t>(run)] = run_single(cfg, run);
      } catch (...) {
        errors[static_cast<std::size_t>(run)] = std::current_exception();
        failed.store(true);
      }
    }
  };

  const int threads = std::clamp(options.parallel, 1, n);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
  }

  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  result.aggregate = aggregate(result.trajectories);
  return result;
}

std::vector<double> moving_average(std::span<const double> series, int window) {
  if (window < 1) throw ConfigError("moving_average: window must be >= 1");
  std::vector<double> out;
  out.reserve(series.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    sum += series[i];
    if (i >= static_cast<std::size_t>(window)) sum -= series[i - static_cast<std::size_t>(window)];
    const std::size_t count = std::min(i + 1, static_cast<std::size_t>(window));
    out.push_back(sum / static_cast<double>(count));
  }
  return out;
}

PresetName parse_preset_name(std::string_view name) {
  if (name == "fig1_dim_sweep") return PresetName::fig1_dim_sweep;
  if (name == "fig2_tau_sweep") return PresetName::fig2_tau_sweep;
  if (name == "fig3_vs_colstim") return PresetName::fig3_vs_colstim;
  throw ConfigError("unknown preset '" + std::string(name) + "'");
}

std::string_view to_string(PresetName name) {
  switch (name) {
    case PresetName::fig1_dim_sweep: return "fig1_dim_sweep";
    case PresetName::fig2_tau_sweep: return "fig2_tau_sweep";
    case PresetName::fig3_vs_colstim: return "fig3_vs_colstim";
  }
  return "unknown";
}

namespace {

std::string format_param(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

}  // namespace

std::vector<RunConfig> preset(PresetName name, std::uint64_t master_seed) {
  RunConfig base = RunConfig::defaults();
  base.master_seed = master_seed;
  std::vector<RunConfig> out;
  switch (name) {
    case PresetName::fig1_dim_sweep:
      for (int d : {2, 4, 6, 8, 10}) {
        RunConfig c = base;
        c.env.d = d;
        c.tau = 10 * d;
        c.mle.reg_lambda = RunConfig::default_reg_lambda(c.tau);
        c.label = "d" + std::to_string(d);
        out.push_back(std::move(c));
      }
      break;
    case PresetName::fig2_tau_sweep:
      for (int tau : {0, 25, 50, 75, 100}) {
        RunConfig c = base;
        c.tau = tau;
        c.mle.reg_lambda = RunConfig::default_reg_lambda(tau);
        c.label = "tau" + std::to_string(tau);
        out.push_back(std::move(c));
      }
      break;
    case PresetName::fig3_vs_colstim: {
      RunConfig r = base;
      r.label = "roam";
      out.push_back(std::move(r));
      for (double c1 : {1.0, 10.0}) {
        for (double c2 : {0.1, 1.0}) {
          RunConfig c = base;
          c.policy = PolicyKind::colstim;
          c.colstim.c1 = c1;
          c.colstim.c2 = c2;
          c.label = "colstim_c1_" + format_param(c1) + "_c2_" + format_param(c2);
          out.push_back(std::move(c));
        }
      }
      break;
    }
  }
  return out;
}

std::vector<RunConfig> preset(std::string_view name, std::uint64_t master_seed) {
  return preset(parse_preset_name(name), master_seed);
}

}  // namespace roam
