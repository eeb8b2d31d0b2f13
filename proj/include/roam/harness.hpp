#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "roam/env.hpp"
#include "roam/estimator.hpp"
#include "roam/linalg.hpp"
#include "roam/policy.hpp"

namespace roam {

enum class PolicyKind { roam, colstim, random };

std::string_view to_string(PolicyKind kind);
PolicyKind parse_policy_kind(std::string_view name);
std::string_view to_string(ThetaMode mode);
ThetaMode parse_theta_mode(std::string_view name);

inline constexpr std::uint64_t kDefaultMasterSeed = 20250101;

struct RunConfig {
  EnvConfig env;
  PolicyKind policy = PolicyKind::roam;
  ColstimParams colstim;
  int T = 1000;
  int tau = 50;
  MleConfig mle;
  std::uint64_t master_seed = kDefaultMasterSeed;
  int n_runs = 100;
  /// Free-form name used for output files; presets fill it in.
  std::string label = "default";

  /// d=5, k=1000, T=1000, tau=10d, r=1, n_runs=100; ridge 0.1 only when tau=0.
  static RunConfig defaults();
  /// Default ridge for a given exploration length.
  static double default_reg_lambda(int tau) { return tau == 0 ? 0.1 : 0.0; }

  void validate() const;
};

struct StepMetrics {
  int t = 0;
  /// Charged regret: x only for ROAM and during exploration, the mean of the
  /// x and y regrets for the concurrent policies.
  double inst_regret = 0.0;
  double cum_regret = 0.0;
  std::optional<double> est_error;
  std::optional<double> critical_ratio;
  double regret_x = 0.0;
  /// Regret of the comparison item when it was drawn from the context set.
  std::optional<double> regret_y;

  bool operator==(const StepMetrics&) const = default;
};

struct Trajectory {
  int run_index = 0;
  std::vector<StepMetrics> steps;
  Vec theta_star;
  /// lambda_min(V_{tau+1}) from the raw exploration probes.
  std::optional<double> initial_design_lambda_min;
  /// Number of MLE solves that needed the singular-Hessian ridge fallback.
  int mle_fallbacks = 0;
};

/// ||x_t - x*_t||_{V^{-1}} / ||x_t - y_t||_{V^{-1}}; absent when the
/// denominator is below 1e-12.
std::optional<double> critical_ratio(const Vec& x_t, const Vec& x_star, const Vec& y_t,
                                     const SymMatrix& v_inv);

/// Executes one full run. Streams are derived from (master_seed, run_index).
/// MLE convergence failures are rethrown with the run index and step attached.
Trajectory run_single(const RunConfig& cfg, int run_index);

/// State after the exploration phase only, using the same streams as
/// run_single so it reproduces that run's first tau rounds exactly.
struct ExplorationResult {
  Vec theta_star;
  std::vector<Vec> history;
  Dataset dataset;
  /// sum z z^T over the exploration records (V_{tau+1} without ridge).
  SymMatrix design;
};
ExplorationResult run_exploration(const RunConfig& cfg, int run_index);

enum class Metric { inst_regret, cum_regret, est_error, critical_ratio };
inline constexpr std::array<Metric, 4> kAllMetrics = {Metric::inst_regret, Metric::cum_regret,
                                                      Metric::est_error, Metric::critical_ratio};
std::string_view to_string(Metric m);
Metric parse_metric(std::string_view name);

struct StatPoint {
  double mean = 0.0;
  double std = 0.0;
  /// 2 std / sqrt(n)
  double half_width = 0.0;

  bool operator==(const StatPoint&) const = default;
};

/// Per-step statistics over runs. Entry t-1 of each series describes round t;
/// it is absent when no run recorded that metric at round t.
struct AggregateStats {
  std::array<std::vector<std::optional<StatPoint>>, 4> series;

  const std::vector<std::optional<StatPoint>>& at(Metric m) const {
    return series[static_cast<std::size_t>(m)];
  }
  std::vector<std::optional<StatPoint>>& at(Metric m) { return series[static_cast<std::size_t>(m)]; }
  std::size_t horizon() const { return series[0].size(); }

  bool operator==(const AggregateStats&) const = default;
};

/// Mean, sample standard deviation and 2 std / sqrt(n) per round and metric.
AggregateStats aggregate(std::span<const Trajectory> runs);

struct BatchOptions {
  /// Worker threads; values below 1 mean 1.
  int parallel = 1;
  /// Execution order of run indices; empty means 0..n_runs-1. Results do not
  /// depend on it.
  std::vector<int> order;
};

struct BatchResult {
  RunConfig config;
  std::vector<Trajectory> trajectories;
  AggregateStats aggregate;
};

/// Runs cfg.n_runs independent trajectories. If any run fails the batch
/// throws the error of the lowest failing run index.
BatchResult run_batch(const RunConfig& cfg, const BatchOptions& options = {});

/// Trailing mean over the last min(window, i + 1) points.
std::vector<double> moving_average(std::span<const double> series, int window);

enum class PresetName { fig1_dim_sweep, fig2_tau_sweep, fig3_vs_colstim };
PresetName parse_preset_name(std::string_view name);
std::string_view to_string(PresetName name);

/// Fully materialized experiment grid for one preset.
std::vector<RunConfig> preset(PresetName name, std::uint64_t master_seed = kDefaultMasterSeed);
std::vector<RunConfig> preset(std::string_view name, std::uint64_t master_seed = kDefaultMasterSeed);

}  // namespace roam
