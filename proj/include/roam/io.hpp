#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "roam/harness.hpp"

namespace roam {

enum class OutputFormat { csv, json };
OutputFormat parse_output_format(std::string_view name);

inline constexpr std::string_view kTrajectoryCsvHeader =
    "run,t,inst_regret,cum_regret,est_error,critical_ratio";
inline constexpr std::string_view kAggregateCsvHeader = "t,metric,mean,std,half_width";

/// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double v);
double parse_double(std::string_view text);

/// One row per (run, t); absent values are empty fields.
void write_trajectories_csv(std::ostream& out, std::span<const Trajectory> runs);
/// Four rows per t, metrics in kAllMetrics order; absent statistics are empty.
void write_aggregate_csv(std::ostream& out, const AggregateStats& stats);

/// Reads back the CSV columns; fields not in the CSV stay default.
std::vector<Trajectory> read_trajectories_csv(std::istream& in);
AggregateStats read_aggregate_csv(std::istream& in);

/// Config file keys: d, k, T, tau, r, policy, c1, c2, reg_lambda,
/// master_seed, n_runs, theta_mode. Missing keys take defaults (tau = 10d,
/// reg_lambda = 0.1 iff tau = 0); unknown keys are a ConfigError.
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& cfg);
RunConfig load_config(const std::filesystem::path& path);

nlohmann::json batch_to_json(const BatchResult& batch);
BatchResult batch_from_json(const nlohmann::json& j);

/// Writes `<stem>_trajectories.csv` and `<stem>_aggregate.csv` (csv) or
/// `<stem>.json` (json) under dir, creating it if needed. Returns the paths.
std::vector<std::filesystem::path> export_batch(const BatchResult& batch,
                                                const std::filesystem::path& dir,
                                                OutputFormat format, std::string_view stem);

AggregateStats import_aggregate_csv(const std::filesystem::path& path);
std::vector<Trajectory> import_trajectories_csv(const std::filesystem::path& path);
BatchResult import_batch_json(const std::filesystem::path& path);

/// Writes text to a file, throwing IoError with the path on failure.
void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace roam
