#include "roam/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "roam/errors.hpp"

namespace roam {

using nlohmann::json;

OutputFormat parse_output_format(std::string_view name) {
  if (name == "csv") return OutputFormat::csv;
  if (name == "json") return OutputFormat::json;
  throw ConfigError("unknown format '" + std::string(name) + "' (expected csv or json)");
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw ConfigError("malformed number '" + std::string(text) + "'");
  }
  return v;
}

namespace {

int parse_int(std::string_view text) {
  int v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw ConfigError("malformed integer '" + std::string(text) + "'");
  }
  return v;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

void write_optional(std::ostream& out, const std::optional<double>& v) {
  if (v) out << format_double(*v);
}

std::optional<double> parse_optional(std::string_view field) {
  if (field.empty()) return std::nullopt;
  return parse_double(field);
}

void expect_header(std::istream& in, std::string_view header) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) {
    throw ConfigError("CSV header mismatch: expected '" + std::string(header) + "', got '" + line + "'");
  }
}

json optional_array(const std::vector<StepMetrics>& steps,
                    std::optional<double> StepMetrics::*field) {
  json arr = json::array();
  for (const auto& s : steps) {
    if (s.*field) {
      arr.push_back(*(s.*field));
    } else {
      arr.push_back(nullptr);
    }
  }
  return arr;
}

std::optional<double> optional_from(const json& v) {
  if (v.is_null()) return std::nullopt;
  return v.get<double>();
}

}  // namespace

void write_trajectories_csv(std::ostream& out, std::span<const Trajectory> runs) {
  out << kTrajectoryCsvHeader << '\n';
  for (const auto& run : runs) {
    for (const auto& s : run.steps) {
      out << run.run_index << ',' << s.t << ',' << format_double(s.inst_regret) << ','
          << format_double(s.cum_regret) << ',';
      write_optional(out, s.est_error);
      out << ',';
      write_optional(out, s.critical_ratio);
      out << '\n';
    }
  }
}

void write_aggregate_csv(std::ostream& out, const AggregateStats& stats) {
  out << kAggregateCsvHeader << '\n';
  for (std::size_t i = 0; i < stats.horizon(); ++i) {
    for (Metric m : kAllMetrics) {
      out << (i + 1) << ',' << to_string(m) << ',';
      if (const auto& p = stats.at(m)[i]) {
        out << format_double(p->mean) << ',' << format_double(p->std) << ','
            << format_double(p->half_width);
      } else {
        out << ",,";
      }
      out << '\n';
    }
  }
}

std::vector<Trajectory> read_trajectories_csv(std::istream& in) {
  expect_header(in, kTrajectoryCsvHeader);
  std::vector<Trajectory> runs;
  std::map<int, std::size_t> slot;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 6) throw ConfigError("trajectory CSV row has " + std::to_string(f.size()) + " fields");
    const int run = parse_int(f[0]);
    auto [it, inserted] = slot.try_emplace(run, runs.size());
    if (inserted) {
      runs.emplace_back();
      runs.back().run_index = run;
    }
    StepMetrics s;
    s.t = parse_int(f[1]);
    s.inst_regret = parse_double(f[2]);
    s.cum_regret = parse_double(f[3]);
    s.est_error = parse_optional(f[4]);
    s.critical_ratio = parse_optional(f[5]);
    runs[it->second].steps.push_back(s);
  }
  return runs;
}

AggregateStats read_aggregate_csv(std::istream& in) {
  expect_header(in, kAggregateCsvHeader);
  AggregateStats stats;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 5) throw ConfigError("aggregate CSV row has " + std::to_string(f.size()) + " fields");
    const int t = parse_int(f[0]);
    if (t < 1) throw ConfigError("aggregate CSV: t must be >= 1");
    const Metric m = parse_metric(f[1]);
    auto& series = stats.at(m);
    if (series.size() < static_cast<std::size_t>(t)) series.resize(static_cast<std::size_t>(t));
    if (f[2].empty() && f[3].empty() && f[4].empty()) continue;
    series[static_cast<std::size_t>(t - 1)] =
        StatPoint{parse_double(f[2]), parse_double(f[3]), parse_double(f[4])};
  }
  std::size_t horizon = 0;
  for (const auto& s : stats.series) horizon = std::max(horizon, s.size());
  for (auto& s : stats.series) s.resize(horizon);
  return stats;
}

RunConfig config_from_json(const json& j) {
  static const std::set<std::string> kKeys = {"d",  "k",          "T",           "tau",
                                              "r",  "policy",     "c1",          "c2",
                                              "reg_lambda", "master_seed", "n_runs", "theta_mode"};
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!kKeys.contains(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  try {
    RunConfig cfg = RunConfig::defaults();
    if (j.contains("d")) cfg.env.d = j.at("d").get<int>();
    if (j.contains("k")) cfg.env.k = j.at("k").get<int>();
    if (j.contains("r")) cfg.env.r = j.at("r").get<double>();
    if (j.contains("theta_mode")) cfg.env.theta_mode = parse_theta_mode(j.at("theta_mode").get<std::string>());
    if (j.contains("T")) cfg.T = j.at("T").get<int>();
    cfg.tau = j.contains("tau") ? j.at("tau").get<int>() : 10 * cfg.env.d;
    cfg.mle.reg_lambda = j.contains("reg_lambda") ? j.at("reg_lambda").get<double>()
                                                   : RunConfig::default_reg_lambda(cfg.tau);
    if (j.contains("policy")) cfg.policy = parse_policy_kind(j.at("policy").get<std::string>());
    if (j.contains("c1")) cfg.colstim.c1 = j.at("c1").get<double>();
    if (j.contains("c2")) cfg.colstim.c2 = j.at("c2").get<double>();
    if (j.contains("master_seed")) cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
    if (j.contains("n_runs")) cfg.n_runs = j.at("n_runs").get<int>();
    cfg.validate();
    return cfg;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

json config_to_json(const RunConfig& cfg) {
  return json{{"d", cfg.env.d},
              {"k", cfg.env.k},
              {"T", cfg.T},
              {"tau", cfg.tau},
              {"r", cfg.env.r},
              {"policy", std::string(to_string(cfg.policy))},
              {"c1", cfg.colstim.c1},
              {"c2", cfg.colstim.c2},
              {"reg_lambda", cfg.mle.reg_lambda},
              {"master_seed", cfg.master_seed},
              {"n_runs", cfg.n_runs},
              {"theta_mode", std::string(to_string(cfg.env.theta_mode))}};
}

RunConfig load_config(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  RunConfig cfg = config_from_json(j);
  cfg.label = path.stem().string();
  return cfg;
}

json batch_to_json(const BatchResult& batch) {
  json out;
  out["config"] = config_to_json(batch.config);
  out["label"] = batch.config.label;
  json runs = json::array();
  for (const auto& tr : batch.trajectories) {
    json steps;
    json t = json::array(), inst = json::array(), cum = json::array(), rx = json::array();
    for (const auto& s : tr.steps) {
      t.push_back(s.t);
      inst.push_back(s.inst_regret);
      cum.push_back(s.cum_regret);
      rx.push_back(s.regret_x);
    }
    steps["t"] = std::move(t);
    steps["inst_regret"] = std::move(inst);
    steps["cum_regret"] = std::move(cum);
    steps["est_error"] = optional_array(tr.steps, &StepMetrics::est_error);
    steps["critical_ratio"] = optional_array(tr.steps, &StepMetrics::critical_ratio);
    steps["regret_x"] = std::move(rx);
    steps["regret_y"] = optional_array(tr.steps, &StepMetrics::regret_y);
    json run{{"run", tr.run_index},
             {"theta_star", std::vector<double>(tr.theta_star.data(), tr.theta_star.data() + tr.theta_star.size())},
             {"mle_fallbacks", tr.mle_fallbacks},
             {"steps", std::move(steps)}};
    run["initial_design_lambda_min"] =
        tr.initial_design_lambda_min ? json(*tr.initial_design_lambda_min) : json(nullptr);
    runs.push_back(std::move(run));
  }
  out["trajectories"] = std::move(runs);

  json agg;
  for (Metric m : kAllMetrics) {
    json mean = json::array(), sd = json::array(), hw = json::array();
    for (const auto& p : batch.aggregate.at(m)) {
      mean.push_back(p ? json(p->mean) : json(nullptr));
      sd.push_back(p ? json(p->std) : json(nullptr));
      hw.push_back(p ? json(p->half_width) : json(nullptr));
    }
    agg[std::string(to_string(m))] = json{{"mean", mean}, {"std", sd}, {"half_width", hw}};
  }
  out["aggregate"] = std::move(agg);
  return out;
}

BatchResult batch_from_json(const json& j) {
  try {
    BatchResult batch;
    batch.config = config_from_json(j.at("config"));
    if (j.contains("label")) batch.config.label = j.at("label").get<std::string>();
    for (const auto& run : j.at("trajectories")) {
      Trajectory tr;
      tr.run_index = run.at("run").get<int>();
      const auto theta = run.at("theta_star").get<std::vector<double>>();
      tr.theta_star = Eigen::Map<const Vec>(theta.data(), static_cast<Eigen::Index>(theta.size()));
      tr.mle_fallbacks = run.at("mle_fallbacks").get<int>();
      tr.initial_design_lambda_min = optional_from(run.at("initial_design_lambda_min"));
      const auto& steps = run.at("steps");
      const std::size_t n = steps.at("t").size();
      for (std::size_t i = 0; i < n; ++i) {
        StepMetrics s;
        s.t = steps.at("t")[i].get<int>();
        s.inst_regret = steps.at("inst_regret")[i].get<double>();
        s.cum_regret = steps.at("cum_regret")[i].get<double>();
        s.est_error = optional_from(steps.at("est_error")[i]);
        s.critical_ratio = optional_from(steps.at("critical_ratio")[i]);
        s.regret_x = steps.at("regret_x")[i].get<double>();
        s.regret_y = optional_from(steps.at("regret_y")[i]);
        tr.steps.push_back(s);
      }
      batch.trajectories.push_back(std::move(tr));
    }
    for (Metric m : kAllMetrics) {
      const auto& a = j.at("aggregate").at(std::string(to_string(m)));
      auto& series = batch.aggregate.at(m);
      const std::size_t n = a.at("mean").size();
      series.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        if (a.at("mean")[i].is_null()) continue;
        series[i] = StatPoint{a.at("mean")[i].get<double>(), a.at("std")[i].get<double>(),
                              a.at("half_width")[i].get<double>()};
      }
    }
    return batch;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("batch JSON: ") + e.what());
  }
}

std::vector<std::filesystem::path> export_batch(const BatchResult& batch,
                                                const std::filesystem::path& dir,
                                                OutputFormat format, std::string_view stem) {
  if (batch.trajectories.empty()) throw ConfigError("export_batch: no results to export");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());

  std::vector<std::filesystem::path> written;
  const std::string base(stem);
  if (format == OutputFormat::csv) {
    std::ostringstream traj, agg;
    write_trajectories_csv(traj, batch.trajectories);
    write_aggregate_csv(agg, batch.aggregate);
    written.push_back(dir / (base + "_trajectories.csv"));
    write_text_file(written.back(), traj.str());
    written.push_back(dir / (base + "_aggregate.csv"));
    write_text_file(written.back(), agg.str());
  } else {
    written.push_back(dir / (base + ".json"));
    write_text_file(written.back(), batch_to_json(batch).dump(1) + "\n");
  }
  return written;
}

AggregateStats import_aggregate_csv(const std::filesystem::path& path) {
  std::istringstream in(read_text_file(path));
  return read_aggregate_csv(in);
}

std::vector<Trajectory> import_trajectories_csv(const std::filesystem::path& path) {
  std::istringstream in(read_text_file(path));
  return read_trajectories_csv(in);
}

BatchResult import_batch_json(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return batch_from_json(json::parse(text));
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.close();
  if (!out) throw IoError("failed writing " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("failed reading " + path.string());
  return buf.str();
}

}  // namespace roam
