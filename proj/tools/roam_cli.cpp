// roam: command-line front end for the duelling-bandit simulator.
//
//   roam run      --config cfg.json --out dir
//   roam batch    --config cfg.json --out dir --runs 100 --parallel 4
//   roam preset   fig3_vs_colstim --out dir
//   roam diagnose concentration --out dir
//
// Exit codes: 0 success, 2 config error, 3 MLE convergence error, 4 I/O error.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "roam/diagnostics.hpp"
#include "roam/errors.hpp"
#include "roam/harness.hpp"
#include "roam/io.hpp"

namespace {

namespace fs = std::filesystem;
using namespace roam;

struct CommonOptions {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> runs;
  std::string format = "csv";
  int parallel = 1;
};

RunConfig resolve_config(const CommonOptions& opts) {
  RunConfig cfg = RunConfig::defaults();
  if (!opts.config_path.empty()) cfg = load_config(opts.config_path);
  if (opts.seed) cfg.master_seed = *opts.seed;
  if (opts.runs) cfg.n_runs = *opts.runs;
  cfg.validate();
  return cfg;
}

void report(const std::vector<fs::path>& files) {
  for (const auto& f : files) std::cout << "wrote " << f.string() << '\n';
}

int cmd_run(const CommonOptions& opts, int run_index) {
  RunConfig cfg = resolve_config(opts);
  BatchResult result;
  result.config = cfg;
  result.config.n_runs = 1;
  result.trajectories.push_back(run_single(cfg, run_index));
  result.aggregate = aggregate(result.trajectories);
  const auto& last = result.trajectories.back().steps.back();
  std::cout << cfg.label << ": run " << run_index << " R_T = " << last.cum_regret << '\n';
  report(export_batch(result, opts.out_dir, parse_output_format(opts.format),
                      cfg.label + "_run" + std::to_string(run_index)));
  return 0;
}

void print_summary(const BatchResult& r) {
  const auto& cum = r.aggregate.at(Metric::cum_regret).back();
  const auto& err = r.aggregate.at(Metric::est_error).back();
  std::cout << r.config.label << ": mean R_T = " << cum->mean << " +/- " << cum->half_width;
  if (err) std::cout << ", final est_error = " << err->mean;
  std::cout << '\n';
}

int cmd_batch(const CommonOptions& opts) {
  const RunConfig cfg = resolve_config(opts);
  const BatchResult result = run_batch(cfg, {.parallel = opts.parallel, .order = {}});
  print_summary(result);
  report(export_batch(result, opts.out_dir, parse_output_format(opts.format), cfg.label));
  return 0;
}

int cmd_preset(const CommonOptions& opts, const std::string& name) {
  const OutputFormat format = parse_output_format(opts.format);
  auto configs = preset(name, opts.seed.value_or(kDefaultMasterSeed));
  for (auto& cfg : configs) {
    if (opts.runs) cfg.n_runs = *opts.runs;
    const BatchResult result = run_batch(cfg, {.parallel = opts.parallel, .order = {}});
    print_summary(result);
    report(export_batch(result, opts.out_dir, format, name + "_" + cfg.label));
  }
  return 0;
}

int cmd_diagnose(const CommonOptions& opts, const std::string& check, double delta, double epsilon,
                 int trials, int probes) {
  const RunConfig cfg = resolve_config(opts);
  const int n_runs = cfg.n_runs;
  std::ostringstream csv;
  RandomStream rng = RandomStream::derive(cfg.master_seed, 0, StreamTag::diagnostics);

  if (check == "kappa") {
    csv << "r,kappa\n" << format_double(cfg.env.r) << ',' << format_double(compute_kappa_sigmoid(cfg.env.r)) << '\n';
  } else if (check == "alpha") {
    const double kappa = compute_kappa_sigmoid(cfg.env.r);
    csv << "t,d,delta,kappa,alpha\n";
    for (int t = 1; t <= cfg.T; t *= 10) {
      csv << t << ',' << cfg.env.d << ',' << format_double(delta) << ',' << format_double(kappa) << ','
          << format_double(compute_alpha(t, cfg.env.d, delta, kappa)) << '\n';
    }
  } else if (check == "beta") {
    const TheoryConstants c = theory_constants(cfg.env, delta, 1'000'000, rng);
    const double analytic_lambda = 2.0 * cfg.env.r * cfg.env.r / (cfg.env.d + 2.0);
    csv << "d,r,lambda_min_sigma,beta,beta_uniform_ball\n"
        << cfg.env.d << ',' << format_double(cfg.env.r) << ',' << format_double(c.lambda_min_sigma) << ','
        << format_double(c.beta) << ',' << format_double(compute_beta(cfg.env.r, analytic_lambda)) << '\n';
  } else if (check == "concentration") {
    const ConcentrationScan scan = concentration_scan(cfg.env.d, epsilon, delta, trials, 1, 4096, rng);
    csv << "tau,failure_rate\n";
    for (const auto& p : scan.points) csv << p.tau << ',' << format_double(p.failure_rate) << '\n';
    std::cout << "first tau with failure rate <= " << delta << ": " << scan.tau_found
              << (scan.nonincreasing_within_noise ? " (monotone within noise)" : " (NOT monotone)") << '\n';
  } else if (check == "lambda-min") {
    csv << "run,lambda_min,passes\n";
    int ok = 0;
    for (int run = 0; run < n_runs; ++run) {
      const ExplorationResult ex = run_exploration(cfg, run);
      const double lmin = extreme_eigenvalues(ex.design).lambda_min;
      ok += lmin >= 1.0;
      csv << run << ',' << format_double(lmin) << ',' << (lmin >= 1.0 ? 1 : 0) << '\n';
    }
    std::cout << "lambda_min(V_{tau+1}) >= 1 in " << ok << "/" << n_runs << " runs\n";
  } else if (check == "rich-history" || check == "good-vector") {
    const TheoryConstants c = theory_constants(cfg.env, delta, 1'000'000, rng);
    const bool rich = check == "rich-history";
    csv << (rich ? "run,beta,max_ratio,rich\n" : "run,epsilon,passes\n");
    int ok = 0;
    const SymMatrix sigma_hat = estimate_sigma(cfg.env, 1'000'000, rng);
    const SymMatrix whiten = sym_inv_sqrt(sigma_hat);
    for (int run = 0; run < n_runs; ++run) {
      const ExplorationResult ex = run_exploration(cfg, run);
      RandomStream probe_rng = RandomStream::derive(cfg.master_seed, static_cast<std::uint64_t>(run),
                                                    StreamTag::diagnostics);
      if (rich) {
        const double worst = max_richness_ratio(ex.history, cfg.env.r, probes, probe_rng);
        ok += worst <= c.beta;
        csv << run << ',' << format_double(c.beta) << ',' << format_double(worst) << ','
            << (worst <= c.beta ? 1 : 0) << '\n';
      } else {
        std::vector<Vec> white;
        for (const auto& rec : ex.dataset) white.push_back(whiten * rec.z);
        const bool pass = check_good_vector(white, epsilon, probes, probe_rng);
        ok += pass;
        csv << run << ',' << format_double(epsilon) << ',' << (pass ? 1 : 0) << '\n';
      }
    }
    std::cout << check << " holds in " << ok << "/" << n_runs << " runs\n";
  } else {
    throw ConfigError("unknown check '" + check +
                      "' (expected kappa, alpha, beta, concentration, lambda-min, rich-history, good-vector)");
  }

  std::cout << csv.str();
  std::error_code ec;
  fs::create_directories(opts.out_dir, ec);
  if (ec) throw IoError("cannot create directory " + opts.out_dir + ": " + ec.message());
  const fs::path path = fs::path(opts.out_dir) / ("diagnose_" + check + ".csv");
  write_text_file(path, csv.str());
  std::cout << "wrote " << path.string() << '\n';
  return 0;
}

void add_common(CLI::App* cmd, CommonOptions& opts, bool with_config, bool with_parallel) {
  if (with_config) cmd->add_option("--config", opts.config_path, "JSON config file")->check(CLI::ExistingFile);
  cmd->add_option("--out", opts.out_dir, "Output directory");
  cmd->add_option("--seed", opts.seed, "Master seed");
  cmd->add_option("--runs", opts.runs, "Number of independent runs")->check(CLI::PositiveNumber);
  cmd->add_option("--format", opts.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  if (with_parallel) {
    cmd->add_option("--parallel", opts.parallel, "Worker threads")->check(CLI::PositiveNumber);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"History-constrained contextual duelling bandit simulator"};
  app.require_subcommand(1);

  CommonOptions opts;
  int run_index = 0;
  std::string preset_name;
  std::string check;
  double delta = 0.1;
  double epsilon = 0.5;
  int trials = 200;
  int probes = 10000;

  auto* run = app.add_subcommand("run", "Run a single trajectory");
  add_common(run, opts, true, false);
  run->add_option("--run-index", run_index, "Run index used to derive the random streams");

  auto* batch = app.add_subcommand("batch", "Run n independent trajectories and aggregate");
  add_common(batch, opts, true, true);

  auto* pre = app.add_subcommand("preset", "Run an experiment preset");
  pre->add_option("name", preset_name, "fig1_dim_sweep | fig2_tau_sweep | fig3_vs_colstim")->required();
  add_common(pre, opts, false, true);

  auto* diag = app.add_subcommand("diagnose", "Empirical checks of the theoretical quantities");
  diag->add_option("check", check, "kappa | alpha | beta | concentration | lambda-min | rich-history | good-vector")
      ->required();
  add_common(diag, opts, true, false);
  diag->add_option("--delta", delta, "Failure probability delta");
  diag->add_option("--epsilon", epsilon, "Deviation tolerance epsilon");
  diag->add_option("--trials", trials, "Monte-Carlo trials per tau (concentration)");
  diag->add_option("--probes", probes, "Random probes per run (rich-history, good-vector)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return cmd_run(opts, run_index);
    if (*batch) return cmd_batch(opts);
    if (*pre) return cmd_preset(opts, preset_name);
    if (*diag) return cmd_diagnose(opts, check, delta, epsilon, trials, probes);
  } catch (const std::exception& e) {
    const int code = exit_code(e);
    const char* kind = code == kExitConvergence ? "convergence error"
                       : code == kExitIo        ? "I/O error"
                       : code == kExitConfig    ? "config error"
                                                : "error";
    std::cerr << kind << ": " << e.what() << '\n';
    return code;
  }
  return 0;
}
