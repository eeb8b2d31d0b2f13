#include "roam/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "roam/choice.hpp"
#include "roam/errors.hpp"

namespace roam {

double compute_kappa_sigmoid(double r) {
  if (!(r > 0.0)) throw ConfigError("compute_kappa_sigmoid: r must be positive");
  return sigmoid_derivative(4.0 * r);
}

double compute_alpha(int t, int d, double delta, double kappa) {
  if (t < 1) throw ConfigError("compute_alpha: t must be >= 1");
  if (d < 1) throw ConfigError("compute_alpha: d must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("compute_alpha: delta must be in (0, 1)");
  if (!(kappa > 0.0)) throw ConfigError("compute_alpha: kappa must be positive");
  const double dd = static_cast<double>(d);
  return std::sqrt(0.5 * dd * std::log(1.0 + 2.0 * t / dd) + std::log(1.0 / delta)) / kappa;
}

double compute_beta(double r, double lambda_min_sigma) {
  if (!(lambda_min_sigma > 0.0)) {
    throw NumericError("compute_beta: lambda_min(Sigma) must be positive (Sigma not PD)");
  }
  return 8.0 * r / std::sqrt(lambda_min_sigma);
}

TheoryConstants theory_constants(const EnvConfig& env, double delta, std::int64_t sigma_samples,
                                 RandomStream& rng) {
  env.validate();
  TheoryConstants c;
  c.kappa = compute_kappa_sigmoid(env.r);
  c.lambda_min_sigma = extreme_eigenvalues(estimate_sigma(env, sigma_samples, rng)).lambda_min;
  c.beta = compute_beta(env.r, c.lambda_min_sigma);
  c.tau_rate = env.r * env.r / c.lambda_min_sigma * std::log(env.d / delta);
  return c;
}

ScaledSphereSampler::ScaledSphereSampler(int d) : d_(d) {
  if (d < 1) throw ConfigError("ScaledSphereSampler: d must be >= 1");
}

void ScaledSphereSampler::sample_into(Eigen::Ref<Vec> out, RandomStream& rng) const {
  out = sample_unit_sphere(d_, rng) * std::sqrt(static_cast<double>(d_));
}

double spectral_deviation(std::span<const Vec> probes) {
  if (probes.empty()) throw ConfigError("spectral_deviation: no probes");
  const Eigen::Index d = probes.front().size();
  SymMatrix m = SymMatrix::Zero(d, d);
  for (const Vec& z : probes) m.selfadjointView<Eigen::Lower>().rankUpdate(z);
  SymMatrix full = m.selfadjointView<Eigen::Lower>();
  full /= static_cast<double>(probes.size());
  full -= SymMatrix::Identity(d, d);
  const EigenRange e = extreme_eigenvalues(full);
  return std::max(std::abs(e.lambda_min), std::abs(e.lambda_max));
}

double check_concentration(const IsotropicSampler& sampler, int tau, double epsilon, int n_trials,
                           RandomStream& rng) {
  if (tau < 1) throw ConfigError("check_concentration: tau must be >= 1");
  if (n_trials < 1) throw ConfigError("check_concentration: n_trials must be >= 1");
  std::vector<Vec> probes(static_cast<std::size_t>(tau), Vec(sampler.dim()));
  int failures = 0;
  for (int trial = 0; trial < n_trials; ++trial) {
    for (auto& z : probes) sampler.sample_into(z, rng);
    if (spectral_deviation(probes) > epsilon) ++failures;
  }
  return static_cast<double>(failures) / n_trials;
}

double check_concentration(int d, int tau, double epsilon, int n_trials, RandomStream& rng) {
  return check_concentration(ScaledSphereSampler(d), tau, epsilon, n_trials, rng);
}

ConcentrationScan concentration_scan(int d, double epsilon, double delta, int n_trials, int tau_start,
                                     int tau_max, RandomStream& rng) {
  if (tau_start < 1 || tau_max < tau_start) throw ConfigError("concentration_scan: bad tau range");
  ConcentrationScan scan;
  const ScaledSphereSampler sampler(d);
  for (int tau = tau_start; tau <= tau_max; tau *= 2) {
    const double rate = check_concentration(sampler, tau, epsilon, n_trials, rng);
    if (!scan.points.empty()) {
      const double prev = scan.points.back().failure_rate;
      const double se = std::sqrt((prev * (1.0 - prev) + rate * (1.0 - rate)) / n_trials);
      if (rate > prev + 4.0 * se) scan.nonincreasing_within_noise = false;
    }
    scan.points.push_back({tau, rate});
    if (scan.tau_found == 0 && rate <= delta) scan.tau_found = tau;
  }
  return scan;
}

bool check_good_vector(std::span<const Vec> probes, double epsilon, int n_directions,
                       RandomStream& rng) {
  if (probes.empty()) throw ConfigError("check_good_vector: empty probe list");
  const Eigen::Index d = probes.front().size();
  Eigen::MatrixXd z(d, static_cast<Eigen::Index>(probes.size()));
  for (std::size_t i = 0; i < probes.size(); ++i) z.col(static_cast<Eigen::Index>(i)) = probes[i];
  for (int i = 0; i < n_directions; ++i) {
    const Vec v = sample_unit_sphere(static_cast<int>(d), rng);
    const double best = (z.transpose() * v).array().square().maxCoeff();
    if (best < 1.0 - epsilon) return false;
  }
  return true;
}

double check_lambda_min_condition(const RunConfig& cfg, int n_runs) {
  if (cfg.tau < 2) throw ConfigError("check_lambda_min_condition: tau must be >= 2");
  if (n_runs < 1) throw ConfigError("check_lambda_min_condition: n_runs must be >= 1");
  int ok = 0;
  for (int run = 0; run < n_runs; ++run) {
    const ExplorationResult ex = run_exploration(cfg, run);
    if (min_eig_quadform_check(ex.design, 1.0)) ++ok;
  }
  return static_cast<double>(ok) / n_runs;
}

namespace {

// ||x - x'||_A / max_y ||x - y||_A for one random triple, using
// ||u||_A^2 = ||B u||^2 + eps ||u||^2 for A = B^T B + eps I.
double richness_probe(const Eigen::MatrixXd& hist, const UniformBall& ball, RandomStream& rng) {
  constexpr double kRidge = 1e-6;
  const Eigen::Index d = hist.rows();
  Eigen::MatrixXd b(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) b(i, j) = rng.normal();
  }
  const Vec x = ball.sample(rng);
  const Vec xp = ball.sample(rng);
  auto a_norm_sq = [&](const Vec& u) { return (b * u).squaredNorm() + kRidge * u.squaredNorm(); };

  const Eigen::MatrixXd diffs = (-hist).colwise() + x;
  const Eigen::MatrixXd bd = b * diffs;
  const double denom_sq =
      (bd.colwise().squaredNorm() + kRidge * diffs.colwise().squaredNorm()).maxCoeff();
  const double num = std::sqrt(a_norm_sq(x - xp));
  if (denom_sq <= 0.0) return num > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  return num / std::sqrt(denom_sq);
}

Eigen::MatrixXd as_columns(std::span<const Vec> history) {
  const Eigen::Index d = history.front().size();
  Eigen::MatrixXd hist(d, static_cast<Eigen::Index>(history.size()));
  for (std::size_t i = 0; i < history.size(); ++i) hist.col(static_cast<Eigen::Index>(i)) = history[i];
  return hist;
}

}  // namespace

bool richness_inequality_holds(std::span<const Vec> history, const Vec& x, const Vec& x_prime,
                               const SymMatrix& a, double beta) {
  if (history.empty()) throw ConfigError("richness_inequality_holds: empty history");
  double best = 0.0;
  for (const Vec& y : history) best = std::max(best, weighted_norm(x - y, a));
  return weighted_norm(x - x_prime, a) <= beta * best + 1e-12;
}

bool check_rich_history(std::span<const Vec> history, double r, double beta, int n_probes,
                        RandomStream& rng) {
  if (history.empty()) throw ConfigError("check_rich_history: empty history");
  const Eigen::MatrixXd hist = as_columns(history);
  const UniformBall ball(static_cast<int>(hist.rows()), r);
  for (int i = 0; i < n_probes; ++i) {
    if (richness_probe(hist, ball, rng) > beta) return false;
  }
  return true;
}

double max_richness_ratio(std::span<const Vec> history, double r, int n_probes, RandomStream& rng) {
  if (history.empty()) throw ConfigError("max_richness_ratio: empty history");
  const Eigen::MatrixXd hist = as_columns(history);
  const UniformBall ball(static_cast<int>(hist.rows()), r);
  double worst = 0.0;
  for (int i = 0; i < n_probes; ++i) worst = std::max(worst, richness_probe(hist, ball, rng));
  return worst;
}

}  // namespace roam
