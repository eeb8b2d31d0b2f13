#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "roam/choice.hpp"
#include "roam/diagnostics.hpp"
#include "roam/errors.hpp"

using namespace roam;

namespace {

// Rademacher signs in d = 1: isotropic and exactly unit norm.
class SignSampler final : public IsotropicSampler {
 public:
  int dim() const override { return 1; }
  void sample_into(Eigen::Ref<Vec> out, RandomStream& rng) const override {
    out(0) = rng.bernoulli(0.5) ? 1.0 : -1.0;
  }
};

double grid_kappa(double r) {
  double best = 1.0;
  const int n = 10000;
  for (int i = 0; i <= n; ++i) {
    const double u = -4.0 * r + 8.0 * r * i / n;
    const double s = 1.0 / (1.0 + std::exp(-u));
    best = std::min(best, s * (1.0 - s));
  }
  return best;
}

}  // namespace

TEST_CASE("kappa equals the grid-search minimum of the sigmoid slope") {
  CHECK(compute_kappa_sigmoid(1.0) == doctest::Approx(0.017663).epsilon(1e-4));
  for (double r : {0.1, 0.5, 1.0, 2.0}) {
    CHECK(std::abs(compute_kappa_sigmoid(r) - grid_kappa(r)) <= 1e-6);
  }
  CHECK(compute_kappa_sigmoid(1e-9) == doctest::Approx(0.25));
  CHECK(compute_kappa_sigmoid(2.0) < compute_kappa_sigmoid(1.0));
  CHECK_THROWS_AS(compute_kappa_sigmoid(0.0), ConfigError);
}

TEST_CASE("alpha formula and monotonicity") {
  CHECK(compute_alpha(1, 2, 1.0 / std::numbers::e, 1.0) ==
        doctest::Approx(std::sqrt(std::log(2.0) + 1.0)).epsilon(1e-14));
  CHECK(compute_alpha(10, 5, 0.1, 0.5) == doctest::Approx(0.5 * compute_alpha(10, 5, 0.1, 0.25)));
  CHECK(compute_alpha(100, 5, 0.1, 1.0) > compute_alpha(10, 5, 0.1, 1.0));
  CHECK(compute_alpha(10, 6, 0.1, 1.0) > compute_alpha(10, 5, 0.1, 1.0));
  CHECK(compute_alpha(10, 5, 0.05, 1.0) > compute_alpha(10, 5, 0.1, 1.0));
  CHECK_THROWS_AS(compute_alpha(0, 2, 0.1, 1.0), ConfigError);
  CHECK_THROWS_AS(compute_alpha(1, 0, 0.1, 1.0), ConfigError);
  CHECK_THROWS_AS(compute_alpha(1, 2, 1.0, 1.0), ConfigError);
  CHECK_THROWS_AS(compute_alpha(1, 2, 0.1, 0.0), ConfigError);
}

TEST_CASE("beta values and scaling") {
  CHECK(compute_beta(1.0, 1.0) == 8.0);
  CHECK(compute_beta(1.0, 2.0 / 7.0) == doctest::Approx(8.0 * std::sqrt(3.5)));
  CHECK(compute_beta(3.0, 0.5) == doctest::Approx(3.0 * compute_beta(1.0, 0.5)));
  CHECK_THROWS_AS(compute_beta(1.0, 0.0), NumericError);
  CHECK_THROWS_AS(compute_beta(1.0, -1.0), NumericError);
}

TEST_CASE("Monte-Carlo theory constants for the d = 5 uniform ball") {
  EnvConfig env;
  RandomStream rng(61);
  const TheoryConstants c = theory_constants(env, 0.1, 200000, rng);
  CHECK(c.lambda_min_sigma == doctest::Approx(2.0 / 7.0).epsilon(0.05));
  CHECK(c.beta == doctest::Approx(8.0 * std::sqrt(3.5)).epsilon(0.03));
  CHECK(c.kappa == compute_kappa_sigmoid(1.0));
  CHECK(c.alpha_at(10, 5, 0.1) == compute_alpha(10, 5, 0.1, c.kappa));
}

TEST_CASE("spectral deviation of exact isotropic designs is zero") {
  const std::vector<Vec> signs = {Vec::Constant(1, 1.0), Vec::Constant(1, -1.0)};
  CHECK(spectral_deviation(signs) == 0.0);
  RandomStream rng(62);
  CHECK(check_concentration(SignSampler{}, 7, 1e-12, 50, rng) == 0.0);
  CHECK(check_concentration(1, 7, 1e-12, 50, rng) == 0.0);
  const std::vector<Vec> basis = {std::sqrt(2.0) * Vec::Unit(2, 0), std::sqrt(2.0) * Vec::Unit(2, 1)};
  CHECK(spectral_deviation(basis) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK_THROWS_AS(spectral_deviation(std::vector<Vec>{}), ConfigError);
}

TEST_CASE("scaled sphere probes are isotropic with norm sqrt(d)") {
  const ScaledSphereSampler s(5);
  RandomStream rng(63);
  Vec z(5);
  for (int i = 0; i < 100; ++i) {
    s.sample_into(z, rng);
    CHECK(z.norm() == doctest::Approx(std::sqrt(5.0)));
  }
  CHECK_THROWS_AS(ScaledSphereSampler(0), ConfigError);
}

TEST_CASE("concentration at d = 5, tau = 2000, eps = 0.5 fails at most 10% of the time") {
  RandomStream rng(64);
  const double rate = check_concentration(5, 2000, 0.5, 200, rng);
  CHECK(rate <= 0.1 + 4.0 * std::sqrt(0.1 * 0.9 / 200));
  CHECK_THROWS_AS(check_concentration(5, 0, 0.5, 10, rng), ConfigError);
  CHECK_THROWS_AS(check_concentration(5, 10, 0.5, 0, rng), ConfigError);
}

TEST_CASE("concentration scan finds a tau and is monotone within noise") {
  RandomStream rng(65);
  const ConcentrationScan scan = concentration_scan(5, 0.5, 0.1, 200, 1, 4096, rng);
  REQUIRE(scan.points.size() == 13);
  CHECK(scan.tau_found > 0);
  CHECK(scan.tau_found <= 4096);
  CHECK(scan.nonincreasing_within_noise);
  CHECK(scan.points.front().failure_rate == 1.0);
  CHECK_THROWS_AS(concentration_scan(5, 0.5, 0.1, 10, 8, 4, rng), ConfigError);
}

TEST_CASE("good vector: signed basis passes, a single probe fails") {
  const int d = 4;
  std::vector<Vec> basis;
  for (int i = 0; i < d; ++i) {
    basis.push_back(Vec::Unit(d, i));
    basis.push_back(-Vec::Unit(d, i));
  }
  RandomStream rng(66);
  CHECK(check_good_vector(basis, 1.0 - 1.0 / d + 1e-12, 2000, rng));
  const std::vector<Vec> single = {Vec::Unit(3, 0)};
  CHECK_FALSE(check_good_vector(single, 0.5, 1000, rng));
  CHECK_THROWS_AS(check_good_vector(std::vector<Vec>{}, 0.5, 10, rng), ConfigError);
}

TEST_CASE("whitened exploration probes admit a good vector in most default runs") {
  const RunConfig cfg = RunConfig::defaults();
  RandomStream rng(67);
  const SymMatrix whiten = sym_inv_sqrt(estimate_sigma(cfg.env, 1'000'000, rng));
  int ok = 0;
  for (int run = 0; run < 100; ++run) {
    const ExplorationResult ex = run_exploration(cfg, run);
    std::vector<Vec> white;
    for (const auto& rec : ex.dataset) white.push_back(whiten * rec.z);
    ok += check_good_vector(white, 0.9, 1000, rng);
  }
  CHECK(ok >= 95);
}

TEST_CASE("lambda_min condition over exploration lengths") {
  RunConfig cfg = RunConfig::defaults();
  CHECK(check_lambda_min_condition(cfg, 100) >= 0.95);
  cfg.tau = 2;
  CHECK(check_lambda_min_condition(cfg, 50) <= 0.05);
  double prev = 0.0;
  for (int tau : {10, 25, 50}) {
    cfg.tau = tau;
    const double frac = check_lambda_min_condition(cfg, 100);
    CHECK(frac >= prev - 0.05);
    prev = frac;
  }
  cfg.tau = 1;
  cfg.mle.reg_lambda = 0.1;
  CHECK_THROWS_AS(check_lambda_min_condition(cfg, 10), ConfigError);
  cfg.tau = 50;
  CHECK_THROWS_AS(check_lambda_min_condition(cfg, 0), ConfigError);
}

TEST_CASE("richness inequality on hand-built cases") {
  const Vec x = Vec::Unit(2, 0);
  const std::vector<Vec> self = {x};
  CHECK(richness_inequality_holds(self, x, x, SymMatrix::Identity(2, 2), 1.0));
  const std::vector<Vec> far = {-Vec::Unit(2, 0)};
  // |x - x'| = sqrt(2), max_y |x - y| = 2.
  CHECK(richness_inequality_holds(far, x, Vec::Unit(2, 1), SymMatrix::Identity(2, 2), 1.0));
  CHECK_FALSE(richness_inequality_holds(self, x, Vec::Unit(2, 1), SymMatrix::Identity(2, 2), 1e6));
  CHECK_THROWS_AS(richness_inequality_holds(std::vector<Vec>{}, x, x, SymMatrix::Identity(2, 2), 1.0),
                  ConfigError);
}

TEST_CASE("rich history: dominant beta always passes") {
  RandomStream rng(68);
  const std::vector<Vec> history = {Vec::Zero(3), Vec::Unit(3, 1)};
  CHECK(check_rich_history(history, 1.0, 1e6, 2000, rng));
  CHECK(max_richness_ratio(history, 1.0, 2000, rng) <= 1e6);
  CHECK_THROWS_AS(check_rich_history(std::vector<Vec>{}, 1.0, 1.0, 10, rng), ConfigError);
  CHECK_THROWS_AS(max_richness_ratio(std::vector<Vec>{}, 1.0, 10, rng), ConfigError);
}

TEST_CASE("default exploration histories are beta-rich in most runs") {
  const RunConfig cfg = RunConfig::defaults();
  const double beta = compute_beta(cfg.env.r, 2.0 / 7.0);
  int ok = 0;
  for (int run = 0; run < 100; ++run) {
    const ExplorationResult ex = run_exploration(cfg, run);
    RandomStream rng = RandomStream::derive(cfg.master_seed, run, StreamTag::diagnostics);
    ok += check_rich_history(ex.history, cfg.env.r, beta, 10000, rng);
  }
  CHECK(ok >= 95);
}
