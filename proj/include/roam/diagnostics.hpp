#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "roam/env.hpp"
#include "roam/harness.hpp"
#include "roam/linalg.hpp"
#include "roam/random.hpp"

namespace roam {

/// inf of F'(<z, theta>) over ||z|| <= 2r, ||theta - theta*|| <= 1 for the
/// sigmoid. |<z, theta>| reaches 4r and sigma' decreases in |u|, so this is
/// sigma(4r) (1 - sigma(4r)).
double compute_kappa_sigmoid(double r);

/// Confidence radius (1/kappa) sqrt((d/2) log(1 + 2t/d) + log(1/delta)).
double compute_alpha(int t, int d, double delta, double kappa);

/// Richness factor 8 r / sqrt(lambda_min(Sigma)).
double compute_beta(double r, double lambda_min_sigma);

struct TheoryConstants {
  double kappa = 0.0;
  double beta = 0.0;
  double lambda_min_sigma = 0.0;
  /// r^2 / lambda_min(Sigma) * log(d / delta); the universal constant is left
  /// out and has to be found by scanning.
  double tau_rate = 0.0;

  double alpha_at(int t, int d, double delta) const { return compute_alpha(t, d, delta, kappa); }
};

/// Constants for the uniform-ball environment with Sigma estimated by
/// Monte Carlo.
TheoryConstants theory_constants(const EnvConfig& env, double delta, std::int64_t sigma_samples,
                                 RandomStream& rng);

/// Isotropic, bounded probe law used by the concentration checks.
class IsotropicSampler {
 public:
  virtual ~IsotropicSampler() = default;
  virtual int dim() const = 0;
  virtual void sample_into(Eigen::Ref<Vec> out, RandomStream& rng) const = 0;
};

/// Uniform on the sphere of radius sqrt(d): E[z z^T] = I and ||z|| = sqrt(d).
class ScaledSphereSampler final : public IsotropicSampler {
 public:
  explicit ScaledSphereSampler(int d);
  int dim() const override { return d_; }
  void sample_into(Eigen::Ref<Vec> out, RandomStream& rng) const override;

 private:
  int d_;
};

/// ||(1/tau) sum z z^T - I|| in spectral norm.
double spectral_deviation(std::span<const Vec> probes);

/// Fraction of n_trials where tau i.i.d. isotropic probes deviate from the
/// identity by more than epsilon.
double check_concentration(const IsotropicSampler& sampler, int tau, double epsilon, int n_trials,
                           RandomStream& rng);
/// Same with the built-in scaled-sphere sampler.
double check_concentration(int d, int tau, double epsilon, int n_trials, RandomStream& rng);

struct ScanPoint {
  int tau;
  double failure_rate;
};

struct ConcentrationScan {
  std::vector<ScanPoint> points;
  /// First tau whose failure rate is <= delta; 0 when none was found.
  int tau_found = 0;
  /// Each step's rate exceeds the previous one by no more than four
  /// two-sample binomial standard errors.
  bool nonincreasing_within_noise = true;
};

/// Doubling scan tau = tau_start, 2 tau_start, ... up to tau_max.
ConcentrationScan concentration_scan(int d, double epsilon, double delta, int n_trials, int tau_start,
                                     int tau_max, RandomStream& rng);

/// Sampled relaxation of inf_v max_t <z_t, v>^2 >= 1 - epsilon: draws
/// n_directions uniform unit vectors and requires every one to pass.
bool check_good_vector(std::span<const Vec> probes, double epsilon, int n_directions,
                       RandomStream& rng);

/// Fraction of runs whose exploration design satisfies lambda_min >= 1.
double check_lambda_min_condition(const RunConfig& cfg, int n_runs);

/// ||x - x'||_A <= beta max_{y in history} ||x - y||_A for one triple.
bool richness_inequality_holds(std::span<const Vec> history, const Vec& x, const Vec& x_prime,
                               const SymMatrix& a, double beta);

/// Sampled relaxation of beta-richness: n_probes random triples (x, x', A)
/// with x, x' uniform in the r-ball and A = B^T B + 1e-6 I for Gaussian B.
/// True iff ||x - x'||_A <= beta max_y ||x - y||_A for all of them.
bool check_rich_history(std::span<const Vec> history, double r, double beta, int n_probes,
                        RandomStream& rng);

/// Largest observed ||x - x'||_A / max_y ||x - y||_A over the probes; the
/// empirical richness factor of the history.
double max_richness_ratio(std::span<const Vec> history, double r, int n_probes, RandomStream& rng);

}  // namespace roam
