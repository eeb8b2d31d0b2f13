#pragma once

#include <cstddef>
#include <cstdint>

#include "roam/linalg.hpp"
#include "roam/random.hpp"

namespace roam {

enum class ThetaMode { unit_sphere, unit_ball_then_normalize };

struct EnvConfig {
  int d = 5;
  int k = 1000;
  double r = 1.0;
  ThetaMode theta_mode = ThetaMode::unit_sphere;

  void validate() const;
};

/// k candidate items stored column-wise (d x k).
struct ContextSet {
  Eigen::MatrixXd items;

  std::size_t size() const noexcept { return static_cast<std::size_t>(items.cols()); }
  bool empty() const noexcept { return items.cols() == 0; }
  Eigen::Index dim() const noexcept { return items.rows(); }
  Vec item(std::size_t i) const { return items.col(static_cast<Eigen::Index>(i)); }
};

/// Distribution P of individual context items, bounded by radius().
class ContextDistribution {
 public:
  virtual ~ContextDistribution() = default;
  virtual int dim() const = 0;
  virtual double radius() const = 0;
  /// Writes one draw into `out` (length dim()).
  virtual void sample_into(Eigen::Ref<Vec> out, RandomStream& rng) const = 0;

  Vec sample(RandomStream& rng) const;
};

/// Uniform on the closed ball of radius r in R^d: Gaussian direction times
/// r * U^{1/d}.
class UniformBall final : public ContextDistribution {
 public:
  UniformBall(int d, double r);
  int dim() const override { return d_; }
  double radius() const override { return r_; }
  void sample_into(Eigen::Ref<Vec> out, RandomStream& rng) const override;

 private:
  int d_;
  double r_;
};

/// Uniform direction on the unit sphere.
Vec sample_unit_sphere(int d, RandomStream& rng);

/// Unit-norm preference vector. Both modes produce the uniform law on the
/// sphere; unit_ball_then_normalize draws from the ball first.
Vec sample_theta_star(const EnvConfig& cfg, RandomStream& rng);

ContextSet sample_context_set(const EnvConfig& cfg, RandomStream& rng);
ContextSet sample_context_set(const ContextDistribution& dist, int k, RandomStream& rng);

struct BestArm {
  std::size_t index;
  Vec item;
  double utility;
};

/// argmax_x <x, theta>; ties go to the lowest index.
BestArm best_arm(const ContextSet& ctx, const Vec& theta);

/// Monte-Carlo estimate of E[(x - y)(x - y)^T] for x, y i.i.d. from the
/// context distribution. Requires n_samples >= 10^4.
SymMatrix estimate_sigma(const EnvConfig& cfg, std::int64_t n_samples, RandomStream& rng);
SymMatrix estimate_sigma(const ContextDistribution& dist, std::int64_t n_samples, RandomStream& rng);

}  // namespace roam
