#include "roam/env.hpp"

#include <cmath>
#include <string>

#include "roam/errors.hpp"

namespace roam {

void EnvConfig::validate() const {
  if (d < 1) throw ConfigError("EnvConfig: d must be >= 1");
  if (k < 2) throw ConfigError("EnvConfig: k must be >= 2");
  if (!(r > 0.0) || !std::isfinite(r)) throw ConfigError("EnvConfig: r must be positive");
}

Vec ContextDistribution::sample(RandomStream& rng) const {
  Vec out(dim());
  sample_into(out, rng);
  return out;
}

UniformBall::UniformBall(int d, double r) : d_(d), r_(r) {
  if (d < 1) throw ConfigError("UniformBall: d must be >= 1");
  if (!(r > 0.0)) throw ConfigError("UniformBall: r must be positive");
}

void UniformBall::sample_into(Eigen::Ref<Vec> out, RandomStream& rng) const {
  double sq = 0.0;
  do {
    sq = 0.0;
    for (int i = 0; i < d_; ++i) {
      out(i) = rng.normal();
      sq += out(i) * out(i);
    }
  } while (sq == 0.0);
  const double radius = r_ * std::pow(rng.uniform(), 1.0 / d_);
  out *= radius / std::sqrt(sq);
}

Vec sample_unit_sphere(int d, RandomStream& rng) {
  Vec v(d);
  double n = 0.0;
  do {
    for (int i = 0; i < d; ++i) v(i) = rng.normal();
    n = v.norm();
  } while (n == 0.0);
  return v / n;
}

Vec sample_theta_star(const EnvConfig& cfg, RandomStream& rng) {
  if (cfg.d < 1) throw ConfigError("sample_theta_star: d must be >= 1");
  switch (cfg.theta_mode) {
    case ThetaMode::unit_sphere:
      return sample_unit_sphere(cfg.d, rng);
    case ThetaMode::unit_ball_then_normalize: {
      const UniformBall ball(cfg.d, 1.0);
      Vec v(cfg.d);
      do {
        ball.sample_into(v, rng);
      } while (v.norm() == 0.0);
      return v / v.norm();
    }
  }
  throw ConfigError("sample_theta_star: unknown theta mode");
}

ContextSet sample_context_set(const EnvConfig& cfg, RandomStream& rng) {
  return sample_context_set(UniformBall(cfg.d, cfg.r), cfg.k, rng);
}

ContextSet sample_context_set(const ContextDistribution& dist, int k, RandomStream& rng) {
  if (k < 1) throw ConfigError("sample_context_set: k must be >= 1");
  ContextSet ctx;
  ctx.items.resize(dist.dim(), k);
  for (int j = 0; j < k; ++j) dist.sample_into(ctx.items.col(j), rng);
  return ctx;
}

BestArm best_arm(const ContextSet& ctx, const Vec& theta) {
  if (ctx.empty()) throw ConfigError("best_arm: empty context set");
  if (ctx.dim() != theta.size()) throw NumericError("best_arm: dimension mismatch");
  const Vec util = ctx.items.transpose() * theta;
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < util.size(); ++i) {
    if (util(i) > util(best)) best = i;
  }
  return {static_cast<std::size_t>(best), ctx.items.col(best), util(best)};
}

SymMatrix estimate_sigma(const EnvConfig& cfg, std::int64_t n_samples, RandomStream& rng) {
  return estimate_sigma(UniformBall(cfg.d, cfg.r), n_samples, rng);
}

SymMatrix estimate_sigma(const ContextDistribution& dist, std::int64_t n_samples,
                         RandomStream& rng) {
  if (n_samples < 10000) {
    throw ConfigError("estimate_sigma: n_samples must be >= 10^4, got " + std::to_string(n_samples));
  }
  const int d = dist.dim();
  SymMatrix acc = SymMatrix::Zero(d, d);
  Vec x(d), y(d);
  for (std::int64_t i = 0; i < n_samples; ++i) {
    dist.sample_into(x, rng);
    dist.sample_into(y, rng);
    const Vec z = x - y;
    acc.selfadjointView<Eigen::Lower>().rankUpdate(z);
  }
  SymMatrix sigma = acc.selfadjointView<Eigen::Lower>();
  return sigma / static_cast<double>(n_samples);
}

}  // namespace roam
