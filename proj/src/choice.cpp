#include "roam/choice.hpp"

#include <cmath>

#include "roam/errors.hpp"

namespace roam {

double sigmoid(double u) {
  if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
  const double e = std::exp(u);
  return e / (1.0 + e);
}

double sigmoid_derivative(double u) {
  const double e = std::exp(-std::abs(u));
  const double denom = 1.0 + e;
  return e / (denom * denom);
}

LinkFunction LinkFunction::custom(std::function<double(double)> eval,
                                  std::function<double(double)> deriv) {
  if (!eval || !deriv) throw ConfigError("custom link requires both eval and deriv");
  LinkFunction link;
  link.kind_ = Kind::custom;
  link.eval_ = std::move(eval);
  link.deriv_ = std::move(deriv);
  return link;
}

UserModel::UserModel(Vec theta, LinkFunction f) : theta_star(std::move(theta)), link(std::move(f)) {
  if (std::abs(theta_star.norm() - 1.0) > 1e-10) {
    throw ConfigError("UserModel: theta_star must have unit norm");
  }
}

double win_probability(const UserModel& user, const Vec& x, const Vec& y) {
  if (x.size() != user.theta_star.size() || y.size() != user.theta_star.size()) {
    throw NumericError("win_probability: dimension mismatch");
  }
  return user.link.eval((x - y).dot(user.theta_star));
}

int sample_comparison(const UserModel& user, const Vec& x, const Vec& y, RandomStream& rng) {
  return rng.bernoulli(win_probability(user, x, y)) ? 1 : 0;
}

}  // namespace roam
