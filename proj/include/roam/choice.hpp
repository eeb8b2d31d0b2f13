#pragma once

#include <functional>

#include "roam/linalg.hpp"
#include "roam/random.hpp"

namespace roam {

/// Logistic function, stable for large |u|.
double sigmoid(double u);
/// sigma'(u) = sigma(u) (1 - sigma(u))
double sigmoid_derivative(double u);

/// Strictly increasing F: R -> (0, 1) with F(u) + F(-u) = 1, plus F'.
/// The sigmoid is built in and dispatched without an indirect call.
class LinkFunction {
 public:
  enum class Kind { sigmoid, custom };

  static LinkFunction logistic() { return LinkFunction(); }
  static LinkFunction custom(std::function<double(double)> eval, std::function<double(double)> deriv);

  LinkFunction() = default;

  Kind kind() const noexcept { return kind_; }

  double eval(double u) const { return kind_ == Kind::sigmoid ? sigmoid(u) : eval_(u); }
  double deriv(double u) const {
    return kind_ == Kind::sigmoid ? sigmoid_derivative(u) : deriv_(u);
  }

 private:
  Kind kind_ = Kind::sigmoid;
  std::function<double(double)> eval_;
  std::function<double(double)> deriv_;
};

/// The simulated user: unit-norm preference vector plus link.
struct UserModel {
  UserModel(Vec theta_star, LinkFunction link = LinkFunction::logistic());

  Vec theta_star;
  LinkFunction link;
};

/// P(user prefers x over y) = F(<x - y, theta*>).
double win_probability(const UserModel& user, const Vec& x, const Vec& y);

/// Bernoulli draw of the comparison; 1 means x was preferred.
int sample_comparison(const UserModel& user, const Vec& x, const Vec& y, RandomStream& rng);

}  // namespace roam
