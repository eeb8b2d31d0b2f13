#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "roam/choice.hpp"
#include "roam/errors.hpp"

using roam::LinkFunction;
using roam::UserModel;
using roam::Vec;

TEST_CASE("sigmoid reference values") {
  CHECK(roam::sigmoid(std::log(3.0)) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(roam::sigmoid(0.4) == doctest::Approx(0.59868766).epsilon(1e-8));
  CHECK(roam::sigmoid(0.0) == 0.5);
  CHECK(roam::sigmoid_derivative(0.0) == 0.25);
}

TEST_CASE("sigmoid stays finite and ordered at extreme arguments") {
  CHECK(roam::sigmoid(800.0) == 1.0);
  CHECK(roam::sigmoid(-800.0) >= 0.0);
  CHECK(std::isfinite(roam::sigmoid(-800.0)));
  CHECK(roam::sigmoid(-40.0) > 0.0);
  CHECK(roam::sigmoid_derivative(-800.0) >= 0.0);
  CHECK(std::isfinite(roam::sigmoid_derivative(800.0)));
}

TEST_CASE("link symmetry, monotonicity and derivative") {
  const LinkFunction f = LinkFunction::logistic();
  double prev = 0.0;
  for (double u = -10.0; u <= 10.0; u += 0.125) {
    CHECK(f.eval(u) + f.eval(-u) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(f.eval(u) > prev);
    prev = f.eval(u);
    const double h = 1e-5;
    const double fd = (f.eval(u + h) - f.eval(u - h)) / (2 * h);
    CHECK(f.deriv(u) == doctest::Approx(fd).epsilon(1e-7));
    CHECK(f.deriv(u) == doctest::Approx(f.eval(u) * (1 - f.eval(u))).epsilon(1e-12));
  }
}

TEST_CASE("custom link dispatches to the supplied functions") {
  // Probit-like link via erf.
  auto eval = [](double u) { return 0.5 * std::erfc(-u / std::sqrt(2.0)); };
  auto deriv = [](double u) { return std::exp(-0.5 * u * u) / std::sqrt(2.0 * M_PI); };
  const LinkFunction f = LinkFunction::custom(eval, deriv);
  CHECK(f.kind() == LinkFunction::Kind::custom);
  CHECK(f.eval(0.0) == doctest::Approx(0.5));
  CHECK(f.eval(1.0) == doctest::Approx(0.8413447461).epsilon(1e-9));
  CHECK(f.deriv(0.0) == doctest::Approx(0.3989422804).epsilon(1e-9));
}

TEST_CASE("user model requires a unit preference vector") {
  CHECK_NOTHROW(UserModel(Vec::Unit(3, 1)));
  CHECK_THROWS_AS(UserModel(Vec::Ones(3)), roam::ConfigError);
  CHECK_THROWS_AS(UserModel(Vec::Zero(2)), roam::ConfigError);
}

TEST_CASE("win probability is the link of the utility gap") {
  Vec theta(2);
  theta << 0.6, 0.8;
  const UserModel user(theta);
  Vec x(2), y(2);
  x << 1.0, 0.5;
  y << 0.2, -0.1;
  const double gap = (x - y).dot(theta);
  CHECK(roam::win_probability(user, x, y) == doctest::Approx(roam::sigmoid(gap)));
  CHECK(roam::win_probability(user, x, y) + roam::win_probability(user, y, x) ==
        doctest::Approx(1.0));
  CHECK(roam::win_probability(user, x, x) == 0.5);
}

TEST_CASE("sampled comparisons match the win probability within four sigma") {
  Vec theta = Vec::Unit(3, 0);
  const UserModel user(theta);
  Vec x = Vec::Zero(3), y = Vec::Zero(3);
  x(0) = 0.7;
  y(0) = -0.3;
  const double p = roam::win_probability(user, x, y);
  roam::RandomStream rng(21);
  const long n = 100000;
  long wins = 0;
  for (long i = 0; i < n; ++i) {
    const int o = roam::sample_comparison(user, x, y, rng);
    REQUIRE((o == 0 || o == 1));
    wins += o;
  }
  CHECK(oracle::within_binomial(double(wins) / n, p, n));
}
