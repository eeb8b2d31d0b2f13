#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "roam/errors.hpp"
#include "roam/linalg.hpp"

using roam::DesignState;
using roam::SymMatrix;
using roam::Vec;

namespace {

Vec random_vec(int d, std::mt19937_64& gen) {
  std::normal_distribution<double> nd;
  Vec v(d);
  for (int i = 0; i < d; ++i) v(i) = nd(gen);
  return v;
}

}  // namespace

TEST_CASE("weighted_norm of (1,1) under diag(2,3) is sqrt(5)") {
  SymMatrix m = SymMatrix::Zero(2, 2);
  m(0, 0) = 2.0;
  m(1, 1) = 3.0;
  CHECK(roam::weighted_norm(Vec::Ones(2), m) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-15));
  CHECK(roam::weighted_norm(Vec::Zero(2), m) == 0.0);
}

TEST_CASE("weighted_norm rejects mismatched and indefinite inputs") {
  CHECK_THROWS_AS(roam::weighted_norm(Vec::Ones(3), SymMatrix::Identity(2, 2)), roam::NumericError);
  SymMatrix neg = -SymMatrix::Identity(2, 2);
  CHECK_THROWS_AS(roam::weighted_norm(Vec::Ones(2), neg), roam::NumericError);
  // Rounding-level negatives are clamped instead of rejected.
  SymMatrix tiny = SymMatrix::Zero(1, 1);
  tiny(0, 0) = -1e-14;
  CHECK(roam::weighted_norm(Vec::Ones(1), tiny) == 0.0);
}

TEST_CASE("eigenvalues of [[2,1],[1,2]] are 1 and 3") {
  SymMatrix m(2, 2);
  m << 2, 1, 1, 2;
  const auto e = roam::extreme_eigenvalues(m);
  CHECK(e.lambda_min == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(e.lambda_max == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(roam::min_eig_quadform_check(m, 1.0 - 1e-12));
  CHECK_FALSE(roam::min_eig_quadform_check(m, 1.01));
}

TEST_CASE("extreme_eigenvalues rejects non-symmetric and empty matrices") {
  SymMatrix m(2, 2);
  m << 1, 2, 0, 1;
  CHECK_FALSE(roam::is_symmetric(m));
  CHECK_THROWS_AS(roam::extreme_eigenvalues(m), roam::NumericError);
  CHECK_THROWS_AS(roam::extreme_eigenvalues(SymMatrix(0, 0)), roam::NumericError);
  CHECK_THROWS_AS(roam::extreme_eigenvalues(SymMatrix::Zero(2, 3)), roam::NumericError);
}

TEST_CASE("extreme eigenvalues agree with the bisection oracle on random PSD matrices") {
  std::mt19937_64 gen(11);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    // Mix of full-rank and rank-deficient matrices.
    const oracle::Mat a = oracle::random_psd(5, 2 + trial % 5, gen);
    const auto e = roam::extreme_eigenvalues(oracle::to_eigen(a));
    worst = std::max(worst, std::abs(e.lambda_min - oracle::lambda_min(a)));
    worst = std::max(worst, std::abs(e.lambda_max - oracle::lambda_max(a)));
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("Rayleigh quotient is sandwiched by the extreme eigenvalues") {
  std::mt19937_64 gen(12);
  for (int trial = 0; trial < 200; ++trial) {
    const SymMatrix m = oracle::to_eigen(oracle::random_psd(4, 4, gen));
    const auto e = roam::extreme_eigenvalues(m);
    const Vec z = random_vec(4, gen);
    const double q = z.dot(m * z);
    CHECK(q >= e.lambda_min * z.squaredNorm() - 1e-9);
    CHECK(q <= e.lambda_max * z.squaredNorm() + 1e-9);
  }
}

TEST_CASE("congruence B^T A B keeps eigenvalues within the product bounds") {
  std::mt19937_64 gen(13);
  for (int trial = 0; trial < 100; ++trial) {
    const SymMatrix a = oracle::to_eigen(oracle::random_psd(4, 6, gen));
    SymMatrix b(4, 4);
    for (int j = 0; j < 4; ++j) b.col(j) = random_vec(4, gen);
    SymMatrix c = b.transpose() * a * b;
    roam::symmetrize(c);
    const SymMatrix btb = b.transpose() * b;
    const auto ea = roam::extreme_eigenvalues(a);
    const auto eb = roam::extreme_eigenvalues(btb);
    const auto ec = roam::extreme_eigenvalues(c);
    const double scale = ea.lambda_max * eb.lambda_max;
    CHECK(ec.lambda_min >= ea.lambda_min * eb.lambda_min - 1e-9 * scale);
    CHECK(ec.lambda_max <= scale * (1.0 + 1e-9));
  }
}

TEST_CASE("symmetric square roots") {
  std::mt19937_64 gen(14);
  const SymMatrix m = oracle::to_eigen(oracle::random_psd(3, 5, gen));
  const SymMatrix s = roam::sym_sqrt(m);
  CHECK((s * s - m).cwiseAbs().maxCoeff() < 1e-10);
  const SymMatrix w = roam::sym_inv_sqrt(m);
  CHECK(roam::identity_residual(w * m, w) < 1e-10);
  CHECK_THROWS_AS(roam::sym_inv_sqrt(SymMatrix::Zero(2, 2)), roam::NumericError);
  CHECK_THROWS_AS(roam::sym_sqrt(-SymMatrix::Identity(2, 2)), roam::NumericError);
}

TEST_CASE("rank-one update of I3 with z = (1,1,1) gives I - ones/4") {
  DesignState s(SymMatrix::Identity(3, 3));
  s.rank_one_update(Vec::Ones(3));
  const SymMatrix expected = SymMatrix::Identity(3, 3) - 0.25 * SymMatrix::Ones(3, 3);
  CHECK((s.v_inv() - expected).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((s.v() - (SymMatrix::Identity(3, 3) + SymMatrix::Ones(3, 3))).cwiseAbs().maxCoeff() == 0.0);
  CHECK(s.update_count() == 1);
}

TEST_CASE("design inverse matches the Gauss-Jordan oracle") {
  std::mt19937_64 gen(15);
  SymMatrix v = oracle::to_eigen(oracle::random_psd(4, 8, gen));
  DesignState s(v);
  for (int i = 0; i < 10; ++i) {
    const Vec z = random_vec(4, gen);
    v += z * z.transpose();
    s.rank_one_update(z);
  }
  const SymMatrix inv = oracle::to_eigen(oracle::inverse(oracle::from_eigen(v)));
  CHECK((s.v_inv() - inv).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(s.inverse_norm(Vec::Unit(4, 0)) == doctest::Approx(std::sqrt(inv(0, 0))).epsilon(1e-10));
}

TEST_CASE("1000 rank-one updates with refresh 256 keep V V^-1 close to I") {
  std::mt19937_64 gen(16);
  DesignState s(SymMatrix::Identity(5, 5), 256);
  for (int i = 0; i < 1000; ++i) s.rank_one_update(random_vec(5, gen));
  CHECK(s.update_count() == 1000);
  CHECK(roam::identity_residual(s.v(), s.v_inv()) <= 1e-8);
}

TEST_CASE("refresh happens exactly on multiples of the period") {
  std::mt19937_64 gen(17);
  DesignState s(SymMatrix::Identity(3, 3), 4);
  for (int i = 0; i < 4; ++i) s.rank_one_update(random_vec(3, gen));
  DesignState fresh(s.v(), 4);
  CHECK((s.v_inv() - fresh.v_inv()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("zero probe leaves the design untouched") {
  DesignState s(2.0 * SymMatrix::Identity(2, 2));
  const SymMatrix before = s.v_inv();
  s.rank_one_update(Vec::Zero(2));
  CHECK(s.update_count() == 0);
  CHECK(s.v_inv() == before);
}

TEST_CASE("design state error paths") {
  CHECK_THROWS_AS(DesignState(SymMatrix::Zero(2, 2)), roam::NumericError);
  CHECK_THROWS_AS(DesignState(SymMatrix::Identity(2, 2), 0), roam::ConfigError);
  SymMatrix asym(2, 2);
  asym << 1, 0.5, 0, 1;
  CHECK_THROWS_AS(DesignState{asym}, roam::NumericError);
  DesignState s(SymMatrix::Identity(2, 2));
  CHECK_THROWS_AS(s.rank_one_update(Vec::Ones(3)), roam::NumericError);
}

TEST_CASE("from_probes equals ridge plus the explicit sum of outer products") {
  std::mt19937_64 gen(18);
  std::vector<Vec> probes;
  SymMatrix brute = 0.5 * SymMatrix::Identity(3, 3);
  for (int i = 0; i < 6; ++i) {
    probes.push_back(random_vec(3, gen));
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) brute(r, c) += probes.back()(r) * probes.back()(c);
    }
  }
  const DesignState s = DesignState::from_probes(probes, 3, 0.5);
  CHECK((s.v() - brute).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(DesignState::from_probes(probes, 4, 1.0), roam::NumericError);
}

TEST_CASE("symmetrize and is_symmetric") {
  SymMatrix m(2, 2);
  m << 1, 2, 4, 1;
  roam::symmetrize(m);
  CHECK(m(0, 1) == 3.0);
  CHECK(m(1, 0) == 3.0);
  CHECK(roam::is_symmetric(m));
  CHECK_FALSE(roam::is_symmetric(SymMatrix::Zero(2, 3)));
}
