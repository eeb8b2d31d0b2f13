#pragma once

#include <span>

#include <Eigen/Dense>

namespace roam {

using Vec = Eigen::VectorXd;
using SymMatrix = Eigen::MatrixXd;

/// True when |m(i,j) - m(j,i)| <= tol * max(1, |m(i,j)|) for every entry.
bool is_symmetric(const SymMatrix& m, double tol = 1e-12);

/// Replaces m by (m + m^T) / 2.
void symmetrize(SymMatrix& m);

/// sqrt(z^T m z). Throws NumericError on dimension mismatch or when the
/// quadratic form is below -1e-12 (m is not PSD). Tiny negative rounding is
/// clamped to zero.
double weighted_norm(const Vec& z, const SymMatrix& m);

struct EigenRange {
  double lambda_min;
  double lambda_max;
};

/// Smallest and largest eigenvalue of a symmetric matrix.
EigenRange extreme_eigenvalues(const SymMatrix& m);

/// lambda_min(m) >= threshold.
bool min_eig_quadform_check(const SymMatrix& m, double threshold);

/// Principal square root and inverse square root of a symmetric PD matrix.
SymMatrix sym_sqrt(const SymMatrix& m);
SymMatrix sym_inv_sqrt(const SymMatrix& m);

/// max_ij |(a b - I)_ij|
double identity_residual(const SymMatrix& a, const SymMatrix& b);

/// Design matrix V together with its inverse. The inverse is maintained with
/// rank-one updates and recomputed from V by a direct solve every
/// `refresh_period` updates.
class DesignState {
 public:
  static constexpr int kDefaultRefreshPeriod = 256;

  /// v must be symmetric positive definite.
  explicit DesignState(SymMatrix v, int refresh_period = kDefaultRefreshPeriod);

  /// V = ridge * I + sum z z^T over the probes.
  static DesignState from_probes(std::span<const Vec> probes, Eigen::Index dim, double ridge = 0.0,
                                 int refresh_period = kDefaultRefreshPeriod);

  /// V += z z^T. A zero probe leaves the state untouched.
  void rank_one_update(const Vec& z);

  /// ||z||_{V^{-1}}
  double inverse_norm(const Vec& z) const;

  const SymMatrix& v() const noexcept { return v_; }
  const SymMatrix& v_inv() const noexcept { return v_inv_; }
  int update_count() const noexcept { return update_count_; }
  int refresh_period() const noexcept { return refresh_period_; }
  Eigen::Index dim() const noexcept { return v_.rows(); }

  /// Recompute v_inv from v.
  void refresh();

 private:
  SymMatrix v_;
  SymMatrix v_inv_;
  int update_count_ = 0;
  int refresh_period_;
};

}  // namespace roam
