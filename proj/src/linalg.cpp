#include "roam/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "roam/errors.hpp"

namespace roam {

namespace {

void require_square(const SymMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw NumericError(std::string(what) + ": matrix must be square and nonempty");
  }
}

void require_symmetric(const SymMatrix& m, const char* what) {
  require_square(m, what);
  if (!is_symmetric(m)) throw NumericError(std::string(what) + ": matrix is not symmetric");
}

SymMatrix direct_inverse(const SymMatrix& v) {
  Eigen::LLT<SymMatrix> llt(v);
  if (llt.info() != Eigen::Success) throw NumericError("design matrix is not positive definite");
  SymMatrix inv = llt.solve(SymMatrix::Identity(v.rows(), v.cols()));
  symmetrize(inv);
  return inv;
}

}  // namespace

bool is_symmetric(const SymMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < m.cols(); ++j) {
      if (std::abs(m(i, j) - m(j, i)) > tol * std::max(1.0, std::abs(m(i, j)))) return false;
    }
  }
  return true;
}

void symmetrize(SymMatrix& m) {
  m = (0.5 * (m + m.transpose())).eval();
}

double weighted_norm(const Vec& z, const SymMatrix& m) {
  if (m.rows() != z.size() || m.cols() != z.size()) {
    throw NumericError("weighted_norm: dimension mismatch (vector " + std::to_string(z.size()) +
                       ", matrix " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + ")");
  }
  const double q = z.dot(m * z);
  if (q < -1e-12) throw NumericError("weighted_norm: negative quadratic form, matrix is not PSD");
  return std::sqrt(std::max(q, 0.0));
}

EigenRange extreme_eigenvalues(const SymMatrix& m) {
  require_symmetric(m, "extreme_eigenvalues");
  Eigen::SelfAdjointEigenSolver<SymMatrix> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericError("extreme_eigenvalues: solver failed");
  const auto& ev = solver.eigenvalues();  // ascending
  return {ev(0), ev(ev.size() - 1)};
}

bool min_eig_quadform_check(const SymMatrix& m, double threshold) {
  return extreme_eigenvalues(m).lambda_min >= threshold;
}

SymMatrix sym_sqrt(const SymMatrix& m) {
  require_symmetric(m, "sym_sqrt");
  Eigen::SelfAdjointEigenSolver<SymMatrix> solver(m);
  if (solver.eigenvalues().minCoeff() < 0.0) throw NumericError("sym_sqrt: matrix is not PSD");
  return solver.operatorSqrt();
}

SymMatrix sym_inv_sqrt(const SymMatrix& m) {
  require_symmetric(m, "sym_inv_sqrt");
  Eigen::SelfAdjointEigenSolver<SymMatrix> solver(m);
  if (solver.eigenvalues().minCoeff() <= 0.0) throw NumericError("sym_inv_sqrt: matrix is not PD");
  return solver.operatorInverseSqrt();
}

double identity_residual(const SymMatrix& a, const SymMatrix& b) {
  return (a * b - SymMatrix::Identity(a.rows(), b.cols())).cwiseAbs().maxCoeff();
}

DesignState::DesignState(SymMatrix v, int refresh_period)
    : v_(std::move(v)), refresh_period_(refresh_period) {
  require_symmetric(v_, "DesignState");
  if (refresh_period_ < 1) throw ConfigError("DesignState: refresh_period must be >= 1");
  v_inv_ = direct_inverse(v_);
}

DesignState DesignState::from_probes(std::span<const Vec> probes, Eigen::Index dim, double ridge,
                                     int refresh_period) {
  SymMatrix v = ridge * SymMatrix::Identity(dim, dim);
  for (const Vec& z : probes) {
    if (z.size() != dim) throw NumericError("DesignState::from_probes: dimension mismatch");
    v.noalias() += z * z.transpose();
  }
  return DesignState(std::move(v), refresh_period);
}

void DesignState::rank_one_update(const Vec& z) {
  if (z.size() != v_.rows()) throw NumericError("rank_one_update: dimension mismatch");
  if (z.isZero(0.0)) return;
  v_.noalias() += z * z.transpose();
  symmetrize(v_);
  ++update_count_;
  if (update_count_ % refresh_period_ == 0) {
    refresh();
    return;
  }
  const Vec u = v_inv_ * z;
  v_inv_.noalias() -= (u * u.transpose()) / (1.0 + z.dot(u));
  symmetrize(v_inv_);
}

double DesignState::inverse_norm(const Vec& z) const {
  return weighted_norm(z, v_inv_);
}

void DesignState::refresh() {
  v_inv_ = direct_inverse(v_);
}

}  // namespace roam
