#pragma once

// Reference implementations used only by the tests. They avoid Eigen's
// decompositions and the library's RNG so that agreement is meaningful.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Mat = std::vector<std::vector<double>>;

inline Mat identity(std::size_t n) {
  Mat m(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1.0;
  return m;
}

// Determinant by Gaussian elimination with partial pivoting.
inline double det(Mat a) {
  const std::size_t n = a.size();
  double d = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    }
    if (a[piv][c] == 0.0) return 0.0;
    if (piv != c) {
      std::swap(a[piv], a[c]);
      d = -d;
    }
    d *= a[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
    }
  }
  return d;
}

// Sylvester's criterion: every leading principal minor is positive.
inline bool positive_definite(const Mat& a) {
  for (std::size_t k = 1; k <= a.size(); ++k) {
    Mat lead(k, std::vector<double>(k));
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) lead[i][j] = a[i][j];
    }
    if (!(det(lead) > 0.0)) return false;
  }
  return true;
}

inline Mat shifted(const Mat& a, double sign, double shift) {
  Mat m = a;
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) m[i][j] *= sign;
    m[i][i] -= shift;
  }
  return m;
}

inline double gershgorin_bound(const Mat& a) {
  double b = 0.0;
  for (const auto& row : a) {
    double s = 0.0;
    for (double v : row) s += std::abs(v);
    b = std::max(b, s);
  }
  return b + 1.0;
}

// lambda_min = sup { s : A - s I is PD }, found by bisection on the
// determinant test above.
inline double lambda_min(const Mat& a, int iters = 200) {
  double lo = -gershgorin_bound(a), hi = gershgorin_bound(a);
  for (int i = 0; i < iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    (positive_definite(shifted(a, 1.0, mid)) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

inline double lambda_max(const Mat& a, int iters = 200) {
  return -lambda_min(shifted(a, -1.0, 0.0), iters);
}

// Gauss-Jordan inverse with partial pivoting.
inline Mat inverse(Mat a) {
  const std::size_t n = a.size();
  Mat inv = identity(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    }
    std::swap(a[piv], a[c]);
    std::swap(inv[piv], inv[c]);
    const double p = a[c][c];
    for (std::size_t k = 0; k < n; ++k) {
      a[c][k] /= p;
      inv[c][k] /= p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r][c];
      for (std::size_t k = 0; k < n; ++k) {
        a[r][k] -= f * a[c][k];
        inv[r][k] -= f * inv[c][k];
      }
    }
  }
  return inv;
}

// Random PSD matrix B^T B with B of size (rank x n), entries N(0, 1).
inline Mat random_psd(std::size_t n, std::size_t rank, std::mt19937_64& gen) {
  std::normal_distribution<double> nd;
  Mat b(rank, std::vector<double>(n));
  for (auto& row : b) {
    for (double& v : row) v = nd(gen);
  }
  Mat m(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < rank; ++k) m[i][j] += b[k][i] * b[k][j];
    }
  }
  return m;
}

// Root of a monotone scalar function on [lo, hi] by bisection.
template <class F>
double bisect(F f, double lo, double hi, int iters = 200) {
  const bool rising = f(hi) > f(lo);
  for (int i = 0; i < iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    ((f(mid) > 0.0) == rising ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

// Binomial frequency lies within z standard errors of p.
inline bool within_binomial(double freq, double p, long n, double z = 4.0) {
  return std::abs(freq - p) <= z * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

inline Eigen::MatrixXd to_eigen(const Mat& a) {
  Eigen::MatrixXd m(a.size(), a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < a.size(); ++j) m(i, j) = a[i][j];
  }
  return m;
}

inline Mat from_eigen(const Eigen::MatrixXd& m) {
  Mat a(m.rows(), std::vector<double>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) a[i][j] = m(i, j);
  }
  return a;
}

}  // namespace oracle
