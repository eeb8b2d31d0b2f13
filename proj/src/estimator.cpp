#include "roam/estimator.hpp"

#include <cassert>
#include <cmath>
#include <sstream>

#include "roam/errors.hpp"

namespace roam {

namespace {

constexpr int kMaxHalvings = 30;
constexpr double kFallbackRidge = 1e-8;

void check_dims(const Vec& theta, const Dataset& data) {
  for (const auto& rec : data) {
    if (rec.z.size() != theta.size()) throw NumericError("MLE: probe dimension mismatch");
  }
}

// Records packed column-wise so each Newton iteration is a few dense products.
struct Packed {
  Eigen::MatrixXd z;  // d x n
  Eigen::VectorXd o;
};

Packed pack(const Dataset& data, Eigen::Index dim) {
  Packed p{Eigen::MatrixXd(dim, static_cast<Eigen::Index>(data.size())),
           Eigen::VectorXd(static_cast<Eigen::Index>(data.size()))};
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& rec = data[i];
    if (rec.z.size() != dim) throw NumericError("MLE: probe dimension mismatch");
    p.z.col(static_cast<Eigen::Index>(i)) = rec.z;
    p.o(static_cast<Eigen::Index>(i)) = rec.o;
  }
  return p;
}

Vec packed_score(const Vec& theta, const Packed& p, const LinkFunction& link, double reg_lambda,
                 Eigen::VectorXd& u) {
  u.noalias() = p.z.transpose() * theta;
  for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = link.eval(u(i)) - p.o(i);
  Vec g = reg_lambda * theta;
  g.noalias() += p.z * u;
  return g;
}

SymMatrix packed_hessian(const Vec& theta, const Packed& p, const LinkFunction& link,
                         double reg_lambda) {
  const Eigen::Index d = theta.size();
  Eigen::VectorXd w = p.z.transpose() * theta;
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = link.deriv(w(i));
  SymMatrix h = reg_lambda * SymMatrix::Identity(d, d);
  h.noalias() += p.z * w.asDiagonal() * p.z.transpose();
  symmetrize(h);
  return h;
}

}  // namespace

void MleConfig::validate() const {
  if (!(reg_lambda >= 0.0) || !std::isfinite(reg_lambda)) {
    throw ConfigError("MleConfig: reg_lambda must be a finite nonnegative number");
  }
  if (!(tol > 0.0)) throw ConfigError("MleConfig: tol must be positive");
  if (max_iter < 1) throw ConfigError("MleConfig: max_iter must be >= 1");
}

Vec score(const Vec& theta, const Dataset& data, const LinkFunction& link, double reg_lambda) {
  if (data.empty() && reg_lambda == 0.0) {
    throw ConfigError("score: empty dataset without regularization is underdetermined");
  }
  check_dims(theta, data);
  Vec g = reg_lambda * theta;
  for (const auto& rec : data) {
    g.noalias() += (link.eval(rec.z.dot(theta)) - rec.o) * rec.z;
  }
  return g;
}

double negative_log_likelihood(const Vec& theta, const Dataset& data, const LinkFunction& link,
                               double reg_lambda) {
  check_dims(theta, data);
  double nll = 0.5 * reg_lambda * theta.squaredNorm();
  for (const auto& rec : data) {
    const double u = rec.z.dot(theta);
    // log F(u) and log(1 - F(u)) = log F(-u) by symmetry of the link.
    const double p = rec.o == 1 ? link.eval(u) : link.eval(-u);
    nll -= std::log(p);
  }
  return nll;
}

MleResult solve_mle(const Dataset& data, const LinkFunction& link, const MleConfig& cfg) {
  Eigen::Index dim = 0;
  if (cfg.init) {
    dim = cfg.init->size();
  } else if (!data.empty()) {
    dim = data.front().z.size();
  } else {
    throw ConfigError("solve_mle: cannot infer dimension from empty data without init");
  }
  return solve_mle(data, link, cfg, dim);
}

MleResult solve_mle(const Dataset& data, const LinkFunction& link, const MleConfig& cfg,
                    Eigen::Index dim) {
  cfg.validate();
  if (data.empty() && cfg.reg_lambda == 0.0) {
    throw ConfigError("solve_mle: empty dataset without regularization is underdetermined");
  }
  MleResult result;
  result.theta = cfg.init ? *cfg.init : Vec::Zero(dim);
  if (result.theta.size() != dim) throw NumericError("solve_mle: init dimension mismatch");

  const Packed packed = pack(data, dim);
  Eigen::VectorXd scratch;
  Vec g = packed_score(result.theta, packed, link, cfg.reg_lambda, scratch);
  double residual = g.norm();

  for (int iter = 0;; ++iter) {
    if (residual <= cfg.tol) {
      result.residual = residual;
      result.iterations = iter;
      return result;
    }
    if (iter == cfg.max_iter) break;

    SymMatrix h = packed_hessian(result.theta, packed, link, cfg.reg_lambda);
#ifndef NDEBUG
    {
      Eigen::SelfAdjointEigenSolver<SymMatrix> es(h, Eigen::EigenvaluesOnly);
      assert(es.eigenvalues()(0) >= -1e-10);
    }
#endif
    Eigen::LLT<SymMatrix> llt(h);
    if (llt.info() != Eigen::Success) {
      h.diagonal().array() += kFallbackRidge;
      llt.compute(h);
      result.regularized_fallback = true;
      if (llt.info() != Eigen::Success) {
        throw NumericError("solve_mle: Hessian is singular even after ridge fallback");
      }
    }
    const Vec step = -llt.solve(g);

    double alpha = 1.0;
    Vec candidate = result.theta + step;
    Vec g_candidate = packed_score(candidate, packed, link, cfg.reg_lambda, scratch);
    for (int h_count = 0; h_count < kMaxHalvings && !(g_candidate.norm() < residual); ++h_count) {
      alpha *= 0.5;
      candidate = result.theta + alpha * step;
      g_candidate = packed_score(candidate, packed, link, cfg.reg_lambda, scratch);
    }
    result.theta = std::move(candidate);
    g = std::move(g_candidate);
    residual = g.norm();
  }

  std::ostringstream msg;
  msg << "solve_mle: no convergence after " << cfg.max_iter << " Newton steps (residual "
      << residual << ", tol " << cfg.tol << ", records " << data.size() << ")";
  throw ConvergenceError(msg.str(), result.theta, residual);
}

}  // namespace roam
