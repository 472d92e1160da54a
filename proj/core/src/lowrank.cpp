#include "crowdsense/lowrank.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "crowdsense/errors.hpp"

namespace crowdsense {

namespace {

constexpr double kSparsityThreshold = 1e-9;
constexpr double kRankTolerance = 1e-8;

// Observed entries as a dense 0/1 weight so the sweeps stay vectorized.
Matrix mask_weights(const RecoveryProblem& p) {
  const auto rows = p.y.rows();
  const auto cols = p.y.cols();
  if (!p.mask) return Matrix::Ones(rows, cols);
  const Mask& m = *p.mask;
  if (m.rows() != static_cast<std::size_t>(rows) ||
      m.cols() != static_cast<std::size_t>(cols)) {
    throw DimensionError("mask shape does not match the data matrix");
  }
  Matrix w = Matrix::Zero(rows, cols);
  for (const auto& idx : m.indices()) {
    w(static_cast<Eigen::Index>(idx.row), static_cast<Eigen::Index>(idx.col)) = 1.0;
  }
  return w;
}

std::size_t count_nonzero(const Matrix& a) {
  return static_cast<std::size_t>((a.array().abs() > kSparsityThreshold).count());
}

}  // namespace

void SolverConfig::validate() const {
  if (mu0 && !(*mu0 > 0.0)) throw ValidationError("mu0 must be positive");
  if (mu_max && !(*mu_max > 0.0)) throw ValidationError("mu_max must be positive");
  if (mu0 && mu_max && *mu0 > *mu_max) throw ValidationError("mu0 must not exceed mu_max");
  if (!(rho > 1.0)) throw ValidationError("rho must be > 1");
  if (!(tol >= 0.0 && tol < 1.0)) throw ValidationError("tol must lie in [0, 1)");
  if (max_iters < 1) throw ValidationError("max_iters must be positive");
}

double default_lambda(std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0) throw ValidationError("matrix dimensions must be positive");
  return 1.0 / std::sqrt(static_cast<double>(std::max(rows, cols)));
}

Matrix pca_denoise(const Matrix& y, double tau) {
  if (!(tau > 0.0)) throw ValidationError("pca_denoise needs tau > 0");
  return svt(y, tau);
}

double rpca_objective(const Matrix& x, const Matrix& a, double lambda) {
  return nuclear_norm(x) + lambda * elementwise_l1(a);
}

double rpca_dual_bound(const Matrix& y, const Matrix& multiplier, double lambda) {
  if (y.rows() != multiplier.rows() || y.cols() != multiplier.cols()) {
    throw DimensionError("multiplier shape does not match the data");
  }
  if (!(lambda > 0.0)) throw ValidationError("lambda must be positive");
  if (multiplier.size() == 0) return 0.0;
  const double spectral = svd(multiplier).singular_values[0];
  const double scale = std::max({1.0, spectral, multiplier.cwiseAbs().maxCoeff() / lambda});
  return inner(multiplier, y) / scale;
}

int numerical_rank(const Vector& singular_values) {
  if (singular_values.size() == 0) return 0;
  const double top = singular_values.maxCoeff();
  if (!(top > 0.0)) return 0;
  return static_cast<int>((singular_values.array() > kRankTolerance * top).count());
}

RecoveryResult solve_ialm(const RecoveryProblem& problem) {
  const auto rows = problem.y.rows();
  const auto cols = problem.y.cols();
  if (rows == 0 || cols == 0) throw ValidationError("data matrix is empty");
  problem.config.validate();

  const Matrix w = mask_weights(problem);
  const auto observed = (w.array() > 0.0).matrix();
  const Matrix d = problem.y.cwiseProduct(w);
  if (!d.allFinite()) throw ValidationError("observed entries must be finite");

  const double lambda =
      problem.lambda ? *problem.lambda
                     : default_lambda(static_cast<std::size_t>(rows),
                                      static_cast<std::size_t>(cols));
  if (!(lambda > 0.0)) throw ValidationError("lambda must be positive");

  RecoveryResult out;
  out.lambda = lambda;
  out.x = Matrix::Zero(rows, cols);
  out.a = Matrix::Zero(rows, cols);

  const double d_norm = d.norm();
  if (d_norm == 0.0) {
    out.iterations = 1;
    out.converged = true;
    out.residual_history.push_back(0.0);
    out.stationarity_history.push_back(0.0);
    out.multiplier = Matrix::Zero(rows, cols);
    return out;
  }

  const double spectral = svd(d).singular_values[0];
  const SolverConfig& cfg = problem.config;
  double mu = cfg.mu0.value_or(1.25 / spectral);
  const double mu_max = cfg.mu_max.value_or(1e7 * mu);
  const double mu_min = 1e-3 * mu;
  if (mu > mu_max) throw ValidationError("mu0 must not exceed mu_max");

  // Dual start scaled so that its dual norm is at most one.
  const double j = std::max(spectral, d.cwiseAbs().maxCoeff() / lambda);
  Matrix dual = d / j;
  // Free fill-in for the unobserved entries; stays zero when fully observed.
  Matrix fill = Matrix::Zero(rows, cols);
  Vector spectrum;

  for (int k = 1; k <= cfg.max_iters; ++k) {
    auto [x, s] = svt_with_spectrum(d - out.a - fill + dual / mu, 1.0 / mu);
    out.x = std::move(x);
    spectrum = std::move(s);

    const Matrix t = d - out.x + dual / mu;
    Matrix a_next = observed.select(shrink(t, lambda / mu), 0.0);
    Matrix fill_next = observed.select(0.0, t);
    const double stationarity =
        mu * ((a_next - out.a) + (fill_next - fill)).norm() / d_norm;
    out.a = std::move(a_next);
    fill = std::move(fill_next);

    const Matrix z = observed.select(d - out.x - out.a - fill, 0.0);
    dual += mu * z;

    const double residual = z.norm() / d_norm;
    out.residual_history.push_back(residual);
    out.stationarity_history.push_back(stationarity);
    out.iterations = k;
    out.final_residual = residual;
    if (residual <= cfg.tol && stationarity <= cfg.tol) {
      out.converged = true;
      break;
    }
    if (residual > 2.0 * stationarity) {
      mu = std::min(cfg.rho * mu, mu_max);
    } else if (stationarity > 2.0 * residual) {
      mu = std::max(mu / cfg.rho, mu_min);
    }
  }

  out.multiplier = std::move(dual);
  out.rank_estimate = numerical_rank(spectrum);
  out.sparsity_estimate = count_nonzero(out.a);
  return out;
}

RecoveryResult rpca(const RecoveryProblem& problem) {
  if (problem.mask && !problem.mask->is_full()) {
    throw ValidationError("rpca expects fully observed data; use masked_rpca");
  }
  RecoveryProblem full = problem;
  full.mask.reset();
  return solve_ialm(full);
}

RecoveryResult masked_rpca(const RecoveryProblem& problem) {
  if (!problem.mask) throw ValidationError("masked_rpca requires a mask");
  if (problem.mask->empty()) throw ValidationError("mask has no observed entries");
  return solve_ialm(problem);
}

}  // namespace crowdsense
