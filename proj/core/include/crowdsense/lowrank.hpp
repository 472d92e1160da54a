#pragma once

// Low-rank recovery from sensing matrices.
//
//   pca_denoise   min |X|_* + 1/(2 tau) |Y - X|_F^2          (closed form: svt)
//   rpca          min |X|_* + lambda |A|_1   s.t. Y = X + A
//   masked_rpca   min |X|_* + lambda |A|_1   s.t. P(Y) = P(X + A), A = P(A)
//
// where P zeroes the unobserved entries. The constrained problems are solved
// by an inexact augmented Lagrangian iteration; the relative residual
// tolerance stands in for the noise ball radius.
//
// The penalty is balanced rather than grown every sweep: mu goes up by rho
// while the primal residual exceeds twice the stationarity residual and down
// by rho in the opposite case. Pure geometric growth freezes the iterates at
// a feasible but suboptimal point on small instances.

#include <optional>
#include <vector>

#include "crowdsense/matrix.hpp"

namespace crowdsense {

struct SolverConfig {
  // Initial penalty; unset means 1.25 / sigma_max(P(Y)).
  std::optional<double> mu0;
  double rho = 1.5;
  // Penalty cap; unset means 1e7 * mu0. The floor is always 1e-3 * mu0.
  std::optional<double> mu_max;
  // Stops once both the primal and the stationarity residual (relative to
  // |P(Y)|_F) are at most tol.
  double tol = 1e-7;
  int max_iters = 1000;

  // Throws ValidationError on out-of-range values.
  void validate() const;
};

struct RecoveryProblem {
  Matrix y;
  std::optional<Mask> mask;  // absent means fully observed
  std::optional<double> lambda;  // absent means default_lambda(rows, cols)
  SolverConfig config;
};

struct RecoveryResult {
  Matrix x;
  Matrix a;
  int iterations = 0;
  double final_residual = 0.0;
  int rank_estimate = 0;
  std::size_t sparsity_estimate = 0;  // |a_ij| > 1e-9
  bool converged = false;
  double lambda = 0.0;
  std::vector<double> residual_history;
  std::vector<double> stationarity_history;
  // Lagrange multiplier of the equality constraint (zero off the mask).
  Matrix multiplier;
};

// 1 / sqrt(max(rows, cols)).
double default_lambda(std::size_t rows, std::size_t cols);

Matrix pca_denoise(const Matrix& y, double tau);

// Shared engine. With a mask, the residual, the sparse term and the dual
// variable live on the observed entries only. Non-convergence is reported
// through RecoveryResult::converged, never thrown.
RecoveryResult solve_ialm(const RecoveryProblem& problem);

// Fully observed robust PCA. A mask, if present, must be full.
RecoveryResult rpca(const RecoveryProblem& problem);

// Requires a nonempty mask.
RecoveryResult masked_rpca(const RecoveryProblem& problem);

// |X|_* + lambda |A|_1
double rpca_objective(const Matrix& x, const Matrix& a, double lambda);

// Lower bound on the optimal objective from a multiplier: the multiplier is
// scaled into {|L|_2 <= 1, |L|_inf <= lambda} and paired with P(Y).
double rpca_dual_bound(const Matrix& y, const Matrix& multiplier, double lambda);

// Number of singular values above 1e-8 * sigma_max.
int numerical_rank(const Vector& singular_values);

}  // namespace crowdsense
