#pragma once

// Independent reference solvers used to audit the library's answers. They
// only use Eigen primitives, never crowdsense solvers.

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "crowdsense/random.hpp"

namespace crowdsense::testing {

inline double nuclear_norm_jacobi(const Eigen::MatrixXd& m) {
  return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues().sum();
}

// |X|_* + lambda |Y - X|_1, i.e. the robust PCA objective with the equality
// constraint eliminated (A = Y - X).
inline double rpca_feasible_objective(const Eigen::MatrixXd& y, const Eigen::MatrixXd& x,
                                      double lambda) {
  return nuclear_norm_jacobi(x) + lambda * (y - x).cwiseAbs().sum();
}

// Subgradient descent on the constraint-eliminated objective with step
// c / sqrt(k), from `starts` random starting points; returns the best
// objective value seen.
inline double rpca_subgradient_oracle(const Eigen::MatrixXd& y, double lambda, int starts,
                                      int iterations, std::uint64_t seed) {
  Rng rng(seed, "subgradient-oracle");
  const double scale = std::max(y.norm(), 1e-12);
  double best = rpca_feasible_objective(y, Eigen::MatrixXd::Zero(y.rows(), y.cols()), lambda);
  best = std::min(best, rpca_feasible_objective(y, y, lambda));
  for (int s = 0; s < starts; ++s) {
    Eigen::MatrixXd x(y.rows(), y.cols());
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = y(i) + 0.5 * scale / std::sqrt(double(y.size())) * rng.normal();
    const double step0 = 0.05 * scale;
    for (int k = 1; k <= iterations; ++k) {
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
      const auto& sv = svd.singularValues();
      Eigen::Index r = 0;
      while (r < sv.size() && sv[r] > 1e-12 * std::max(sv[0], 1.0)) ++r;
      Eigen::MatrixXd g = svd.matrixU().leftCols(r) * svd.matrixV().leftCols(r).transpose();
      g -= lambda * (y - x).unaryExpr([](double v) { return double((v > 0) - (v < 0)); });
      const double obj = nuclear_norm_jacobi(x) + lambda * (y - x).cwiseAbs().sum();
      best = std::min(best, obj);
      const double gn = g.norm();
      if (gn == 0.0) break;
      x -= (step0 / std::sqrt(double(k))) * g / gn;
    }
  }
  return best;
}

// argmin over t on a uniform grid of the nuclear norm of [[a, b], [c, t]].
inline double completion_grid_minimizer(double a, double b, double c, double lo, double hi,
                                        int points) {
  double best_t = lo;
  double best = INFINITY;
  for (int i = 0; i < points; ++i) {
    const double t = lo + (hi - lo) * i / (points - 1);
    Eigen::Matrix2d m;
    m << a, b, c, t;
    const double v = nuclear_norm_jacobi(m);
    if (v < best) {
      best = v;
      best_t = t;
    }
  }
  return best_t;
}

}  // namespace crowdsense::testing
