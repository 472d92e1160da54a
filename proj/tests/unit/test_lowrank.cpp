#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "test_support.hpp"

#include "crowdsense/errors.hpp"
#include "crowdsense/lowrank.hpp"
#include "crowdsense/scenario.hpp"

using namespace crowdsense;
using crowdsense::testing::bit_identical;
using crowdsense::testing::random_matrix;

namespace {

RecoveryProblem problem_for(const Dataset& ds, bool with_mask) {
  RecoveryProblem p;
  p.y = ds.observed;
  if (with_mask) p.mask = ds.mask;
  return p;
}

}  // namespace

TEST_CASE("default_lambda") {
  CHECK(default_lambda(100, 100) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(default_lambda(400, 100) == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(default_lambda(1, 1) == 1.0);
  CHECK_THROWS_AS(default_lambda(0, 3), ValidationError);
}

TEST_CASE("pca_denoise examples") {
  Rng rng(1);
  const Matrix low = random_matrix(rng, 30, 3) * random_matrix(rng, 3, 20);
  const double top = svd(low).singular_values[0];
  CHECK((pca_denoise(low, 1e-12 * top) - low).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK(pca_denoise(low, top).isZero(0.0));
  CHECK_THROWS_AS(pca_denoise(low, 0.0), ValidationError);

  // Rank never increases.
  const Matrix noisy = low + random_matrix(rng, 30, 20, 0.1);
  CHECK(numerical_rank(svd(pca_denoise(noisy, 1.0)).singular_values) <=
        numerical_rank(svd(noisy).singular_values));
}

TEST_CASE("pca_denoise reduces error on a noisy rank-2 matrix") {
  ScenarioSpec spec;
  spec.rows = 200;
  spec.cols = 100;
  spec.rank = 2;
  spec.anomaly_frac = 0.0;
  spec.seed = 31;
  const Dataset ds = generate_traffic(spec);
  // Lift the signal well above the noise floor.
  const Matrix truth = 40.0 * ds.ground_truth_x;
  const double sigma = 0.1;
  Rng rng(32, "pca-noise");
  const Matrix noisy = truth + random_matrix(rng, 200, 100, sigma);
  const Matrix est = pca_denoise(noisy, 2.0 * sigma * std::sqrt(200.0));
  CHECK(relative_error(est, truth) < relative_error(noisy, truth));
}

TEST_CASE("rpca on the zero matrix stops after one iteration") {
  RecoveryProblem p;
  p.y = Matrix::Zero(6, 4);
  const auto r = rpca(p);
  CHECK(r.iterations == 1);
  CHECK(r.converged);
  CHECK(r.x.isZero(0.0));
  CHECK(r.a.isZero(0.0));
}

TEST_CASE("rpca recovers a low-rank plus sparse matrix") {
  ScenarioSpec spec;
  spec.rows = spec.cols = 100;
  spec.rank = 5;
  spec.anomaly_frac = 0.05;
  spec.seed = 5;
  const Dataset ds = generate_traffic(spec);
  const auto r = rpca(problem_for(ds, false));
  CHECK(r.converged);
  CHECK(r.final_residual <= 1e-7);
  CHECK(relative_error(r.x, ds.ground_truth_x) <= 1e-3);
  CHECK(anomaly_f1(r.a, ds.ground_truth_a) >= 0.99);
  CHECK(r.rank_estimate == 5);
  CHECK(r.residual_history.size() == static_cast<std::size_t>(r.iterations));
  for (double v : r.residual_history) CHECK(std::isfinite(v));
}

TEST_CASE("rpca 5x5 solution beats random feasible perturbations") {
  ScenarioSpec spec;
  spec.rows = spec.cols = 5;
  spec.rank = 1;
  spec.anomaly_frac = 0.12;
  spec.seed = 9;
  const Dataset ds = generate_traffic(spec);
  RecoveryProblem p = problem_for(ds, false);
  p.config.tol = 1e-10;
  const auto r = rpca(p);
  REQUIRE(r.converged);
  const double base = rpca_objective(r.x, r.a, r.lambda);
  Rng rng(10, "probe");
  int worse = 0;
  for (int k = 0; k < 1000; ++k) {
    const Matrix delta = random_matrix(rng, 5, 5, 1e-3);
    // Same residual Y - X - A, so the perturbation stays in the tolerance ball.
    if (rpca_objective(r.x + delta, r.a - delta, r.lambda) >= base - 1e-9) ++worse;
  }
  CHECK(worse == 1000);
}

TEST_CASE("objective audit against a subgradient oracle") {
  for (std::uint64_t seed : {101u, 102u}) {
    ScenarioSpec spec;
    spec.rows = 6;
    spec.cols = 5;
    spec.rank = 2;
    spec.anomaly_frac = 0.1;
    spec.seed = seed;
    const Dataset ds = generate_traffic(spec);
    RecoveryProblem p = problem_for(ds, false);
    p.config.tol = 1e-10;
    const auto r = rpca(p);
    const double ours = crowdsense::testing::rpca_feasible_objective(ds.observed, r.x, r.lambda);
    const double oracle =
        crowdsense::testing::rpca_subgradient_oracle(ds.observed, r.lambda, 5, 20000, seed);
    CHECK(ours <= oracle + 1e-6);
  }
}

TEST_CASE("masked_rpca with a full mask reproduces rpca bit for bit") {
  ScenarioSpec spec;
  spec.rows = 40;
  spec.cols = 30;
  spec.rank = 3;
  spec.seed = 12;
  const Dataset ds = generate_traffic(spec);
  RecoveryProblem masked = problem_for(ds, true);
  REQUIRE(masked.mask->is_full());
  const auto a = rpca(problem_for(ds, false));
  const auto b = masked_rpca(masked);
  CHECK(a.iterations == b.iterations);
  CHECK(bit_identical(a.x, b.x));
  CHECK(bit_identical(a.a, b.a));
  CHECK(a.residual_history == b.residual_history);
}

TEST_CASE("2x2 completion matches the nuclear-norm grid minimizer") {
  const double oracle = crowdsense::testing::completion_grid_minimizer(1, 2, 2, -10, 10, 200001);
  // The minimum-nuclear-norm completion of [[1, 2], [2, t]] sits at t = 1
  // (nuclear norm 4), not at the rank-1 completion t = 4 (nuclear norm 5).
  CHECK(oracle == doctest::Approx(1.0).epsilon(1e-4));

  RecoveryProblem p;
  p.y = Matrix(2, 2);
  p.y << 1, 2, 2, 0;
  const std::vector<Index2> seen{{0, 0}, {0, 1}, {1, 0}};
  p.mask = Mask(2, 2, seen);
  p.lambda = 1e6;
  const auto r = masked_rpca(p);
  CHECK(r.converged);
  CHECK(r.a.isZero(0.0));
  CHECK(std::abs(r.x(1, 1) - oracle) <= 0.05);
}

TEST_CASE("masked_rpca keeps the sparse term on the observed entries") {
  ScenarioSpec spec;
  spec.rows = spec.cols = 80;
  spec.rank = 3;
  spec.missing_frac = 0.2;
  spec.anomaly_frac = 0.05;
  spec.seed = 77;
  const Dataset ds = generate_traffic(spec);
  const auto r = masked_rpca(problem_for(ds, true));
  CHECK(r.converged);
  for (const auto& idx : ds.mask.complement().indices()) {
    CHECK(bit_identical(r.a(static_cast<Eigen::Index>(idx.row), static_cast<Eigen::Index>(idx.col)), 0.0));
  }
  CHECK(relative_error(r.x, ds.ground_truth_x) <= 1e-2);
}

TEST_CASE("one iteration is exactly one proximal sweep") {
  Rng rng(40);
  RecoveryProblem p;
  p.y = random_matrix(rng, 7, 5);
  p.config.tol = 0.0;
  p.config.max_iters = 1;
  const auto r = rpca(p);
  CHECK(r.iterations == 1);
  CHECK_FALSE(r.converged);

  // Hand-rolled sweep from the documented starting point.
  const Matrix& d = p.y;
  const double lambda = default_lambda(7, 5);
  const double spectral = svd(d).singular_values[0];
  const double mu = 1.25 / spectral;
  const Matrix dual = d / std::max(spectral, d.cwiseAbs().maxCoeff() / lambda);
  const Matrix x = svt(d + dual / mu, 1.0 / mu);
  const Matrix a = shrink(d - x + dual / mu, lambda / mu);
  CHECK((r.x - x).cwiseAbs().maxCoeff() == 0.0);
  CHECK((r.a - a).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("rpca is stable under a larger penalty cap") {
  ScenarioSpec spec;
  spec.rows = spec.cols = 50;
  spec.rank = 2;
  spec.seed = 51;
  const Dataset ds = generate_traffic(spec);
  RecoveryProblem p = problem_for(ds, false);
  const auto base = rpca(p);
  REQUIRE(base.converged);
  const double spectral = svd(ds.observed).singular_values[0];
  p.config.mu_max = 2.0 * 1e7 * 1.25 / spectral;
  const auto doubled = rpca(p);
  CHECK(relative_error(doubled.x, base.x) <= 10.0 * p.config.tol);
}

TEST_CASE("huge lambda turns rpca into exact low-rank fitting") {
  Rng rng(60);
  RecoveryProblem p;
  p.y = random_matrix(rng, 20, 15) * random_matrix(rng, 15, 15).leftCols(2) *
        random_matrix(rng, 2, 15);
  p.lambda = 1e8;
  const auto r = rpca(p);
  CHECK(r.converged);
  CHECK(elementwise_l1(r.a) <= 1e-9);
  CHECK(relative_error(r.x, p.y) <= p.config.tol);
}

TEST_CASE("solver runs are deterministic") {
  ScenarioSpec spec;
  spec.rows = 30;
  spec.cols = 40;
  spec.rank = 2;
  spec.missing_frac = 0.1;
  spec.seed = 3;
  const Dataset ds = generate_traffic(spec);
  const auto a = masked_rpca(problem_for(ds, true));
  const auto b = masked_rpca(problem_for(ds, true));
  CHECK(bit_identical(a.x, b.x));
  CHECK(bit_identical(a.a, b.a));
  CHECK(a.residual_history == b.residual_history);
}

TEST_CASE("argument validation") {
  RecoveryProblem p;
  p.y = Matrix::Ones(3, 3);
  p.mask = Mask(3, 3);
  CHECK_THROWS_AS(masked_rpca(p), ValidationError);
  p.mask->insert(0, 0);
  CHECK_THROWS_AS(rpca(p), ValidationError);
  p.mask = Mask(2, 3, std::vector<Index2>{{0, 0}});
  CHECK_THROWS_AS(masked_rpca(p), DimensionError);

  RecoveryProblem q;
  q.y = Matrix::Ones(3, 3);
  q.config.rho = 1.0;
  CHECK_THROWS_AS(rpca(q), ValidationError);
  q.config = {};
  q.config.mu0 = 5.0;
  q.config.mu_max = 1.0;
  CHECK_THROWS_AS(rpca(q), ValidationError);
  q.config = {};
  q.lambda = -1.0;
  CHECK_THROWS_AS(rpca(q), ValidationError);
}

TEST_CASE("non-convergence is flagged, not thrown") {
  ScenarioSpec spec;
  spec.rows = spec.cols = 30;
  spec.rank = 2;
  spec.seed = 8;
  RecoveryProblem p = problem_for(generate_traffic(spec), false);
  p.config.max_iters = 3;
  const auto r = rpca(p);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 3);
  CHECK(r.final_residual > p.config.tol);
}

TEST_CASE("rpca_dual_bound never exceeds a feasible objective") {
  Rng rng(31, "dual-bound");
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix y = random_matrix(rng, 5, 4, 2.0);
    const Matrix l = random_matrix(rng, 5, 4, 3.0);
    const Matrix x = random_matrix(rng, 5, 4, 1.0);
    const double lambda = 0.2 + rng.uniform01();
    CHECK(rpca_dual_bound(y, l, lambda) <= rpca_objective(x, y - x, lambda) + 1e-12);
    CHECK(rpca_dual_bound(y, l, lambda) <= rpca_objective(y, Matrix::Zero(5, 4), lambda) + 1e-12);
  }
  CHECK(rpca_dual_bound(Matrix::Ones(2, 2), Matrix::Zero(2, 2), 1.0) == 0.0);
  CHECK_THROWS_AS(rpca_dual_bound(Matrix::Ones(2, 2), Matrix::Zero(2, 3), 1.0), DimensionError);
}

TEST_CASE("converged multiplier certifies a small duality gap") {
  ScenarioSpec spec;
  spec.rows = 6;
  spec.cols = 5;
  spec.rank = 2;
  spec.anomaly_frac = 0.1;
  spec.seed = 102;
  const Dataset ds = generate_traffic(spec);
  RecoveryProblem p = problem_for(ds, false);
  p.config.tol = 1e-10;
  p.config.max_iters = 5000;
  const auto r = rpca(p);
  REQUIRE(r.converged);
  const double primal = crowdsense::testing::rpca_feasible_objective(ds.observed, r.x, r.lambda);
  const double dual = rpca_dual_bound(ds.observed, r.multiplier, r.lambda);
  CHECK(dual <= primal + 1e-12);
  CHECK(primal - dual <= 1e-6);
}
