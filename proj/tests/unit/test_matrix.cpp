#include <cmath>

#include "doctest.h"
#include "test_support.hpp"

#include "crowdsense/errors.hpp"
#include "crowdsense/matrix.hpp"

using namespace crowdsense;
using crowdsense::testing::random_matrix;

namespace {

Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<Eigen::Index>(rows.size()),
           static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

// Singular values of a 2x2 matrix from the eigenvalues of m^T m, via the
// quadratic formula.
std::pair<double, double> singular_values_2x2(const Matrix& m) {
  const Matrix g = m.transpose() * m;
  const double tr = g.trace();
  const double det = g.determinant();
  const double disc = std::sqrt(std::max(tr * tr / 4.0 - det, 0.0));
  return {std::sqrt(tr / 2.0 + disc), std::sqrt(std::max(tr / 2.0 - disc, 0.0))};
}

}  // namespace

TEST_CASE("svd examples") {
  auto d = svd(mat({{3, 0}, {0, 1}}));
  CHECK(d.singular_values[0] == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(d.singular_values[1] == doctest::Approx(1.0).epsilon(1e-14));

  d = svd(Matrix::Zero(2, 3));
  REQUIRE(d.singular_values.size() == 2);
  CHECK(d.singular_values[0] == 0.0);
  CHECK(d.singular_values[1] == 0.0);

  Vector u(2), v(3);
  u << 2.0, 0.0;
  v << 0.0, 3.0, 0.0;
  d = svd(u * v.transpose());
  CHECK(d.singular_values[0] == doctest::Approx(6.0).epsilon(1e-14));
  CHECK(std::abs(d.singular_values[1]) < 1e-14);

  CHECK_THROWS_AS(svd(Matrix(0, 3)), DimensionError);
}

TEST_CASE("svd invariants on random shapes") {
  Rng rng(11);
  for (auto [r, c] : {std::pair{5, 3}, std::pair{3, 5}, std::pair{40, 40}, std::pair{1, 7}}) {
    const Matrix m = random_matrix(rng, r, c);
    const auto d = svd(m);
    const auto k = std::min(r, c);
    REQUIRE(d.singular_values.size() == k);
    CHECK(d.left_vectors.rows() == r);
    CHECK(d.right_vectors.rows() == c);
    for (Eigen::Index i = 0; i < k; ++i) {
      CHECK(d.singular_values[i] >= 0.0);
      if (i > 0) CHECK(d.singular_values[i] <= d.singular_values[i - 1]);
    }
    CHECK((d.reconstruct() - m).norm() <= 1e-10 * (m.norm() + 1.0));
    CHECK((d.left_vectors.transpose() * d.left_vectors - Matrix::Identity(k, k)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((d.right_vectors.transpose() * d.right_vectors - Matrix::Identity(k, k)).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("svd reports non-finite input as a decomposition failure") {
  Matrix m = Matrix::Ones(3, 3);
  m(1, 1) = std::nan("");
  CHECK_THROWS_AS(svd(m), DecompositionError);
}

TEST_CASE("norms") {
  CHECK(nuclear_norm(Matrix::Identity(2, 2)) == doctest::Approx(2.0));
  CHECK(nuclear_norm(mat({{3, 0}, {0, 4}})) == doctest::Approx(7.0));

  const Matrix rank1 = mat({{1, 2}, {2, 4}});
  const auto [s1, s2] = singular_values_2x2(rank1);
  CHECK(s1 + s2 == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(nuclear_norm(rank1) == doctest::Approx(s1 + s2).epsilon(1e-12));

  CHECK(elementwise_l1(mat({{1, -2}, {0, 3}})) == 6.0);
  CHECK(elementwise_l1(Matrix::Zero(3, 2)) == 0.0);
  CHECK(elementwise_l1(mat({{-0.5, -0.5}})) == 1.0);

  CHECK(frobenius(mat({{3, 4}})) == 5.0);
  CHECK(frobenius(Matrix::Identity(3, 3)) == doctest::Approx(std::sqrt(3.0)));
  CHECK(frobenius(Matrix::Zero(2, 2)) == 0.0);
}

TEST_CASE("shrink") {
  CHECK(shrink(mat({{3}}), 1.0)(0, 0) == 2.0);
  CHECK(shrink(mat({{-0.5}}), 1.0)(0, 0) == 0.0);
  Rng rng(3);
  const Matrix m = random_matrix(rng, 4, 5);
  CHECK(shrink(m, 0.0) == m);
  CHECK_THROWS_AS(shrink(m, -1.0), DomainError);

  const Matrix s = shrink(m, 0.3);
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    CHECK(std::abs(s(i)) == doctest::Approx(std::max(std::abs(m(i)) - 0.3, 0.0)));
    if (s(i) != 0.0) CHECK((s(i) > 0) == (m(i) > 0));
  }
}

TEST_CASE("shrink is nonexpansive") {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const Matrix a = random_matrix(rng, 3, 4, 2.0);
    const Matrix b = random_matrix(rng, 3, 4, 2.0);
    const double tau = rng.uniform(0.0, 2.0);
    CHECK((shrink(a, tau) - shrink(b, tau)).norm() <= (a - b).norm() + 1e-15);
  }
}

TEST_CASE("svt examples") {
  const Matrix out = svt(mat({{3, 0}, {0, 1}}), 2.0);
  CHECK((out - mat({{1, 0}, {0, 0}})).cwiseAbs().maxCoeff() < 1e-14);

  Rng rng(7);
  const Matrix m = random_matrix(rng, 6, 4);
  CHECK((svt(m, 0.0) - m).norm() <= 1e-10);
  const double top = svd(m).singular_values[0];
  CHECK(svt(m, top).isZero(0.0));
  CHECK(svt(m, top * 2).isZero(0.0));

  const Vector before = svd(m).singular_values;
  const Vector after = svd(svt(m, 0.7)).singular_values;
  for (Eigen::Index i = 0; i < before.size(); ++i) {
    CHECK(after[i] == doctest::Approx(std::max(before[i] - 0.7, 0.0)).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("svt beats random perturbations of itself on its prox objective") {
  Rng rng(13);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix m = random_matrix(rng, 4, 3);
    const double tau = rng.uniform(0.1, 1.5);
    auto objective = [&](const Matrix& x) {
      return tau * nuclear_norm(x) + 0.5 * (x - m).squaredNorm();
    };
    const Matrix x = svt(m, tau);
    const double best = objective(x);
    for (int k = 0; k < 100; ++k) {
      const Matrix probe = x + random_matrix(rng, 4, 3, 1e-3);
      CHECK(objective(probe) > best);
    }
  }
}

TEST_CASE("project_mask") {
  const Matrix m = mat({{1, 2}, {3, 4}});
  CHECK(project_mask(m, Mask::full(2, 2)) == m);
  CHECK(project_mask(m, Mask(2, 2)).isZero(0.0));
  const std::vector<Index2> diag{{0, 0}, {1, 1}};
  CHECK(project_mask(m, Mask(2, 2, diag)) == mat({{1, 0}, {0, 4}}));
  CHECK_THROWS_AS(project_mask(m, Mask(3, 2)), DimensionError);
}

TEST_CASE("project_mask is idempotent and self-adjoint") {
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    Mask omega(5, 4);
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = 0; j < 4; ++j)
        if (rng.uniform01() < 0.5) omega.insert(i, j);
    const Matrix a = random_matrix(rng, 5, 4);
    const Matrix b = random_matrix(rng, 5, 4);
    const Matrix pa = project_mask(a, omega);
    CHECK(project_mask(pa, omega) == pa);
    CHECK(inner(pa, b) == doctest::Approx(inner(a, project_mask(b, omega))).epsilon(1e-14));
  }
}

TEST_CASE("norm ordering: nuclear >= frobenius >= max entry") {
  Rng rng(19);
  for (int trial = 0; trial < 100; ++trial) {
    const auto r = static_cast<Eigen::Index>(1 + rng.index(6));
    const auto c = static_cast<Eigen::Index>(1 + rng.index(6));
    const Matrix m = random_matrix(rng, r, c);
    CHECK(nuclear_norm(m) >= frobenius(m) - 1e-12);
    CHECK(frobenius(m) >= m.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("mask construction rejects bad indices") {
  const std::vector<Index2> out_of_range{{2, 0}};
  CHECK_THROWS_AS(Mask(2, 2, out_of_range), DimensionError);
  const std::vector<Index2> dup{{0, 1}, {0, 1}};
  CHECK_THROWS_AS(Mask(2, 2, dup), ValidationError);

  Mask m(2, 3);
  CHECK(m.insert(1, 2));
  CHECK_FALSE(m.insert(1, 2));
  CHECK(m.observed_count() == 1);
  CHECK(m.complement().observed_count() == 5);
  CHECK(m.indices() == std::vector<Index2>{{1, 2}});
}
