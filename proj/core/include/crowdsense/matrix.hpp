#pragma once

// Dense matrix primitives shared by every solver: SVD, norms, and the
// proximal / projection operators.

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace crowdsense {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// An index pair (row, col).
struct Index2 {
  std::size_t row = 0;
  std::size_t col = 0;
  friend bool operator==(const Index2&, const Index2&) = default;
};

// Set of observed entries of a rows x cols matrix.
class Mask {
 public:
  Mask() = default;
  // Empty mask (nothing observed).
  Mask(std::size_t rows, std::size_t cols);
  // Throws DimensionError for out-of-range pairs and ValidationError for
  // duplicates.
  Mask(std::size_t rows, std::size_t cols, std::span<const Index2> observed);

  static Mask full(std::size_t rows, std::size_t cols);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t observed_count() const noexcept { return count_; }
  bool empty() const noexcept { return count_ == 0; }
  bool is_full() const noexcept { return count_ == rows_ * cols_; }

  bool contains(std::size_t row, std::size_t col) const;

  // Marks (row, col) as observed; returns false if it already was.
  bool insert(std::size_t row, std::size_t col);
  bool erase(std::size_t row, std::size_t col);

  // Observed pairs in row-major order.
  std::vector<Index2> indices() const;

  Mask complement() const;

  friend bool operator==(const Mask&, const Mask&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t count_ = 0;
  std::vector<unsigned char> bits_;  // row-major
};

struct SvdResult {
  Matrix left_vectors;   // M x r
  Vector singular_values;  // length r, nonincreasing
  Matrix right_vectors;  // N x r

  Matrix reconstruct() const;
};

// Thin SVD with r = min(M, N). Throws DecompositionError if the iteration
// fails or the reconstruction check does not hold.
SvdResult svd(const Matrix& m);

double nuclear_norm(const Matrix& m);
// Sum of absolute entries.
double elementwise_l1(const Matrix& m);
double frobenius(const Matrix& m);

// Entrywise soft threshold sign(x) * max(|x| - tau, 0).
Matrix shrink(const Matrix& m, double tau);
double shrink(double x, double tau);

// Singular value thresholding: U * shrink(diag(s), tau) * V^T.
Matrix svt(const Matrix& m, double tau);

// Same as svt() but also hands back the thresholded singular values.
std::pair<Matrix, Vector> svt_with_spectrum(const Matrix& m, double tau);

// Zeroes every entry outside omega.
Matrix project_mask(const Matrix& m, const Mask& omega);

// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Matrix& symmetric);

// Frobenius inner product.
double inner(const Matrix& a, const Matrix& b);

}  // namespace crowdsense
