#include "crowdsense/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "crowdsense/errors.hpp"

namespace crowdsense {

namespace {

constexpr double kReconstructionTol = 1e-10;

void require_same_shape(const Matrix& m, const Mask& omega) {
  if (static_cast<std::size_t>(m.rows()) != omega.rows() ||
      static_cast<std::size_t>(m.cols()) != omega.cols()) {
    throw DimensionError("mask is " + std::to_string(omega.rows()) + "x" +
                         std::to_string(omega.cols()) + " but matrix is " +
                         std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()));
  }
}

}  // namespace

Mask::Mask(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), bits_(rows * cols, 0) {}

Mask::Mask(std::size_t rows, std::size_t cols, std::span<const Index2> observed)
    : Mask(rows, cols) {
  for (const auto& p : observed) {
    if (p.row >= rows || p.col >= cols) {
      throw DimensionError("mask index (" + std::to_string(p.row) + ", " +
                           std::to_string(p.col) + ") out of range");
    }
    if (!insert(p.row, p.col)) {
      throw ValidationError("duplicate mask index (" + std::to_string(p.row) +
                            ", " + std::to_string(p.col) + ")");
    }
  }
}

Mask Mask::full(std::size_t rows, std::size_t cols) {
  Mask m(rows, cols);
  std::fill(m.bits_.begin(), m.bits_.end(), 1);
  m.count_ = rows * cols;
  return m;
}

bool Mask::contains(std::size_t row, std::size_t col) const {
  if (row >= rows_ || col >= cols_) {
    throw DimensionError("mask index out of range");
  }
  return bits_[row * cols_ + col] != 0;
}

bool Mask::insert(std::size_t row, std::size_t col) {
  if (row >= rows_ || col >= cols_) {
    throw DimensionError("mask index out of range");
  }
  auto& b = bits_[row * cols_ + col];
  if (b) return false;
  b = 1;
  ++count_;
  return true;
}

bool Mask::erase(std::size_t row, std::size_t col) {
  if (row >= rows_ || col >= cols_) {
    throw DimensionError("mask index out of range");
  }
  auto& b = bits_[row * cols_ + col];
  if (!b) return false;
  b = 0;
  --count_;
  return true;
}

std::vector<Index2> Mask::indices() const {
  std::vector<Index2> out;
  out.reserve(count_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) {
      if (bits_[i * cols_ + j]) out.push_back({i, j});
    }
  }
  return out;
}

Mask Mask::complement() const {
  Mask c(rows_, cols_);
  for (std::size_t k = 0; k < bits_.size(); ++k) c.bits_[k] = bits_[k] ? 0 : 1;
  c.count_ = rows_ * cols_ - count_;
  return c;
}

Matrix SvdResult::reconstruct() const {
  return left_vectors * singular_values.asDiagonal() * right_vectors.transpose();
}

SvdResult svd(const Matrix& m) {
  if (m.size() == 0) {
    throw DimensionError("svd of an empty matrix");
  }
  Eigen::BDCSVD<Matrix> dec(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SvdResult out{dec.matrixU(), dec.singularValues(), dec.matrixV()};

  const double residual = (out.reconstruct() - m).norm();
  if (dec.info() != Eigen::Success || !std::isfinite(residual) ||
      residual > kReconstructionTol * (m.norm() + 1.0)) {
    throw DecompositionError(
        "svd failed to converge (reconstruction residual " +
            std::to_string(residual) + ")",
        residual);
  }
  return out;
}

double nuclear_norm(const Matrix& m) { return svd(m).singular_values.sum(); }

double elementwise_l1(const Matrix& m) { return m.cwiseAbs().sum(); }

double frobenius(const Matrix& m) { return m.norm(); }

double shrink(double x, double tau) {
  const double mag = std::abs(x) - tau;
  if (mag <= 0.0) return 0.0;
  return x > 0.0 ? mag : -mag;
}

Matrix shrink(const Matrix& m, double tau) {
  if (!(tau >= 0.0)) throw DomainError("shrink threshold must be >= 0");
  return m.unaryExpr([tau](double x) { return shrink(x, tau); });
}

std::pair<Matrix, Vector> svt_with_spectrum(const Matrix& m, double tau) {
  if (!(tau >= 0.0)) throw DomainError("svt threshold must be >= 0");
  const SvdResult d = svd(m);
  Vector s = d.singular_values.unaryExpr(
      [tau](double v) { return std::max(v - tau, 0.0); });
  // Only the surviving part of the spectrum contributes.
  Eigen::Index keep = 0;
  while (keep < s.size() && s[keep] > 0.0) ++keep;
  Matrix out = d.left_vectors.leftCols(keep) * s.head(keep).asDiagonal() *
               d.right_vectors.leftCols(keep).transpose();
  if (keep == 0) out = Matrix::Zero(m.rows(), m.cols());
  return {std::move(out), std::move(s)};
}

Matrix svt(const Matrix& m, double tau) { return svt_with_spectrum(m, tau).first; }

Matrix project_mask(const Matrix& m, const Mask& omega) {
  require_same_shape(m, omega);
  Matrix out = Matrix::Zero(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (omega.contains(static_cast<std::size_t>(i), static_cast<std::size_t>(j))) {
        out(i, j) = m(i, j);
      }
    }
  }
  return out;
}

double min_eigenvalue(const Matrix& symmetric) {
  if (symmetric.rows() != symmetric.cols() || symmetric.size() == 0) {
    throw DimensionError("min_eigenvalue needs a nonempty square matrix");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetric, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double inner(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("inner product of differently shaped matrices");
  }
  return a.cwiseProduct(b).sum();
}

}  // namespace crowdsense
