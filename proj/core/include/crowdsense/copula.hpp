#pragma once

// Heterogeneous sensor fusion with a Gaussian copula.
//
// A joint density over N sensors is assembled from N one-dimensional
// marginals and a copula density that carries the dependence:
//
//   f(z) = prod_n f_n(z_n) * c(F_1(z_1), ..., F_N(z_N))
//
// with the Gaussian copula density
//
//   c(u) = |R|^{-1/2} exp(-1/2 q^T (R^{-1} - I) q),   q = Phi^{-1}(u).

#include <optional>
#include <span>
#include <vector>

#include "crowdsense/matrix.hpp"

namespace crowdsense {

// Standard normal cdf, quantile and density. normal_quantile is accurate to
// well under 1e-9 absolute on (0, 1) (rational approximation refined by one
// Halley step).
double normal_cdf(double x);
double normal_quantile(double p);
double normal_pdf(double x);

enum class MarginalKind { kEmpirical, kGaussian };

class MarginalModel {
 public:
  static MarginalModel gaussian(double mean, double stddev);

  MarginalKind kind() const noexcept { return kind_; }

  // Strictly inside (0, 1) for every finite x; nondecreasing.
  double cdf(double x) const;
  double pdf(double x) const;
  double log_pdf(double x) const;

  double mean() const noexcept { return mean_; }
  double stddev() const noexcept { return stddev_; }
  double bandwidth() const noexcept { return bandwidth_; }
  const std::vector<double>& sorted_samples() const noexcept { return samples_; }

 private:
  friend MarginalModel fit_empirical_marginal(std::span<const double>,
                                              std::optional<double>);
  MarginalModel() = default;

  MarginalKind kind_ = MarginalKind::kGaussian;
  double mean_ = 0.0;
  double stddev_ = 1.0;
  // Empirical only.
  std::vector<double> samples_;
  std::vector<double> knots_;       // distinct sample values
  std::vector<double> knot_cdf_;    // count(<= knot) / (K + 1)
  double bandwidth_ = 0.0;
};

// Empirical marginal: rank/(K+1) cdf with linear interpolation between
// distinct order statistics, Gaussian-kernel density estimate for the pdf.
// Without a bandwidth, Silverman's rule of thumb is used. Needs >= 2 finite
// samples (InsufficientDataError / DomainError otherwise).
MarginalModel fit_empirical_marginal(std::span<const double> samples,
                                     std::optional<double> bandwidth = std::nullopt);

// Gaussian marginal with the sample mean and (unbiased) standard deviation.
MarginalModel fit_gaussian_marginal(std::span<const double> samples);

class CopulaModel {
 public:
  // Throws ValidationError unless `correlation` is symmetric with unit
  // diagonal and minimum eigenvalue > 1e-10.
  explicit CopulaModel(Matrix correlation);
  static CopulaModel independence(std::size_t dimension);

  std::size_t dimension() const noexcept {
    return static_cast<std::size_t>(correlation_.rows());
  }
  const Matrix& correlation() const noexcept { return correlation_; }
  double log_determinant() const noexcept { return log_det_; }

  // Throws DomainError for u outside the open unit cube.
  double density(const Vector& u) const;
  double log_density(const Vector& u) const;

 private:
  Matrix correlation_;
  Eigen::LLT<Matrix> chol_;
  double log_det_ = 0.0;
};

// Pearson correlation of the normal scores Phi^{-1}(u), before any repair.
// Rows are observations, columns are sensors. Degenerate (constant) columns
// get zero correlation with the others.
Matrix normal_scores_correlation(const Matrix& uniform_scores);

struct RepairedCorrelation {
  Matrix correlation;
  double loading = 0.0;  // delta used; 0 when no repair was needed
};

// Diagonal loading (R + d I) / (1 + d) with the smallest d in
// {1e-8, 1e-6, 1e-4, 1e-2} reaching minimum eigenvalue > 1e-10.
RepairedCorrelation repair_correlation(const Matrix& correlation);

// K x N scores strictly in (0, 1), K >= 3.
CopulaModel fit_gaussian_copula(const Matrix& uniform_scores);

// Product of marginal pdfs times the copula density at the marginal cdfs.
double joint_pdf(std::span<const MarginalModel> marginals,
                 const CopulaModel& copula, const Vector& z);
// -inf where joint_pdf is zero.
double log_joint_pdf(std::span<const MarginalModel> marginals,
                     const CopulaModel& copula, const Vector& z);

struct JointModel {
  std::vector<MarginalModel> marginals;
  CopulaModel copula;

  std::size_t dimension() const noexcept { return marginals.size(); }
  double pdf(const Vector& z) const { return joint_pdf(marginals, copula, z); }
  double log_pdf(const Vector& z) const { return log_joint_pdf(marginals, copula, z); }
};

// Fits marginals column by column and, when `with_copula` is set, a Gaussian
// copula on the empirical rank scores. Without it the copula is the
// independence copula (the product model).
JointModel fit_joint_model(const Matrix& samples, MarginalKind kind,
                           bool with_copula = true);

enum class Hypothesis { kH0, kH1 };

struct FusionDecision {
  double log_likelihood_ratio = 0.0;
  Hypothesis decision = Hypothesis::kH0;
};

// LLR = log f1(z) - log f0(z); decides H1 iff LLR > threshold.
FusionDecision fuse_detect(const JointModel& h0, const JointModel& h1,
                           const Vector& z, double threshold = 0.0);

}  // namespace crowdsense
