#include "crowdsense/copula.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "crowdsense/errors.hpp"

namespace crowdsense {

namespace {

constexpr double kMinEigen = 1e-10;
constexpr std::array<double, 4> kLoadings = {1e-8, 1e-6, 1e-4, 1e-2};

// Keeps a probability strictly inside (0, 1).
double open_unit(double p) {
  constexpr double lo = std::numeric_limits<double>::min();
  const double hi = std::nextafter(1.0, 0.0);
  return std::clamp(p, lo, hi);
}

double rational_quantile(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - p_low) {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

double sample_stddev(std::span<const double> x, double mean) {
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

double silverman_bandwidth(const std::vector<double>& sorted) {
  const auto k = sorted.size();
  double mean = 0.0;
  for (double v : sorted) mean += v;
  mean /= static_cast<double>(k);
  const double sd = sample_stddev(sorted, mean);
  auto quantile = [&](double p) {
    const double pos = p * static_cast<double>(k - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const auto hi = std::min(lo + 1, k - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
  };
  const double iqr = quantile(0.75) - quantile(0.25);
  double spread = sd;
  if (iqr > 0.0) spread = std::min(sd, iqr / 1.34);
  if (!(spread > 0.0)) spread = 1e-6 * (std::abs(mean) + 1.0);
  return 0.9 * spread * std::pow(static_cast<double>(k), -0.2);
}

Vector normal_scores(const Vector& u) {
  Vector q(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (!(u[i] > 0.0 && u[i] < 1.0)) {
      throw DomainError("copula argument " + std::to_string(u[i]) +
                        " is not strictly inside (0, 1)");
    }
    q[i] = normal_quantile(u[i]);
  }
  return q;
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("normal_quantile requires p in (0, 1)");
  }
  double x = rational_quantile(p);
  // One Halley step on Phi(x) - p.
  const double e = normal_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  if (std::isfinite(u)) x -= u / (1.0 + 0.5 * x * u);
  return x;
}

// ---------------------------------------------------------------------------
// Marginals

MarginalModel MarginalModel::gaussian(double mean, double stddev) {
  if (!std::isfinite(mean) || !(stddev > 0.0) || !std::isfinite(stddev)) {
    throw ValidationError("gaussian marginal needs finite mean and stddev > 0");
  }
  MarginalModel m;
  m.kind_ = MarginalKind::kGaussian;
  m.mean_ = mean;
  m.stddev_ = stddev;
  return m;
}

double MarginalModel::cdf(double x) const {
  if (kind_ == MarginalKind::kGaussian) {
    return open_unit(normal_cdf((x - mean_) / stddev_));
  }
  const auto& k = knots_;
  const auto& f = knot_cdf_;
  if (x < k.front()) {
    return open_unit(f.front() * 2.0 * normal_cdf((x - k.front()) / bandwidth_));
  }
  if (x > k.back()) {
    return open_unit(1.0 - (1.0 - f.back()) * 2.0 *
                               normal_cdf((k.back() - x) / bandwidth_));
  }
  const auto it = std::lower_bound(k.begin(), k.end(), x);
  const auto j = static_cast<std::size_t>(it - k.begin());
  if (*it == x) return f[j];
  const double t = (x - k[j - 1]) / (k[j] - k[j - 1]);
  return f[j - 1] + t * (f[j] - f[j - 1]);
}

double MarginalModel::pdf(double x) const { return std::exp(log_pdf(x)); }

double MarginalModel::log_pdf(double x) const {
  constexpr double log_sqrt_2pi = 0.91893853320467274178;
  if (kind_ == MarginalKind::kGaussian) {
    const double t = (x - mean_) / stddev_;
    return -0.5 * t * t - std::log(stddev_) - log_sqrt_2pi;
  }
  // log-sum-exp over the kernel terms keeps far tails finite.
  double peak = -std::numeric_limits<double>::infinity();
  for (double s : samples_) {
    const double t = (x - s) / bandwidth_;
    peak = std::max(peak, -0.5 * t * t);
  }
  double acc = 0.0;
  for (double s : samples_) {
    const double t = (x - s) / bandwidth_;
    acc += std::exp(-0.5 * t * t - peak);
  }
  return peak + std::log(acc) -
         std::log(static_cast<double>(samples_.size()) * bandwidth_) - log_sqrt_2pi;
}

MarginalModel fit_empirical_marginal(std::span<const double> samples,
                                     std::optional<double> bandwidth) {
  if (samples.size() < 2) {
    throw InsufficientDataError("empirical marginal needs at least 2 samples");
  }
  for (double v : samples) {
    if (!std::isfinite(v)) throw DomainError("marginal samples must be finite");
  }
  if (bandwidth && !(*bandwidth > 0.0 && std::isfinite(*bandwidth))) {
    throw ValidationError("bandwidth must be positive");
  }

  MarginalModel m;
  m.kind_ = MarginalKind::kEmpirical;
  m.samples_.assign(samples.begin(), samples.end());
  std::sort(m.samples_.begin(), m.samples_.end());

  const double denom = static_cast<double>(m.samples_.size() + 1);
  for (std::size_t i = 0; i < m.samples_.size(); ++i) {
    const double v = m.samples_[i];
    const double rank = static_cast<double>(i + 1);
    if (!m.knots_.empty() && m.knots_.back() == v) {
      m.knot_cdf_.back() = rank / denom;
    } else {
      m.knots_.push_back(v);
      m.knot_cdf_.push_back(rank / denom);
    }
  }

  double mean = 0.0;
  for (double v : m.samples_) mean += v;
  mean /= static_cast<double>(m.samples_.size());
  m.mean_ = mean;
  m.stddev_ = sample_stddev(m.samples_, mean);
  m.bandwidth_ = bandwidth ? *bandwidth : silverman_bandwidth(m.samples_);
  return m;
}

MarginalModel fit_gaussian_marginal(std::span<const double> samples) {
  if (samples.size() < 2) {
    throw InsufficientDataError("gaussian marginal needs at least 2 samples");
  }
  double mean = 0.0;
  for (double v : samples) {
    if (!std::isfinite(v)) throw DomainError("marginal samples must be finite");
    mean += v;
  }
  mean /= static_cast<double>(samples.size());
  return MarginalModel::gaussian(mean, sample_stddev(samples, mean));
}

// ---------------------------------------------------------------------------
// Copula

CopulaModel::CopulaModel(Matrix correlation) : correlation_(std::move(correlation)) {
  const auto n = correlation_.rows();
  if (n < 1 || correlation_.cols() != n) {
    throw ValidationError("correlation matrix must be square and nonempty");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (correlation_(i, i) != 1.0) {
      throw ValidationError("correlation matrix must have unit diagonal");
    }
    for (Eigen::Index j = 0; j < i; ++j) {
      if (std::abs(correlation_(i, j) - correlation_(j, i)) > 1e-12) {
        throw ValidationError("correlation matrix must be symmetric");
      }
    }
  }
  if (!(min_eigenvalue(correlation_) > kMinEigen)) {
    throw ValidationError("correlation matrix is not positive definite");
  }
  chol_.compute(correlation_);
  if (chol_.info() != Eigen::Success) {
    throw ValidationError("correlation matrix is not positive definite");
  }
  log_det_ = 2.0 * chol_.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

CopulaModel CopulaModel::independence(std::size_t dimension) {
  const auto n = static_cast<Eigen::Index>(dimension);
  return CopulaModel(Matrix::Identity(n, n));
}

double CopulaModel::log_density(const Vector& u) const {
  if (static_cast<std::size_t>(u.size()) != dimension()) {
    throw DimensionError("copula argument has length " + std::to_string(u.size()) +
                         ", model dimension is " + std::to_string(dimension()));
  }
  const Vector q = normal_scores(u);
  const Vector w = chol_.matrixL().solve(q);
  // q^T R^{-1} q - q^T q
  const double quad = w.squaredNorm() - q.squaredNorm();
  return -0.5 * log_det_ - 0.5 * quad;
}

double CopulaModel::density(const Vector& u) const { return std::exp(log_density(u)); }

Matrix normal_scores_correlation(const Matrix& uniform_scores) {
  const auto k = uniform_scores.rows();
  const auto n = uniform_scores.cols();
  if (k < 3) throw InsufficientDataError("copula fit needs at least 3 observations");
  if (n < 1) throw DimensionError("copula fit needs at least one column");

  Matrix q(k, n);
  for (Eigen::Index i = 0; i < k; ++i) {
    q.row(i) = normal_scores(uniform_scores.row(i).transpose()).transpose();
  }
  const Eigen::RowVectorXd mean = q.colwise().mean();
  q.rowwise() -= mean;
  const Matrix cov = q.transpose() * q;

  Matrix r = Matrix::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      const double denom = std::sqrt(cov(i, i) * cov(j, j));
      double rho = denom > 0.0 ? cov(i, j) / denom : 0.0;
      rho = std::clamp(rho, -1.0, 1.0);
      r(i, j) = rho;
      r(j, i) = rho;
    }
  }
  return r;
}

RepairedCorrelation repair_correlation(const Matrix& correlation) {
  if (min_eigenvalue(correlation) > kMinEigen) return {correlation, 0.0};
  const auto n = correlation.rows();
  for (double delta : kLoadings) {
    Matrix loaded = (correlation + delta * Matrix::Identity(n, n)) / (1.0 + delta);
    loaded.diagonal().setOnes();
    if (min_eigenvalue(loaded) > kMinEigen) return {std::move(loaded), delta};
  }
  throw ValidationError("correlation matrix could not be repaired by diagonal loading");
}

CopulaModel fit_gaussian_copula(const Matrix& uniform_scores) {
  return CopulaModel(repair_correlation(normal_scores_correlation(uniform_scores)).correlation);
}

// ---------------------------------------------------------------------------
// Joint densities and detection

double log_joint_pdf(std::span<const MarginalModel> marginals,
                     const CopulaModel& copula, const Vector& z) {
  const auto n = marginals.size();
  if (copula.dimension() != n || static_cast<std::size_t>(z.size()) != n) {
    throw DimensionError("joint_pdf: marginals, copula and sample disagree on dimension");
  }
  double log_f = 0.0;
  Vector u(z.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    if (!std::isfinite(z[ii])) throw DomainError("sample entries must be finite");
    log_f += marginals[i].log_pdf(z[ii]);
    u[ii] = marginals[i].cdf(z[ii]);
  }
  if (log_f == -std::numeric_limits<double>::infinity()) return log_f;
  return log_f + copula.log_density(u);
}

double joint_pdf(std::span<const MarginalModel> marginals, const CopulaModel& copula,
                 const Vector& z) {
  return std::exp(log_joint_pdf(marginals, copula, z));
}

JointModel fit_joint_model(const Matrix& samples, MarginalKind kind, bool with_copula) {
  const auto k = samples.rows();
  const auto n = samples.cols();
  if (n < 1) throw DimensionError("joint model needs at least one sensor");

  std::vector<MarginalModel> marginals;
  Matrix scores(k, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Vector col = samples.col(j);
    const std::span<const double> view(col.data(), static_cast<std::size_t>(k));
    MarginalModel empirical = fit_empirical_marginal(view);
    for (Eigen::Index i = 0; i < k; ++i) scores(i, j) = empirical.cdf(col[i]);
    if (kind == MarginalKind::kEmpirical) {
      marginals.push_back(std::move(empirical));
    } else {
      marginals.push_back(fit_gaussian_marginal(view));
    }
  }
  CopulaModel copula = with_copula ? fit_gaussian_copula(scores)
                                   : CopulaModel::independence(static_cast<std::size_t>(n));
  return JointModel{std::move(marginals), std::move(copula)};
}

FusionDecision fuse_detect(const JointModel& h0, const JointModel& h1, const Vector& z,
                           double threshold) {
  if (h0.dimension() != h1.dimension()) {
    throw DimensionError("hypothesis models have different dimensions");
  }
  const double l0 = h0.log_pdf(z);
  const double l1 = h1.log_pdf(z);
  constexpr double ninf = -std::numeric_limits<double>::infinity();
  if (l0 == ninf && l1 == ninf) {
    throw UndecidableError("observation has zero density under both hypotheses");
  }
  FusionDecision out;
  out.log_likelihood_ratio = l1 - l0;
  out.decision = out.log_likelihood_ratio > threshold ? Hypothesis::kH1 : Hypothesis::kH0;
  return out;
}

}  // namespace crowdsense
