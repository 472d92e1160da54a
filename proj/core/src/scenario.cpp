#include "crowdsense/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "crowdsense/copula.hpp"
#include "crowdsense/errors.hpp"
#include "crowdsense/random.hpp"

namespace crowdsense {

namespace {

Matrix gaussian_matrix(Rng& rng, std::size_t rows, std::size_t cols) {
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rng.normal();
  }
  return m;
}

// Row-major linear index to (row, col).
std::pair<Eigen::Index, Eigen::Index> unflatten(std::uint64_t k, std::size_t cols) {
  return {static_cast<Eigen::Index>(k / cols), static_cast<Eigen::Index>(k % cols)};
}

Matrix draw_sensors(Rng& rng, std::size_t count, double rho, double shift) {
  Matrix out(static_cast<Eigen::Index>(count), 2);
  const double tail = std::sqrt(1.0 - rho * rho);
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const double g1 = rng.normal();
    const double g2 = rho * g1 + tail * rng.normal();
    out(i, 0) = g1 + shift;
    out(i, 1) = std::exp(g2);
  }
  return out;
}

}  // namespace

void ScenarioSpec::validate() const {
  if (rows == 0 || cols == 0) throw ValidationError("rows and cols must be positive");
  if (rank < 1 || rank > std::min(rows, cols)) {
    throw ValidationError("rank must lie in [1, min(rows, cols)]");
  }
  if (!(anomaly_frac >= 0.0 && anomaly_frac < 1.0)) {
    throw ValidationError("anomaly_frac must lie in [0, 1)");
  }
  if (!(missing_frac >= 0.0 && missing_frac < 1.0)) {
    throw ValidationError("missing_frac must lie in [0, 1)");
  }
  if (!(noise_sigma >= 0.0 && std::isfinite(noise_sigma))) {
    throw ValidationError("noise_sigma must be a nonnegative number");
  }
  if (!(anomaly_scale >= 0.1 && std::isfinite(anomaly_scale))) {
    throw ValidationError("anomaly_scale must be at least 0.1");
  }
}

std::size_t fraction_count(std::size_t total, double fraction) {
  return static_cast<std::size_t>(std::floor(static_cast<double>(total) * fraction + 1e-9));
}

Dataset generate_traffic(const ScenarioSpec& spec) {
  spec.validate();
  const std::size_t total = spec.rows * spec.cols;

  Dataset ds;
  ds.spec = spec;

  {
    Rng rng(spec.seed, "factors");
    const Matrix left = gaussian_matrix(rng, spec.rows, spec.rank);
    const Matrix right = gaussian_matrix(rng, spec.cols, spec.rank);
    ds.ground_truth_x = left * right.transpose();
    const Vector s = svd(ds.ground_truth_x).singular_values;
    ds.ground_truth_x /= s[0];
    if (!(s[static_cast<Eigen::Index>(spec.rank) - 1] / s[0] > 1e-10)) {
      throw ValidationError("generated factors are rank deficient; try another seed");
    }
  }

  ds.ground_truth_a = Matrix::Zero(static_cast<Eigen::Index>(spec.rows),
                                   static_cast<Eigen::Index>(spec.cols));
  {
    Rng rng(spec.seed, "anomalies");
    const auto picks = rng.sample_without_replacement(total, fraction_count(total, spec.anomaly_frac));
    for (auto k : picks) {
      const auto [i, j] = unflatten(k, spec.cols);
      const double sign = rng.sign();
      ds.ground_truth_a(i, j) = sign * rng.uniform(0.1, spec.anomaly_scale);
    }
  }

  Matrix noise = Matrix::Zero(ds.ground_truth_a.rows(), ds.ground_truth_a.cols());
  if (spec.noise_sigma > 0.0) {
    Rng rng(spec.seed, "noise");
    for (Eigen::Index i = 0; i < noise.rows(); ++i) {
      for (Eigen::Index j = 0; j < noise.cols(); ++j) noise(i, j) = rng.normal(0.0, spec.noise_sigma);
    }
  }

  ds.mask = Mask::full(spec.rows, spec.cols);
  {
    Rng rng(spec.seed, "mask");
    for (auto k : rng.sample_without_replacement(total, fraction_count(total, spec.missing_frac))) {
      ds.mask.erase(k / spec.cols, k % spec.cols);
    }
  }

  ds.observed = project_mask(ds.ground_truth_x + ds.ground_truth_a + noise, ds.mask);
  return ds;
}

double relative_error(const Matrix& estimate, const Matrix& truth) {
  if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols()) {
    throw DimensionError("relative_error: shapes differ");
  }
  return (estimate - truth).norm() / std::max(truth.norm(), 1e-30);
}

double anomaly_f1(const Matrix& estimate_a, const Matrix& truth_a, double threshold) {
  if (estimate_a.rows() != truth_a.rows() || estimate_a.cols() != truth_a.cols()) {
    throw DimensionError("anomaly_f1: shapes differ");
  }
  const auto est = (estimate_a.array().abs() > threshold);
  const auto tru = (truth_a.array().abs() > threshold);
  const auto tp = static_cast<double>((est && tru).count());
  const auto predicted = static_cast<double>(est.count());
  const auto actual = static_cast<double>(tru.count());
  if (predicted == 0.0 && actual == 0.0) return 1.0;
  return 2.0 * tp / (predicted + actual);
}

double roc_auc(std::span<const double> negatives, std::span<const double> positives) {
  if (negatives.empty() || positives.empty()) {
    throw InsufficientDataError("roc_auc needs scores from both classes");
  }
  struct Scored {
    double score;
    bool positive;
  };
  std::vector<Scored> all;
  all.reserve(negatives.size() + positives.size());
  for (double s : negatives) all.push_back({s, false});
  for (double s : positives) all.push_back({s, true});
  std::sort(all.begin(), all.end(),
            [](const Scored& a, const Scored& b) { return a.score < b.score; });

  // Sum of midranks of the positives.
  double rank_sum = 0.0;
  std::size_t i = 0;
  while (i < all.size()) {
    std::size_t j = i;
    while (j + 1 < all.size() && all[j + 1].score == all[i].score) ++j;
    const double midrank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) {
      if (all[k].positive) rank_sum += midrank;
    }
    i = j + 1;
  }
  const auto np = static_cast<double>(positives.size());
  const auto nn = static_cast<double>(negatives.size());
  return (rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

std::pair<PointSet, Vector> make_circle_annulus(std::size_t count, std::uint64_t seed) {
  if (count == 0) throw ValidationError("circle-annulus dataset needs at least one point");
  Rng rng(seed, "circle-annulus");
  PointSet points;
  points.reserve(count);
  Vector labels(static_cast<Eigen::Index>(count));
  for (std::size_t i = 0; i < count; ++i) {
    const bool inner = i % 2 == 0;
    const double u = rng.uniform01();
    const double r = inner ? std::sqrt(u) : std::sqrt(4.0 + 5.0 * u);
    const double theta = 2.0 * std::numbers::pi * rng.uniform01();
    Vector p(2);
    p << r * std::cos(theta), r * std::sin(theta);
    points.push_back(std::move(p));
    labels[static_cast<Eigen::Index>(i)] = inner ? 1.0 : -1.0;
  }
  return {std::move(points), std::move(labels)};
}

FusionExperimentResult run_fusion_experiment(const FusionExperimentSpec& spec) {
  if (spec.trials < 2 || spec.training < 3) {
    throw ValidationError("fusion experiment needs >= 2 trials and >= 3 training draws");
  }
  if (!(spec.rho > -1.0 && spec.rho < 1.0)) throw ValidationError("rho must lie in (-1, 1)");

  Rng train_rng(spec.seed, "fusion-train");
  const Matrix train0 = draw_sensors(train_rng, spec.training, spec.rho, 0.0);
  const Matrix train1 = draw_sensors(train_rng, spec.training, spec.rho, spec.shift);

  const JointModel copula0 = fit_joint_model(train0, MarginalKind::kEmpirical, true);
  const JointModel copula1 = fit_joint_model(train1, MarginalKind::kEmpirical, true);
  const JointModel product0 = fit_joint_model(train0, MarginalKind::kEmpirical, false);
  const JointModel product1 = fit_joint_model(train1, MarginalKind::kEmpirical, false);

  Rng trial_rng(spec.seed, "fusion-trials");
  std::vector<double> copula_neg, copula_pos, product_neg, product_pos;
  for (std::size_t t = 0; t < spec.trials; ++t) {
    const bool h1 = t % 2 == 1;
    const Matrix draw = draw_sensors(trial_rng, 1, spec.rho, h1 ? spec.shift : 0.0);
    const Vector z = draw.row(0).transpose();
    const double lc = fuse_detect(copula0, copula1, z).log_likelihood_ratio;
    const double lp = fuse_detect(product0, product1, z).log_likelihood_ratio;
    (h1 ? copula_pos : copula_neg).push_back(lc);
    (h1 ? product_pos : product_neg).push_back(lp);
  }

  FusionExperimentResult out;
  out.auc_copula = roc_auc(copula_neg, copula_pos);
  out.auc_product = roc_auc(product_neg, product_pos);
  out.fitted_rho = copula0.copula.correlation()(0, 1);
  out.trials = spec.trials;
  return out;
}

}  // namespace crowdsense
