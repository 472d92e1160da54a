#include "crowdsense/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "crowdsense/errors.hpp"

namespace crowdsense {

namespace {

void require_same_dim(const Vector& x, const Vector& y) {
  if (x.size() != y.size()) {
    throw DimensionError("kernel arguments have dimensions " + std::to_string(x.size()) +
                         " and " + std::to_string(y.size()));
  }
}

void require_labels(std::span<const Vector> points, const Vector& labels) {
  if (points.empty()) throw ValidationError("training set is empty");
  if (static_cast<std::size_t>(labels.size()) != points.size()) {
    throw DimensionError("label count does not match point count");
  }
  for (double l : labels) {
    if (l != 1.0 && l != -1.0) throw ValidationError("labels must be +1 or -1");
  }
}

}  // namespace

KernelSpec KernelSpec::linear() { return {}; }

KernelSpec KernelSpec::polynomial(int degree, double offset) {
  KernelSpec s;
  s.kind = KernelKind::kPolynomial;
  s.degree = degree;
  s.offset = offset;
  s.validate();
  return s;
}

KernelSpec KernelSpec::gaussian(double sigma) {
  KernelSpec s;
  s.kind = KernelKind::kGaussian;
  s.bandwidth = sigma;
  s.validate();
  return s;
}

KernelSpec KernelSpec::gaussian_auto() {
  KernelSpec s;
  s.kind = KernelKind::kGaussian;
  return s;
}

void KernelSpec::validate() const {
  switch (kind) {
    case KernelKind::kLinear:
      return;
    case KernelKind::kPolynomial:
      if (degree < 1) throw ValidationError("polynomial degree must be >= 1");
      if (!(offset >= 0.0)) throw ValidationError("polynomial offset must be >= 0");
      return;
    case KernelKind::kGaussian:
      if (bandwidth && !(*bandwidth > 0.0 && std::isfinite(*bandwidth))) {
        throw ValidationError("gaussian bandwidth must be > 0");
      }
      return;
  }
}

double kernel_eval(const KernelSpec& spec, const Vector& x, const Vector& y) {
  require_same_dim(x, y);
  switch (spec.kind) {
    case KernelKind::kLinear:
      return x.dot(y);
    case KernelKind::kPolynomial:
      return std::pow(x.dot(y) + spec.offset, spec.degree);
    case KernelKind::kGaussian: {
      if (!spec.bandwidth) {
        throw ValidationError("gaussian bandwidth unresolved; call resolve_bandwidth");
      }
      const double s = *spec.bandwidth;
      return std::exp(-(x - y).squaredNorm() / (2.0 * s * s));
    }
  }
  return 0.0;
}

Vector feature_map_deg2(const Vector& x) {
  if (x.size() != 2) throw DimensionError("feature_map_deg2 takes a 2-vector");
  Vector phi(3);
  phi << x[0] * x[0], std::numbers::sqrt2 * x[0] * x[1], x[1] * x[1];
  return phi;
}

Matrix gram(const KernelSpec& spec, std::span<const Vector> points) {
  if (points.empty()) throw ValidationError("gram of an empty point set");
  spec.validate();
  const auto k = static_cast<Eigen::Index>(points.size());
  Matrix g(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double v = kernel_eval(spec, points[static_cast<std::size_t>(i)],
                                   points[static_cast<std::size_t>(j)]);
      g(i, j) = v;
      g(j, i) = v;
    }
  }
  return g;
}

bool is_valid_gram(const Matrix& g) {
  if (g.rows() != g.cols() || g.size() == 0) return false;
  if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-12) return false;
  return min_eigenvalue(g) >= -1e-8 * g.trace();
}

double median_pairwise_distance(std::span<const Vector> points) {
  std::vector<double> d;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) d.push_back((points[i] - points[j]).norm());
  }
  if (d.empty()) return 1.0;
  const auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
  std::nth_element(d.begin(), mid, d.end());
  double med = *mid;
  if (d.size() % 2 == 0) med = 0.5 * (med + *std::max_element(d.begin(), mid));
  return med > 0.0 ? med : 1.0;
}

KernelSpec resolve_bandwidth(KernelSpec spec, std::span<const Vector> points) {
  if (spec.kind == KernelKind::kGaussian && !spec.bandwidth) {
    spec.bandwidth = median_pairwise_distance(points);
  }
  return spec;
}

KernelModel krr_train(const KernelSpec& spec, std::span<const Vector> points,
                      const Vector& labels, double ridge) {
  require_labels(points, labels);
  if (!(ridge > 0.0 && std::isfinite(ridge))) {
    throw ValidationError("ridge must be positive");
  }
  KernelModel model;
  model.spec = resolve_bandwidth(spec, points);
  model.spec.validate();
  model.support_points.assign(points.begin(), points.end());
  model.ridge = ridge;

  Matrix system = gram(model.spec, points);
  system.diagonal().array() += ridge;

  Eigen::LLT<Matrix> llt(system);
  if (llt.info() == Eigen::Success) {
    model.coefficients = llt.solve(labels);
  }
  const double tol = 1e-8 * labels.norm();
  if (llt.info() != Eigen::Success || !model.coefficients.allFinite() ||
      (system * model.coefficients - labels).norm() > tol) {
    model.coefficients = system.completeOrthogonalDecomposition().solve(labels);
    model.used_fallback_solver = true;
  }
  if (!model.coefficients.allFinite()) {
    throw SolverError("kernel ridge system could not be solved");
  }
  return model;
}

double krr_predict(const KernelModel& model, const Vector& x) {
  if (model.coefficients.size() != static_cast<Eigen::Index>(model.support_points.size())) {
    throw DimensionError("model coefficients do not match its support points");
  }
  double score = 0.0;
  for (std::size_t i = 0; i < model.support_points.size(); ++i) {
    score += model.coefficients[static_cast<Eigen::Index>(i)] *
             kernel_eval(model.spec, model.support_points[i], x);
  }
  return score;
}

double krr_accuracy(const KernelModel& model, std::span<const Vector> points,
                    const Vector& labels) {
  require_labels(points, labels);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double predicted = krr_predict(model, points[i]) > 0.0 ? 1.0 : -1.0;
    if (predicted == labels[static_cast<Eigen::Index>(i)]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(points.size());
}

LinearSeparator train_perceptron(std::span<const Vector> features, const Vector& labels,
                                 int max_epochs) {
  require_labels(features, labels);
  const auto dim = features.front().size();
  LinearSeparator sep{Vector::Zero(dim), 0.0, 0, false};
  for (int epoch = 1; epoch <= max_epochs; ++epoch) {
    int mistakes = 0;
    for (std::size_t i = 0; i < features.size(); ++i) {
      if (features[i].size() != dim) throw DimensionError("feature dimensions differ");
      const double y = labels[static_cast<Eigen::Index>(i)];
      if (y * (sep.weights.dot(features[i]) + sep.bias) <= 0.0) {
        sep.weights += y * features[i];
        sep.bias += y;
        ++mistakes;
      }
    }
    sep.epochs = epoch;
    if (mistakes == 0) {
      sep.separated = true;
      break;
    }
  }
  return sep;
}

double separator_accuracy(const LinearSeparator& sep, std::span<const Vector> features,
                          const Vector& labels) {
  require_labels(features, labels);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < features.size(); ++i) {
    const double predicted = sep.weights.dot(features[i]) + sep.bias > 0.0 ? 1.0 : -1.0;
    if (predicted == labels[static_cast<Eigen::Index>(i)]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(features.size());
}

double best_line_accuracy(std::span<const Vector> points, const Vector& labels,
                          int angles, int offsets) {
  require_labels(points, labels);
  if (angles < 1 || offsets < 2) throw ValidationError("sweep needs angles >= 1, offsets >= 2");
  const auto n = points.size();
  std::vector<double> proj(n);
  double best = 0.0;
  for (int a = 0; a < angles; ++a) {
    const double theta = std::numbers::pi * a / angles;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    for (std::size_t i = 0; i < n; ++i) {
      if (points[i].size() != 2) throw DimensionError("line sweep needs 2-D points");
      proj[i] = c * points[i][0] + s * points[i][1];
    }
    const auto [lo, hi] = std::minmax_element(proj.begin(), proj.end());
    for (int o = 0; o < offsets; ++o) {
      const double t = *lo + (*hi - *lo) * o / (offsets - 1);
      std::size_t hits = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const double predicted = proj[i] > t ? 1.0 : -1.0;
        if (predicted == labels[static_cast<Eigen::Index>(i)]) ++hits;
      }
      const double acc = static_cast<double>(hits) / static_cast<double>(n);
      best = std::max({best, acc, 1.0 - acc});
    }
  }
  return best;
}

}  // namespace crowdsense
