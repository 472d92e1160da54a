#pragma once

// Kernels, Gram matrices and a kernel ridge classifier.
//
// Conventions:
//   linear      k(x, y) = x . y
//   polynomial  k(x, y) = (x . y + c)^d
//   gaussian    k(x, y) = exp(-|x - y|^2 / (2 sigma^2))

#include <optional>
#include <span>
#include <vector>

#include "crowdsense/matrix.hpp"

namespace crowdsense {

enum class KernelKind { kLinear, kPolynomial, kGaussian };

struct KernelSpec {
  KernelKind kind = KernelKind::kLinear;
  int degree = 2;         // polynomial, >= 1
  double offset = 0.0;    // polynomial, >= 0
  // Gaussian bandwidth; unset means "median pairwise distance" at train time.
  std::optional<double> bandwidth;

  static KernelSpec linear();
  static KernelSpec polynomial(int degree, double offset);
  static KernelSpec gaussian(double sigma);
  static KernelSpec gaussian_auto();

  // Throws ValidationError when a parameter is out of range.
  void validate() const;
};

using PointSet = std::vector<Vector>;

double kernel_eval(const KernelSpec& spec, const Vector& x, const Vector& y);

// Explicit degree-2 monomial map (x1^2, sqrt(2) x1 x2, x2^2), whose inner
// products equal the homogeneous quadratic kernel (x . y)^2.
Vector feature_map_deg2(const Vector& x);

// K x K matrix of pairwise kernel values. The gaussian bandwidth must be
// resolved (see resolve_bandwidth).
Matrix gram(const KernelSpec& spec, std::span<const Vector> points);

// True when g is symmetric within 1e-12 and min eigenvalue >= -1e-8 * trace.
bool is_valid_gram(const Matrix& g);

double median_pairwise_distance(std::span<const Vector> points);

// Fills in an unset gaussian bandwidth with the median heuristic.
KernelSpec resolve_bandwidth(KernelSpec spec, std::span<const Vector> points);

struct KernelModel {
  KernelSpec spec;
  PointSet support_points;
  Vector coefficients;
  double ridge = 0.0;
  // Set when the Cholesky solve failed and a least-squares solve was used.
  bool used_fallback_solver = false;
};

// Kernel ridge regression on +-1 labels: (G + ridge I) alpha = labels.
KernelModel krr_train(const KernelSpec& spec, std::span<const Vector> points,
                      const Vector& labels, double ridge);

// sum_i alpha_i k(x_i, x)
double krr_predict(const KernelModel& model, const Vector& x);

// Fraction of points whose sign(score) matches the label (score 0 counts as
// -1).
double krr_accuracy(const KernelModel& model, std::span<const Vector> points,
                    const Vector& labels);

// Affine classifier sign(w . x + b) in an explicit feature space.
struct LinearSeparator {
  Vector weights;
  double bias = 0.0;
  int epochs = 0;
  bool separated = false;  // every training point classified correctly
};

// Perceptron with bias term; stops at the first epoch without mistakes.
LinearSeparator train_perceptron(std::span<const Vector> features, const Vector& labels,
                                 int max_epochs = 10000);

double separator_accuracy(const LinearSeparator& sep, std::span<const Vector> features,
                          const Vector& labels);

// Best accuracy of any line in 2-D among `angles` orientations times
// `offsets` offsets spanning the data, each tried with both sign choices.
double best_line_accuracy(std::span<const Vector> points, const Vector& labels,
                          int angles = 100, int offsets = 100);

}  // namespace crowdsense
