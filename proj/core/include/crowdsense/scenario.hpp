#pragma once

// Synthetic crowdsourced traffic matrices and the experiment metrics.
//
// generate_traffic builds Y = P(X + A + V):
//   X = L R^T, gaussian factors, rescaled to unit spectral norm
//   A = floor(M N anomaly_frac) entries of +-uniform(0.1, anomaly_scale)
//   V = iid gaussian(0, noise_sigma)
//   P drops floor(M N missing_frac) uniformly chosen entries
// Each ingredient draws from its own seeded stream (see random.hpp).

#include <cstdint>
#include <span>
#include <utility>

#include "crowdsense/kernel.hpp"
#include "crowdsense/matrix.hpp"

namespace crowdsense {

struct ScenarioSpec {
  std::size_t rows = 100;
  std::size_t cols = 100;
  std::size_t rank = 5;
  double anomaly_frac = 0.05;
  double noise_sigma = 0.0;
  double missing_frac = 0.0;
  double anomaly_scale = 10.0;
  std::uint64_t seed = 0;

  // Throws ValidationError.
  void validate() const;
};

struct Dataset {
  Matrix observed;  // zero where unobserved
  Mask mask;
  Matrix ground_truth_x;
  Matrix ground_truth_a;
  ScenarioSpec spec;
};

// floor(total * fraction), robust to the representation error of fraction.
std::size_t fraction_count(std::size_t total, double fraction);

Dataset generate_traffic(const ScenarioSpec& spec);

// |estimate - truth|_F / max(|truth|_F, 1e-30)
double relative_error(const Matrix& estimate, const Matrix& truth);

// F1 score of the supports {|v| > threshold}. Two empty supports score 1.
double anomaly_f1(const Matrix& estimate_a, const Matrix& truth_a,
                  double threshold = 1e-9);

// Area under the ROC curve of scores separating negatives from positives
// (Mann-Whitney, ties count one half).
double roc_auc(std::span<const double> negatives, std::span<const double> positives);

// Two concentric classes: +1 uniformly in the unit disk, -1 uniformly in the
// annulus 2 <= r <= 3. Labels alternate starting with +1.
std::pair<PointSet, Vector> make_circle_annulus(std::size_t count, std::uint64_t seed);

// Two heterogeneous sensors driven by a correlated gaussian pair (g1, g2):
// sensor 1 reads g1 + shift under H1 (g1 under H0); sensor 2 reads exp(g2)
// under both. The copula detector and the product-model detector are fit on
// the same training draws and scored on the same trials.
struct FusionExperimentSpec {
  std::size_t trials = 2000;
  std::size_t training = 2000;
  double rho = 0.8;
  double shift = 1.0;
  std::uint64_t seed = 0;
};

struct FusionExperimentResult {
  double auc_copula = 0.0;
  double auc_product = 0.0;
  double fitted_rho = 0.0;  // off-diagonal of the H0 copula
  std::size_t trials = 0;
};

FusionExperimentResult run_fusion_experiment(const FusionExperimentSpec& spec);

}  // namespace crowdsense
