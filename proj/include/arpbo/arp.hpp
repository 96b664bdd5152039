#pragma once

#include <optional>
#include <vector>

#include "arpbo/space.hpp"
#include "arpbo/types.hpp"

namespace arpbo {

/// Adaptive region partitioning settings.
struct ArpConfig {
  std::optional<int> activation_threshold;  // max(16, 2 D)
  int svm_budget = 200;                     // SMO passes; one pass = n pair updates
  double svm_c = 1.0;
  double fallback_fraction = 0.2;
  int restart_attempt_factor = 50;

  ArpConfig resolve(int dimension) const;
};

/// Splits observed values into a good (true) and bad (false) group with the
/// exact 1-D two-means split; good is the lower-mean cluster. Throws
/// DegenerateError when every value is identical and InputError for fewer
/// than four or non-finite values.
std::vector<bool> label_observations(const Vector& values);

/// Within-cluster sum of squares of a two-group labeling.
double two_cluster_sse(const Vector& values, const std::vector<bool>& labels);

/// Soft-margin SVM with a Gaussian radial kernel over warped points.
/// Positive decision values mean the good region.
class RegionClassifier {
 public:
  RegionClassifier() = default;
  RegionClassifier(Matrix support_vectors, Vector dual_coefs, double bias, double gamma, int trained_on,
                   double training_accuracy);

  double decision(const Vector& w) const;
  Vector decision(const Matrix& rows) const;

  const Matrix& support_vectors() const { return support_vectors_; }
  const Vector& dual_coefs() const { return dual_coefs_; }
  double bias() const { return bias_; }
  double kernel_gamma() const { return gamma_; }
  int trained_on() const { return trained_on_; }
  double training_accuracy() const { return training_accuracy_; }

 private:
  Matrix support_vectors_;
  Vector dual_coefs_;  // alpha_i * y_i
  double bias_ = 0.0;
  double gamma_ = 1.0;
  int trained_on_ = 0;
  double training_accuracy_ = 0.0;
};

/// Trains on every row of `points` with SMO (maximal-violating-pair working
/// set). gamma = 1 / median squared pairwise distance.
RegionClassifier fit_classifier(const Matrix& points, const std::vector<bool>& labels,
                                const ArpConfig& config = {});

/// Rows of `candidates` on the same side of the boundary as `best_point`
/// (decision >= 0 counts as positive). When fewer than fallback_fraction of
/// the candidates qualify, returns that many candidates ranked toward the
/// selected side instead. Never empty for nonempty input.
std::vector<Eigen::Index> select_candidates(const RegionClassifier& classifier, const Matrix& candidates,
                                            const Vector& best_point, double fallback_fraction);

Matrix filter_candidates(const RegionClassifier& classifier, const Matrix& candidates,
                         const Vector& best_point, double fallback_fraction);

/// Rejection-samples `count` configurations with positive decision value,
/// giving up after restart_attempt_factor * count draws and filling the
/// shortfall with unconditioned uniform samples.
std::vector<Point> restart_samples(const RegionClassifier& classifier, const SearchSpace& space, Rng& rng,
                                   int count, const ArpConfig& config = {});

}  // namespace arpbo
