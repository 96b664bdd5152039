#pragma once

#include <limits>
#include <optional>

#include "arpbo/types.hpp"

namespace arpbo {

/// Trust-region tuning knobs. Unset optionals are derived from the problem
/// dimension and batch size by resolve().
struct TrustRegionConfig {
  double length_init = 0.8;
  double length_max = 1.6;
  double length_min = 0.125;  // 2^-3
  int success_tolerance = 3;
  std::optional<int> failure_tolerance;      // max(4, ceil(D / batch))
  std::optional<int> n_candidates;           // min(100 D, 5000)
  std::optional<double> perturbation_prob;   // min(1, 20 / D)
  /// Relative margin a batch must beat the incumbent by to count as success.
  double improvement_margin = 1e-3;

  /// Copy with every optional filled in; throws ConfigError when invalid.
  TrustRegionConfig resolve(int dimension, int batch_size) const;
};

struct TrustRegionState {
  WarpedVector center;
  double length = 0.8;
  int success_count = 0;
  int failure_count = 0;
  double best_value = std::numeric_limits<double>::infinity();
  int restarts = 0;

  static TrustRegionState fresh(const WarpedVector& center, double best_value,
                                const TrustRegionConfig& config);
};

struct Box {
  Vector lo;
  Vector hi;
};

/// Hyper-rectangle around the center. Side i is
/// length * ls_i / geomean(ls), clipped to the unit cube.
Box region_bounds(const TrustRegionState& state, const Vector& lengthscales);

/// Sobol candidates inside the region, one per row. Each candidate keeps the
/// center's value on coordinates that are not perturbed; every coordinate is
/// perturbed with probability perturbation_prob, and at least one always is.
/// Needs a resolved config.
Matrix generate_candidates(const TrustRegionState& state, const Vector& lengthscales, Rng& rng,
                           const TrustRegionConfig& config);

/// Success/failure bookkeeping after one observed batch. Lengths double after
/// success_tolerance consecutive successes (capped at length_max) and halve
/// after failure_tolerance consecutive failures.
TrustRegionState update_region(TrustRegionState state, double batch_best_value,
                               const WarpedVector& batch_best_point, const TrustRegionConfig& config);

inline bool needs_restart(const TrustRegionState& state, const TrustRegionConfig& config) {
  return state.length < config.length_min;
}

}  // namespace arpbo
