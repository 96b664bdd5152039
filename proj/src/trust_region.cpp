#include "arpbo/trust_region.hpp"

#include <algorithm>
#include <cmath>

#include "arpbo/errors.hpp"
#include "arpbo/sobol.hpp"

namespace arpbo {

TrustRegionConfig TrustRegionConfig::resolve(int dimension, int batch_size) const {
  if (dimension < 1 || batch_size < 1) throw ConfigError("trust region: dimension and batch size must be >= 1");
  TrustRegionConfig c = *this;
  if (!c.failure_tolerance)
    c.failure_tolerance = std::max(4, (dimension + batch_size - 1) / batch_size);
  if (!c.n_candidates) c.n_candidates = std::min(100 * dimension, 5000);
  if (!c.perturbation_prob) c.perturbation_prob = std::min(1.0, 20.0 / dimension);
  if (!(c.length_min > 0 && c.length_min < c.length_init && c.length_init <= c.length_max))
    throw ConfigError("trust region: need 0 < length_min < length_init <= length_max");
  if (c.success_tolerance < 1 || *c.failure_tolerance < 1)
    throw ConfigError("trust region: tolerances must be >= 1");
  if (*c.n_candidates < 1) throw ConfigError("trust region: n_candidates must be >= 1");
  if (!(*c.perturbation_prob > 0 && *c.perturbation_prob <= 1))
    throw ConfigError("trust region: perturbation_prob must lie in (0, 1]");
  if (!(c.improvement_margin >= 0)) throw ConfigError("trust region: improvement_margin must be >= 0");
  return c;
}

TrustRegionState TrustRegionState::fresh(const WarpedVector& center, double best_value,
                                         const TrustRegionConfig& config) {
  TrustRegionState s;
  s.center = center;
  s.length = config.length_init;
  s.best_value = best_value;
  return s;
}

Box region_bounds(const TrustRegionState& state, const Vector& lengthscales) {
  const auto d = state.center.size();
  Vector weights = Vector::Ones(d);
  if (lengthscales.size() == d && (lengthscales.array() > 0).all()) {
    const double geo = std::exp(lengthscales.array().log().mean());
    weights = lengthscales / geo;
  }
  const Vector half = weights * (state.length / 2.0);
  Box box{(state.center - half).cwiseMax(0.0), (state.center + half).cwiseMin(1.0)};
  return box;
}

Matrix generate_candidates(const TrustRegionState& state, const Vector& lengthscales, Rng& rng,
                           const TrustRegionConfig& config) {
  const auto d = static_cast<int>(state.center.size());
  const int n = config.n_candidates.value_or(std::min(100 * d, 5000));
  const double prob = config.perturbation_prob.value_or(std::min(1.0, 20.0 / d));
  const Box box = region_bounds(state, lengthscales);
  const Matrix sobol = sobol_points(n, d, rng());

  Matrix out(n, d);
  for (int i = 0; i < n; ++i) {
    int perturbed = 0;
    for (int j = 0; j < d; ++j) {
      const bool mask = uniform01(rng) < prob;
      perturbed += mask;
      out(i, j) = mask ? box.lo(j) + (box.hi(j) - box.lo(j)) * sobol(i, j) : state.center(j);
    }
    if (perturbed == 0) {
      const auto j = static_cast<int>(rng() % static_cast<std::uint64_t>(d));
      out(i, j) = box.lo(j) + (box.hi(j) - box.lo(j)) * sobol(i, j);
    }
  }
  return out;
}

TrustRegionState update_region(TrustRegionState state, double batch_best_value,
                               const WarpedVector& batch_best_point, const TrustRegionConfig& config) {
  const int failure_tolerance = config.failure_tolerance.value_or(4);
  const bool improved =
      std::isinf(state.best_value)
          ? std::isfinite(batch_best_value)
          : batch_best_value < state.best_value - config.improvement_margin * std::abs(state.best_value);
  if (improved) {
    ++state.success_count;
    state.failure_count = 0;
  } else {
    ++state.failure_count;
    state.success_count = 0;
  }
  if (state.success_count == config.success_tolerance) {
    state.length = std::min(2.0 * state.length, config.length_max);
    state.success_count = 0;
  } else if (state.failure_count == failure_tolerance) {
    state.length /= 2.0;
    state.failure_count = 0;
  }
  if (batch_best_value < state.best_value) {
    state.best_value = batch_best_value;
    state.center = batch_best_point;
  }
  return state;
}

}  // namespace arpbo
