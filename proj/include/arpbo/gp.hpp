#pragma once

#include <vector>

#include "arpbo/kernel.hpp"
#include "arpbo/space.hpp"
#include "arpbo/types.hpp"

namespace arpbo {

/// Search box and budget for hyperparameter fitting. Lengthscales are in
/// warped units.
struct SurrogateConfig {
  KernelOptions kernel;
  double lengthscale_lo = 0.005;
  double lengthscale_hi = 2.0;
  double signal_variance_lo = 0.05;
  double signal_variance_hi = 20.0;
  double noise_variance_lo = 1e-6;
  double noise_variance_hi = 1e-2;
  std::vector<double> lambda_grid = {0.0, 0.25, 0.5, 0.75, 1.0};
  double default_lambda = 0.5;
  double default_lengthscale = 0.5;
  int starts = 4;
  int sweeps = 2;
  int golden_iterations = 7;
  int max_evaluations = 2000;

  void check() const;
};

/// A Gaussian process conditioned on standardized targets.
struct GpModel {
  SearchSpace space;
  KernelOptions options;
  KernelParams params;
  KernelInputs train;
  Vector targets;    // standardized
  Matrix cholesky;   // lower factor of K + (noise + jitter) I
  Vector alpha;      // (K + noise I)^-1 targets
  double target_mean = 0.0;
  double target_std = 1.0;
  double jitter = 0.0;
  double log_marginal_likelihood = 0.0;
  /// Likelihood values of every hyperparameter probe visited while fitting.
  std::vector<double> probe_likelihoods;

  Eigen::Index size() const { return targets.size(); }
};

struct Posterior {
  Vector mean;
  Matrix covariance;
};

/// Kernel hyperparameters used when nothing has been fitted.
KernelParams default_kernel_params(const SearchSpace& space, const SurrogateConfig& config);

/// Conditions a GP on data with fixed hyperparameters.
GpModel gp_condition(const SearchSpace& space, const Matrix& warped_inputs, const Vector& targets,
                     const KernelParams& params, const KernelOptions& options);

/// Fits hyperparameters by maximizing the log marginal likelihood, then
/// conditions on the data. Requires at least two finite targets.
GpModel gp_fit(const SearchSpace& space, const Matrix& warped_inputs, const Vector& targets,
               const SurrogateConfig& config, Rng& rng);

/// Log marginal likelihood of standardized targets under given hyperparameters.
double gp_log_marginal_likelihood(const SearchSpace& space, const Matrix& warped_inputs,
                                  const Vector& targets, const KernelParams& params,
                                  const KernelOptions& options);

/// Latent posterior at the queries, de-standardized. The covariance is
/// symmetrized and its negative eigenvalues clipped to zero.
Posterior gp_posterior(const GpModel& model, const Matrix& warped_queries);

Vector gp_posterior_mean(const GpModel& model, const Matrix& warped_queries);

/// Draws `count` joint posterior samples; column k is one function draw over
/// all queries.
Matrix gp_sample(const GpModel& model, const Matrix& warped_queries, Rng& rng, int count);

/// Per-coordinate lengthscales over all D warped dimensions. Dimensions the
/// Matern part does not see get the geometric mean of the fitted ones.
Vector full_lengthscales(const GpModel& model);

}  // namespace arpbo
