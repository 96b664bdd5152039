#include "arpbo/gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include "arpbo/errors.hpp"

namespace arpbo {

namespace {

constexpr double kJitterStart = 1e-8;
constexpr double kJitterCap = 1e-2;
constexpr double kStdFloor = 1e-8;

struct Factor {
  Matrix lower;
  double jitter = 0.0;
};

// Cholesky of k + noise I, escalating an extra diagonal jitter by 10x from
// 1e-8 up to 1e-2 before giving up.
std::optional<Factor> try_factorize(const Matrix& k, double noise) {
  double jitter = 0.0;
  while (true) {
    Matrix a = k;
    a.diagonal().array() += noise + jitter;
    Eigen::LLT<Matrix> llt(a);
    if (llt.info() == Eigen::Success && llt.matrixL().toDenseMatrix().diagonal().minCoeff() > 0.0)
      return Factor{llt.matrixL(), jitter};
    jitter = jitter == 0.0 ? kJitterStart : jitter * 10.0;
    if (jitter > kJitterCap * (1.0 + 1e-9)) return std::nullopt;
  }
}

Factor factorize(const Matrix& k, double noise) {
  auto f = try_factorize(k, noise);
  if (!f) throw NumericalError("Cholesky failed after jitter escalation to 1e-2");
  return *std::move(f);
}

double lml_from_factor(const Factor& f, const Vector& y) {
  const Vector alpha = f.lower.transpose().triangularView<Eigen::Upper>().solve(
      f.lower.triangularView<Eigen::Lower>().solve(y));
  const double n = static_cast<double>(y.size());
  return -0.5 * y.dot(alpha) - f.lower.diagonal().array().log().sum() -
         0.5 * n * std::log(2.0 * std::numbers::pi);
}

struct Standardized {
  Vector y;
  double mean = 0.0;
  double std = 1.0;
};

Standardized standardize(const Vector& targets) {
  if (!targets.allFinite()) throw InputError("GP targets must be finite");
  Standardized s;
  s.mean = targets.mean();
  const double var = (targets.array() - s.mean).square().mean();
  s.std = std::max(std::sqrt(var), kStdFloor);
  s.y = (targets.array() - s.mean) / s.std;
  return s;
}

// Gram-matrix pieces that do not depend on the fitted hyperparameters, so
// each likelihood probe costs one pass over the per-dimension differences
// plus a Cholesky.
class LikelihoodProblem {
 public:
  LikelihoodProblem(const KernelInputs& in, const Vector& y, const KernelOptions& opts)
      : y_(y), n_(y.size()) {
    has_x_ = in.x.cols() > 0;
    has_y_ = in.y.cols() > 0;
    has_z_ = in.z.cols() > 0;
    for (Eigen::Index d = 0; d < in.x.cols(); ++d) {
      Matrix sq(n_, n_);
      for (Eigen::Index j = 0; j < n_; ++j)
        for (Eigen::Index i = 0; i < n_; ++i) {
          const double diff = in.x(i, d) - in.x(j, d);
          sq(i, j) = diff * diff;
        }
      sqdiff_.push_back(std::move(sq));
    }
    if (has_y_) linear_ = in.y * in.y.transpose();
    if (has_z_) {
      indicator_.resize(n_, n_);
      for (Eigen::Index j = 0; j < n_; ++j)
        for (Eigen::Index i = 0; i < n_; ++i)
          indicator_(i, j) = indicator_kernel(in.z.row(i), in.z.row(j), opts.indicator);
    }
  }

  Matrix gram(const KernelParams& p) const {
    Matrix km = Matrix::Zero(n_, n_);
    if (has_x_) {
      Matrix r2 = Matrix::Zero(n_, n_);
      for (std::size_t d = 0; d < sqdiff_.size(); ++d) {
        const double l = p.lengthscales(static_cast<Eigen::Index>(d));
        r2 += sqdiff_[d] / (l * l);
      }
      km = r2.unaryExpr([&](double v) { return matern52_from_distance(std::sqrt(v), p.signal_variance); });
    }
    Matrix out(n_, n_);
    for (Eigen::Index j = 0; j < n_; ++j)
      for (Eigen::Index i = 0; i < n_; ++i)
        out(i, j) = combine_mixture(km(i, j), has_y_ ? p.linear_variance * linear_(i, j) : 0.0,
                                    has_z_ ? indicator_(i, j) : 0.0, has_x_, has_y_, has_z_, p.lambda);
    return out;
  }

  double evaluate(const KernelParams& p) const {
    const auto f = try_factorize(gram(p), p.noise_variance);
    if (!f) return -std::numeric_limits<double>::infinity();
    return lml_from_factor(*f, y_);
  }

 private:
  Vector y_;
  Eigen::Index n_;
  bool has_x_ = false, has_y_ = false, has_z_ = false;
  std::vector<Matrix> sqdiff_;
  Matrix linear_;
  Matrix indicator_;
};

// Coordinates searched in log space: lengthscales, then signal variance
// (only with a continuous block), then noise variance.
struct SearchBox {
  Vector lo, hi;
  Eigen::Index n_ls = 0;
  bool has_signal = false;
};

KernelParams params_from_theta(const Vector& theta, const SearchBox& box, double lambda) {
  KernelParams p;
  p.lengthscales = theta.head(box.n_ls).array().exp();
  Eigen::Index k = box.n_ls;
  p.signal_variance = box.has_signal ? std::exp(theta(k++)) : 1.0;
  p.noise_variance = std::exp(theta(k));
  p.lambda = lambda;
  return p;
}

}  // namespace

void SurrogateConfig::check() const {
  if (!(lengthscale_lo > 0 && lengthscale_lo < lengthscale_hi))
    throw ConfigError("surrogate: need 0 < lengthscale_lo < lengthscale_hi");
  if (!(signal_variance_lo > 0 && signal_variance_lo < signal_variance_hi))
    throw ConfigError("surrogate: need 0 < signal_variance_lo < signal_variance_hi");
  if (!(noise_variance_lo >= 1e-8 && noise_variance_lo < noise_variance_hi))
    throw ConfigError("surrogate: need 1e-8 <= noise_variance_lo < noise_variance_hi");
  if (lambda_grid.empty()) throw ConfigError("surrogate: lambda grid is empty");
  for (double l : lambda_grid)
    if (!(l >= 0.0 && l <= 1.0)) throw ConfigError("surrogate: lambda grid values must lie in [0, 1]");
  if (!(default_lambda >= 0.0 && default_lambda <= 1.0))
    throw ConfigError("surrogate: default_lambda must lie in [0, 1]");
  if (starts < 1 || sweeps < 0 || golden_iterations < 1 || max_evaluations < 1)
    throw ConfigError("surrogate: search budget values must be positive");
}

KernelParams default_kernel_params(const SearchSpace& space, const SurrogateConfig& config) {
  const auto dx = config.kernel.kind == KernelKind::Matern
                      ? space.dimension()
                      : static_cast<int>(space.real_dims().size());
  KernelParams p;
  p.lengthscales = Vector::Constant(dx, std::clamp(config.default_lengthscale, config.lengthscale_lo,
                                                   config.lengthscale_hi));
  p.signal_variance = std::clamp(1.0, config.signal_variance_lo, config.signal_variance_hi);
  p.noise_variance = std::clamp(1e-4, config.noise_variance_lo, config.noise_variance_hi);
  p.lambda = config.default_lambda;
  return p;
}

double gp_log_marginal_likelihood(const SearchSpace& space, const Matrix& warped_inputs,
                                  const Vector& targets, const KernelParams& params,
                                  const KernelOptions& options) {
  const auto in = split_blocks(space, warped_inputs, options);
  const auto f = factorize(gram_matrix(in, params, options), params.noise_variance);
  return lml_from_factor(f, targets);
}

GpModel gp_condition(const SearchSpace& space, const Matrix& warped_inputs, const Vector& targets,
                     const KernelParams& params, const KernelOptions& options) {
  if (warped_inputs.rows() != targets.size()) throw ShapeError("inputs and targets differ in length");
  if (targets.size() < 1) throw InputError("GP needs at least one observation");
  params.check();
  const auto s = standardize(targets);
  GpModel m{space, options, params, split_blocks(space, warped_inputs, options), s.y, {}, {}, s.mean, s.std, 0.0, 0.0, {}};
  const auto f = factorize(gram_matrix(m.train, params, options), params.noise_variance);
  m.cholesky = f.lower;
  m.jitter = f.jitter;
  m.alpha = f.lower.transpose().triangularView<Eigen::Upper>().solve(
      f.lower.triangularView<Eigen::Lower>().solve(m.targets));
  m.log_marginal_likelihood = lml_from_factor(f, m.targets);
  return m;
}

GpModel gp_fit(const SearchSpace& space, const Matrix& warped_inputs, const Vector& targets,
               const SurrogateConfig& config, Rng& rng) {
  config.check();
  if (targets.size() < 2) throw InputError("gp_fit needs at least two observations");
  if (warped_inputs.rows() != targets.size()) throw ShapeError("inputs and targets differ in length");
  const auto s = standardize(targets);
  const auto in = split_blocks(space, warped_inputs, config.kernel);
  const LikelihoodProblem problem(in, s.y, config.kernel);

  SearchBox box;
  box.n_ls = in.x.cols();
  box.has_signal = box.n_ls > 0;
  const Eigen::Index n_theta = box.n_ls + (box.has_signal ? 1 : 0) + 1;
  box.lo.resize(n_theta);
  box.hi.resize(n_theta);
  box.lo.head(box.n_ls).setConstant(std::log(config.lengthscale_lo));
  box.hi.head(box.n_ls).setConstant(std::log(config.lengthscale_hi));
  if (box.has_signal) {
    box.lo(box.n_ls) = std::log(config.signal_variance_lo);
    box.hi(box.n_ls) = std::log(config.signal_variance_hi);
  }
  box.lo(n_theta - 1) = std::log(config.noise_variance_lo);
  box.hi(n_theta - 1) = std::log(config.noise_variance_hi);

  const int blocks = (in.x.cols() > 0) + (in.y.cols() > 0) + (in.z.cols() > 0);
  const bool search_lambda = config.kernel.kind == KernelKind::Mixture && blocks >= 2;

  std::vector<double> probes;
  int evaluations = 0;
  auto evaluate = [&](const Vector& theta, double lambda) {
    ++evaluations;
    const double v = problem.evaluate(params_from_theta(theta, box, lambda));
    if (std::isfinite(v)) probes.push_back(v);
    return v;
  };
  auto budget_left = [&] { return evaluations < config.max_evaluations; };

  const auto defaults = default_kernel_params(space, config);
  Vector theta0(n_theta);
  theta0.head(box.n_ls) = defaults.lengthscales.array().log();
  if (box.has_signal) theta0(box.n_ls) = std::log(defaults.signal_variance);
  theta0(n_theta - 1) = std::log(defaults.noise_variance);

  Vector best_theta = theta0;
  double best_lambda = config.default_lambda;
  double best_value = -std::numeric_limits<double>::infinity();

  constexpr double kInvPhi = 0.6180339887498949;
  for (int start = 0; start < config.starts && budget_left(); ++start) {
    Vector theta = theta0;
    if (start > 0)
      for (Eigen::Index c = 0; c < n_theta; ++c)
        theta(c) = box.lo(c) + uniform01(rng) * (box.hi(c) - box.lo(c));
    double lambda = config.default_lambda;
    double value = evaluate(theta, lambda);

    auto pick_lambda = [&] {
      for (double l : config.lambda_grid) {
        if (l == lambda || !budget_left()) continue;
        const double v = evaluate(theta, l);
        if (v > value) {
          value = v;
          lambda = l;
        }
      }
    };
    if (search_lambda) pick_lambda();

    for (int sweep = 0; sweep < config.sweeps && budget_left(); ++sweep) {
      for (Eigen::Index c = 0; c < n_theta && budget_left(); ++c) {
        // Golden-section maximization along one coordinate over its full range.
        double a = box.lo(c), b = box.hi(c);
        Vector probe = theta;
        double x1 = b - kInvPhi * (b - a), x2 = a + kInvPhi * (b - a);
        probe(c) = x1;
        double f1 = evaluate(probe, lambda);
        probe(c) = x2;
        double f2 = evaluate(probe, lambda);
        double arg = f1 >= f2 ? x1 : x2, val = std::max(f1, f2);
        for (int it = 0; it < config.golden_iterations && budget_left(); ++it) {
          if (f1 >= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kInvPhi * (b - a);
            probe(c) = x1;
            f1 = evaluate(probe, lambda);
            if (f1 > val) { val = f1; arg = x1; }
          } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kInvPhi * (b - a);
            probe(c) = x2;
            f2 = evaluate(probe, lambda);
            if (f2 > val) { val = f2; arg = x2; }
          }
        }
        if (val > value) {
          value = val;
          theta(c) = arg;
        }
      }
      if (search_lambda) pick_lambda();
    }
    if (value > best_value) {
      best_value = value;
      best_theta = theta;
      best_lambda = lambda;
    }
  }
  if (!std::isfinite(best_value)) throw NumericalError("no hyperparameter setting gave a valid Cholesky");

  auto model = gp_condition(space, warped_inputs, targets, params_from_theta(best_theta, box, best_lambda),
                            config.kernel);
  model.probe_likelihoods = std::move(probes);
  return model;
}

namespace {

struct RawPosterior {
  Vector mean;  // standardized
  Matrix cov;   // standardized, symmetrized
};

RawPosterior raw_posterior(const GpModel& model, const Matrix& warped_queries, bool with_cov) {
  const auto q = split_blocks(model.space, warped_queries, model.options);
  const Matrix ks = cross_kernel(model.train, q, model.params, model.options);
  RawPosterior r;
  r.mean = ks.transpose() * model.alpha;
  if (with_cov) {
    const Matrix v = model.cholesky.triangularView<Eigen::Lower>().solve(ks);
    Matrix cov = gram_matrix(q, model.params, model.options);
    cov.noalias() -= v.transpose() * v;
    r.cov = (cov + cov.transpose()) * 0.5;
  }
  return r;
}

}  // namespace

Vector gp_posterior_mean(const GpModel& model, const Matrix& warped_queries) {
  const auto r = raw_posterior(model, warped_queries, false);
  return (r.mean.array() * model.target_std + model.target_mean).matrix();
}

Posterior gp_posterior(const GpModel& model, const Matrix& warped_queries) {
  auto r = raw_posterior(model, warped_queries, true);
  Eigen::SelfAdjointEigenSolver<Matrix> es(r.cov);
  if (es.info() != Eigen::Success) throw NumericalError("posterior covariance eigendecomposition failed");
  const Vector ev = es.eigenvalues().cwiseMax(0.0);
  Matrix clipped = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
  clipped = (clipped + clipped.transpose()) * 0.5;
  const double s2 = model.target_std * model.target_std;
  return {(r.mean.array() * model.target_std + model.target_mean).matrix(), clipped * s2};
}

Matrix gp_sample(const GpModel& model, const Matrix& warped_queries, Rng& rng, int count) {
  if (warped_queries.rows() < 1) throw ShapeError("gp_sample needs at least one query");
  if (count < 1) throw ShapeError("gp_sample needs a positive sample count");
  const auto r = raw_posterior(model, warped_queries, true);
  const auto m = r.cov.rows();

  // Square root of the covariance: Cholesky with jitter escalation relative
  // to the mean diagonal, falling back to a clipped eigendecomposition.
  Matrix root;
  const double scale = std::max(r.cov.diagonal().mean(), 1e-12);
  for (double jitter = kJitterStart; jitter <= kJitterCap * (1.0 + 1e-9); jitter *= 10.0) {
    Matrix a = r.cov;
    a.diagonal().array() += jitter * scale;
    Eigen::LLT<Matrix> llt(a);
    if (llt.info() == Eigen::Success) {
      root = llt.matrixL();
      break;
    }
  }
  if (root.size() == 0) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(r.cov);
    if (es.info() != Eigen::Success) throw NumericalError("posterior covariance factorization failed");
    root = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  }

  std::normal_distribution<double> normal;
  Matrix eps(m, count);
  for (Eigen::Index j = 0; j < count; ++j)
    for (Eigen::Index i = 0; i < m; ++i) eps(i, j) = normal(rng);
  Matrix draws = root * eps;
  draws.colwise() += r.mean;
  return (draws.array() * model.target_std + model.target_mean).matrix();
}

Vector full_lengthscales(const GpModel& model) {
  const auto& space = model.space;
  const auto& ls = model.params.lengthscales;
  if (model.options.kind == KernelKind::Matern) return ls;
  Vector out = Vector::Ones(space.dimension());
  if (ls.size() == 0) return out;
  const double geo = std::exp(ls.array().log().mean());
  out.setConstant(geo);
  const auto& xd = space.real_dims();
  for (std::size_t c = 0; c < xd.size(); ++c) out(xd[c]) = ls(static_cast<Eigen::Index>(c));
  return out;
}

}  // namespace arpbo
