#pragma once

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "arpbo/errors.hpp"
#include "arpbo/space.hpp"
#include "arpbo/types.hpp"

namespace arpbo {

/// How the qualitative block is compared.
enum class IndicatorMode {
  Overlap,  ///< mean of per-dimension matches
  Strict,   ///< 1 only when every dimension matches
};

enum class KernelKind {
  Matern,   ///< ARD Matern-5/2 over every warped coordinate
  Mixture,  ///< (1-l)(kM + kL + kI) + l kM kL kI over the x/y/z blocks
};

struct KernelOptions {
  KernelKind kind = KernelKind::Mixture;
  IndicatorMode indicator = IndicatorMode::Overlap;
  /// Feed raw integer values to the linear kernel instead of warped ones.
  bool linear_on_raw = false;
};

/// Hyperparameters of the mixture kernel. nu and the linear-kernel variance
/// are fixed; the rest are fitted.
template <typename Scalar>
struct BasicKernelParams {
  static constexpr Scalar nu = Scalar(2.5);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> lengthscales;
  Scalar signal_variance = Scalar(1);
  Scalar linear_variance = Scalar(1);
  Scalar lambda = Scalar(0.5);
  Scalar noise_variance = Scalar(1e-4);

  void check() const {
    if ((lengthscales.array() <= Scalar(0)).any()) throw ConfigError("lengthscales must be positive");
    if (!(signal_variance > Scalar(0))) throw ConfigError("signal variance must be positive");
    if (!(lambda >= Scalar(0) && lambda <= Scalar(1))) throw ConfigError("lambda must lie in [0, 1]");
    if (!(noise_variance >= Scalar(1e-8))) throw ConfigError("noise variance must be >= 1e-8");
  }
};

using KernelParams = BasicKernelParams<double>;

/// Matern-5/2 as a function of the lengthscale-scaled distance.
template <typename Scalar>
Scalar matern52_from_distance(Scalar d, Scalar signal_variance) {
  using std::exp;
  using std::sqrt;
  const Scalar r = sqrt(Scalar(5)) * d;
  return signal_variance * (Scalar(1) + r + r * r / Scalar(3)) * exp(-r);
}

template <typename DerivedA, typename DerivedB, typename DerivedL>
typename DerivedA::Scalar matern52(const Eigen::MatrixBase<DerivedA>& x,
                                   const Eigen::MatrixBase<DerivedB>& x2,
                                   const Eigen::MatrixBase<DerivedL>& lengthscales,
                                   typename DerivedA::Scalar signal_variance) {
  if (x.size() != x2.size() || x.size() != lengthscales.size())
    throw ShapeError("matern52: vectors and lengthscales differ in length");
  const auto d = ((x - x2).array() / lengthscales.array()).matrix().norm();
  return matern52_from_distance(d, signal_variance);
}

template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar linear_kernel(const Eigen::MatrixBase<DerivedA>& y,
                                        const Eigen::MatrixBase<DerivedB>& y2,
                                        typename DerivedA::Scalar v) {
  if (y.size() != y2.size()) throw ShapeError("linear_kernel: vectors differ in length");
  return v * y.dot(y2);
}

/// Overlap mode returns the fraction of matching dimensions (1 when both are
/// empty); strict mode returns 1 only on whole-vector equality.
template <typename DerivedA, typename DerivedB>
double indicator_kernel(const Eigen::MatrixBase<DerivedA>& z, const Eigen::MatrixBase<DerivedB>& z2,
                        IndicatorMode mode = IndicatorMode::Overlap) {
  if (z.size() != z2.size()) throw ShapeError("indicator_kernel: vectors differ in length");
  const auto m = z.size();
  if (m == 0) return 1.0;
  const auto matches = (z.array() == z2.array()).count();
  if (mode == IndicatorMode::Strict) return matches == m ? 1.0 : 0.0;
  return static_cast<double>(matches) / static_cast<double>(m);
}

/// Combines the three sub-kernel values. A missing block is the identity of
/// each term: it adds 0 to the sum and multiplies the product by 1.
template <typename Scalar>
Scalar combine_mixture(Scalar km, Scalar kl, Scalar ki, bool has_x, bool has_y, bool has_z,
                       Scalar lambda) {
  Scalar sum(0), prod(1);
  if (has_x) { sum += km; prod *= km; }
  if (has_y) { sum += kl; prod *= kl; }
  if (has_z) { sum += ki; prod *= ki; }
  return (Scalar(1) - lambda) * sum + lambda * prod;
}

/// Row-major block view of a set of inputs: continuous, integer and
/// qualitative-arm columns.
struct KernelInputs {
  Matrix x;
  Matrix y;
  Eigen::MatrixXi z;

  Eigen::Index rows() const { return std::max({x.rows(), y.rows(), z.rows()}); }
};

/// Splits warped vectors (one per row) into kernel blocks. In Matern mode the
/// whole vector goes to the continuous block.
KernelInputs split_blocks(const SearchSpace& space, const Matrix& warped, const KernelOptions& opts);

/// Mixture kernel between row i of a and row j of b.
double mixture_kernel(const KernelInputs& a, Eigen::Index i, const KernelInputs& b, Eigen::Index j,
                      const KernelParams& params, const KernelOptions& opts = {});

/// Cross-covariance between every row of a and every row of b.
Matrix cross_kernel(const KernelInputs& a, const KernelInputs& b, const KernelParams& params,
                    const KernelOptions& opts = {});

inline Matrix gram_matrix(const KernelInputs& inputs, const KernelParams& params,
                          const KernelOptions& opts = {}) {
  Matrix k = cross_kernel(inputs, inputs, params, opts);
  return (k + k.transpose()) * 0.5;
}

}  // namespace arpbo
