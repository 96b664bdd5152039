#include "arpbo/kernel.hpp"

namespace arpbo {

namespace {

void check_blocks(const KernelInputs& a, const KernelInputs& b, const KernelParams& params) {
  if (a.x.cols() != b.x.cols() || a.y.cols() != b.y.cols() || a.z.cols() != b.z.cols())
    throw ShapeError("kernel inputs have mismatched blocks");
  if (a.x.cols() != params.lengthscales.size())
    throw ShapeError("lengthscale count does not match the continuous block");
}

}  // namespace

KernelInputs split_blocks(const SearchSpace& space, const Matrix& warped, const KernelOptions& opts) {
  if (warped.cols() != space.dimension()) throw ShapeError("warped matrix has wrong column count");
  const auto n = warped.rows();
  KernelInputs in;
  if (opts.kind == KernelKind::Matern) {
    in.x = warped;
    in.y.resize(n, 0);
    in.z.resize(n, 0);
    return in;
  }
  const auto& xd = space.real_dims();
  const auto& yd = space.integer_dims();
  const auto& zd = space.qualitative_dims();
  in.x.resize(n, static_cast<Eigen::Index>(xd.size()));
  in.y.resize(n, static_cast<Eigen::Index>(yd.size()));
  in.z.resize(n, static_cast<Eigen::Index>(zd.size()));
  for (Eigen::Index r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < xd.size(); ++c) in.x(r, static_cast<Eigen::Index>(c)) = warped(r, xd[c]);
    for (std::size_t c = 0; c < yd.size(); ++c) {
      double v = warped(r, yd[c]);
      if (opts.linear_on_raw) {
        const auto& spec = space.param(yd[c]);
        WarpedVector one = Vector::Zero(space.dimension());
        one(yd[c]) = v;
        v = static_cast<double>(std::get<std::int64_t>(unwarp(space, one).at(spec.name)));
      }
      in.y(r, static_cast<Eigen::Index>(c)) = v;
    }
    for (std::size_t c = 0; c < zd.size(); ++c)
      in.z(r, static_cast<Eigen::Index>(c)) = arm_index(space.param(zd[c]), warped(r, zd[c]));
  }
  return in;
}

double mixture_kernel(const KernelInputs& a, Eigen::Index i, const KernelInputs& b, Eigen::Index j,
                      const KernelParams& params, const KernelOptions& opts) {
  check_blocks(a, b, params);
  const bool has_x = a.x.cols() > 0;
  const bool has_y = a.y.cols() > 0;
  const bool has_z = a.z.cols() > 0;
  const double km =
      has_x ? matern52(a.x.row(i), b.x.row(j), params.lengthscales.transpose(), params.signal_variance) : 0.0;
  const double kl = has_y ? linear_kernel(a.y.row(i), b.y.row(j), params.linear_variance) : 0.0;
  const double ki = has_z ? indicator_kernel(a.z.row(i), b.z.row(j), opts.indicator) : 0.0;
  return combine_mixture(km, kl, ki, has_x, has_y, has_z, params.lambda);
}

Matrix cross_kernel(const KernelInputs& a, const KernelInputs& b, const KernelParams& params,
                    const KernelOptions& opts) {
  check_blocks(a, b, params);
  const auto n = a.rows();
  const auto m = b.rows();
  const bool has_x = a.x.cols() > 0;
  const bool has_y = a.y.cols() > 0;
  const bool has_z = a.z.cols() > 0;

  Matrix km = Matrix::Zero(n, m);
  if (has_x) {
    const Vector l2 = params.lengthscales.array().square();
    for (Eigen::Index j = 0; j < m; ++j)
      for (Eigen::Index i = 0; i < n; ++i) {
        double r2 = 0.0;
        for (Eigen::Index d = 0; d < a.x.cols(); ++d) {
          const double diff = a.x(i, d) - b.x(j, d);
          r2 += diff * diff / l2(d);
        }
        km(i, j) = matern52_from_distance(std::sqrt(r2), params.signal_variance);
      }
  }
  Matrix kl = has_y ? Matrix(params.linear_variance * a.y * b.y.transpose()) : Matrix::Zero(n, m);
  Matrix ki = Matrix::Zero(n, m);
  if (has_z)
    for (Eigen::Index j = 0; j < m; ++j)
      for (Eigen::Index i = 0; i < n; ++i) ki(i, j) = indicator_kernel(a.z.row(i), b.z.row(j), opts.indicator);

  Matrix out(n, m);
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      out(i, j) = combine_mixture(km(i, j), kl(i, j), ki(i, j), has_x, has_y, has_z, params.lambda);
  return out;
}

}  // namespace arpbo
