#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace arpbo {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using IndexVector = Eigen::VectorXi;

/// Unit-cube image of a configuration, one coordinate per parameter.
using WarpedVector = Eigen::VectorXd;

/// The library's single RNG type. Every stochastic operation takes one by
/// reference, so a seed fixes an entire run.
using Rng = std::mt19937_64;

/// Uniform draw in [0, 1) from the top 53 bits; identical on every platform.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace arpbo
