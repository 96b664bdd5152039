#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <vector>

#include "arpbo/types.hpp"

namespace arpbo {

/// Primitive polynomial and initial direction numbers for one dimension.
struct SobolDirection {
  int dimension = 1;
  int degree = 0;        // s
  std::uint32_t coefficients = 0;  // a, inner polynomial coefficients
  std::vector<std::uint32_t> initial;  // m_1 .. m_s
};

/// Parses the "d s a m_1 .. m_s" text format; '#' starts a comment line.
std::vector<SobolDirection> parse_sobol_directions(std::istream& in);

/// The compiled-in table (dimensions 2..64; dimension 1 is implicit).
const std::vector<SobolDirection>& sobol_directions();

inline constexpr int kSobolMaxDimension = 64;

/// Gray-code Sobol generator with 32-bit resolution. With a seed the
/// sequence gets a random linear matrix scramble plus a digital shift; the
/// seed affects nothing else.
class SobolEngine {
 public:
  explicit SobolEngine(int dimension, std::optional<std::uint64_t> scramble_seed = std::nullopt);

  int dimension() const { return dimension_; }

  /// Next point of the sequence, in [0, 1)^d.
  Vector next();

  /// Next n points, one per row.
  Matrix draw(int n);

 private:
  static constexpr int kBits = 32;
  int dimension_;
  std::uint64_t index_ = 0;
  // direction_[k * dimension_ + j]: k-th direction number of dimension j.
  std::vector<std::uint32_t> direction_;
  std::vector<std::uint32_t> state_;
};

/// First n points of a (optionally scrambled) Sobol sequence in d
/// dimensions. Throws UnsupportedDimensionError for d outside [1, 64].
Matrix sobol_points(int n, int d, std::optional<std::uint64_t> scramble_seed = std::nullopt);

}  // namespace arpbo
