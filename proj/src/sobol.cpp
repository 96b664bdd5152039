#include "arpbo/sobol.hpp"

#include <bit>
#include <sstream>
#include <string>

#include "arpbo/errors.hpp"
#include "arpbo/sobol_table.hpp"

namespace arpbo {

std::vector<SobolDirection> parse_sobol_directions(std::istream& in) {
  std::vector<SobolDirection> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    SobolDirection dir;
    if (!(fields >> dir.dimension >> dir.degree >> dir.coefficients) || dir.degree < 1)
      throw ConfigError("malformed direction-number line: " + line);
    for (int i = 0; i < dir.degree; ++i) {
      std::uint32_t m = 0;
      if (!(fields >> m) || m % 2 == 0 || m >= (1u << (i + 1)))
        throw ConfigError("invalid initial direction number on line: " + line);
      dir.initial.push_back(m);
    }
    if (!out.empty() && dir.dimension != out.back().dimension + 1)
      throw ConfigError("direction-number dimensions must be consecutive");
    out.push_back(std::move(dir));
  }
  return out;
}

const std::vector<SobolDirection>& sobol_directions() {
  static const std::vector<SobolDirection> table = [] {
    std::istringstream in(detail::kSobolDirectionTable);
    return parse_sobol_directions(in);
  }();
  return table;
}

SobolEngine::SobolEngine(int dimension, std::optional<std::uint64_t> scramble_seed)
    : dimension_(dimension) {
  if (dimension < 1 || dimension > kSobolMaxDimension)
    throw UnsupportedDimensionError("Sobol dimension " + std::to_string(dimension) +
                                    " outside supported range [1, 64]");
  const auto& table = sobol_directions();
  if (static_cast<int>(table.size()) + 1 < dimension)
    throw UnsupportedDimensionError("direction-number table too short");

  const auto d = static_cast<std::size_t>(dimension);
  direction_.assign(kBits * d, 0);
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<std::uint32_t> v(kBits + 1);  // 1-based
    if (j == 0) {
      for (int k = 1; k <= kBits; ++k) v[k] = 1u << (kBits - k);
    } else {
      const auto& dir = table[j - 1];
      const int s = dir.degree;
      for (int k = 1; k <= std::min(s, kBits); ++k) v[k] = dir.initial[k - 1] << (kBits - k);
      for (int k = s + 1; k <= kBits; ++k) {
        v[k] = v[k - s] ^ (v[k - s] >> s);
        for (int i = 1; i < s; ++i)
          if ((dir.coefficients >> (s - 1 - i)) & 1u) v[k] ^= v[k - i];
      }
    }
    for (int k = 0; k < kBits; ++k) direction_[static_cast<std::size_t>(k) * d + j] = v[k + 1];
  }

  state_.assign(d, 0);
  if (scramble_seed) {
    Rng rng(*scramble_seed);
    for (std::size_t j = 0; j < d; ++j) {
      // Lower-triangular binary matrix with unit diagonal; row r produces the
      // r-th most significant output digit.
      std::uint32_t rows[kBits];
      for (int r = 0; r < kBits; ++r) {
        const std::uint32_t below = r == 0 ? 0u : static_cast<std::uint32_t>(rng()) & ~((1u << (kBits - r)) - 1u);
        rows[r] = below | (1u << (kBits - 1 - r));
      }
      for (int k = 0; k < kBits; ++k) {
        auto& v = direction_[static_cast<std::size_t>(k) * d + j];
        std::uint32_t scrambled = 0;
        for (int r = 0; r < kBits; ++r)
          if (std::popcount(rows[r] & v) & 1) scrambled |= 1u << (kBits - 1 - r);
        v = scrambled;
      }
      state_[j] = static_cast<std::uint32_t>(rng());
    }
  }
}

Vector SobolEngine::next() {
  const auto d = static_cast<std::size_t>(dimension_);
  Vector out(dimension_);
  for (std::size_t j = 0; j < d; ++j) out(static_cast<Eigen::Index>(j)) = state_[j] * 0x1.0p-32;
  const int c = std::countr_one(index_);
  if (c >= kBits) throw UnsupportedDimensionError("Sobol sequence exhausted (2^32 points)");
  for (std::size_t j = 0; j < d; ++j) state_[j] ^= direction_[static_cast<std::size_t>(c) * d + j];
  ++index_;
  return out;
}

Matrix SobolEngine::draw(int n) {
  Matrix out(n, dimension_);
  for (int i = 0; i < n; ++i) out.row(i) = next().transpose();
  return out;
}

Matrix sobol_points(int n, int d, std::optional<std::uint64_t> scramble_seed) {
  if (n < 1) throw ShapeError("sobol_points needs n >= 1");
  SobolEngine engine(d, scramble_seed);
  return engine.draw(n);
}

}  // namespace arpbo
