#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "arpbo/types.hpp"

namespace arpbo {

enum class ParamKind { Real, Integer, Boolean, Categorical };
enum class Scale { Linear, Log };

/// One dimension of a mixed search space.
struct ParamSpec {
  std::string name;
  ParamKind kind = ParamKind::Real;
  double lo = 0.0;
  double hi = 1.0;
  Scale scale = Scale::Linear;
  std::vector<std::string> categories;

  static ParamSpec real(std::string name, double lo, double hi, Scale scale = Scale::Linear);
  static ParamSpec integer(std::string name, std::int64_t lo, std::int64_t hi,
                           Scale scale = Scale::Linear);
  static ParamSpec boolean(std::string name);
  static ParamSpec categorical(std::string name, std::vector<std::string> categories);

  bool is_qualitative() const { return kind == ParamKind::Boolean || kind == ParamKind::Categorical; }

  /// Number of bandit arms; only meaningful for qualitative parameters.
  int arm_count() const;
};

using ParamValue = std::variant<double, std::int64_t, bool, std::string>;

/// A concrete configuration: exactly one value per parameter, keyed by name.
using Point = std::map<std::string, ParamValue>;

/// Ordered collection of parameters partitioned into the continuous (x),
/// integer (y) and qualitative (z) blocks used by the mixture kernel.
class SearchSpace {
 public:
  /// Throws ConfigError on an empty list, duplicate names or invalid specs.
  explicit SearchSpace(std::vector<ParamSpec> params);

  static SearchSpace from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;

  const std::vector<ParamSpec>& params() const { return params_; }
  int dimension() const { return static_cast<int>(params_.size()); }
  const ParamSpec& param(int i) const { return params_[static_cast<std::size_t>(i)]; }

  const std::vector<int>& real_dims() const { return real_dims_; }
  const std::vector<int>& integer_dims() const { return integer_dims_; }
  const std::vector<int>& qualitative_dims() const { return qualitative_dims_; }

  /// Throws ValidationError naming the first offending parameter.
  void validate(const Point& p) const;

  /// Converts a JSON object `{"name": value, ...}` into a validated Point.
  Point point_from_json(const nlohmann::json& obj) const;
  nlohmann::json point_to_json(const Point& p) const;

 private:
  std::vector<ParamSpec> params_;
  std::vector<int> real_dims_;
  std::vector<int> integer_dims_;
  std::vector<int> qualitative_dims_;
};

WarpedVector warp(const SearchSpace& space, const Point& p);

/// Inverse of warp. Integers and arm indices snap to the nearest lattice
/// value, ties toward the lower one. Coordinates outside [0, 1] are clamped.
Point unwarp(const SearchSpace& space, const WarpedVector& w);

/// Maps a point of [0,1)^D to a configuration so that a uniform input gives
/// a uniform configuration: qualitative and linear integer dimensions take
/// each lattice value with equal probability.
Point from_unit_cube(const SearchSpace& space, const Vector& u);

Point random_point(const SearchSpace& space, Rng& rng);

/// Snaps a warped vector onto the lattice of representable configurations.
inline WarpedVector snap(const SearchSpace& space, const WarpedVector& w) {
  return warp(space, unwarp(space, w));
}

/// Arm index encoded by a qualitative coordinate.
int arm_index(const ParamSpec& spec, double coord);
double arm_coordinate(const ParamSpec& spec, int arm);

std::string to_string(const ParamValue& v);

}  // namespace arpbo
