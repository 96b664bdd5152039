#pragma once

#include <vector>

#include "arpbo/space.hpp"
#include "arpbo/types.hpp"

namespace arpbo::testing {

/// 3 real, 2 integer and 2 categorical dimensions.
inline SearchSpace mixed_space() {
  return SearchSpace({ParamSpec::real("a", 0.0, 1.0), ParamSpec::real("b", -5.0, 5.0),
                      ParamSpec::real("c", 1e-3, 1.0, Scale::Log), ParamSpec::integer("i", 0, 10),
                      ParamSpec::integer("j", 1, 64, Scale::Log),
                      ParamSpec::categorical("k", {"p", "q", "r"}),
                      ParamSpec::categorical("m", {"u", "v", "w", "x"})});
}

inline SearchSpace continuous_space(int d) {
  std::vector<ParamSpec> p;
  for (int i = 0; i < d; ++i) p.push_back(ParamSpec::real("x" + std::to_string(i), 0.0, 1.0));
  return SearchSpace(std::move(p));
}

/// n random lattice-respecting warped points, one per row.
inline Matrix random_warped(const SearchSpace& space, int n, Rng& rng) {
  Matrix out(n, space.dimension());
  for (int r = 0; r < n; ++r) out.row(r) = warp(space, random_point(space, rng)).transpose();
  return out;
}

}  // namespace arpbo::testing
