#include <cmath>
#include <set>
#include <sstream>

#include "arpbo/errors.hpp"
#include "arpbo/sobol.hpp"
#include "doctest.h"

using namespace arpbo;

namespace {

// Direction numbers m_k from the textbook recurrence
// m_k = 2 a_1 m_{k-1} ^ 4 a_2 m_{k-2} ^ ... ^ 2^s m_{k-s} ^ m_{k-s}.
std::vector<double> textbook_directions(int dim, int count) {
  std::vector<std::uint64_t> m;
  if (dim == 1) {
    for (int k = 1; k <= count; ++k) m.push_back(1);
  } else {
    const auto& dir = sobol_directions()[static_cast<std::size_t>(dim - 2)];
    const int s = dir.degree;
    for (int k = 0; k < count; ++k) {
      if (k < s) {
        m.push_back(dir.initial[static_cast<std::size_t>(k)]);
        continue;
      }
      std::uint64_t v = m[k - s] ^ (m[k - s] << s);
      for (int i = 1; i < s; ++i)
        if ((dir.coefficients >> (s - 1 - i)) & 1u) v ^= m[k - i] << i;
      m.push_back(v);
    }
  }
  std::vector<double> out;
  for (int k = 0; k < count; ++k) out.push_back(static_cast<double>(m[k]) / std::ldexp(1.0, k + 1));
  return out;
}

// XOR of two dyadic fractions with at most 32 bits.
double dyadic_xor(double a, double b) {
  const auto ia = static_cast<std::uint64_t>(std::ldexp(a, 32));
  const auto ib = static_cast<std::uint64_t>(std::ldexp(b, 32));
  return std::ldexp(static_cast<double>(ia ^ ib), -32);
}

double star_discrepancy_proxy(const Matrix& pts) {
  // Largest gap between empirical and true volume over anchored boxes with
  // corners on a coarse grid.
  const int g = 8;
  const auto n = static_cast<double>(pts.rows());
  double worst = 0;
  for (int a = 1; a <= g; ++a)
    for (int b = 1; b <= g; ++b) {
      const double ca = double(a) / g, cb = double(b) / g;
      const auto inside = ((pts.col(0).array() < ca) && (pts.col(1).array() < cb)).count();
      worst = std::max(worst, std::abs(inside / n - ca * cb));
    }
  return worst;
}

}  // namespace

TEST_CASE("unscrambled sequence starts with the textbook points") {
  const Matrix one = sobol_points(4, 1);
  CHECK(one(0, 0) == 0.0);
  CHECK(one(1, 0) == 0.5);
  CHECK(one(2, 0) == 0.75);
  CHECK(one(3, 0) == 0.25);
  const Matrix two = sobol_points(4, 2);
  CHECK(two(2, 0) == 0.75);
  CHECK(two(2, 1) == 0.25);
}

TEST_CASE("first eight points agree with a hand-built construction") {
  for (int d = 1; d <= 4; ++d) {
    const Matrix pts = sobol_points(8, d);
    for (int j = 0; j < d; ++j) {
      const auto v = textbook_directions(j + 1, 3);
      for (int i = 0; i < 8; ++i) {
        const int gray = i ^ (i >> 1);
        double x = 0;
        for (int k = 0; k < 3; ++k)
          if ((gray >> k) & 1) x = dyadic_xor(x, v[static_cast<std::size_t>(k)]);
        CHECK(pts(i, j) == x);
      }
    }
  }
}

TEST_CASE("every 2^k prefix is stratified in each coordinate") {
  const Matrix pts = sobol_points(64, 10);
  for (int j = 0; j < 10; ++j) {
    std::set<int> cells;
    for (int i = 0; i < 64; ++i) cells.insert(static_cast<int>(pts(i, j) * 64));
    CHECK(cells.size() == 64);
  }
}

TEST_CASE("scrambling keeps stratification and depends on the seed only") {
  const Matrix a = sobol_points(32, 5, 7);
  const Matrix b = sobol_points(32, 5, 7);
  const Matrix c = sobol_points(32, 5, 8);
  CHECK(a == b);
  CHECK(a != c);
  CHECK((a.array() >= 0.0).all());
  CHECK((a.array() < 1.0).all());
  for (int j = 0; j < 5; ++j) {
    std::set<int> cells;
    for (int i = 0; i < 32; ++i) cells.insert(static_cast<int>(a(i, j) * 32));
    CHECK(cells.size() == 32);
  }
}

TEST_CASE("scrambled Sobol beats uniform random on a discrepancy proxy") {
  int wins = 0;
  double sobol_total = 0, random_total = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const double ds = star_discrepancy_proxy(sobol_points(256, 2, seed));
    Rng rng(seed + 1000);
    Matrix r(256, 2);
    for (int i = 0; i < 256; ++i) r.row(i) << uniform01(rng), uniform01(rng);
    const double dr = star_discrepancy_proxy(r);
    sobol_total += ds;
    random_total += dr;
    wins += ds < dr;
  }
  CHECK(sobol_total < random_total);
  CHECK(wins >= 17);
}

TEST_CASE("unsupported dimensions and malformed tables") {
  CHECK_THROWS_AS(sobol_points(4, 65), UnsupportedDimensionError);
  CHECK_THROWS_AS(sobol_points(4, 0), UnsupportedDimensionError);
  CHECK_NOTHROW(sobol_points(4, 64));
  CHECK(sobol_directions().size() == 63);
  std::istringstream bad("2 1 0 2\n");
  CHECK_THROWS_AS(parse_sobol_directions(bad), ConfigError);
  std::istringstream ok("# comment\n2 1 0 1\n3 2 1 1 3\n");
  const auto dirs = parse_sobol_directions(ok);
  REQUIRE(dirs.size() == 2);
  CHECK(dirs[1].initial == std::vector<std::uint32_t>{1, 3});
}
