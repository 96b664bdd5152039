#include <cmath>

#include <nlohmann/json.hpp>

#include "arpbo/errors.hpp"
#include "arpbo/space.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace arpbo;

TEST_CASE("warp maps reals affinely and log-scaled values by log ratio") {
  const SearchSpace s({ParamSpec::real("lin", 0.0, 10.0), ParamSpec::real("log", 1.0, 100.0, Scale::Log),
                       ParamSpec::categorical("cat", {"a", "b", "c"})});
  const Point p{{"lin", 5.0}, {"log", 10.0}, {"cat", std::string("c")}};
  const auto w = warp(s, p);
  CHECK(w(0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(w(1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(w(2) == 1.0);
}

TEST_CASE("warp rejects out-of-bounds values and names the parameter") {
  const SearchSpace s({ParamSpec::real("lr", 0.0, 1.0), ParamSpec::categorical("act", {"relu", "tanh"})});
  try {
    warp(s, Point{{"lr", 2.0}, {"act", std::string("relu")}});
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("'lr'") != std::string::npos);
  }
  CHECK_THROWS_AS(warp(s, Point{{"lr", 0.5}, {"act", std::string("gelu")}}), ValidationError);
  CHECK_THROWS_AS(warp(s, Point{{"lr", 0.5}}), ValidationError);
}

TEST_CASE("unwarp snaps integers and arms to the nearest lattice value, ties down") {
  const SearchSpace s({ParamSpec::integer("n", 0, 10), ParamSpec::categorical("c", {"a", "b", "c"}),
                       ParamSpec::boolean("f")});
  Vector w(3);
  w << 0.5, 0.24, 0.5;
  auto p = unwarp(s, w);
  CHECK(std::get<std::int64_t>(p["n"]) == 5);
  CHECK(std::get<std::string>(p["c"]) == "a");
  CHECK(std::get<bool>(p["f"]) == false);  // tie at 0.5 goes to the lower arm

  w << 0.05, 0.25, 0.51;  // 0.5 between 0 and 1 rounds down; 0.25 is the tie between arms 0 and 1
  p = unwarp(s, w);
  CHECK(std::get<std::int64_t>(p["n"]) == 0);
  CHECK(std::get<std::string>(p["c"]) == "a");
  CHECK(std::get<bool>(p["f"]) == true);

  CHECK_THROWS_AS(unwarp(s, Vector::Zero(2)), ShapeError);
}

TEST_CASE("warp and unwarp are mutually inverse on lattice points") {
  const auto s = testing::mixed_space();
  Rng rng(11);
  for (int trial = 0; trial < 1000; ++trial) {
    Vector w(s.dimension());
    for (int i = 0; i < w.size(); ++i) w(i) = uniform01(rng);
    const Point once = unwarp(s, w);
    const Vector snapped = warp(s, once);
    // Same lattice cell: unwarping again gives the same configuration.
    const Point twice = unwarp(s, snapped);
    for (const auto& spec : s.params()) {
      if (spec.kind == ParamKind::Real) {
        CHECK(std::get<double>(twice.at(spec.name)) ==
              doctest::Approx(std::get<double>(once.at(spec.name))).epsilon(1e-12));
      } else {
        CHECK(twice.at(spec.name) == once.at(spec.name));
      }
    }
    CHECK((snapped.array() >= 0.0).all());
    CHECK((snapped.array() <= 1.0).all());
  }
}

TEST_CASE("random_point samples uniformly") {
  Rng rng(3);
  SUBCASE("real dimension mean") {
    const SearchSpace s({ParamSpec::real("x", 0.0, 1.0)});
    double sum = 0;
    for (int i = 0; i < 10000; ++i) {
      const auto p = random_point(s, rng);
      CHECK(p.size() == 1);
      sum += std::get<double>(p.at("x"));
    }
    CHECK(sum / 10000 >= 0.48);
    CHECK(sum / 10000 <= 0.52);
  }
  SUBCASE("categorical frequencies") {
    const SearchSpace s({ParamSpec::categorical("c", {"a", "b"})});
    int a = 0;
    for (int i = 0; i < 10000; ++i) a += std::get<std::string>(random_point(s, rng).at("c")) == "a";
    CHECK(a / 10000.0 >= 0.47);
    CHECK(a / 10000.0 <= 0.53);
  }
  SUBCASE("three-category variable is not biased toward the middle arm") {
    const SearchSpace s({ParamSpec::categorical("c", {"a", "b", "c"})});
    int counts[3] = {0, 0, 0};
    for (int i = 0; i < 9000; ++i) {
      const auto v = std::get<std::string>(random_point(s, rng).at("c"));
      ++counts[v[0] - 'a'];
    }
    for (int c : counts) CHECK(std::abs(c - 3000) < 200);
  }
  SUBCASE("output always validates") {
    const auto s = testing::mixed_space();
    for (int i = 0; i < 500; ++i) CHECK_NOTHROW(s.validate(random_point(s, rng)));
  }
}

TEST_CASE("blocks partition the dimensions") {
  const auto s = testing::mixed_space();
  std::vector<int> all;
  for (auto* block : {&s.real_dims(), &s.integer_dims(), &s.qualitative_dims()})
    all.insert(all.end(), block->begin(), block->end());
  std::sort(all.begin(), all.end());
  REQUIRE(static_cast<int>(all.size()) == s.dimension());
  for (int i = 0; i < s.dimension(); ++i) CHECK(all[static_cast<std::size_t>(i)] == i);
  CHECK(s.real_dims().size() == 3);
  CHECK(s.integer_dims().size() == 2);
  CHECK(s.qualitative_dims().size() == 2);
}

TEST_CASE("invalid specs are rejected") {
  CHECK_THROWS_AS(SearchSpace({}), ConfigError);
  CHECK_THROWS_AS(SearchSpace({ParamSpec::real("x", 1.0, 1.0)}), ConfigError);
  CHECK_THROWS_AS(SearchSpace({ParamSpec::real("x", 0.0, 1.0, Scale::Log)}), ConfigError);
  CHECK_THROWS_AS(SearchSpace({ParamSpec::categorical("c", {"a"})}), ConfigError);
  CHECK_THROWS_AS(SearchSpace({ParamSpec::categorical("c", {"a", "a"})}), ConfigError);
  CHECK_THROWS_AS(SearchSpace({ParamSpec::real("x", 0, 1), ParamSpec::boolean("x")}), ConfigError);
}

TEST_CASE("space loads from the documented JSON document") {
  const auto doc = nlohmann::json::parse(R"({"params":[
    {"name":"lr","kind":"real","lo":1e-4,"hi":1.0,"scale":"log"},
    {"name":"depth","kind":"integer","lo":1,"hi":10},
    {"name":"act","kind":"categorical","categories":["relu","tanh"]},
    {"name":"bias","kind":"boolean"}]})");
  const auto s = SearchSpace::from_json(doc);
  REQUIRE(s.dimension() == 4);
  CHECK(s.param(0).scale == Scale::Log);
  CHECK(s.param(1).kind == ParamKind::Integer);
  CHECK(s.param(2).categories == std::vector<std::string>{"relu", "tanh"});
  CHECK(s.param(3).kind == ParamKind::Boolean);
  CHECK(SearchSpace::from_json(s.to_json()).to_json() == s.to_json());

  const auto p = s.point_from_json(nlohmann::json::parse(R"({"lr":0.01,"depth":3,"act":"tanh","bias":true})"));
  CHECK(s.point_to_json(p) == nlohmann::json::parse(R"({"lr":0.01,"depth":3,"act":"tanh","bias":true})"));
  CHECK_THROWS_AS(s.point_from_json(nlohmann::json::parse(R"({"lr":0.01,"depth":3.5,"act":"tanh","bias":true})")),
                  ValidationError);
  CHECK_THROWS_AS(SearchSpace::from_json(nlohmann::json::parse(R"({"params":[{"name":"x","kind":"float"}]})")),
                  ConfigError);
}
