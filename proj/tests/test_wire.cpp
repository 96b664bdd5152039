#include <cmath>

#include <nlohmann/json.hpp>

#include "arpbo/bench.hpp"
#include "arpbo/errors.hpp"
#include "arpbo/external.hpp"
#include "arpbo/wire.hpp"
#include "doctest.h"

using namespace arpbo;
using nlohmann::json;

namespace {

json hello_for(const Objective& o, int batch = 4) {
  return {{"kind", "hello"},
          {"payload",
           {{"space", o.space.to_json()},
            {"config", {{"batch_size", batch}, {"max_iterations", 16}, {"surrogate", {{"starts", 2}}}}}}}};
}

json respond(ServeSession& s, const json& request) {
  const auto line = s.handle_line(request.dump());
  REQUIRE(line.has_value());
  return json::parse(*line);
}

json random_json(Rng& rng, int depth) {
  switch (rng() % (depth > 2 ? 4 : 6)) {
    case 0: return static_cast<double>(rng() % 1000) / 7.0;
    case 1: return static_cast<std::int64_t>(rng() % 100) - 50;
    case 2: return std::string(1 + rng() % 5, static_cast<char>('a' + rng() % 26));
    case 3: return rng() % 2 == 0;
    case 4: {
      json arr = json::array();
      for (int i = 0; i < static_cast<int>(rng() % 4); ++i) arr.push_back(random_json(rng, depth + 1));
      return arr;
    }
    default: {
      json obj = json::object();
      for (int i = 0; i < static_cast<int>(rng() % 4); ++i)
        obj["k" + std::to_string(rng() % 10)] = random_json(rng, depth + 1);
      return obj;
    }
  }
}

}  // namespace

TEST_CASE("serialize then parse is the identity") {
  Rng rng(1);
  const char* kinds[] = {"hello", "suggest_request", "suggestions", "observe", "ack", "best", "error"};
  for (int i = 0; i < 2000; ++i) {
    WireMessage m{kinds[rng() % 7], json::object()};
    for (int k = 0; k < static_cast<int>(rng() % 5); ++k) m.payload["f" + std::to_string(k)] = random_json(rng, 0);
    CHECK(WireMessage::parse(m.serialize()) == m);
  }
}

TEST_CASE("parse rejects malformed messages without echoing them") {
  CHECK_THROWS_AS(WireMessage::parse("{not json"), ProtocolError);
  CHECK_THROWS_AS(WireMessage::parse("[1,2]"), ProtocolError);
  CHECK_THROWS_AS(WireMessage::parse(R"({"kind":"dance"})"), ProtocolError);
  CHECK_THROWS_AS(WireMessage::parse(R"({"kind":"best","payload":3})"), ProtocolError);
  try {
    WireMessage::parse("{\"kind\": SECRET_TOKEN");
  } catch (const ProtocolError& e) {
    CHECK(std::string(e.what()).find("SECRET_TOKEN") == std::string::npos);
  }
}

TEST_CASE("a serve session speaks the protocol") {
  const auto o = find_objective("mixed-sphere");
  ServeSession s;
  CHECK_FALSE(s.handle_line("").has_value());
  CHECK_FALSE(s.handle_line("   \r").has_value());
  auto r = respond(s, {{"kind", "suggest_request"}});
  CHECK(r["kind"] == "error");
  CHECK(r["payload"]["message"].get<std::string>().find("hello") != std::string::npos);

  r = respond(s, hello_for(o));
  REQUIRE(r["kind"] == "ack");
  CHECK(r["payload"]["batch_size"] == 4);

  r = respond(s, {{"kind", "observe"}, {"payload", {{"points", json::array()}, {"values", json::array()}}}});
  CHECK(r["kind"] == "error");
  CHECK(r["payload"]["message"].get<std::string>().find("suggest_request") != std::string::npos);

  r = respond(s, {{"kind", "suggest_request"}});
  REQUIRE(r["kind"] == "suggestions");
  const json points = r["payload"]["points"];
  CHECK(points.size() == 4);

  r = respond(s, {{"kind", "suggest_request"}});
  CHECK(r["kind"] == "error");
  CHECK(r["payload"]["message"].get<std::string>().find("observe") != std::string::npos);

  // Wrong point count: error, and the pending batch is still observable.
  json short_points = points;
  short_points.erase(short_points.begin());
  r = respond(s, {{"kind", "observe"}, {"payload", {{"points", short_points}, {"values", {1, 2, 3}}}}});
  CHECK(r["kind"] == "error");
  CHECK(s.optimizer()->history().empty());

  json values = json::array();
  for (const auto& p : points) values.push_back(o.evaluate(o.space.point_from_json(p)));
  values[1] = "nan";
  r = respond(s, {{"kind", "observe"}, {"payload", {{"points", points}, {"values", values}}}});
  REQUIRE(r["kind"] == "ack");
  CHECK(r["payload"]["warnings"] == 1);

  r = respond(s, {{"kind", "best"}});
  REQUIRE(r["kind"] == "best");
  CHECK(r["payload"]["value"].is_number());
  CHECK(r["payload"]["evaluations"] == 4);

  r = respond(s, {{"kind", "ack"}});
  CHECK(r["kind"] == "error");
}

TEST_CASE("scripted sixteen-round sessions beat a random driver") {
  const auto o = find_objective("mixed-sphere");
  double served = 0, random = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    ServeSession s;
    json hello = hello_for(o, 8);
    hello["payload"]["config"] = {{"seed", seed}};
    REQUIRE(respond(s, hello)["kind"] == "ack");
    for (int round = 0; round < 16; ++round) {
      const auto r = respond(s, {{"kind", "suggest_request"}});
      REQUIRE(r["kind"] == "suggestions");
      json values = json::array();
      for (const auto& p : r["payload"]["points"]) values.push_back(o.evaluate(o.space.point_from_json(p)));
      REQUIRE(respond(s, {{"kind", "observe"}, {"payload", {{"points", r["payload"]["points"]}, {"values", values}}}})[
                  "kind"] == "ack");
    }
    const auto best = respond(s, {{"kind", "best"}});
    REQUIRE(best["kind"] == "best");
    served += best["payload"]["value"].get<double>();
    random += run_study(random_search_spec(), o, {seed})[0].final_best();
  }
  CHECK(served <= random);
}

TEST_CASE("fuzzed input never crashes the session") {
  const auto o = find_objective("two-basin");
  ServeSession s;
  REQUIRE(respond(s, hello_for(o))["kind"] == "ack");
  Rng rng(2024);
  int responses = 0, ignored = 0;
  for (int i = 0; i < 10000; ++i) {
    std::string line(rng() % 80, '\0');
    for (auto& c : line) c = static_cast<char>(rng() % 256);
    if (i % 3 == 0) line = "{\"kind\":\"observe\",\"payload\":" + line;
    std::string resp;
    REQUIRE_NOTHROW([&] {
      const auto r = s.handle_line(line);
      if (r) resp = *r;
    }());
    if (resp.empty()) {
      ++ignored;
      continue;
    }
    ++responses;
    const auto doc = json::parse(resp);  // valid UTF-8 JSON
    CHECK(doc["kind"] == "error");
  }
  CHECK(responses + ignored == 10000);
}

TEST_CASE("external commands") {
  auto r = run_external("cat >/dev/null; echo 0.25", "{}");
  CHECK(r.ok);
  CHECK(r.value == 0.25);
  r = run_external("read line; echo \"$line\" | grep -q '\"x\":1' && echo 1 || echo 2", R"({"x":1})");
  CHECK(r.value == 1.0);
  r = run_external("echo nan", "{}");
  CHECK_FALSE(r.ok);
  CHECK(std::isnan(r.value));
  r = run_external("exit 3", "{}");
  CHECK_FALSE(r.ok);
  CHECK(r.exit_status == 3);
  r = run_external("echo hello", "{}");
  CHECK_FALSE(r.ok);
  r = run_external("true", "{}");
  CHECK_FALSE(r.ok);
}
