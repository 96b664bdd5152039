#include "arpbo/wire.hpp"

#include <cmath>
#include <limits>

#include "arpbo/errors.hpp"

namespace arpbo {

namespace {

using nlohmann::json;

constexpr const char* kKinds[] = {"hello", "suggest_request", "suggestions", "observe", "ack", "best", "error"};

WireMessage error(const std::string& message) { return {"error", {{"message", message}}}; }

double value_from_json(const json& v) {
  if (v.is_number()) return v.get<double>();
  // JSON has no NaN or infinity; null and these strings stand in for them.
  if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (v.is_string()) {
    const auto& s = v.get_ref<const std::string&>();
    if (s == "nan" || s == "NaN") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf" || s == "Infinity") return std::numeric_limits<double>::infinity();
  }
  throw ProtocolError("observe: values must be numbers, null or \"nan\"");
}

}  // namespace

bool is_known_kind(const std::string& kind) {
  for (const char* k : kKinds)
    if (kind == k) return true;
  return false;
}

std::string WireMessage::serialize() const {
  return json{{"kind", kind}, {"payload", payload}}.dump(-1, ' ', false, json::error_handler_t::replace);
}

WireMessage WireMessage::parse(const std::string& line) {
  json doc;
  try {
    doc = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ProtocolError("malformed JSON near byte " + std::to_string(e.byte));
  }
  if (!doc.is_object()) throw ProtocolError("message must be a JSON object");
  if (!doc.contains("kind") || !doc["kind"].is_string()) throw ProtocolError("message needs a string \"kind\"");
  WireMessage m;
  m.kind = doc["kind"].get<std::string>();
  if (!is_known_kind(m.kind)) throw ProtocolError("unknown message kind");
  if (doc.contains("payload")) {
    if (!doc["payload"].is_object()) throw ProtocolError("payload must be a JSON object");
    m.payload = doc["payload"];
  }
  for (const auto& [key, _] : doc.items())
    if (key != "kind" && key != "payload") throw ProtocolError("unexpected top-level key");
  return m;
}

std::optional<std::string> ServeSession::handle_line(const std::string& line) {
  if (line.find_first_not_of(" \t\r") == std::string::npos) return std::nullopt;
  try {
    return handle(WireMessage::parse(line)).serialize();
  } catch (const std::exception& e) {
    return error(e.what()).serialize();
  }
}

WireMessage ServeSession::handle(const WireMessage& request) {
  try {
    const auto& p = request.payload;
    if (request.kind == "hello") {
      if (!p.contains("space")) return error("hello needs a \"space\" object");
      auto space = SearchSpace::from_json(p["space"]);
      const auto config = p.contains("config") ? OptimizerConfig::from_json(p["config"]) : OptimizerConfig{};
      optimizer_ = std::make_unique<Optimizer>(std::move(space), config);
      return {"ack", {{"batch_size", optimizer_->config().batch_size},
                      {"max_iterations", optimizer_->config().max_iterations},
                      {"dimension", optimizer_->space().dimension()}}};
    }
    if (request.kind != "suggest_request" && request.kind != "observe" && request.kind != "best")
      return error("'" + request.kind + "' is a response kind; expected hello, suggest_request, observe or best");
    if (!optimizer_) return error("no session; expected hello");

    if (request.kind == "suggest_request") {
      if (optimizer_->has_pending()) return error("a suggestion is pending; expected observe");
      json points = json::array();
      for (const auto& pt : optimizer_->suggest()) points.push_back(optimizer_->space().point_to_json(pt));
      return {"suggestions", {{"points", points}}};
    }
    if (request.kind == "observe") {
      if (!optimizer_->has_pending()) return error("nothing to observe; expected suggest_request");
      if (!p.contains("points") || !p["points"].is_array() || !p.contains("values") || !p["values"].is_array())
        return error("observe needs \"points\" and \"values\" arrays");
      std::vector<Point> points;
      for (const auto& obj : p["points"]) points.push_back(optimizer_->space().point_from_json(obj));
      std::vector<double> values;
      for (const auto& v : p["values"]) values.push_back(value_from_json(v));
      const int before = optimizer_->warnings();
      optimizer_->observe(points, values);
      return {"ack", {{"observed", points.size()},
                      {"iteration", optimizer_->iteration()},
                      {"warnings", optimizer_->warnings() - before}}};
    }
    if (optimizer_->history().empty()) return error("no observations yet; expected observe");
    const auto [pt, value] = optimizer_->best();
    return {"best", {{"point", optimizer_->space().point_to_json(pt)},
                     {"value", std::isfinite(value) ? json(value) : json(nullptr)},
                     {"evaluations", optimizer_->history().size()}}};
  } catch (const json::exception& e) {
    return error(std::string("bad payload: ") + e.what());
  } catch (const Error& e) {
    return error(e.what());
  }
}

}  // namespace arpbo
