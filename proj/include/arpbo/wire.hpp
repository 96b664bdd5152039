#pragma once

#include <memory>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "arpbo/optimizer.hpp"

namespace arpbo {

/// One line of the stdio protocol: {"kind": ..., "payload": {...}}.
struct WireMessage {
  std::string kind;
  nlohmann::json payload = nlohmann::json::object();

  /// Compact JSON without a trailing newline. Invalid UTF-8 in strings is
  /// replaced, so the output is always valid UTF-8.
  std::string serialize() const;

  /// Throws ProtocolError on malformed JSON, a missing or unknown kind, or a
  /// non-object payload. The message never quotes the input.
  static WireMessage parse(const std::string& line);

  bool operator==(const WireMessage&) const = default;
};

bool is_known_kind(const std::string& kind);

/// Request/response state machine behind `serve`. Requests are hello,
/// suggest_request, observe and best; every request gets one response and
/// errors never end the session.
class ServeSession {
 public:
  /// Returns the response line, or nullopt for blank lines.
  std::optional<std::string> handle_line(const std::string& line);

  WireMessage handle(const WireMessage& request);

  const Optimizer* optimizer() const { return optimizer_.get(); }

 private:
  std::unique_ptr<Optimizer> optimizer_;
};

}  // namespace arpbo
