#pragma once

#include <string>

namespace arpbo {

struct ExternalResult {
  double value = 0.0;  // NaN when the program failed or printed no number
  int exit_status = 0;
  bool ok = false;
  std::string problem;
};

/// Runs `/bin/sh -c command`, writes `input` to its stdin and parses the
/// first token of its stdout as a number.
ExternalResult run_external(const std::string& command, const std::string& input);

}  // namespace arpbo
