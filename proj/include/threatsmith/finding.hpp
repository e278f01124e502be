// Copyright 2026 The Threatsmith Authors
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

#pragma once

#include <string>
#include <vector>

namespace threatsmith {

enum class Severity { error, warning };

inline const char* to_string(Severity s) { return s == Severity::error ? "error" : "warning"; }

/// One violated invariant. `code` is a stable machine key, `subject` the
/// offending id, `line` the 1-based source line when known.
struct ValidationFinding {
  Severity severity = Severity::error;
  std::string code;
  std::string subject;
  std::string message;
  int line = 0;

  bool operator==(const ValidationFinding&) const = default;
};

using Findings = std::vector<ValidationFinding>;

inline std::size_t count_errors(const Findings& findings) {
  std::size_t n = 0;
  for (const auto& f : findings) n += f.severity == Severity::error;
  return n;
}

}  // namespace threatsmith
