// Copyright 2026 The Threatsmith Authors
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

// Command-line front end. Exit codes: 0 success, 1 error findings or
// malformed input, 2 usage or configuration error.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace threatsmith::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFindings = 1;
inline constexpr int kExitUsage = 2;

/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace threatsmith::cli
