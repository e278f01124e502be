// Copyright 2026 The Threatsmith Authors
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

#pragma once

#include <string>
#include <vector>

namespace threatsmith::zip {

struct Entry {
  std::string name;
  std::string data;
};

/// Uncompressed ("stored") archive with every timestamp pinned to
/// 1980-01-01 00:00, so identical entries give identical bytes.
std::string write_stored(const std::vector<Entry>& entries);

}  // namespace threatsmith::zip
