// Copyright 2026 The Threatsmith Authors
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

#pragma once

#include <span>

namespace threatsmith::embedded {

struct File {
  const char* name;
  const char* text;
};

/// data/catalog/*.yaml, manifest first.
std::span<const File> catalog_files();

/// data/rules/*.yaml.
std::span<const File> rule_files();

}  // namespace threatsmith::embedded
