// Copyright 2026 The Threatsmith Authors
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace threatsmith::text {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
std::vector<std::string> split(std::string_view s, char delimiter);
std::string join(const std::vector<std::string>& parts, std::string_view separator);

std::size_t edit_distance(std::string_view a, std::string_view b);

/// Up to `limit` candidates closest to `needle`, nearest first.
std::vector<std::string> nearest(std::string_view needle, const std::vector<std::string>& candidates,
                                 std::size_t limit = 3);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view data);
std::string hex64(std::uint64_t value);

/// Lowercase identifier built from the alphanumeric runs of `label`.
std::string slug(std::string_view label);

/// Shortest decimal text that reads back to the same double.
std::string format_number(double value);

}  // namespace threatsmith::text
