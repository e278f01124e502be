// Copyright 2026 The Threatsmith Authors
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

// Brute-force minimal cut sets: evaluate every subset of concrete leaves with
// a private evaluator and keep the minimal satisfying ones.

#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "threatsmith/attack_tree.hpp"

namespace oracle {

namespace detail {

inline void leaves_of(const threatsmith::attack_tree::Node& n, std::vector<std::string>& out) {
  if (n.kind == threatsmith::attack_tree::NodeKind::LEAF) {
    if (!n.stub) out.push_back(n.id);
    return;
  }
  for (const auto& c : n.children) leaves_of(c, out);
}

inline bool holds(const threatsmith::attack_tree::Node& n, const std::vector<std::string>& leaves,
                  std::uint32_t mask) {
  using threatsmith::attack_tree::NodeKind;
  if (n.kind == NodeKind::LEAF) {
    if (n.stub) return false;
    auto it = std::find(leaves.begin(), leaves.end(), n.id);
    return (mask >> (it - leaves.begin())) & 1U;
  }
  bool all = true, any = false;
  for (const auto& c : n.children) {
    bool v = holds(c, leaves, mask);
    all = all && v;
    any = any || v;
  }
  return n.kind == NodeKind::AND ? all : any;
}

}  // namespace detail

/// Requires at most 20 concrete leaves.
inline std::vector<std::set<std::string>> brute_force_cut_sets(const threatsmith::attack_tree::AttackTree& t) {
  std::vector<std::set<std::string>> out;
  if (!t.root) return out;
  std::vector<std::string> leaves;
  detail::leaves_of(*t.root, leaves);
  const std::uint32_t n = static_cast<std::uint32_t>(leaves.size());
  std::vector<std::uint32_t> satisfying;
  for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
    if (detail::holds(*t.root, leaves, mask)) satisfying.push_back(mask);
  }
  for (auto m : satisfying) {
    bool minimal = std::none_of(satisfying.begin(), satisfying.end(),
                                [&](std::uint32_t o) { return o != m && (o & m) == o; });
    if (!minimal) continue;
    std::set<std::string> s;
    for (std::uint32_t i = 0; i < n; ++i) {
      if ((m >> i) & 1U) s.insert(leaves[i]);
    }
    out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  return out;
}

}  // namespace oracle
