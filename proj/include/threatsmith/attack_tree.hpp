// Copyright 2026 The Threatsmith Authors
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

// AND/OR attack trees: a small indentation-based DSL, satisfaction, minimal
// cut sets, bottom-up attribute propagation and capability pruning.
//
//   OR "Obtain key" [id=key]
//     LEAF "Dump memory" [cost=7, capability=remote_network]
//     LEAF "Attack supply chain" [stub=true]
//
// A stub leaf stands for a subtree that was not elaborated. It can never be
// achieved, so it contributes no cut sets.

#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "threatsmith/error.hpp"
#include "threatsmith/taxonomy.hpp"

namespace threatsmith::attack_tree {

enum class NodeKind { AND, OR, LEAF };
std::string_view to_string(NodeKind kind);

struct Node {
  std::string id;
  std::string label;
  NodeKind kind = NodeKind::LEAF;
  std::vector<Node> children;
  std::optional<double> cost;
  std::optional<taxonomy::Capability> capability;
  std::optional<double> feasibility;
  bool stub = false;

  bool is_leaf() const { return kind == NodeKind::LEAF; }
  bool operator==(const Node&) const = default;
};

/// A tree, or the explicitly empty tree left after pruning everything.
struct AttackTree {
  std::optional<Node> root;

  bool empty() const { return !root.has_value(); }
  bool operator==(const AttackTree&) const = default;
};

/// Throws ParseError with line and column.
AttackTree parse_tree(std::string_view text, const std::string& source_name = {});

/// Normalized DSL: two-space indentation, every id explicit.
std::string render_tree(const AttackTree& tree);

nlohmann::json to_json(const AttackTree& tree);
/// Throws ParseError on malformed input; enforces the same invariants as parse_tree.
AttackTree tree_from_json(const nlohmann::json& j);

/// Pre-order node list.
std::vector<const Node*> nodes(const AttackTree& tree);
/// Leaves that can be achieved (stubs excluded), in pre-order.
std::vector<const Node*> concrete_leaves(const AttackTree& tree);
const Node* find_node(const AttackTree& tree, std::string_view id);

/// Throws NotFoundError for an id that is not a leaf, DomainError for a stub.
bool is_satisfied(const AttackTree& tree, const std::set<std::string>& achieved);

using CutSet = std::set<std::string>;

class CutSetOverflow : public Error {
 public:
  CutSetOverflow(std::string node, std::size_t cap)
      : Error("cut-set count exceeds cap of " + std::to_string(cap) + " at node '" + node + "'"),
        node_(std::move(node)),
        cap_(cap) {}
  const std::string& node() const { return node_; }
  std::size_t cap() const { return cap_; }

 private:
  std::string node_;
  std::size_t cap_;
};

inline constexpr std::size_t kDefaultCutSetCap = 10000;

/// Minimal satisfying leaf sets ordered by size, then lexicographically.
/// Throws CutSetOverflow when any node accumulates more than `cap` sets.
std::vector<CutSet> minimal_cut_sets(const AttackTree& tree, std::size_t cap = kDefaultCutSetCap);

/// Bottom-up evaluation. `leaf` supplies leaf values; `combine` folds the
/// values of an AND or OR node's children.
template <typename T>
struct Propagation {
  std::function<T(const Node&)> leaf;
  std::function<T(NodeKind, const std::vector<T>&)> combine;
};

template <typename T>
std::map<std::string, T> propagate(const AttackTree& tree, const Propagation<T>& p) {
  std::map<std::string, T> out;
  std::function<T(const Node&)> visit = [&](const Node& n) -> T {
    T value;
    if (n.is_leaf()) {
      value = p.leaf(n);
    } else {
      std::vector<T> values;
      values.reserve(n.children.size());
      for (const auto& c : n.children) values.push_back(visit(c));
      value = p.combine(n.kind, values);
    }
    out.emplace(n.id, value);
    return value;
  };
  if (tree.root) visit(*tree.root);
  return out;
}

/// OR = min, AND = sum. Stubs cost +infinity. Throws DomainError naming the
/// first concrete leaf without a cost.
std::map<std::string, double> propagate_min_cost(const AttackTree& tree);

/// OR = max, AND = product. Stubs are 0. Throws DomainError naming the first
/// concrete leaf without a feasibility.
std::map<std::string, double> propagate_feasibility(const AttackTree& tree);

/// Drops leaves whose capability the profile lacks, then every AND node that
/// lost a child and every OR node that lost all children.
AttackTree prune_by_capability(const AttackTree& tree, const taxonomy::CapabilitySet& capabilities);
AttackTree prune_by_capability(const AttackTree& tree, const taxonomy::ThreatSourceProfile& profile);

}  // namespace threatsmith::attack_tree
