// Copyright 2026 The Threatsmith Authors
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

#include "threatsmith/attack_tree.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "oracles/cutset_oracle.hpp"
#include "oracles/tree_gen.hpp"
#include "test_support.hpp"

namespace threatsmith::attack_tree {
namespace {

using taxonomy::Capability;

AttackTree key_tree() { return parse_tree(testing_support::fixture("fig6.atk"), "fig6.atk"); }

std::string parse_error(std::string_view text) {
  try {
    parse_tree(text);
  } catch (const ParseError& e) {
    return e.message();
  }
  return "";
}

TEST(ParseTree, KeyTreeShape) {
  auto t = key_tree();
  EXPECT_EQ(nodes(t).size(), 10u);
  std::vector<std::string> leaves;
  for (const auto* l : concrete_leaves(t)) leaves.push_back(l->id);
  EXPECT_EQ(leaves, (std::vector<std::string>{"rce", "ext_mem", "break_protection", "side_channel"}));
  EXPECT_EQ(t.root->label, "Obtain Manufacturer Key");
  EXPECT_EQ(t.root->kind, NodeKind::OR);
  EXPECT_EQ(t.root->children.size(), 3u);
  EXPECT_TRUE(find_node(t, "supply_chain")->stub);
  EXPECT_EQ(find_node(t, "break_protection")->label, "Break Code Protection");
}

TEST(ParseTree, SingleLeaf) {
  auto t = parse_tree("LEAF \"x\"");
  ASSERT_FALSE(t.empty());
  EXPECT_EQ(t.root->id, "x");
  EXPECT_TRUE(t.root->is_leaf());
}

TEST(ParseTree, Errors) {
  EXPECT_EQ(parse_error("AND \"a\"\n"), "AND \"a\" has no children");
  EXPECT_EQ(parse_error("OR \"a\"\n  LEAF \"b\" [id=x]\n  LEAF \"c\" [id=x]\n"), "duplicate id 'x'");
  EXPECT_EQ(parse_error("OR \"a\"\n    LEAF \"b\"\n  LEAF \"c\"\n"), "inconsistent indentation");
  EXPECT_EQ(parse_error("OR \"a\"\n  LEAF \"b\"\nLEAF \"c\"\n"), "second root node; a tree has a single root");
  EXPECT_EQ(parse_error("OR \"a\"\n  LEAF \"b\"\n    LEAF \"c\"\n"), "LEAF \"b\" cannot have children");
  EXPECT_EQ(parse_error("XOR \"a\"\n"), "expected AND, OR or LEAF, got 'XOR'");
  EXPECT_EQ(parse_error("LEAF \"a\" [cost=-1]\n"), "cost must be a non-negative number, got '-1'");
  EXPECT_EQ(parse_error("LEAF \"a\" [magic=1]\n"), "unknown attribute 'magic'");
  EXPECT_EQ(parse_error("OR \"a\" [cost=1]\n  LEAF \"b\"\n"), "attribute 'cost' only applies to LEAF nodes");
  EXPECT_EQ(parse_error("LEAF \"\"\n"), "empty label");
  EXPECT_EQ(parse_error("# nothing\n"), "empty tree document");
  try {
    parse_tree("OR \"a\"\n  LEAF \"b\"\n   LEAF \"c\"\n", "t.atk");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_EQ(e.file(), "t.atk");
  }
}

TEST(ParseTree, AutoIdsAvoidExplicitOnes) {
  auto t = parse_tree("OR \"Goal\"\n  LEAF \"Step\"\n  LEAF \"Step\"\n  LEAF \"other\" [id=step_2]\n");
  std::vector<std::string> ids;
  for (const auto* n : nodes(t)) ids.push_back(n->id);
  EXPECT_EQ(ids, (std::vector<std::string>{"goal", "step", "step_3", "step_2"}));
}

TEST(ParseTree, CommentsAndQuotedHash) {
  auto t = parse_tree("OR \"a # b\" # trailing\n  LEAF \"say \\\"hi\\\"\"\n");
  EXPECT_EQ(t.root->label, "a # b");
  EXPECT_EQ(t.root->children[0].label, "say \"hi\"");
}

TEST(RenderTree, RoundTrip) {
  auto t = key_tree();
  auto text = render_tree(t);
  EXPECT_EQ(parse_tree(text), t);
  EXPECT_EQ(render_tree(parse_tree(text)), text);
  EXPECT_EQ(tree_from_json(to_json(t)), t);
  EXPECT_EQ(tree_from_json(to_json(AttackTree{})), AttackTree{});
}

TEST(IsSatisfied, Examples) {
  auto t = key_tree();
  EXPECT_TRUE(is_satisfied(t, {"rce"}));
  EXPECT_FALSE(is_satisfied(t, {}));
  EXPECT_THROW(is_satisfied(t, {"not_a_leaf"}), NotFoundError);
  EXPECT_THROW(is_satisfied(t, {"dump_memory"}), NotFoundError);
  EXPECT_THROW(is_satisfied(t, {"supply_chain"}), DomainError);

  auto a = parse_tree("AND \"root\"\n  LEAF \"a\"\n  OR \"bc\"\n    LEAF \"b\"\n    LEAF \"c\"\n");
  EXPECT_FALSE(is_satisfied(a, {"a"}));
  EXPECT_TRUE(is_satisfied(a, {"a", "c"}));
}

TEST(MinimalCutSets, Examples) {
  EXPECT_EQ(minimal_cut_sets(key_tree()),
            (std::vector<CutSet>{{"break_protection"}, {"ext_mem"}, {"rce"}, {"side_channel"}}));
  auto a = parse_tree("AND \"root\"\n  LEAF \"a\"\n  OR \"bc\"\n    LEAF \"b\"\n    LEAF \"c\"\n");
  EXPECT_EQ(minimal_cut_sets(a), (std::vector<CutSet>{{"a", "b"}, {"a", "c"}}));
  EXPECT_EQ(minimal_cut_sets(parse_tree("LEAF \"x\"")), (std::vector<CutSet>{{"x"}}));
  EXPECT_EQ(minimal_cut_sets(key_tree()), oracle::brute_force_cut_sets(key_tree()));
}

TEST(MinimalCutSets, AbsorbsSupersets) {
  auto t = parse_tree("OR \"r\"\n  LEAF \"a\"\n  AND \"ab\"\n    LEAF \"a\" [id=a2]\n    LEAF \"b\"\n");
  EXPECT_EQ(minimal_cut_sets(t), (std::vector<CutSet>{{"a"}, {"a2", "b"}}));
  auto shared = parse_tree("AND \"r\"\n  OR \"x\"\n    LEAF \"a\"\n    LEAF \"b\"\n  OR \"y\"\n    LEAF \"c\"\n");
  EXPECT_EQ(minimal_cut_sets(shared), (std::vector<CutSet>{{"a", "c"}, {"b", "c"}}));
}

TEST(MinimalCutSets, OverflowIsAnError) {
  // AND of 5 ORs with 4 leaves each: 4^5 = 1024 cut sets.
  std::string text = "AND \"r\"\n";
  for (int i = 0; i < 5; ++i) {
    text += "  OR \"o" + std::to_string(i) + "\"\n";
    for (int j = 0; j < 4; ++j) text += "    LEAF \"l" + std::to_string(i) + std::to_string(j) + "\"\n";
  }
  auto t = parse_tree(text);
  EXPECT_EQ(minimal_cut_sets(t).size(), 1024u);
  EXPECT_THROW(minimal_cut_sets(t, 1000), CutSetOverflow);
}

TEST(MinimalCutSets, StubOnlyTreeHasNone) {
  EXPECT_TRUE(minimal_cut_sets(parse_tree("LEAF \"later\" [stub=true]")).empty());
  EXPECT_TRUE(minimal_cut_sets(AttackTree{}).empty());
}

TEST(PropagateMinCost, Examples) {
  EXPECT_EQ(propagate_min_cost(parse_tree("OR \"r\"\n  LEAF \"a\" [cost=5]\n  LEAF \"b\" [cost=3]\n")).at("r"), 3);
  EXPECT_EQ(propagate_min_cost(parse_tree("AND \"r\"\n  LEAF \"a\" [cost=5]\n  LEAF \"b\" [cost=3]\n")).at("r"), 8);
  auto costs = propagate_min_cost(key_tree());
  EXPECT_EQ(costs.at("obtain_key"), 4);
  EXPECT_EQ(costs.at("exploit_physical"), 4);
  EXPECT_EQ(costs.at("supply_chain"), std::numeric_limits<double>::infinity());
  try {
    propagate_min_cost(parse_tree("OR \"r\"\n  LEAF \"a\" [cost=5]\n  LEAF \"b\"\n"));
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_STREQ(e.what(), "leaf 'b' has no cost");
  }
}

TEST(PropagateFeasibility, Combinators) {
  auto f = propagate_feasibility(parse_tree(
      "OR \"r\"\n  AND \"x\"\n    LEAF \"a\" [feasibility=0.5]\n    LEAF \"b\" [feasibility=0.5]\n  LEAF \"c\" [feasibility=0.2]\n"));
  EXPECT_DOUBLE_EQ(f.at("x"), 0.25);
  EXPECT_DOUBLE_EQ(f.at("r"), 0.25);
  EXPECT_DOUBLE_EQ(propagate_feasibility(key_tree()).at("obtain_key"), 0.6);
}

TEST(PruneByCapability, Examples) {
  auto t = key_tree();
  auto remote = prune_by_capability(t, taxonomy::CapabilitySet{Capability::remote_network});
  ASSERT_FALSE(remote.empty());
  EXPECT_EQ(render_tree(remote),
            "OR \"Obtain Manufacturer Key\" [id=obtain_key]\n"
            "  OR \"Dump Memory\" [id=dump_memory]\n"
            "    LEAF \"Dump Memory using RCE\" [id=rce, cost=7, capability=remote_network, feasibility=0.3]\n");
  taxonomy::CapabilitySet all(taxonomy::all_capabilities().begin(), taxonomy::all_capabilities().end());
  EXPECT_EQ(prune_by_capability(t, all), t);

  auto a = parse_tree("AND \"r\"\n  LEAF \"a\" [capability=physical_access]\n  LEAF \"b\" [capability=remote_network]\n");
  EXPECT_TRUE(prune_by_capability(a, taxonomy::CapabilitySet{Capability::remote_network}).empty());
  EXPECT_TRUE(prune_by_capability(AttackTree{}, all).empty());
}

// Random-tree properties; the acceptance binary runs the same checks at
// the full 200-tree scale.
class RandomTrees : public ::testing::TestWithParam<std::uint32_t> {};

TEST_P(RandomTrees, OracleEquivalenceAndProperties) {
  oracle::TreeGenerator gen(GetParam());
  for (int round = 0; round < 25; ++round) {
    auto t = gen.tree(12);
    auto cuts = minimal_cut_sets(t);
    ASSERT_EQ(cuts, oracle::brute_force_cut_sets(t)) << render_tree(t);

    for (const auto& c : cuts) {
      ASSERT_TRUE(is_satisfied(t, c));
      for (const auto& leaf : c) {
        auto smaller = c;
        smaller.erase(leaf);
        ASSERT_FALSE(is_satisfied(t, smaller));
      }
    }

    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : cuts) {
      double sum = 0;
      for (const auto& leaf : c) sum += *find_node(t, leaf)->cost;
      best = std::min(best, sum);
    }
    ASSERT_EQ(propagate_min_cost(t).at(t.root->id), best) << render_tree(t);

    auto caps = gen.capabilities();
    auto pruned = prune_by_capability(t, caps);
    std::vector<CutSet> allowed;
    for (const auto& c : cuts) {
      bool ok = std::all_of(c.begin(), c.end(), [&](const std::string& id) {
        const auto* n = find_node(t, id);
        return !n->capability || caps.count(*n->capability);
      });
      if (ok) allowed.push_back(c);
    }
    ASSERT_EQ(minimal_cut_sets(pruned), allowed) << render_tree(t);

    ASSERT_EQ(parse_tree(render_tree(t)), t);
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, RandomTrees, ::testing::Values(1u, 2u, 3u, 4u));

}  // namespace
}  // namespace threatsmith::attack_tree
