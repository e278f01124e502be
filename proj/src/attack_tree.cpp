// Copyright 2026 The Threatsmith Authors
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

#include "threatsmith/attack_tree.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <limits>

#include "threatsmith/strings.hpp"

namespace threatsmith::attack_tree {

namespace {

// --- parsing --------------------------------------------------------------

struct RawNode {
  int line = 0;
  std::size_t indent = 0;
  Node node;  // children filled in during assembly
  std::optional<std::string> explicit_id;
  std::vector<std::size_t> children;
};

class LineParser {
 public:
  LineParser(std::string_view line, int line_no, const std::string& source)
      : s_(line), line_(line_no), source_(source) {}

  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(message, line_, static_cast<int>(pos_) + 1, source_);
  }

  void skip_space() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }
  bool at_end() const { return pos_ >= s_.size(); }
  char peek() const { return at_end() ? '\0' : s_[pos_]; }

  std::string word() {
    auto start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_' ||
                                s_[pos_] == '-' || s_[pos_] == '.')) {
      ++pos_;
    }
    return std::string(s_.substr(start, pos_ - start));
  }

  std::string quoted() {
    if (peek() != '"') fail("expected quoted label");
    ++pos_;
    std::string out;
    while (true) {
      if (at_end()) fail("unterminated string");
      char c = s_[pos_++];
      if (c == '"') return out;
      if (c == '\\') {
        if (at_end()) fail("unterminated string");
        char e = s_[pos_++];
        if (e != '"' && e != '\\') fail(std::string("unknown escape '\\") + e + "'");
        out.push_back(e);
      } else {
        out.push_back(c);
      }
    }
  }

  // [key=value, ...]
  std::vector<std::pair<std::string, std::string>> attributes() {
    std::vector<std::pair<std::string, std::string>> out;
    ++pos_;  // '['
    skip_space();
    if (peek() == ']') {
      ++pos_;
      return out;
    }
    while (true) {
      skip_space();
      auto key = word();
      if (key.empty()) fail("expected attribute name");
      skip_space();
      if (peek() != '=') fail("expected '=' after attribute '" + key + "'");
      ++pos_;
      skip_space();
      std::string value = peek() == '"' ? quoted() : word();
      if (value.empty()) fail("empty value for attribute '" + key + "'");
      out.emplace_back(key, value);
      skip_space();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      if (peek() == ']') {
        ++pos_;
        return out;
      }
      fail("expected ',' or ']' in attribute list");
    }
  }

  std::size_t pos() const { return pos_; }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
  int line_;
  const std::string& source_;
};

/// Removes a trailing '#' comment that is not inside a quoted label.
std::string_view strip_comment(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '\\' && quoted) {
      ++i;
    } else if (line[i] == '"') {
      quoted = !quoted;
    } else if (line[i] == '#' && !quoted) {
      return line.substr(0, i);
    }
  }
  return line;
}

std::optional<double> parse_double(std::string_view s) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

void apply_attribute(RawNode& raw, const std::string& key, const std::string& value, LineParser& p) {
  auto& n = raw.node;
  auto leaf_only = [&] {
    if (!n.is_leaf()) p.fail("attribute '" + key + "' only applies to LEAF nodes");
  };
  if (key == "id") {
    raw.explicit_id = value;
  } else if (key == "cost") {
    leaf_only();
    auto v = parse_double(value);
    if (!v || *v < 0) p.fail("cost must be a non-negative number, got '" + value + "'");
    n.cost = *v;
  } else if (key == "feasibility") {
    leaf_only();
    auto v = parse_double(value);
    if (!v || *v < 0 || *v > 1) p.fail("feasibility must be within [0,1], got '" + value + "'");
    n.feasibility = *v;
  } else if (key == "capability") {
    leaf_only();
    auto cap = taxonomy::parse_capability(value);
    if (!cap) p.fail("unknown capability '" + value + "'");
    n.capability = *cap;
  } else if (key == "stub") {
    leaf_only();
    if (value != "true" && value != "false") p.fail("stub must be true or false");
    n.stub = value == "true";
  } else {
    p.fail("unknown attribute '" + key + "'");
  }
}

void check_structure(const Node& n, const std::function<void(const Node&, const std::string&)>& fail) {
  if (n.label.empty()) fail(n, "empty label");
  if (n.is_leaf() && !n.children.empty()) fail(n, "LEAF '" + n.id + "' cannot have children");
  if (!n.is_leaf() && n.children.empty()) {
    fail(n, std::string(to_string(n.kind)) + " node '" + n.id + "' has no children");
  }
  for (const auto& c : n.children) check_structure(c, fail);
}

Node assemble(std::vector<RawNode>& raw, std::size_t index) {
  Node n = std::move(raw[index].node);
  for (auto child : raw[index].children) n.children.push_back(assemble(raw, child));
  return n;
}

std::string escape_label(const std::string& label) {
  std::string out;
  for (char c : label) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

void render_node(const Node& n, int depth, std::string& out) {
  out.append(static_cast<std::size_t>(depth) * 2, ' ');
  out += to_string(n.kind);
  out += " \"" + escape_label(n.label) + "\" [id=" + n.id;
  if (n.cost) out += ", cost=" + text::format_number(*n.cost);
  if (n.capability) out += ", capability=" + std::string(taxonomy::to_string(*n.capability));
  if (n.feasibility) out += ", feasibility=" + text::format_number(*n.feasibility);
  if (n.stub) out += ", stub=true";
  out += "]\n";
  for (const auto& c : n.children) render_node(c, depth + 1, out);
}

void collect(const Node& n, std::vector<const Node*>& out) {
  out.push_back(&n);
  for (const auto& c : n.children) collect(c, out);
}

// --- cut sets -------------------------------------------------------------

class LeafSet {
 public:
  explicit LeafSet(std::size_t words = 0) : bits_(words, 0) {}
  void set(std::size_t i) { bits_[i / 64] |= std::uint64_t{1} << (i % 64); }
  bool test(std::size_t i) const { return (bits_[i / 64] >> (i % 64)) & 1U; }
  std::size_t count() const {
    std::size_t n = 0;
    for (auto w : bits_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }
  bool subset_of(const LeafSet& o) const {
    for (std::size_t i = 0; i < bits_.size(); ++i) {
      if (bits_[i] & ~o.bits_[i]) return false;
    }
    return true;
  }
  LeafSet& operator|=(const LeafSet& o) {
    for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] |= o.bits_[i];
    return *this;
  }
  bool operator==(const LeafSet&) const = default;
  bool operator<(const LeafSet& o) const { return bits_ < o.bits_; }

 private:
  std::vector<std::uint64_t> bits_;
};

using Family = std::vector<LeafSet>;

/// Drops duplicates and non-minimal sets.
Family minimize(Family sets) {
  std::sort(sets.begin(), sets.end(), [](const LeafSet& a, const LeafSet& b) {
    auto ca = a.count(), cb = b.count();
    return ca != cb ? ca < cb : a < b;
  });
  Family kept;
  for (auto& s : sets) {
    bool dominated = std::any_of(kept.begin(), kept.end(), [&](const LeafSet& k) { return k.subset_of(s); });
    if (!dominated) kept.push_back(std::move(s));
  }
  return kept;
}

struct CutSetBuilder {
  std::map<std::string, std::size_t> index;
  std::size_t words = 1;
  std::size_t cap = kDefaultCutSetCap;

  Family visit(const Node& n) const {
    Family out;
    if (n.is_leaf()) {
      if (!n.stub) {
        LeafSet s(words);
        s.set(index.at(n.id));
        out.push_back(std::move(s));
      }
      return out;
    }
    if (n.kind == NodeKind::OR) {
      for (const auto& c : n.children) {
        auto sub = visit(c);
        out.insert(out.end(), std::make_move_iterator(sub.begin()), std::make_move_iterator(sub.end()));
        if (out.size() > cap) out = minimize(std::move(out));
        check(n, out);
      }
      return minimize(std::move(out));
    }
    out.push_back(LeafSet(words));
    for (const auto& c : n.children) {
      auto sub = visit(c);
      Family next;
      for (const auto& a : out) {
        for (const auto& b : sub) {
          LeafSet u = a;
          u |= b;
          next.push_back(std::move(u));
        }
        if (next.size() > cap) next = minimize(std::move(next));
        check(n, next);
      }
      out = minimize(std::move(next));
      if (out.empty()) break;
    }
    return out;
  }

  void check(const Node& n, const Family& f) const {
    if (f.size() > cap) throw CutSetOverflow(n.id, cap);
  }
};

}  // namespace

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::AND: return "AND";
    case NodeKind::OR: return "OR";
    case NodeKind::LEAF: return "LEAF";
  }
  return "";
}

AttackTree parse_tree(std::string_view text, const std::string& source_name) {
  std::vector<RawNode> raw;
  struct Frame {
    std::size_t indent;
    std::size_t node;
    std::optional<std::size_t> child_indent;
  };
  std::vector<Frame> stack;

  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    line = strip_comment(line);
    if (text::trim(line).empty()) continue;

    std::size_t indent = 0;
    while (indent < line.size() && line[indent] == ' ') ++indent;
    if (line[indent] == '\t') throw ParseError("tab in indentation", line_no, static_cast<int>(indent) + 1, source_name);

    LineParser p(line, line_no, source_name);
    p.skip_space();
    RawNode r;
    r.line = line_no;
    r.indent = indent;
    auto keyword = p.word();
    if (keyword == "AND") {
      r.node.kind = NodeKind::AND;
    } else if (keyword == "OR") {
      r.node.kind = NodeKind::OR;
    } else if (keyword == "LEAF") {
      r.node.kind = NodeKind::LEAF;
    } else {
      p.fail("expected AND, OR or LEAF, got '" + keyword + "'");
    }
    p.skip_space();
    r.node.label = p.quoted();
    p.skip_space();
    if (p.peek() == '[') {
      for (const auto& [key, value] : p.attributes()) apply_attribute(r, key, value, p);
      p.skip_space();
    }
    if (!p.at_end()) p.fail("unexpected text after node");

    if (raw.empty()) {
      raw.push_back(std::move(r));
      stack.push_back({indent, 0, std::nullopt});
      continue;
    }
    while (!stack.empty() && stack.back().indent >= indent) stack.pop_back();
    if (stack.empty()) {
      throw ParseError(indent == raw.front().indent ? "second root node; a tree has a single root"
                                                    : "inconsistent indentation",
                       line_no, static_cast<int>(indent) + 1, source_name);
    }
    auto& parent = stack.back();
    if (parent.child_indent && *parent.child_indent != indent) {
      throw ParseError("inconsistent indentation", line_no, static_cast<int>(indent) + 1, source_name);
    }
    parent.child_indent = indent;
    if (raw[parent.node].node.is_leaf()) {
      throw ParseError("LEAF \"" + raw[parent.node].node.label + "\" cannot have children", line_no,
                       static_cast<int>(indent) + 1, source_name);
    }
    raw[parent.node].children.push_back(raw.size());
    raw.push_back(std::move(r));
    stack.push_back({indent, raw.size() - 1, std::nullopt});
  }
  if (raw.empty()) throw ParseError("empty tree document", 0, 0, source_name);

  // Explicit ids first, so generated ids never collide with a later explicit one.
  std::set<std::string> taken;
  for (const auto& r : raw) {
    if (!r.explicit_id) continue;
    if (!taken.insert(*r.explicit_id).second) {
      throw ParseError("duplicate id '" + *r.explicit_id + "'", r.line, 0, source_name);
    }
  }
  for (auto& r : raw) {
    if (r.explicit_id) {
      r.node.id = *r.explicit_id;
      continue;
    }
    auto base = text::slug(r.node.label);
    auto id = base;
    for (int k = 2; taken.count(id); ++k) id = base + "_" + std::to_string(k);
    taken.insert(id);
    r.node.id = id;
  }
  for (const auto& r : raw) {
    if (r.node.label.empty()) throw ParseError("empty label", r.line, 0, source_name);
    if (!r.node.is_leaf() && r.children.empty()) {
      throw ParseError(std::string(to_string(r.node.kind)) + " \"" + r.node.label + "\" has no children", r.line,
                       0, source_name);
    }
  }
  return AttackTree{assemble(raw, 0)};
}

std::string render_tree(const AttackTree& tree) {
  std::string out;
  if (tree.root) render_node(*tree.root, 0, out);
  return out;
}

nlohmann::json to_json(const AttackTree& tree) {
  std::function<nlohmann::json(const Node&)> node_json = [&](const Node& n) {
    nlohmann::json j = {{"id", n.id}, {"label", n.label}, {"kind", to_string(n.kind)}};
    if (n.cost) j["cost"] = *n.cost;
    if (n.capability) j["capability"] = taxonomy::to_string(*n.capability);
    if (n.feasibility) j["feasibility"] = *n.feasibility;
    if (n.stub) j["stub"] = true;
    if (!n.is_leaf()) {
      j["children"] = nlohmann::json::array();
      for (const auto& c : n.children) j["children"].push_back(node_json(c));
    }
    return j;
  };
  return {{"root", tree.root ? node_json(*tree.root) : nlohmann::json(nullptr)}};
}

AttackTree tree_from_json(const nlohmann::json& j) {
  auto fail = [](const std::string& message) -> void { throw ParseError(message, 0, 0, "<json>"); };
  if (!j.is_object() || !j.contains("root")) fail("tree JSON must be an object with 'root'");
  if (j["root"].is_null()) return {};
  std::set<std::string> ids;
  std::function<Node(const nlohmann::json&)> read = [&](const nlohmann::json& o) {
    if (!o.is_object()) fail("tree node must be an object");
    Node n;
    try {
      n.id = o.at("id").get<std::string>();
      n.label = o.at("label").get<std::string>();
      auto kind = o.at("kind").get<std::string>();
      if (kind == "AND") n.kind = NodeKind::AND;
      else if (kind == "OR") n.kind = NodeKind::OR;
      else if (kind == "LEAF") n.kind = NodeKind::LEAF;
      else fail("unknown node kind '" + kind + "'");
      if (o.contains("cost")) n.cost = o["cost"].get<double>();
      if (o.contains("feasibility")) n.feasibility = o["feasibility"].get<double>();
      if (o.contains("capability")) {
        auto cap = taxonomy::parse_capability(o["capability"].get<std::string>());
        if (!cap) fail("unknown capability in node '" + n.id + "'");
        n.capability = *cap;
      }
      if (o.contains("stub")) n.stub = o["stub"].get<bool>();
    } catch (const nlohmann::json::exception& e) {
      fail(std::string("malformed tree node: ") + e.what());
    }
    if (n.cost && *n.cost < 0) fail("negative cost on '" + n.id + "'");
    if (n.feasibility && (*n.feasibility < 0 || *n.feasibility > 1)) fail("feasibility out of [0,1] on '" + n.id + "'");
    if (!ids.insert(n.id).second) fail("duplicate id '" + n.id + "'");
    if (o.contains("children")) {
      for (const auto& c : o["children"]) n.children.push_back(read(c));
    }
    return n;
  };
  AttackTree tree{read(j["root"])};
  check_structure(*tree.root, [&](const Node&, const std::string& message) { fail(message); });
  return tree;
}

std::vector<const Node*> nodes(const AttackTree& tree) {
  std::vector<const Node*> out;
  if (tree.root) collect(*tree.root, out);
  return out;
}

std::vector<const Node*> concrete_leaves(const AttackTree& tree) {
  std::vector<const Node*> out;
  for (const auto* n : nodes(tree)) {
    if (n->is_leaf() && !n->stub) out.push_back(n);
  }
  return out;
}

const Node* find_node(const AttackTree& tree, std::string_view id) {
  for (const auto* n : nodes(tree)) {
    if (n->id == id) return n;
  }
  return nullptr;
}

bool is_satisfied(const AttackTree& tree, const std::set<std::string>& achieved) {
  for (const auto& id : achieved) {
    const auto* n = find_node(tree, id);
    if (!n || !n->is_leaf()) {
      std::vector<std::string> leaves;
      for (const auto* l : concrete_leaves(tree)) leaves.push_back(l->id);
      throw NotFoundError("leaf", id, text::nearest(id, leaves));
    }
    if (n->stub) throw DomainError("leaf '" + id + "' is a stub and cannot be achieved");
  }
  std::function<bool(const Node&)> eval = [&](const Node& n) {
    switch (n.kind) {
      case NodeKind::LEAF: return !n.stub && achieved.count(n.id) > 0;
      case NodeKind::AND:
        return std::all_of(n.children.begin(), n.children.end(), [&](const Node& c) { return eval(c); });
      case NodeKind::OR:
        return std::any_of(n.children.begin(), n.children.end(), [&](const Node& c) { return eval(c); });
    }
    return false;
  };
  return tree.root && eval(*tree.root);
}

std::vector<CutSet> minimal_cut_sets(const AttackTree& tree, std::size_t cap) {
  if (!tree.root) return {};
  CutSetBuilder b;
  b.cap = cap;
  std::vector<std::string> ids;
  for (const auto* leaf : concrete_leaves(tree)) {
    b.index.emplace(leaf->id, ids.size());
    ids.push_back(leaf->id);
  }
  b.words = std::max<std::size_t>(1, (ids.size() + 63) / 64);
  auto family = b.visit(*tree.root);

  std::vector<CutSet> out;
  out.reserve(family.size());
  for (const auto& s : family) {
    CutSet c;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (s.test(i)) c.insert(ids[i]);
    }
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end(), [](const CutSet& a, const CutSet& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  return out;
}

std::map<std::string, double> propagate_min_cost(const AttackTree& tree) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  return propagate<double>(tree, {[](const Node& n) {
                                    if (n.stub) return kInf;
                                    if (!n.cost) throw DomainError("leaf '" + n.id + "' has no cost");
                                    return *n.cost;
                                  },
                                  [](NodeKind kind, const std::vector<double>& v) {
                                    if (kind == NodeKind::OR) return *std::min_element(v.begin(), v.end());
                                    double sum = 0;
                                    for (double x : v) sum += x;
                                    return sum;
                                  }});
}

std::map<std::string, double> propagate_feasibility(const AttackTree& tree) {
  return propagate<double>(tree, {[](const Node& n) {
                                    if (n.stub) return 0.0;
                                    if (!n.feasibility) throw DomainError("leaf '" + n.id + "' has no feasibility");
                                    return *n.feasibility;
                                  },
                                  [](NodeKind kind, const std::vector<double>& v) {
                                    if (kind == NodeKind::OR) return *std::max_element(v.begin(), v.end());
                                    double product = 1;
                                    for (double x : v) product *= x;
                                    return product;
                                  }});
}

AttackTree prune_by_capability(const AttackTree& tree, const taxonomy::CapabilitySet& capabilities) {
  std::function<std::optional<Node>(const Node&)> prune = [&](const Node& n) -> std::optional<Node> {
    if (n.is_leaf()) {
      if (n.capability && !capabilities.count(*n.capability)) return std::nullopt;
      return n;
    }
    Node kept = n;
    kept.children.clear();
    for (const auto& c : n.children) {
      auto sub = prune(c);
      if (!sub) {
        if (n.kind == NodeKind::AND) return std::nullopt;
        continue;
      }
      kept.children.push_back(std::move(*sub));
    }
    if (kept.children.empty()) return std::nullopt;
    return kept;
  };
  if (!tree.root) return {};
  return AttackTree{prune(*tree.root)};
}

AttackTree prune_by_capability(const AttackTree& tree, const taxonomy::ThreatSourceProfile& profile) {
  return prune_by_capability(tree, profile.capabilities);
}

}  // namespace threatsmith::attack_tree
