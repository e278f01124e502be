// Copyright 2026 The Threatsmith Authors
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

// Typed field access over yaml-cpp nodes; every failure becomes a ParseError
// carrying the document name and the 1-based line of the offending node.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "threatsmith/error.hpp"

namespace threatsmith::yaml {

class Document {
 public:
  Document(const std::string& text, std::string name) : name_(std::move(name)) {
    try {
      root_ = YAML::Load(text);
    } catch (const YAML::Exception& e) {
      throw ParseError(e.msg, e.mark.line + 1, e.mark.column + 1, name_);
    }
  }

  const YAML::Node& root() const { return root_; }
  const std::string& name() const { return name_; }

  [[noreturn]] void fail(const YAML::Node& at, const std::string& message) const {
    const auto mark = at.Mark();
    const bool known = mark.line >= 0 && !at.IsNull();
    throw ParseError(message, known ? mark.line + 1 : 0, known ? mark.column + 1 : 0, name_);
  }

  std::string str(const YAML::Node& map, const char* key) const {
    auto v = map[key];
    if (!v) fail(map, std::string("missing field '") + key + "'");
    if (!v.IsScalar()) fail(v, std::string("field '") + key + "' must be a string");
    return v.as<std::string>();
  }

  std::optional<std::string> opt_str(const YAML::Node& map, const char* key) const {
    auto v = map[key];
    if (!v || v.IsNull()) return std::nullopt;
    if (!v.IsScalar()) fail(v, std::string("field '") + key + "' must be a string");
    return v.as<std::string>();
  }

  std::vector<std::string> str_list(const YAML::Node& map, const char* key, bool required = false) const {
    auto v = map[key];
    std::vector<std::string> out;
    if (!v || v.IsNull()) {
      if (required) fail(map, std::string("missing field '") + key + "'");
      return out;
    }
    if (!v.IsSequence()) fail(v, std::string("field '") + key + "' must be a list");
    for (const auto& item : v) {
      if (!item.IsScalar()) fail(item, std::string("entries of '") + key + "' must be strings");
      out.push_back(item.as<std::string>());
    }
    return out;
  }

  bool boolean(const YAML::Node& map, const char* key, bool fallback) const {
    auto v = map[key];
    if (!v || v.IsNull()) return fallback;
    try {
      return v.as<bool>();
    } catch (const YAML::Exception&) {
      fail(v, std::string("field '") + key + "' must be true or false");
    }
  }

  int integer(const YAML::Node& map, const char* key, int fallback) const {
    auto v = map[key];
    if (!v || v.IsNull()) return fallback;
    try {
      return v.as<int>();
    } catch (const YAML::Exception&) {
      fail(v, std::string("field '") + key + "' must be an integer");
    }
  }

  YAML::Node seq(const YAML::Node& map, const char* key) const {
    auto v = map[key];
    if (v && !v.IsNull() && !v.IsSequence()) fail(v, std::string("field '") + key + "' must be a list");
    return v;
  }

  static int line_of(const YAML::Node& n) { return n.Mark().line >= 0 ? n.Mark().line + 1 : 0; }

 private:
  std::string name_;
  YAML::Node root_;
};

}  // namespace threatsmith::yaml
