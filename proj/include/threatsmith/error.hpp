// Copyright 2026 The Threatsmith Authors
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace threatsmith {

/// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Syntax or structural error in a DSL or data file. Line and column are
/// 1-based; 0 means unknown.
class ParseError : public Error {
 public:
  ParseError(std::string message, int line, int column, std::string file = {})
      : Error(format(message, line, column, file)),
        message_(std::move(message)),
        file_(std::move(file)),
        line_(line),
        column_(column) {}

  const std::string& message() const { return message_; }
  const std::string& file() const { return file_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  static std::string format(const std::string& message, int line, int column,
                            const std::string& file) {
    std::string out = file.empty() ? std::string{} : file + ":";
    if (line > 0) {
      out += std::to_string(line) + ":";
      if (column > 0) out += std::to_string(column) + ":";
    }
    if (!out.empty()) out += " ";
    return out + message;
  }

  std::string message_;
  std::string file_;
  int line_;
  int column_;
};

/// Lookup of an id that does not exist. Carries the closest known ids.
class NotFoundError : public Error {
 public:
  NotFoundError(std::string what_kind, std::string id, std::vector<std::string> suggestions = {})
      : Error(format(what_kind, id, suggestions)),
        id_(std::move(id)),
        suggestions_(std::move(suggestions)) {}

  const std::string& id() const { return id_; }
  const std::vector<std::string>& suggestions() const { return suggestions_; }

 private:
  static std::string format(const std::string& kind, const std::string& id,
                            const std::vector<std::string>& suggestions) {
    std::string out = "unknown " + kind + " '" + id + "'";
    if (!suggestions.empty()) {
      out += "; did you mean ";
      for (std::size_t i = 0; i < suggestions.size(); ++i) {
        if (i) out += ", ";
        out += "'" + suggestions[i] + "'";
      }
      out += "?";
    }
    return out;
  }

  std::string id_;
  std::vector<std::string> suggestions_;
};

/// Inconsistent configuration, e.g. a ruleset naming ids missing from the catalog.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Argument outside its documented domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace threatsmith
