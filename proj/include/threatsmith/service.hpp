// Copyright 2026 The Threatsmith Authors
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

// Analysis sessions over HTTP/JSON. Every session is an append-only JSON-lines
// event log; replaying the log rebuilds the session exactly.

#pragma once

#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "threatsmith/enumeration.hpp"
#include "threatsmith/taxonomy.hpp"

namespace threatsmith::service {

struct Config {
  std::string data_dir;  // empty: sessions live in memory only
  std::optional<std::string> token;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string static_dir;  // built UI, served at /
};

/// Defaults from THREATSMITH_DATA_DIR, THREATSMITH_TOKEN and THREATSMITH_PORT.
Config config_from_environment();

struct Request {
  std::string method;
  std::string path;  // without the query string
  std::map<std::string, std::string> query;
  std::map<std::string, std::string> headers;  // lower-case names
  std::string body;
};

struct Response {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

class Service {
 public:
  /// Replays every session log found under config.data_dir.
  explicit Service(Config config, const taxonomy::TaxonomyCatalog& catalog = taxonomy::load_default_catalog(),
                   const enumeration::RuleSet& rules = enumeration::load_default_ruleset());
  /// Writes a snapshot of every session next to its log.
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Thread-safe. Mutations on one session are applied in revision order.
  Response handle(const Request& request);
  std::size_t session_count() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// HTTP front end for a Service, plus static files from config.static_dir.
class HttpServer {
 public:
  HttpServer(Service& service, const Config& config, std::ostream& log);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Bound port (an ephemeral one when config.port is 0), or -1 on failure.
  int bind();
  /// Blocks until stop().
  bool listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace threatsmith::service
