// Copyright 2026 The Threatsmith Authors
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

#include "threatsmith/service.hpp"

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <random>
#include <shared_mutex>
#include <sstream>

#include "httplib.h"
#include "json.hpp"

#include "threatsmith/attack_tree.hpp"
#include "threatsmith/error.hpp"
#include "threatsmith/pipeline.hpp"
#include "threatsmith/reporting.hpp"
#include "threatsmith/strings.hpp"

namespace threatsmith::service {

using nlohmann::json;

namespace {

namespace fs = std::filesystem;

// Carries an HTTP status out of request handling.
struct HttpError {
  int status;
  std::string message;
  json extra = json::object();
};

[[noreturn]] void fail(int status, const std::string& message, json extra = json::object()) {
  throw HttpError{status, message, std::move(extra)};
}

Response json_response(int status, const json& body) { return {status, "application/json", body.dump() + "\n"}; }

json findings_json(const Findings& findings) {
  json out = json::array();
  for (const auto& f : findings) {
    out.push_back({{"severity", to_string(f.severity)},
                   {"code", f.code},
                   {"subject", f.subject},
                   {"message", f.message},
                   {"line", f.line}});
  }
  return out;
}

struct StoredTree {
  std::string text;
  attack_tree::AttackTree tree;
};

struct Session {
  std::string id;
  int revision = 0;
  std::optional<model::DeviceModel> model;
  Findings findings;
  bool enumerated = false;
  pipeline::Options options;
  std::map<std::string, StoredTree> trees;
  std::optional<pipeline::Analysis> analysis;
  fs::path log_path;
  mutable std::shared_mutex mutex;
};

std::string new_session_id() {
  static std::mutex m;
  static std::mt19937_64 rng{std::random_device{}()};
  std::lock_guard lock(m);
  return text::hex64(rng()).substr(0, 16);
}

}  // namespace

Config config_from_environment() {
  Config c;
  if (const char* dir = std::getenv("THREATSMITH_DATA_DIR")) c.data_dir = dir;
  if (const char* token = std::getenv("THREATSMITH_TOKEN"); token && *token) c.token = token;
  if (const char* port = std::getenv("THREATSMITH_PORT")) {
    try {
      c.port = std::stoi(port);
    } catch (const std::exception&) {
      throw ConfigError(std::string("THREATSMITH_PORT is not a port number: '") + port + "'");
    }
  }
  return c;
}

struct Service::Impl {
  Config config;
  const taxonomy::TaxonomyCatalog& catalog;
  const enumeration::RuleSet& rules;
  mutable std::mutex sessions_mutex;
  std::map<std::string, std::shared_ptr<Session>> sessions;

  Impl(Config c, const taxonomy::TaxonomyCatalog& cat, const enumeration::RuleSet& r)
      : config(std::move(c)), catalog(cat), rules(r) {}

  // --- events ---------------------------------------------------------------

  // Applies one logged mutation. Throws HttpError without touching the
  // session when the event is rejected.
  void apply(Session& s, const json& event) const {
    const auto type = event.at("type").get<std::string>();
    if (type == "create") return;
    if (type == "model") {
      const auto text = event.at("text").get<std::string>();
      model::DeviceModel m;
      try {
        m = event.at("format") == "json" ? model::model_from_json(json::parse(text))
                                         : model::parse_model(text, "model");
      } catch (const ParseError& e) {
        fail(400, e.what(), {{"line", e.line()}, {"column", e.column()}});
      } catch (const json::exception& e) {
        fail(400, std::string("malformed JSON model: ") + e.what());
      }
      s.findings = model::validate_model(m, catalog);
      s.model = std::move(m);
      s.enumerated = false;
      s.analysis.reset();
      s.options.patches.clear();
      s.options.mitigations.clear();
    } else if (type == "enumerate") {
      if (!s.model) fail(400, "no model uploaded");
      if (count_errors(s.findings) > 0) fail(400, "model has validation errors", {{"findings", findings_json(s.findings)}});
      s.enumerated = true;
      recompute(s, s.options);
    } else if (type == "patch") {
      require_enumerated(s);
      const auto number = event.at("scenario").get<std::string>();
      pipeline::ScenarioPatch patch;
      try {
        patch = pipeline::patch_from_json(event.at("patch"));
      } catch (const ParseError& e) {
        fail(400, e.message());
      }
      const auto& list = s.analysis->scenarios;
      if (std::none_of(list.begin(), list.end(),
                       [&](const enumeration::ThreatScenario& x) { return x.number.str() == number; })) {
        fail(404, "unknown scenario '" + number + "'");
      }
      auto options = s.options;
      options.patches[number].merge(patch);
      recompute(s, options);
    } else if (type == "tree") {
      const auto id = event.at("tree").get<std::string>();
      const auto text = event.at("text").get<std::string>();
      try {
        auto tree = event.value("format", "dsl") == "json" ? attack_tree::tree_from_json(json::parse(text))
                                                           : attack_tree::parse_tree(text, id);
        s.trees[id] = {text, std::move(tree)};
      } catch (const ParseError& e) {
        fail(400, e.what(), {{"line", e.line()}, {"column", e.column()}});
      } catch (const json::exception& e) {
        fail(400, std::string("malformed JSON tree: ") + e.what());
      }
    } else if (type == "whatif") {
      require_enumerated(s);
      auto options = s.options;
      if (event.contains("mitigations")) {
        const auto& toggles = event["mitigations"];
        if (!toggles.is_object()) fail(400, "'mitigations' must map mitigation ids to booleans");
        for (const auto& [id, on] : toggles.items()) {
          if (!on.is_boolean()) fail(400, "mitigation '" + id + "' must be true or false");
          options.mitigations[id] = on.get<bool>();
        }
      }
      if (event.contains("profile")) {
        const auto& p = event["profile"];
        if (p.is_null()) {
          options.profile.reset();
        } else if (p.is_string()) {
          options.profile = p.get<std::string>();
        } else {
          fail(400, "'profile' must be a profile id or null");
        }
      }
      recompute(s, options);
    } else {
      fail(400, "unknown event type '" + type + "'");
    }
  }

  void require_enumerated(const Session& s) const {
    if (!s.enumerated || !s.analysis) fail(400, "session has not been enumerated");
  }

  void recompute(Session& s, const pipeline::Options& options) const {
    try {
      s.analysis = pipeline::analyze(*s.model, catalog, rules, options);
    } catch (const NotFoundError& e) {
      fail(400, e.what());
    } catch (const Error& e) {
      fail(400, e.what());
    }
    s.options = options;
  }

  // Validates, applies and logs `event` at the next revision.
  json mutate(Session& s, json event) const {
    event["revision"] = s.revision + 1;
    apply(s, event);
    s.revision += 1;
    append_log(s, event);
    return event;
  }

  void append_log(const Session& s, const json& event) const {
    if (s.log_path.empty()) return;
    std::ofstream out(s.log_path, std::ios::app | std::ios::binary);
    out << event.dump() << "\n";
    out.flush();
    if (!out) throw Error("cannot append to session log " + s.log_path.string());
  }

  fs::path sessions_dir() const { return fs::path(config.data_dir) / "sessions"; }

  void load_sessions() {
    if (config.data_dir.empty()) return;
    fs::create_directories(sessions_dir());
    for (const auto& entry : fs::directory_iterator(sessions_dir())) {
      if (entry.path().extension() != ".jsonl") continue;
      auto s = std::make_shared<Session>();
      s->id = entry.path().stem().string();
      s->log_path = entry.path();
      std::ifstream in(entry.path(), std::ios::binary);
      std::string line;
      int line_no = 0;
      while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        json event;
        try {
          event = json::parse(line);
          apply(*s, event);
        } catch (const HttpError& e) {
          throw ConfigError("replaying " + entry.path().string() + ":" + std::to_string(line_no) + ": " + e.message);
        } catch (const json::exception& e) {
          throw ConfigError("replaying " + entry.path().string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
        s->revision = event.value("revision", s->revision);
      }
      sessions.emplace(s->id, s);
    }
  }

  void write_snapshots() const {
    if (config.data_dir.empty()) return;
    std::lock_guard lock(sessions_mutex);
    for (const auto& [id, s] : sessions) {
      std::shared_lock read(s->mutex);
      std::ofstream out(sessions_dir() / (id + ".snapshot.json"), std::ios::binary);
      out << state_json(*s).dump(2) << "\n";
    }
  }

  // --- views ----------------------------------------------------------------

  json state_json(const Session& s) const {
    json patches = json::object();
    for (const auto& [n, p] : s.options.patches) patches[n] = pipeline::to_json(p);
    json trees = json::array();
    for (const auto& [id, t] : s.trees) trees.push_back(id);
    return {{"id", s.id},
            {"revision", s.revision},
            {"has_model", s.model.has_value()},
            {"findings", findings_json(s.findings)},
            {"enumerated", s.enumerated},
            {"profile", s.options.profile ? json(*s.options.profile) : json()},
            {"mitigations", s.options.mitigations},
            {"patches", patches},
            {"trees", trees},
            {"scenario_count", s.analysis ? json(s.analysis->scenarios.size()) : json()},
            {"catalog_version", catalog.version},
            {"ruleset", rules.name}};
  }

  json scenarios_json(const Session& s) const {
    json out = json::array();
    if (!s.analysis) return out;
    for (const auto& sc : s.analysis->scenarios) {
      auto j = enumeration::to_json(sc);
      auto it = std::find_if(s.analysis->records.begin(), s.analysis->records.end(),
                             [&](const scoring::RiskRecord& r) { return r.scenario == sc.number; });
      j["risk"] = it == s.analysis->records.end() ? json() : scoring::to_json(*it);
      out.push_back(std::move(j));
    }
    return out;
  }

  json register_json(const Session& s) const {
    auto reg = reporting::build_risk_register(s.analysis->scenarios, s.analysis->records);
    reporting::ReportDocument doc;
    doc.risk_register = std::move(reg);
    return reporting::to_json(doc)["risk_register"];
  }

  json tree_json(const std::string& id, const StoredTree& t, const std::optional<std::string>& profile_id) const {
    json out = {{"id", id}, {"tree", attack_tree::to_json(t.tree)}, {"text", attack_tree::render_tree(t.tree)}};
    auto analyzed = t.tree;
    if (profile_id) {
      const auto* profile = catalog.find_profile(*profile_id);
      if (profile) analyzed = attack_tree::prune_by_capability(t.tree, *profile);
      out["profile"] = *profile_id;
    }
    try {
      json sets = json::array();
      for (const auto& cs : attack_tree::minimal_cut_sets(analyzed)) sets.push_back(cs);
      out["cut_sets"] = sets;
    } catch (const attack_tree::CutSetOverflow& e) {
      out["cut_sets"] = nullptr;
      out["cut_set_error"] = e.what();
    }
    if (!analyzed.empty()) {
      try {
        out["min_cost"] = attack_tree::propagate_min_cost(analyzed).at(analyzed.root->id);
      } catch (const DomainError& e) {
        out["min_cost"] = nullptr;
        out["cost_error"] = e.what();
      }
      out["feasibility"] = attack_tree::propagate_feasibility(analyzed).at(analyzed.root->id);
    }
    return out;
  }

  // --- routing --------------------------------------------------------------

  std::shared_ptr<Session> find_session(const std::string& id) const {
    std::lock_guard lock(sessions_mutex);
    auto it = sessions.find(id);
    if (it == sessions.end()) fail(404, "unknown session '" + id + "'");
    return it->second;
  }

  static std::optional<int> expected_revision(const Request& r, const json* body) {
    auto parse = [](std::string v) -> int {
      v = text::trim(v);
      if (v.size() >= 2 && v.front() == '"' && v.back() == '"') v = v.substr(1, v.size() - 2);
      try {
        std::size_t used = 0;
        int n = std::stoi(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return n;
      } catch (const std::exception&) {
        fail(400, "malformed revision '" + v + "'");
      }
    };
    if (auto it = r.headers.find("if-match"); it != r.headers.end()) return parse(it->second);
    if (auto it = r.query.find("revision"); it != r.query.end()) return parse(it->second);
    if (body && body->is_object() && body->contains("revision")) {
      const auto& v = (*body)["revision"];
      if (!v.is_number_integer()) fail(400, "'revision' must be an integer");
      return v.get<int>();
    }
    return std::nullopt;
  }

  static void check_revision(const Session& s, std::optional<int> expected) {
    if (expected && *expected != s.revision) {
      fail(409, "stale revision " + std::to_string(*expected) + "; session is at revision " +
                    std::to_string(s.revision),
           {{"revision", s.revision}});
    }
  }

  static json parse_body(const Request& r, bool allow_empty = false) {
    if (allow_empty && text::trim(r.body).empty()) return json::object();
    try {
      return json::parse(r.body);
    } catch (const json::exception& e) {
      fail(400, std::string("malformed JSON body: ") + e.what());
    }
  }

  static bool is_json(const Request& r) {
    auto it = r.headers.find("content-type");
    return it != r.headers.end() && it->second.find("json") != std::string::npos;
  }

  bool authorized(const Request& r) const {
    if (!config.token) return true;
    auto it = r.headers.find("authorization");
    return it != r.headers.end() && it->second == "Bearer " + *config.token;
  }

  Response route(const Request& r) {
    if (!authorized(r)) fail(401, "missing or invalid bearer token");
    auto parts = text::split(r.path, '/');
    parts.erase(std::remove(parts.begin(), parts.end(), std::string()), parts.end());
    const auto& m = r.method;
    auto method_not_allowed = [&]() -> Response { fail(405, "method " + m + " not allowed on " + r.path); };

    if (parts.size() == 1 && parts[0] == "catalog") {
      if (m != "GET") return method_not_allowed();
      return json_response(200, taxonomy::to_json(catalog));
    }
    if (parts.size() == 1 && parts[0] == "ruleset") {
      if (m != "GET") return method_not_allowed();
      return json_response(200, enumeration::to_json(rules));
    }
    if (parts.empty() || parts[0] != "sessions") fail(404, "no such resource " + r.path);

    if (parts.size() == 1) {
      if (m == "GET") {
        std::lock_guard lock(sessions_mutex);
        json ids = json::array();
        for (const auto& [id, s] : sessions) ids.push_back(id);
        return json_response(200, {{"sessions", ids}});
      }
      if (m != "POST") return method_not_allowed();
      auto s = std::make_shared<Session>();
      s->id = new_session_id();
      if (!config.data_dir.empty()) s->log_path = sessions_dir() / (s->id + ".jsonl");
      append_log(*s, {{"type", "create"}, {"revision", 0}});
      {
        std::lock_guard lock(sessions_mutex);
        sessions.emplace(s->id, s);
      }
      return json_response(201, {{"id", s->id}, {"revision", 0}});
    }

    auto session = find_session(parts[1]);
    auto& s = *session;
    const std::string resource = parts.size() > 2 ? parts[2] : "";

    if (parts.size() == 2) {
      if (m != "GET") return method_not_allowed();
      std::shared_lock lock(s.mutex);
      return json_response(200, state_json(s));
    }

    if (resource == "model" && parts.size() == 3) {
      if (m == "GET") {
        std::shared_lock lock(s.mutex);
        if (!s.model) fail(404, "no model uploaded");
        return json_response(200, {{"revision", s.revision}, {"model", model::to_json(*s.model)},
                                   {"text", model::render_model(*s.model)}});
      }
      if (m != "PUT") return method_not_allowed();
      std::unique_lock lock(s.mutex);
      json event = {{"type", "model"}, {"format", "dsl"}, {"text", r.body}};
      std::optional<int> expected;
      if (is_json(r)) {
        auto body = parse_body(r);
        expected = expected_revision(r, &body);
        if (body.is_object() && body.contains("text")) {
          if (!body["text"].is_string()) fail(400, "'text' must be a string");
          event["text"] = body["text"];
          event["format"] = body.value("format", "dsl");
        } else if (body.is_object() && body.contains("model")) {
          event["text"] = body["model"].dump();
          event["format"] = "json";
        } else {
          auto copy = body;
          copy.erase("revision");
          event["text"] = copy.dump();
          event["format"] = "json";
        }
      } else {
        expected = expected_revision(r, nullptr);
      }
      check_revision(s, expected);
      mutate(s, event);
      return json_response(200, {{"revision", s.revision},
                                 {"findings", findings_json(s.findings)},
                                 {"errors", count_errors(s.findings)}});
    }

    if (resource == "enumerate" && parts.size() == 3) {
      if (m != "POST") return method_not_allowed();
      std::unique_lock lock(s.mutex);
      auto body = parse_body(r, true);
      check_revision(s, expected_revision(r, &body));
      mutate(s, {{"type", "enumerate"}});
      return json_response(200, {{"revision", s.revision},
                                 {"count", s.analysis->scenarios.size()},
                                 {"scenarios", scenarios_json(s)}});
    }

    if (resource == "scenarios") {
      if (parts.size() == 3) {
        if (m != "GET") return method_not_allowed();
        std::shared_lock lock(s.mutex);
        require_enumerated(s);
        auto list = scenarios_json(s);
        if (auto it = r.query.find("status"); it != r.query.end()) {
          json filtered = json::array();
          for (auto& x : list) {
            if (x["status"] == it->second) filtered.push_back(x);
          }
          list = filtered;
        }
        if (auto it = r.query.find("group"); it != r.query.end()) {
          json filtered = json::array();
          for (auto& x : list) {
            if (x["threat"].get<std::string>().rfind(it->second + ".", 0) == 0) filtered.push_back(x);
          }
          list = filtered;
        }
        return json_response(200, {{"revision", s.revision}, {"scenarios", list}});
      }
      if (parts.size() == 4) {
        const auto& number = parts[3];
        if (m == "GET") {
          std::shared_lock lock(s.mutex);
          require_enumerated(s);
          for (const auto& x : scenarios_json(s)) {
            if (x["number"] == number) return json_response(200, {{"revision", s.revision}, {"scenario", x}});
          }
          fail(404, "unknown scenario '" + number + "'");
        }
        if (m != "PATCH") return method_not_allowed();
        std::unique_lock lock(s.mutex);
        auto body = parse_body(r);
        check_revision(s, expected_revision(r, &body));
        if (body.is_object()) body.erase("revision");
        mutate(s, {{"type", "patch"}, {"scenario", number}, {"patch", body}});
        for (const auto& x : scenarios_json(s)) {
          if (x["number"] == number) return json_response(200, {{"revision", s.revision}, {"scenario", x}});
        }
        return json_response(200, {{"revision", s.revision}, {"scenario", nullptr}});
      }
    }

    if (resource == "trees") {
      if (parts.size() == 3) {
        if (m != "GET") return method_not_allowed();
        std::shared_lock lock(s.mutex);
        json trees = json::array();
        std::optional<std::string> profile = s.options.profile;
        if (auto it = r.query.find("profile"); it != r.query.end()) profile = it->second;
        if (profile && !catalog.find_profile(*profile)) fail(400, "unknown threat-source profile '" + *profile + "'");
        for (const auto& [id, t] : s.trees) trees.push_back(tree_json(id, t, profile));
        return json_response(200, {{"revision", s.revision}, {"trees", trees}});
      }
      if (parts.size() == 4) {
        const auto& tid = parts[3];
        if (m == "GET") {
          std::shared_lock lock(s.mutex);
          auto it = s.trees.find(tid);
          if (it == s.trees.end()) fail(404, "unknown tree '" + tid + "'");
          return json_response(200, {{"revision", s.revision}, {"tree", tree_json(tid, it->second, s.options.profile)}});
        }
        if (m != "PUT") return method_not_allowed();
        std::unique_lock lock(s.mutex);
        json event = {{"type", "tree"}, {"tree", tid}, {"text", r.body}, {"format", "dsl"}};
        std::optional<int> expected;
        if (is_json(r)) {
          auto body = parse_body(r);
          expected = expected_revision(r, &body);
          if (body.is_object() && body.contains("text")) {
            event["text"] = body["text"];
          } else {
            auto copy = body;
            if (copy.is_object()) copy.erase("revision");
            event["text"] = copy.dump();
            event["format"] = "json";
          }
        } else {
          expected = expected_revision(r, nullptr);
        }
        check_revision(s, expected);
        mutate(s, event);
        return json_response(200, {{"revision", s.revision}, {"tree", tree_json(tid, s.trees.at(tid), s.options.profile)}});
      }
    }

    if (resource == "whatif" && parts.size() == 3) {
      if (m != "POST") return method_not_allowed();
      std::unique_lock lock(s.mutex);
      auto body = parse_body(r, true);
      if (!body.is_object()) fail(400, "what-if body must be a JSON object");
      check_revision(s, expected_revision(r, &body));
      for (const auto& [key, v] : body.items()) {
        if (key != "mitigations" && key != "profile" && key != "revision") fail(400, "unknown what-if field '" + key + "'");
      }
      json event = {{"type", "whatif"}};
      if (body.contains("mitigations")) event["mitigations"] = body["mitigations"];
      if (body.contains("profile")) event["profile"] = body["profile"];
      mutate(s, event);
      json statuses = json::object();
      for (const auto& x : s.analysis->scenarios) statuses[x.number.str()] = enumeration::to_string(x.status);
      return json_response(200, {{"revision", s.revision},
                                 {"risk_register", register_json(s)},
                                 {"statuses", statuses},
                                 {"profile", s.options.profile ? json(*s.options.profile) : json()},
                                 {"mitigations", s.options.mitigations}});
    }

    if (resource == "register" && parts.size() == 3) {
      if (m != "GET") return method_not_allowed();
      std::shared_lock lock(s.mutex);
      require_enumerated(s);
      return json_response(200, {{"revision", s.revision}, {"risk_register", register_json(s)}});
    }

    if (resource == "report" && parts.size() == 3) {
      if (m != "GET") return method_not_allowed();
      std::shared_lock lock(s.mutex);
      require_enumerated(s);
      reporting::Format format = reporting::Format::json;
      if (auto it = r.query.find("format"); it != r.query.end()) {
        try {
          format = reporting::parse_format(it->second);
        } catch (const ConfigError& e) {
          fail(400, e.what());
        }
      }
      auto doc = pipeline::make_report(*s.analysis, catalog, rules, s.options, pipeline::default_title(*s.model));
      static const std::map<reporting::Format, std::string> types = {
          {reporting::Format::markdown, "text/markdown; charset=utf-8"},
          {reporting::Format::csv, "application/zip"},
          {reporting::Format::json, "application/json"}};
      return {200, types.at(format), reporting::render_report(doc, format)};
    }

    fail(404, "no such resource " + r.path);
  }
};

Service::Service(Config config, const taxonomy::TaxonomyCatalog& catalog, const enumeration::RuleSet& rules)
    : impl_(std::make_unique<Impl>(std::move(config), catalog, rules)) {
  enumeration::check_ruleset(rules, catalog);
  impl_->load_sessions();
}

Service::~Service() {
  try {
    impl_->write_snapshots();
  } catch (...) {
    // A failed snapshot leaves the log, which is authoritative.
  }
}

Response Service::handle(const Request& request) {
  try {
    return impl_->route(request);
  } catch (const HttpError& e) {
    json body = e.extra;
    body["error"] = e.message;
    return json_response(e.status, body);
  } catch (const std::exception& e) {
    return json_response(500, {{"error", e.what()}});
  }
}

std::size_t Service::session_count() const {
  std::lock_guard lock(impl_->sessions_mutex);
  return impl_->sessions.size();
}

// --- HTTP --------------------------------------------------------------------

struct HttpServer::Impl {
  Service& service;
  Config config;
  std::ostream& log;
  std::mutex log_mutex;
  httplib::Server server;
  std::atomic<bool> bound{false};

  Impl(Service& s, const Config& c, std::ostream& l) : service(s), config(c), log(l) {
    if (!config.static_dir.empty()) server.set_mount_point("/", config.static_dir);
    auto handler = [this](const httplib::Request& req, httplib::Response& res) {
      Request r;
      r.method = req.method;
      r.path = req.path;
      for (const auto& [k, v] : req.params) r.query[k] = v;
      for (const auto& [k, v] : req.headers) r.headers[text::to_lower(k)] = v;
      r.body = req.body;
      auto out = service.handle(r);
      res.status = out.status;
      res.set_content(out.body, out.content_type);
      std::lock_guard lock(log_mutex);
      log << json{{"method", r.method}, {"path", r.path}, {"status", out.status}}.dump() << "\n";
    };
    const std::string any = "/(.*)";
    server.Get(any, handler);
    server.Post(any, handler);
    server.Put(any, handler);
    server.Patch(any, handler);
    server.Delete(any, handler);
  }
};

HttpServer::HttpServer(Service& service, const Config& config, std::ostream& log)
    : impl_(std::make_unique<Impl>(service, config, log)) {}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind() {
  int port = impl_->config.port;
  if (port == 0) {
    port = impl_->server.bind_to_any_port(impl_->config.host);
  } else if (!impl_->server.bind_to_port(impl_->config.host, port)) {
    port = -1;
  }
  impl_->bound = port > 0;
  return port;
}

bool HttpServer::listen() {
  if (!impl_->bound && bind() < 0) return false;
  return impl_->server.listen_after_bind();
}

void HttpServer::stop() { impl_->server.stop(); }

}  // namespace threatsmith::service
