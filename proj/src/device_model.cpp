// Copyright 2026 The Threatsmith Authors
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

#include "threatsmith/device_model.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <regex>
#include <set>

#include "threatsmith/error.hpp"
#include "threatsmith/scoring.hpp"
#include "threatsmith/strings.hpp"

namespace threatsmith::model {

namespace {

// --- lexer ----------------------------------------------------------------

enum class Tok { word, string, lbrace, rbrace, comma, end_stmt, eof };

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
};

bool word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' || c == ':';
}

class Lexer {
 public:
  Lexer(std::string_view text, const std::string& source) : s_(text), source_(source) {}

  [[noreturn]] void fail(const std::string& message, int line, int column) const {
    throw ParseError(message, line, column, source_);
  }

  std::vector<Token> run() {
    std::vector<Token> out;
    while (pos_ < s_.size()) {
      char c = s_[pos_];
      if (c == '\n') {
        out.push_back({Tok::end_stmt, "\n", line_, col()});
        advance();
      } else if (c == ' ' || c == '\t' || c == '\r') {
        advance();
      } else if (c == '#' || (c == '/' && pos_ + 1 < s_.size() && s_[pos_ + 1] == '/')) {
        while (pos_ < s_.size() && s_[pos_] != '\n') advance();
      } else if (c == ';') {
        out.push_back({Tok::end_stmt, ";", line_, col()});
        advance();
      } else if (c == '{') {
        out.push_back({Tok::lbrace, "{", line_, col()});
        advance();
      } else if (c == '}') {
        out.push_back({Tok::rbrace, "}", line_, col()});
        advance();
      } else if (c == ',') {
        out.push_back({Tok::comma, ",", line_, col()});
        advance();
      } else if (c == '"') {
        out.push_back(string_token());
      } else if (word_char(c)) {
        int line = line_, column = col();
        auto start = pos_;
        while (pos_ < s_.size() && word_char(s_[pos_])) advance();
        out.push_back({Tok::word, std::string(s_.substr(start, pos_ - start)), line, column});
      } else {
        fail(std::string("unexpected character '") + c + "'", line_, col());
      }
    }
    out.push_back({Tok::eof, "", line_, col()});
    return out;
  }

 private:
  int col() const { return static_cast<int>(pos_ - line_start_) + 1; }
  void advance() {
    if (s_[pos_] == '\n') {
      ++line_;
      line_start_ = pos_ + 1;
    }
    ++pos_;
  }

  Token string_token() {
    int line = line_, column = col();
    advance();
    std::string out;
    while (true) {
      if (pos_ >= s_.size() || s_[pos_] == '\n') fail("unterminated string", line, column);
      char c = s_[pos_];
      advance();
      if (c == '"') break;
      if (c == '\\') {
        if (pos_ >= s_.size()) fail("unterminated string", line, column);
        char e = s_[pos_];
        advance();
        switch (e) {
          case '"': out.push_back('"'); break;
          case '\\': out.push_back('\\'); break;
          case 'n': out.push_back('\n'); break;
          case 't': out.push_back('\t'); break;
          default: fail(std::string("unknown escape '\\") + e + "'", line_, col() - 1);
        }
      } else {
        out.push_back(c);
      }
    }
    return {Tok::string, out, line, column};
  }

  std::string_view s_;
  const std::string& source_;
  std::size_t pos_ = 0;
  std::size_t line_start_ = 0;
  int line_ = 1;
};

// --- parser ---------------------------------------------------------------

struct Statement {
  std::vector<std::string> values;
  int line;
  int column;
};

using Block = std::map<std::string, Statement>;

class Parser {
 public:
  Parser(std::vector<Token> tokens, const std::string& source) : t_(std::move(tokens)), source_(source) {}

  DeviceModel run() {
    DeviceModel m;
    bool seen_device = false;
    while (true) {
      skip_ends();
      if (peek().kind == Tok::eof) break;
      const Token head = expect_word("section keyword");
      const SourceLocation loc{head.line, head.column};
      const auto& s = head.text;
      if (s == "device") {
        if (seen_device) fail_at(head, "duplicate section 'device'");
        seen_device = true;
        m.device.name = expect_value("device name").text;
        auto b = optional_block();
        m.device.version = scalar(b, "version");
        m.device.environment = list(b, "environment");
        m.device.description = scalar(b, "description");
        reject_unknown(b, "device");
      } else if (s == "component") {
        ComponentInstance c;
        c.kind = expect_word("component kind").text;
        auto id = expect_word("component id");
        c.id = id.text;
        c.location = loc;
        auto b = optional_block();
        c.name = scalar(b, "name");
        for (auto& [key, st] : b) {
          if (st.values.size() != 1) fail_stmt(st, "property '" + key + "' takes one value");
          c.properties[key] = st.values[0];
        }
        add(m.components, std::move(c), id);
      } else if (s == "interface") {
        Interface i;
        i.kind = expect_word("interface kind").text;
        auto id = expect_word("interface id");
        i.id = id.text;
        i.location = loc;
        auto b = optional_block();
        i.component = scalar(b, "component");
        i.authentication = boolean(b, "auth", false);
        i.transport = scalar(b, "transport");
        i.name = scalar(b, "name");
        reject_unknown(b, "interface");
        add(m.interfaces, std::move(i), id);
      } else if (s == "actor") {
        Actor a;
        a.role = expect_word("actor role").text;
        auto id = expect_word("actor id");
        a.id = id.text;
        a.location = loc;
        auto b = optional_block();
        a.name = scalar(b, "name");
        a.privileges = list(b, "privileges");
        reject_unknown(b, "actor");
        add(m.actors, std::move(a), id);
      } else if (s == "interaction") {
        Interaction x;
        auto id = expect_word("interaction id");
        x.id = id.text;
        x.location = loc;
        auto b = optional_block();
        x.actor = scalar(b, "actor");
        x.via = scalar(b, "via");
        x.purpose = scalar(b, "purpose");
        x.data = list(b, "data");
        if (auto d = b.find("direction"); d != b.end()) {
          auto st = d->second;
          b.erase(d);
          if (st.values.size() != 1) fail_stmt(st, "'direction' takes one value");
          auto parsed = parse_direction(st.values[0]);
          if (!parsed) fail_stmt(st, "direction must be in, out or both");
          x.direction = *parsed;
        }
        x.abuse = optional_scalar(b, "abuse");
        x.abuse_label = scalar(b, "abuse_label");
        x.assets = list(b, "assets");
        reject_unknown(b, "interaction");
        add(m.interactions, std::move(x), id);
      } else if (s == "asset") {
        AssetInstance a;
        a.kind = expect_word("asset kind").text;
        auto id = expect_word("asset id");
        a.id = id.text;
        a.location = loc;
        auto b = optional_block();
        a.name = scalar(b, "name");
        a.stakeholder = optional_scalar(b, "stakeholder");
        a.criticality = integer(b, "criticality").value_or(1);
        a.goals = list(b, "goals");
        a.on = list(b, "on");
        reject_unknown(b, "asset");
        add(m.assets, std::move(a), id);
      } else if (s == "vulnerability") {
        Vulnerability v;
        auto id = expect_word("vulnerability id");
        v.id = id.text;
        v.location = loc;
        auto b = optional_block();
        v.title = scalar(b, "title");
        v.cause = scalar(b, "cause");
        v.description = scalar(b, "description");
        v.affects = list(b, "affects");
        if (auto st = b.find("status"); st != b.end()) {
          auto value = st->second;
          b.erase(st);
          if (value.values.size() == 1 && value.values[0] == "open") {
            v.status = VulnerabilityStatus::open;
          } else if (value.values.size() == 1 && value.values[0] == "mitigated") {
            v.status = VulnerabilityStatus::mitigated;
          } else {
            fail_stmt(value, "status must be open or mitigated");
          }
        }
        v.threat = optional_scalar(b, "threat");
        v.label = scalar(b, "label");
        v.action = scalar(b, "action");
        v.note = scalar(b, "note");
        v.assets = list(b, "assets");
        v.cvss = optional_scalar(b, "cvss");
        v.likelihood = integer(b, "likelihood");
        reject_unknown(b, "vulnerability");
        add(m.vulnerabilities, std::move(v), id);
      } else if (s == "mitigation") {
        Mitigation x;
        auto id = expect_word("mitigation id");
        x.id = id.text;
        x.location = loc;
        auto b = optional_block();
        x.title = scalar(b, "title");
        x.mitigates = list(b, "mitigates");
        x.enabled = boolean(b, "enabled", false);
        reject_unknown(b, "mitigation");
        add(m.mitigations, std::move(x), id);
      } else {
        fail_at(head, "unknown section '" + s + "'");
      }
      if (peek().kind != Tok::eof && peek().kind != Tok::end_stmt) {
        fail_at(peek(), "expected end of line after section");
      }
    }
    return m;
  }

 private:
  const Token& peek() const { return t_[i_]; }
  const Token& next() { return t_[i_++]; }

  [[noreturn]] void fail_at(const Token& t, const std::string& message) const {
    throw ParseError(message, t.line, t.column, source_);
  }
  [[noreturn]] void fail_stmt(const Statement& st, const std::string& message) const {
    throw ParseError(message, st.line, st.column, source_);
  }

  void skip_ends() {
    while (peek().kind == Tok::end_stmt) ++i_;
  }

  Token expect_word(const char* what) {
    if (peek().kind != Tok::word) fail_at(peek(), std::string("expected ") + what);
    return next();
  }

  Token expect_value(const char* what) {
    if (peek().kind != Tok::word && peek().kind != Tok::string) fail_at(peek(), std::string("expected ") + what);
    return next();
  }

  Block optional_block() {
    Block b;
    if (peek().kind != Tok::lbrace) return b;
    next();
    while (true) {
      skip_ends();
      if (peek().kind == Tok::rbrace) {
        next();
        return b;
      }
      if (peek().kind == Tok::eof) fail_at(peek(), "unterminated block; expected '}'");
      auto key = expect_word("key");
      Statement st{{}, key.line, key.column};
      while (true) {
        st.values.push_back(expect_value("value").text);
        if (peek().kind != Tok::comma) break;
        next();
        skip_ends();
      }
      if (peek().kind != Tok::end_stmt && peek().kind != Tok::rbrace) fail_at(peek(), "expected end of statement");
      if (!b.emplace(key.text, std::move(st)).second) fail_at(key, "duplicate key '" + key.text + "'");
    }
  }

  std::optional<std::string> optional_scalar(Block& b, const std::string& key) {
    auto it = b.find(key);
    if (it == b.end()) return std::nullopt;
    auto st = it->second;
    b.erase(it);
    if (st.values.size() != 1) fail_stmt(st, "'" + key + "' takes one value");
    return st.values[0];
  }

  std::string scalar(Block& b, const std::string& key) { return optional_scalar(b, key).value_or(""); }

  std::vector<std::string> list(Block& b, const std::string& key) {
    auto it = b.find(key);
    if (it == b.end()) return {};
    auto values = it->second.values;
    b.erase(it);
    return values;
  }

  bool boolean(Block& b, const std::string& key, bool fallback) {
    auto it = b.find(key);
    if (it == b.end()) return fallback;
    auto st = it->second;
    b.erase(it);
    if (st.values.size() != 1 || (st.values[0] != "true" && st.values[0] != "false")) {
      fail_stmt(st, "'" + key + "' must be true or false");
    }
    return st.values[0] == "true";
  }

  std::optional<int> integer(Block& b, const std::string& key) {
    auto it = b.find(key);
    if (it == b.end()) return std::nullopt;
    auto st = it->second;
    b.erase(it);
    static const std::regex kInt("-?[0-9]{1,6}");
    if (st.values.size() != 1 || !std::regex_match(st.values[0], kInt)) {
      fail_stmt(st, "'" + key + "' must be an integer");
    }
    return std::stoi(st.values[0]);
  }

  void reject_unknown(const Block& b, const char* section) {
    if (b.empty()) return;
    const auto& [key, st] = *std::min_element(b.begin(), b.end(), [](const auto& x, const auto& y) {
      return std::pair(x.second.line, x.second.column) < std::pair(y.second.line, y.second.column);
    });
    fail_stmt(st, "unknown key '" + key + "' in " + section);
  }

  template <typename T>
  void add(std::vector<T>& into, T item, const Token& id) {
    for (const auto& existing : into) {
      if (existing.id == item.id) fail_at(id, "duplicate id '" + item.id + "'");
    }
    into.push_back(std::move(item));
  }

  std::vector<Token> t_;
  std::size_t i_ = 0;
  const std::string& source_;
};

// --- rendering ------------------------------------------------------------

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out.push_back(c);
    }
  }
  return out + "\"";
}

/// Bare when the lexer would read it back as one word.
std::string token(const std::string& s) {
  if (!s.empty() && std::all_of(s.begin(), s.end(), word_char)) return s;
  return quote(s);
}

class Writer {
 public:
  void open(const std::string& header) {
    out_ += header + " {\n";
    lines_ = 0;
  }
  void text(const char* key, const std::string& value) {
    if (!value.empty()) line(key, quote(value));
  }
  void id(const char* key, const std::string& value) {
    if (!value.empty()) line(key, token(value));
  }
  void ids(const char* key, const std::vector<std::string>& values) {
    if (values.empty()) return;
    std::vector<std::string> parts;
    for (const auto& v : values) parts.push_back(token(v));
    line(key, text::join(parts, ", "));
  }
  void raw(const char* key, const std::string& value) { line(key, value); }
  void close() {
    if (lines_ == 0) {
      out_.resize(out_.size() - 3);  // drop " {\n"
      out_ += "\n";
    } else {
      out_ += "}\n";
    }
    out_ += "\n";
  }
  std::string str() {
    if (!out_.empty()) out_.pop_back();  // no blank line at EOF
    return out_;
  }

 private:
  void line(const char* key, const std::string& value) {
    out_ += "  " + std::string(key) + " " + value + "\n";
    ++lines_;
  }
  std::string out_;
  int lines_ = 0;
};

// --- JSON -----------------------------------------------------------------

using nlohmann::json;

[[noreturn]] void json_fail(const std::string& message) { throw ParseError(message, 0, 0, "<json>"); }

std::string get_str(const json& o, const char* key, bool required = false) {
  if (!o.contains(key) || o[key].is_null()) {
    if (required) json_fail(std::string("missing field '") + key + "'");
    return "";
  }
  if (!o[key].is_string()) json_fail(std::string("field '") + key + "' must be a string");
  return o[key].get<std::string>();
}

std::optional<std::string> get_opt(const json& o, const char* key) {
  if (!o.contains(key) || o[key].is_null()) return std::nullopt;
  return get_str(o, key);
}

std::vector<std::string> get_list(const json& o, const char* key) {
  std::vector<std::string> out;
  if (!o.contains(key) || o[key].is_null()) return out;
  if (!o[key].is_array()) json_fail(std::string("field '") + key + "' must be an array");
  for (const auto& v : o[key]) {
    if (!v.is_string()) json_fail(std::string("entries of '") + key + "' must be strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

bool get_bool(const json& o, const char* key, bool fallback) {
  if (!o.contains(key) || o[key].is_null()) return fallback;
  if (!o[key].is_boolean()) json_fail(std::string("field '") + key + "' must be a boolean");
  return o[key].get<bool>();
}

std::optional<int> get_int(const json& o, const char* key) {
  if (!o.contains(key) || o[key].is_null()) return std::nullopt;
  if (!o[key].is_number_integer()) json_fail(std::string("field '") + key + "' must be an integer");
  return o[key].get<int>();
}

template <typename T, typename F>
std::vector<T> read_section(const json& j, const char* key, F read) {
  std::vector<T> out;
  if (!j.contains(key)) return out;
  if (!j[key].is_array()) json_fail(std::string("'") + key + "' must be an array");
  std::set<std::string> ids;
  for (const auto& o : j[key]) {
    if (!o.is_object()) json_fail(std::string("entries of '") + key + "' must be objects");
    T item = read(o);
    if (!ids.insert(item.id).second) json_fail("duplicate id '" + item.id + "'");
    out.push_back(std::move(item));
  }
  return out;
}

template <typename T>
const T* find_by_id(const std::vector<T>& items, std::string_view id) {
  for (const auto& x : items) {
    if (x.id == id) return &x;
  }
  return nullptr;
}

}  // namespace

std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::in: return "in";
    case Direction::out: return "out";
    case Direction::both: return "both";
  }
  return "";
}

std::optional<Direction> parse_direction(std::string_view s) {
  if (s == "in") return Direction::in;
  if (s == "out") return Direction::out;
  if (s == "both") return Direction::both;
  return std::nullopt;
}

std::string_view to_string(VulnerabilityStatus s) { return s == VulnerabilityStatus::open ? "open" : "mitigated"; }

std::string_view to_string(ElementKind k) {
  switch (k) {
    case ElementKind::external_entity: return "external_entity";
    case ElementKind::process: return "process";
    case ElementKind::data_store: return "data_store";
    case ElementKind::data_flow: return "data_flow";
  }
  return "";
}

const ComponentInstance* DeviceModel::find_component(std::string_view id) const { return find_by_id(components, id); }
const Interface* DeviceModel::find_interface(std::string_view id) const { return find_by_id(interfaces, id); }
const Actor* DeviceModel::find_actor(std::string_view id) const { return find_by_id(actors, id); }
const Interaction* DeviceModel::find_interaction(std::string_view id) const { return find_by_id(interactions, id); }
const AssetInstance* DeviceModel::find_asset(std::string_view id) const { return find_by_id(assets, id); }
const Vulnerability* DeviceModel::find_vulnerability(std::string_view id) const {
  return find_by_id(vulnerabilities, id);
}
const Mitigation* DeviceModel::find_mitigation(std::string_view id) const { return find_by_id(mitigations, id); }

DeviceModel parse_model(std::string_view text, const std::string& source_name) {
  Lexer lexer(text, source_name);
  return Parser(lexer.run(), source_name).run();
}

std::string render_model(const DeviceModel& m) {
  Writer w;
  if (!m.device.name.empty() || !m.device.version.empty() || !m.device.environment.empty() ||
      !m.device.description.empty()) {
    w.open("device " + quote(m.device.name));
    w.text("version", m.device.version);
    w.ids("environment", m.device.environment);
    w.text("description", m.device.description);
    w.close();
  }
  for (const auto& c : m.components) {
    w.open("component " + token(c.kind) + " " + token(c.id));
    w.text("name", c.name);
    for (const auto& [key, value] : c.properties) w.text(key.c_str(), value);
    w.close();
  }
  for (const auto& i : m.interfaces) {
    w.open("interface " + token(i.kind) + " " + token(i.id));
    w.id("component", i.component);
    if (i.authentication) w.raw("auth", "true");
    w.id("transport", i.transport);
    w.text("name", i.name);
    w.close();
  }
  for (const auto& a : m.actors) {
    w.open("actor " + token(a.role) + " " + token(a.id));
    w.text("name", a.name);
    w.ids("privileges", a.privileges);
    w.close();
  }
  for (const auto& x : m.interactions) {
    w.open("interaction " + token(x.id));
    w.id("actor", x.actor);
    w.id("via", x.via);
    w.text("purpose", x.purpose);
    w.ids("data", x.data);
    w.raw("direction", std::string(to_string(x.direction)));
    if (x.abuse) w.raw("abuse", token(*x.abuse));
    w.text("abuse_label", x.abuse_label);
    w.ids("assets", x.assets);
    w.close();
  }
  for (const auto& a : m.assets) {
    w.open("asset " + token(a.kind) + " " + token(a.id));
    w.text("name", a.name);
    if (a.stakeholder) w.raw("stakeholder", token(*a.stakeholder));
    w.raw("criticality", std::to_string(a.criticality));
    w.ids("goals", a.goals);
    w.ids("on", a.on);
    w.close();
  }
  for (const auto& v : m.vulnerabilities) {
    w.open("vulnerability " + token(v.id));
    w.text("title", v.title);
    w.text("cause", v.cause);
    w.text("description", v.description);
    w.ids("affects", v.affects);
    if (v.status != VulnerabilityStatus::open) w.raw("status", std::string(to_string(v.status)));
    if (v.threat) w.raw("threat", token(*v.threat));
    w.text("label", v.label);
    w.text("action", v.action);
    w.text("note", v.note);
    w.ids("assets", v.assets);
    if (v.cvss) w.raw("cvss", quote(*v.cvss));
    if (v.likelihood) w.raw("likelihood", std::to_string(*v.likelihood));
    w.close();
  }
  for (const auto& x : m.mitigations) {
    w.open("mitigation " + token(x.id));
    w.text("title", x.title);
    w.ids("mitigates", x.mitigates);
    if (x.enabled) w.raw("enabled", "true");
    w.close();
  }
  return w.str();
}

json to_json(const DeviceModel& m) {
  json j;
  j["device"] = {{"name", m.device.name},
                 {"version", m.device.version},
                 {"environment", m.device.environment},
                 {"description", m.device.description}};
  j["components"] = json::array();
  for (const auto& c : m.components) {
    j["components"].push_back({{"id", c.id}, {"kind", c.kind}, {"name", c.name}, {"properties", c.properties}});
  }
  j["interfaces"] = json::array();
  for (const auto& i : m.interfaces) {
    j["interfaces"].push_back({{"id", i.id},
                               {"kind", i.kind},
                               {"component", i.component},
                               {"authentication", i.authentication},
                               {"transport", i.transport},
                               {"name", i.name}});
  }
  j["actors"] = json::array();
  for (const auto& a : m.actors) {
    j["actors"].push_back({{"id", a.id}, {"role", a.role}, {"name", a.name}, {"privileges", a.privileges}});
  }
  j["interactions"] = json::array();
  for (const auto& x : m.interactions) {
    json o = {{"id", x.id},
              {"actor", x.actor},
              {"via", x.via},
              {"purpose", x.purpose},
              {"data", x.data},
              {"direction", to_string(x.direction)},
              {"abuse_label", x.abuse_label},
              {"assets", x.assets}};
    o["abuse"] = x.abuse ? json(*x.abuse) : json(nullptr);
    j["interactions"].push_back(o);
  }
  j["assets"] = json::array();
  for (const auto& a : m.assets) {
    json o = {{"id", a.id},       {"kind", a.kind},   {"name", a.name},
              {"criticality", a.criticality}, {"goals", a.goals}, {"on", a.on}};
    o["stakeholder"] = a.stakeholder ? json(*a.stakeholder) : json(nullptr);
    j["assets"].push_back(o);
  }
  j["vulnerabilities"] = json::array();
  for (const auto& v : m.vulnerabilities) {
    json o = {{"id", v.id},         {"title", v.title},   {"cause", v.cause},
              {"description", v.description}, {"affects", v.affects}, {"status", to_string(v.status)},
              {"label", v.label},   {"action", v.action}, {"note", v.note},
              {"assets", v.assets}};
    o["threat"] = v.threat ? json(*v.threat) : json(nullptr);
    o["cvss"] = v.cvss ? json(*v.cvss) : json(nullptr);
    o["likelihood"] = v.likelihood ? json(*v.likelihood) : json(nullptr);
    j["vulnerabilities"].push_back(o);
  }
  j["mitigations"] = json::array();
  for (const auto& x : m.mitigations) {
    j["mitigations"].push_back(
        {{"id", x.id}, {"title", x.title}, {"mitigates", x.mitigates}, {"enabled", x.enabled}});
  }
  return j;
}

DeviceModel model_from_json(const json& j) {
  if (!j.is_object()) json_fail("model JSON must be an object");
  static const std::set<std::string> kSections = {"device",  "components",      "interfaces", "actors",
                                                  "interactions", "assets", "vulnerabilities", "mitigations"};
  for (const auto& [key, _] : j.items()) {
    if (!kSections.count(key)) json_fail("unknown section '" + key + "'");
  }
  DeviceModel m;
  if (j.contains("device")) {
    const auto& d = j["device"];
    if (!d.is_object()) json_fail("'device' must be an object");
    m.device.name = get_str(d, "name");
    m.device.version = get_str(d, "version");
    m.device.environment = get_list(d, "environment");
    m.device.description = get_str(d, "description");
  }
  m.components = read_section<ComponentInstance>(j, "components", [](const json& o) {
    ComponentInstance c;
    c.id = get_str(o, "id", true);
    c.kind = get_str(o, "kind", true);
    c.name = get_str(o, "name");
    if (o.contains("properties")) {
      if (!o["properties"].is_object()) json_fail("'properties' must be an object");
      for (const auto& [k, v] : o["properties"].items()) {
        if (!v.is_string()) json_fail("property values must be strings");
        c.properties[k] = v.get<std::string>();
      }
    }
    return c;
  });
  m.interfaces = read_section<Interface>(j, "interfaces", [](const json& o) {
    Interface i;
    i.id = get_str(o, "id", true);
    i.kind = get_str(o, "kind", true);
    i.component = get_str(o, "component");
    i.authentication = get_bool(o, "authentication", false);
    i.transport = get_str(o, "transport");
    i.name = get_str(o, "name");
    return i;
  });
  m.actors = read_section<Actor>(j, "actors", [](const json& o) {
    Actor a;
    a.id = get_str(o, "id", true);
    a.role = get_str(o, "role", true);
    a.name = get_str(o, "name");
    a.privileges = get_list(o, "privileges");
    return a;
  });
  m.interactions = read_section<Interaction>(j, "interactions", [](const json& o) {
    Interaction x;
    x.id = get_str(o, "id", true);
    x.actor = get_str(o, "actor");
    x.via = get_str(o, "via");
    x.purpose = get_str(o, "purpose");
    x.data = get_list(o, "data");
    auto direction = get_str(o, "direction");
    if (!direction.empty()) {
      auto parsed = parse_direction(direction);
      if (!parsed) json_fail("direction must be in, out or both");
      x.direction = *parsed;
    }
    x.abuse = get_opt(o, "abuse");
    x.abuse_label = get_str(o, "abuse_label");
    x.assets = get_list(o, "assets");
    return x;
  });
  m.assets = read_section<AssetInstance>(j, "assets", [](const json& o) {
    AssetInstance a;
    a.id = get_str(o, "id", true);
    a.kind = get_str(o, "kind", true);
    a.name = get_str(o, "name");
    a.stakeholder = get_opt(o, "stakeholder");
    a.criticality = get_int(o, "criticality").value_or(1);
    a.goals = get_list(o, "goals");
    a.on = get_list(o, "on");
    return a;
  });
  m.vulnerabilities = read_section<Vulnerability>(j, "vulnerabilities", [](const json& o) {
    Vulnerability v;
    v.id = get_str(o, "id", true);
    v.title = get_str(o, "title");
    v.cause = get_str(o, "cause");
    v.description = get_str(o, "description");
    v.affects = get_list(o, "affects");
    auto status = get_str(o, "status");
    if (status == "mitigated") {
      v.status = VulnerabilityStatus::mitigated;
    } else if (!status.empty() && status != "open") {
      json_fail("status must be open or mitigated");
    }
    v.threat = get_opt(o, "threat");
    v.label = get_str(o, "label");
    v.action = get_str(o, "action");
    v.note = get_str(o, "note");
    v.assets = get_list(o, "assets");
    v.cvss = get_opt(o, "cvss");
    v.likelihood = get_int(o, "likelihood");
    return v;
  });
  m.mitigations = read_section<Mitigation>(j, "mitigations", [](const json& o) {
    Mitigation x;
    x.id = get_str(o, "id", true);
    x.title = get_str(o, "title");
    x.mitigates = get_list(o, "mitigates");
    x.enabled = get_bool(o, "enabled", false);
    return x;
  });
  return m;
}

Findings validate_model(const DeviceModel& m, const taxonomy::TaxonomyCatalog& catalog) {
  Findings out;
  auto add = [&](Severity sev, std::string code, const std::string& subject, std::string message,
                 const SourceLocation& loc) {
    out.push_back({sev, std::move(code), subject, std::move(message), loc.line});
  };
  auto error = [&](std::string code, const std::string& subject, std::string message, const SourceLocation& loc) {
    add(Severity::error, std::move(code), subject, std::move(message), loc);
  };
  auto unresolved = [&](const std::string& subject, const std::string& what, const std::string& id,
                        const SourceLocation& loc) {
    error("unresolved-reference", subject, "unknown " + what + " '" + id + "' referenced by '" + subject + "'", loc);
  };

  // Duplicates can only arise in programmatically built models.
  auto unique = [&](const auto& items, const char* section) {
    std::set<std::string> seen;
    for (const auto& x : items) {
      if (!seen.insert(x.id).second) error("duplicate-id", x.id, std::string("duplicate id '") + x.id + "' in " + section, x.location);
    }
  };
  unique(m.components, "components");
  unique(m.interfaces, "interfaces");
  unique(m.actors, "actors");
  unique(m.interactions, "interactions");
  unique(m.assets, "assets");
  unique(m.vulnerabilities, "vulnerabilities");
  unique(m.mitigations, "mitigations");

  if (m.components.empty()) error("no-components", "", "model declares no components", {});

  std::vector<std::string> kind_ids;
  for (const auto& k : catalog.component_kinds) kind_ids.push_back(k.id);
  for (const auto& c : m.components) {
    if (!catalog.find_component_kind(c.kind)) {
      auto near = text::nearest(c.kind, kind_ids);
      error("unknown-component-kind", c.id,
            "unknown component kind '" + c.kind + "'" + (near.empty() ? "" : "; did you mean '" + near[0] + "'?"),
            c.location);
    }
  }
  for (const auto& i : m.interfaces) {
    if (std::find(kInterfaceKinds.begin(), kInterfaceKinds.end(), i.kind) == kInterfaceKinds.end()) {
      error("unknown-interface-kind", i.id, "unknown interface kind '" + i.kind + "'", i.location);
    }
    if (i.component.empty()) {
      error("interface-without-component", i.id, "interface '" + i.id + "' names no component", i.location);
    } else if (!m.find_component(i.component)) {
      unresolved(i.id, "component", i.component, i.location);
    }
  }
  for (const auto& a : m.actors) {
    if (std::find(kActorRoles.begin(), kActorRoles.end(), a.role) == kActorRoles.end()) {
      error("unknown-actor-role", a.id, "unknown actor role '" + a.role + "'", a.location);
    }
  }
  auto check_threat = [&](const std::string& subject, const std::string& ref, const SourceLocation& loc) {
    if (!catalog.resolve_threat(ref)) {
      error("unknown-threat", subject, "unknown threat category '" + ref + "'", loc);
    }
  };
  auto check_assets = [&](const std::string& subject, const std::vector<std::string>& ids, const SourceLocation& loc) {
    for (const auto& id : ids) {
      if (!m.find_asset(id)) unresolved(subject, "asset", id, loc);
    }
  };
  for (const auto& x : m.interactions) {
    if (x.actor.empty() || !m.find_actor(x.actor)) unresolved(x.id, "actor", x.actor, x.location);
    if (x.via.empty() || !m.find_interface(x.via)) unresolved(x.id, "interface", x.via, x.location);
    if (x.abuse) check_threat(x.id, *x.abuse, x.location);
    check_assets(x.id, x.assets, x.location);
  }
  for (const auto& a : m.assets) {
    const auto* kind = catalog.find_asset_kind(a.kind);
    if (!kind) {
      error("unknown-asset-kind", a.id, "unknown asset kind '" + a.kind + "'", a.location);
    } else if (a.stakeholder && *a.stakeholder != taxonomy::to_string(kind->stakeholder)) {
      error("stakeholder-mismatch", a.id,
            "asset kind '" + a.kind + "' belongs to stakeholder '" + std::string(taxonomy::to_string(kind->stakeholder)) +
                "', not '" + *a.stakeholder + "'",
            a.location);
    }
    if (a.stakeholder && !taxonomy::parse_stakeholder(*a.stakeholder)) {
      error("unknown-stakeholder", a.id, "unknown stakeholder '" + *a.stakeholder + "'", a.location);
    }
    if (a.criticality < 1 || a.criticality > 5) {
      error("criticality-range", a.id, "criticality out of range 1–5 (got " + std::to_string(a.criticality) + ")",
            a.location);
    }
    if (a.goals.empty()) {
      add(Severity::warning, "asset-without-goals", a.id, "asset '" + a.id + "' declares no security goals",
          a.location);
    }
    for (const auto& g : a.goals) {
      if (!taxonomy::parse_security_goal(g)) error("unknown-security-goal", a.id, "unknown security goal '" + g + "'", a.location);
    }
    for (const auto& c : a.on) {
      if (!m.find_component(c)) unresolved(a.id, "component", c, a.location);
    }
  }
  for (const auto& v : m.vulnerabilities) {
    if (v.affects.empty()) {
      error("vulnerability-without-target", v.id, "vulnerability '" + v.id + "' affects nothing", v.location);
    }
    for (const auto& target : v.affects) {
      if (!m.find_interface(target) && !m.find_component(target)) {
        unresolved(v.id, "interface or component", target, v.location);
      }
    }
    if (v.threat) {
      check_threat(v.id, *v.threat, v.location);
    } else {
      add(Severity::warning, "vulnerability-without-threat", v.id,
          "vulnerability '" + v.id + "' names no threat; elevation of privilege is assumed", v.location);
    }
    if (v.cvss) {
      try {
        scoring::parse_cvss_vector(*v.cvss);
      } catch (const ParseError& e) {
        error("invalid-cvss", v.id, "invalid CVSS vector: " + e.message(), v.location);
      }
    }
    if (v.likelihood && (*v.likelihood < 1 || *v.likelihood > 5)) {
      error("likelihood-range", v.id, "likelihood out of range 1–5 (got " + std::to_string(*v.likelihood) + ")",
            v.location);
    }
    check_assets(v.id, v.assets, v.location);
  }
  for (const auto& x : m.mitigations) {
    for (const auto& id : x.mitigates) {
      if (!m.find_vulnerability(id)) unresolved(x.id, "vulnerability", id, x.location);
    }
  }
  return out;
}

ElementKind element_kind_of(const ComponentInstance& component, const taxonomy::TaxonomyCatalog& catalog) {
  const auto* kind = catalog.find_component_kind(component.kind);
  return kind && kind->category == taxonomy::ComponentCategory::data ? ElementKind::data_store : ElementKind::process;
}

std::vector<DataFlow> derive_data_flows(const DeviceModel& m, const taxonomy::TaxonomyCatalog& catalog) {
  std::vector<DataFlow> out;
  for (const auto& x : m.interactions) {
    const auto* actor = m.find_actor(x.actor);
    const auto* iface = m.find_interface(x.via);
    const auto* component = iface ? m.find_component(iface->component) : nullptr;
    if (!actor || !component) continue;
    const Endpoint outside{actor->id, ElementKind::external_entity};
    const Endpoint inside{component->id, element_kind_of(*component, catalog)};
    std::vector<Direction> directions;
    if (x.direction != Direction::out) directions.push_back(Direction::in);
    if (x.direction != Direction::in) directions.push_back(Direction::out);
    for (const auto& item : x.data) {
      for (auto d : directions) {
        DataFlow f;
        f.source = d == Direction::in ? outside : inside;
        f.sink = d == Direction::in ? inside : outside;
        f.via = iface->id;
        f.item = item;
        f.direction = d;
        f.interaction = x.id;
        const std::string key = f.source.id + '\x1f' + f.sink.id + '\x1f' + f.via + '\x1f' + item + '\x1f' +
                                std::string(to_string(d));
        f.id = "df-" + text::hex64(text::fnv1a(key));
        out.push_back(std::move(f));
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const DataFlow& a, const DataFlow& b) {
    return a.id != b.id ? a.id < b.id : a.interaction < b.interaction;
  });
  // Identical endpoints, interface, item and direction are one flow.
  out.erase(std::unique(out.begin(), out.end(), [](const DataFlow& a, const DataFlow& b) { return a.id == b.id; }),
            out.end());
  return out;
}

nlohmann::json to_json(const DataFlow& f) {
  return {{"id", f.id},
          {"source", {{"id", f.source.id}, {"kind", to_string(f.source.kind)}}},
          {"sink", {{"id", f.sink.id}, {"kind", to_string(f.sink.kind)}}},
          {"via", f.via},
          {"item", f.item},
          {"direction", to_string(f.direction)},
          {"interaction", f.interaction}};
}

}  // namespace threatsmith::model
