// Copyright 2026 The Threatsmith Authors
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

#include "threatsmith/taxonomy.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "embedded_data.hpp"
#include "threatsmith/error.hpp"
#include "threatsmith/strings.hpp"
#include "yaml_support.hpp"

namespace threatsmith::taxonomy {

namespace {

template <typename E, std::size_t N>
std::optional<E> parse_enum(std::string_view s, const std::array<std::string_view, N>& names) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == s) return static_cast<E>(i);
  }
  return std::nullopt;
}

constexpr std::array<std::string_view, 3> kCategoryNames = {"hardware", "software", "data"};
constexpr std::array<std::string_view, 4> kStakeholderNames = {"manufacturer", "owner", "user", "common"};
constexpr std::array<std::string_view, 8> kGoalNames = {
    "authenticity", "integrity",    "non_repudiation", "confidentiality",
    "availability", "authorization", "safety",         "privacy"};
constexpr std::array<std::string_view, 6> kCapabilityNames = {
    "remote_network",      "local_network",      "physical_access",
    "supply_chain_access", "insider_privileges", "chip_lab"};
constexpr std::array<std::string_view, 3> kResourcingNames = {"low", "medium", "high"};
constexpr std::array<std::string_view, 8> kEntryKindNames = {
    "component kind", "asset kind",      "threat group",    "threat category",
    "attack category", "attack technique", "lifecycle stage", "threat-source profile"};

constexpr std::string_view kStrideLetters = "STRIDE";

// --- document parsing -----------------------------------------------------

void parse_components(const yaml::Document& doc, const YAML::Node& seq, TaxonomyCatalog& out) {
  for (const auto& n : seq) {
    ComponentKindEntry e;
    e.id = doc.str(n, "id");
    auto category = doc.str(n, "category");
    auto parsed = parse_component_category(category);
    if (!parsed) doc.fail(n["category"], "unknown component category '" + category + "'");
    e.category = *parsed;
    e.name = doc.str(n, "name");
    e.description = doc.opt_str(n, "description").value_or("");
    e.default_interfaces = doc.str_list(n, "default_interfaces");
    out.component_kinds.push_back(std::move(e));
  }
}

void parse_assets(const yaml::Document& doc, const YAML::Node& seq, TaxonomyCatalog& out) {
  for (const auto& n : seq) {
    AssetKindEntry e;
    e.id = doc.str(n, "id");
    auto stakeholder = doc.str(n, "stakeholder");
    auto parsed = parse_stakeholder(stakeholder);
    if (!parsed) doc.fail(n["stakeholder"], "unknown stakeholder '" + stakeholder + "'");
    e.stakeholder = *parsed;
    e.name = doc.str(n, "name");
    e.description = doc.opt_str(n, "description").value_or("");
    out.asset_kinds.push_back(std::move(e));
  }
}

ThreatCategoryEntry parse_threat_category(const yaml::Document& doc, const YAML::Node& n) {
  ThreatCategoryEntry e;
  e.id = doc.str(n, "id");
  e.name = doc.str(n, "name");
  e.description = doc.opt_str(n, "description").value_or("");
  for (const auto& goal : doc.str_list(n, "goals")) {
    auto parsed = parse_security_goal(goal);
    if (!parsed) doc.fail(n["goals"], "unknown security goal '" + goal + "'");
    e.goals.push_back(*parsed);
  }
  e.curated = doc.boolean(n, "curated", false);
  e.aliases = doc.str_list(n, "aliases");
  return e;
}

void parse_threats(const yaml::Document& doc, const YAML::Node& seq, TaxonomyCatalog& out) {
  for (const auto& n : seq) {
    ThreatGroup g;
    g.id = doc.str(n, "id");
    g.name = doc.opt_str(n, "name").value_or("");
    for (const auto& c : doc.seq(n, "categories")) g.categories.push_back(parse_threat_category(doc, c));
    out.threat_groups.push_back(std::move(g));
  }
}

void parse_attacks(const yaml::Document& doc, const YAML::Node& seq, TaxonomyCatalog& out) {
  for (const auto& n : seq) {
    AttackCategoryEntry e;
    e.id = doc.str(n, "id");
    e.name = doc.str(n, "name");
    e.parent = doc.opt_str(n, "parent");
    e.stages = doc.str_list(n, "stages");
    for (const auto& t : doc.seq(n, "techniques")) {
      e.techniques.push_back({doc.str(t, "id"), doc.str(t, "name")});
    }
    out.attack_categories.push_back(std::move(e));
  }
}

void parse_profiles(const yaml::Document& doc, const YAML::Node& seq, TaxonomyCatalog& out) {
  for (const auto& n : seq) {
    ThreatSourceProfile p;
    p.id = doc.str(n, "id");
    p.name = doc.str(n, "name");
    for (const auto& cap : doc.str_list(n, "capabilities")) {
      auto parsed = parse_capability(cap);
      if (!parsed) doc.fail(n["capabilities"], "unknown capability '" + cap + "'");
      p.capabilities.insert(*parsed);
    }
    p.intent = doc.opt_str(n, "intent").value_or("");
    auto resourcing = doc.opt_str(n, "resourcing").value_or("medium");
    auto parsed = parse_resourcing(resourcing);
    if (!parsed) doc.fail(n["resourcing"], "unknown resourcing '" + resourcing + "'");
    p.resourcing = *parsed;
    out.source_profiles.push_back(std::move(p));
  }
}

void parse_stages(const yaml::Document& doc, const YAML::Node& seq, TaxonomyCatalog& out) {
  for (const auto& n : seq) out.lifecycle_stages.push_back({doc.str(n, "id"), doc.str(n, "name")});
}

void parse_stride(const yaml::Document& doc, const YAML::Node& map, TaxonomyCatalog& out) {
  if (!map.IsMap()) doc.fail(map, "'stride' must map letters to threat categories");
  for (const auto& kv : map) {
    auto letter = kv.first.as<std::string>();
    if (letter.size() != 1 || kStrideLetters.find(letter[0]) == std::string_view::npos) {
      doc.fail(kv.first, "unknown STRIDE letter '" + letter + "'");
    }
    out.stride[letter[0]] = kv.second.as<std::string>();
  }
}

void parse_risk_matrix(const yaml::Document& doc, const YAML::Node& map, TaxonomyCatalog& out) {
  if (!map.IsMap()) doc.fail(map, "'risk_matrix' must be a mapping");
  out.risk_bands.critical = doc.integer(map, "critical", out.risk_bands.critical);
  out.risk_bands.high = doc.integer(map, "high", out.risk_bands.high);
  out.risk_bands.medium = doc.integer(map, "medium", out.risk_bands.medium);
}

/// Reads every section present in `doc` into `out`, appending to lists.
void parse_sections(const yaml::Document& doc, TaxonomyCatalog& out) {
  const auto& root = doc.root();
  if (root.IsNull()) return;
  if (!root.IsMap()) doc.fail(root, "catalog document must be a mapping");
  static const std::set<std::string> kKnown = {
      "version",     "parts",           "lifecycle_stages", "stride",           "risk_matrix",
      "component_kinds", "asset_kinds", "threat_groups",    "attack_categories", "source_profiles",
      "overlays"};
  for (const auto& kv : root) {
    auto key = kv.first.as<std::string>();
    if (!kKnown.count(key)) doc.fail(kv.first, "unknown catalog section '" + key + "'");
  }
  if (auto v = doc.opt_str(root, "version")) out.version = *v;
  if (auto n = doc.seq(root, "lifecycle_stages")) parse_stages(doc, n, out);
  if (auto n = root["stride"]) parse_stride(doc, n, out);
  if (auto n = root["risk_matrix"]) parse_risk_matrix(doc, n, out);
  if (auto n = doc.seq(root, "component_kinds")) parse_components(doc, n, out);
  if (auto n = doc.seq(root, "asset_kinds")) parse_assets(doc, n, out);
  if (auto n = doc.seq(root, "threat_groups")) parse_threats(doc, n, out);
  if (auto n = doc.seq(root, "attack_categories")) parse_attacks(doc, n, out);
  if (auto n = doc.seq(root, "source_profiles")) parse_profiles(doc, n, out);
  for (const auto& name : doc.str_list(root, "overlays")) out.overlays.push_back(name);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open catalog file", 0, 0, path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <typename T>
bool contains_id(const std::vector<T>& items, const std::string& id) {
  return std::any_of(items.begin(), items.end(), [&](const T& x) { return x.id == id; });
}

template <typename T>
void append_new(std::vector<T>& into, const std::vector<T>& from, const char* kind) {
  for (const auto& item : from) {
    if (contains_id(into, item.id)) {
      throw ConfigError(std::string("overlay redefines ") + kind + " '" + item.id + "'");
    }
    into.push_back(item);
  }
}

}  // namespace

// --- enum names -------------------------------------------------------------

std::string_view to_string(ComponentCategory v) { return kCategoryNames[static_cast<std::size_t>(v)]; }
std::string_view to_string(Stakeholder v) { return kStakeholderNames[static_cast<std::size_t>(v)]; }
std::string_view to_string(SecurityGoal v) { return kGoalNames[static_cast<std::size_t>(v)]; }
std::string_view to_string(Capability v) { return kCapabilityNames[static_cast<std::size_t>(v)]; }
std::string_view to_string(Resourcing v) { return kResourcingNames[static_cast<std::size_t>(v)]; }
std::string_view to_string(EntryKind v) { return kEntryKindNames[static_cast<std::size_t>(v)]; }

std::optional<ComponentCategory> parse_component_category(std::string_view s) {
  return parse_enum<ComponentCategory>(s, kCategoryNames);
}
std::optional<Stakeholder> parse_stakeholder(std::string_view s) {
  return parse_enum<Stakeholder>(s, kStakeholderNames);
}
std::optional<SecurityGoal> parse_security_goal(std::string_view s) {
  return parse_enum<SecurityGoal>(s, kGoalNames);
}
std::optional<Capability> parse_capability(std::string_view s) {
  return parse_enum<Capability>(s, kCapabilityNames);
}
std::optional<Resourcing> parse_resourcing(std::string_view s) {
  return parse_enum<Resourcing>(s, kResourcingNames);
}

const std::vector<Capability>& all_capabilities() {
  static const std::vector<Capability> kAll = {
      Capability::remote_network,      Capability::local_network,      Capability::physical_access,
      Capability::supply_chain_access, Capability::insider_privileges, Capability::chip_lab};
  return kAll;
}

std::optional<std::size_t> stage_order(std::string_view stage) {
  for (std::size_t i = 0; i < kLifecycleStages.size(); ++i) {
    if (kLifecycleStages[i] == stage) return i;
  }
  return std::nullopt;
}

// --- catalog queries ------------------------------------------------------

const ComponentKindEntry* TaxonomyCatalog::find_component_kind(std::string_view id) const {
  for (const auto& e : component_kinds) if (e.id == id) return &e;
  return nullptr;
}

const AssetKindEntry* TaxonomyCatalog::find_asset_kind(std::string_view id) const {
  for (const auto& e : asset_kinds) if (e.id == id) return &e;
  return nullptr;
}

const ThreatGroup* TaxonomyCatalog::find_group(std::string_view id) const {
  for (const auto& g : threat_groups) if (g.id == id) return &g;
  return nullptr;
}

const ThreatCategoryEntry* TaxonomyCatalog::find_threat(std::string_view id) const {
  for (const auto& g : threat_groups) {
    for (const auto& c : g.categories) if (c.id == id) return &c;
  }
  return nullptr;
}

const ThreatCategoryEntry* TaxonomyCatalog::resolve_threat(std::string_view id_or_alias) const {
  if (const auto* direct = find_threat(id_or_alias)) return direct;
  const auto wanted = text::to_lower(text::trim(id_or_alias));
  for (const auto& g : threat_groups) {
    for (const auto& c : g.categories) {
      for (const auto& alias : c.aliases) {
        if (text::to_lower(alias) == wanted) return &c;
      }
    }
  }
  return nullptr;
}

const AttackCategoryEntry* TaxonomyCatalog::find_attack_category(std::string_view id) const {
  for (const auto& e : attack_categories) if (e.id == id) return &e;
  return nullptr;
}

const Technique* TaxonomyCatalog::find_technique(std::string_view ref) const {
  auto colon = ref.find(':');
  if (colon == std::string_view::npos) return nullptr;
  const auto* category = find_attack_category(ref.substr(0, colon));
  if (!category) return nullptr;
  auto local = ref.substr(colon + 1);
  for (const auto& t : category->techniques) if (t.id == local) return &t;
  return nullptr;
}

const ThreatSourceProfile* TaxonomyCatalog::find_profile(std::string_view id) const {
  for (const auto& p : source_profiles) if (p.id == id) return &p;
  return nullptr;
}

std::size_t TaxonomyCatalog::threat_category_count() const {
  std::size_t n = 0;
  for (const auto& g : threat_groups) n += g.categories.size();
  return n;
}

// --- loading --------------------------------------------------------------

TaxonomyCatalog parse_catalog_document(const std::string& text, const std::string& name) {
  yaml::Document doc(text, name);
  TaxonomyCatalog out;
  parse_sections(doc, out);
  return out;
}

TaxonomyCatalog load_catalog(const std::vector<CatalogSource>& sources) {
  if (sources.empty()) throw ParseError("no catalog manifest", 0, 0);
  yaml::Document manifest(sources.front().text, sources.front().name);
  TaxonomyCatalog out;
  parse_sections(manifest, out);
  for (const auto& part : manifest.str_list(manifest.root(), "parts")) {
    auto it = std::find_if(sources.begin() + 1, sources.end(),
                           [&](const CatalogSource& s) { return s.name == part; });
    if (it == sources.end()) throw ParseError("missing catalog part", 0, 0, part);
    parse_sections(yaml::Document(it->text, it->name), out);
  }
  return out;
}

TaxonomyCatalog load_catalog_directory(const std::string& directory) {
  namespace fs = std::filesystem;
  const fs::path dir(directory);
  std::vector<CatalogSource> sources;
  sources.push_back({"catalog.yaml", read_file(dir / "catalog.yaml")});
  yaml::Document manifest(sources.front().text, (dir / "catalog.yaml").string());
  for (const auto& part : manifest.str_list(manifest.root(), "parts")) {
    sources.push_back({part, read_file(dir / part)});
  }
  return load_catalog(sources);
}

const TaxonomyCatalog& load_default_catalog() {
  static const TaxonomyCatalog kCatalog = [] {
    std::vector<CatalogSource> sources;
    for (const auto& f : embedded::catalog_files()) sources.push_back({f.name, f.text});
    return load_catalog(sources);
  }();
  return kCatalog;
}

TaxonomyCatalog apply_overlay(const TaxonomyCatalog& base, const CatalogSource& overlay) {
  yaml::Document doc(overlay.text, overlay.name);
  if (doc.root()["lifecycle_stages"]) {
    doc.fail(doc.root()["lifecycle_stages"], "overlays cannot change lifecycle stages");
  }
  TaxonomyCatalog extra;
  parse_sections(doc, extra);

  TaxonomyCatalog out = base;
  append_new(out.component_kinds, extra.component_kinds, "component kind");
  append_new(out.asset_kinds, extra.asset_kinds, "asset kind");
  append_new(out.attack_categories, extra.attack_categories, "attack category");
  append_new(out.source_profiles, extra.source_profiles, "threat-source profile");
  for (const auto& group : extra.threat_groups) {
    auto it = std::find_if(out.threat_groups.begin(), out.threat_groups.end(),
                           [&](const ThreatGroup& g) { return g.id == group.id; });
    for (const auto& c : group.categories) {
      if (out.find_threat(c.id)) throw ConfigError("overlay redefines threat category '" + c.id + "'");
    }
    if (it == out.threat_groups.end()) {
      out.threat_groups.push_back(group);
    } else {
      if (!group.name.empty() && group.name != it->name) {
        throw ConfigError("overlay renames threat group '" + group.id + "'");
      }
      it->categories.insert(it->categories.end(), group.categories.begin(), group.categories.end());
    }
  }
  for (const auto& [letter, target] : extra.stride) out.stride[letter] = target;
  if (doc.root()["risk_matrix"]) out.risk_bands = extra.risk_bands;
  out.overlays.push_back(overlay.name);
  return out;
}

// --- canonical JSON -------------------------------------------------------

nlohmann::json to_json(const TaxonomyCatalog& c) {
  using nlohmann::json;
  json j;
  j["version"] = c.version;
  j["lifecycle_stages"] = json::array();
  for (const auto& s : c.lifecycle_stages) j["lifecycle_stages"].push_back({{"id", s.id}, {"name", s.name}});
  j["stride"] = json::object();
  for (const auto& [letter, target] : c.stride) j["stride"][std::string(1, letter)] = target;
  j["risk_matrix"] = {{"critical", c.risk_bands.critical},
                      {"high", c.risk_bands.high},
                      {"medium", c.risk_bands.medium}};
  j["component_kinds"] = json::array();
  for (const auto& e : c.component_kinds) {
    j["component_kinds"].push_back({{"id", e.id},
                                    {"category", to_string(e.category)},
                                    {"name", e.name},
                                    {"description", e.description},
                                    {"default_interfaces", e.default_interfaces}});
  }
  j["asset_kinds"] = json::array();
  for (const auto& e : c.asset_kinds) {
    j["asset_kinds"].push_back({{"id", e.id},
                                {"stakeholder", to_string(e.stakeholder)},
                                {"name", e.name},
                                {"description", e.description}});
  }
  j["threat_groups"] = json::array();
  for (const auto& g : c.threat_groups) {
    json cats = json::array();
    for (const auto& e : g.categories) {
      json goals = json::array();
      for (auto goal : e.goals) goals.push_back(to_string(goal));
      cats.push_back({{"id", e.id},
                      {"name", e.name},
                      {"description", e.description},
                      {"goals", goals},
                      {"curated", e.curated},
                      {"aliases", e.aliases}});
    }
    j["threat_groups"].push_back({{"id", g.id}, {"name", g.name}, {"categories", cats}});
  }
  j["attack_categories"] = json::array();
  for (const auto& e : c.attack_categories) {
    json techniques = json::array();
    for (const auto& t : e.techniques) techniques.push_back({{"id", t.id}, {"name", t.name}});
    json entry = {{"id", e.id}, {"name", e.name}, {"stages", e.stages}, {"techniques", techniques}};
    if (e.parent) entry["parent"] = *e.parent;
    j["attack_categories"].push_back(entry);
  }
  j["source_profiles"] = json::array();
  for (const auto& p : c.source_profiles) {
    json caps = json::array();
    for (auto cap : p.capabilities) caps.push_back(to_string(cap));
    j["source_profiles"].push_back({{"id", p.id},
                                    {"name", p.name},
                                    {"capabilities", caps},
                                    {"intent", p.intent},
                                    {"resourcing", to_string(p.resourcing)}});
  }
  if (!c.overlays.empty()) j["overlays"] = c.overlays;
  return j;
}

TaxonomyCatalog catalog_from_json(const nlohmann::json& j) {
  return parse_catalog_document(j.dump(), "<json>");
}

// --- validation -----------------------------------------------------------

Findings validate_catalog(const TaxonomyCatalog& c) {
  Findings out;
  auto error = [&](std::string code, std::string subject, std::string message) {
    out.push_back({Severity::error, std::move(code), std::move(subject), std::move(message), 0});
  };
  static const std::regex kIdPattern("[a-z0-9_]+(\\.[a-z0-9_]+)*");
  static const std::regex kLocalPattern("[a-z0-9_]+");

  // Ids must be unique per kind; counts below are taken over distinct ids so
  // a duplicate is reported once, not again as a miscount.
  auto check_ids = [&](const std::vector<std::string>& ids, const char* kind, const std::regex& pattern) {
    std::set<std::string> seen;
    for (const auto& id : ids) {
      if (!std::regex_match(id, pattern)) {
        error("malformed-id", id, std::string(kind) + " id '" + id + "' is not lowercase dot-separated");
      }
      if (!seen.insert(id).second) error("duplicate-id", id, "duplicate id '" + id + "'");
    }
    return seen;
  };

  std::vector<std::string> ids;
  for (const auto& e : c.component_kinds) ids.push_back(e.id);
  auto component_ids = check_ids(ids, "component kind", kIdPattern);
  ids.clear();
  for (const auto& e : c.asset_kinds) ids.push_back(e.id);
  check_ids(ids, "asset kind", kIdPattern);
  ids.clear();
  for (const auto& g : c.threat_groups) ids.push_back(g.id);
  auto group_ids = check_ids(ids, "threat group", kIdPattern);
  ids.clear();
  for (const auto& g : c.threat_groups) {
    for (const auto& e : g.categories) ids.push_back(e.id);
  }
  auto category_ids = check_ids(ids, "threat category", kIdPattern);
  ids.clear();
  for (const auto& e : c.attack_categories) ids.push_back(e.id);
  auto attack_ids = check_ids(ids, "attack category", kIdPattern);
  ids.clear();
  for (const auto& e : c.attack_categories) {
    for (const auto& t : e.techniques) {
      if (!std::regex_match(t.id, kLocalPattern)) {
        error("malformed-id", e.technique_ref(t), "technique id '" + t.id + "' is not lowercase");
      }
      ids.push_back(e.technique_ref(t));
    }
  }
  check_ids(ids, "technique", std::regex("[a-z0-9_.]+:[a-z0-9_]+"));
  ids.clear();
  for (const auto& p : c.source_profiles) ids.push_back(p.id);
  check_ids(ids, "threat-source profile", kIdPattern);

  // Life-cycle stages: fixed count and order.
  if (c.lifecycle_stages.size() != kLifecycleStages.size()) {
    error("lifecycle-stage-count", "lifecycle_stages",
          "lifecycle stage count ≠ 7 (found " + std::to_string(c.lifecycle_stages.size()) + ")");
  } else {
    for (std::size_t i = 0; i < kLifecycleStages.size(); ++i) {
      if (c.lifecycle_stages[i].id != kLifecycleStages[i]) {
        error("lifecycle-stage-order", c.lifecycle_stages[i].id,
              "lifecycle stage " + std::to_string(i + 1) + " must be '" +
                  std::string(kLifecycleStages[i]) + "'");
      }
    }
  }

  for (auto core : kCoreComponentKinds) {
    if (!component_ids.count(std::string(core))) {
      error("missing-component-kind", std::string(core), "core component kind '" + std::string(core) + "' missing");
    }
  }

  for (const auto& g : c.threat_groups) {
    for (const auto& e : g.categories) {
      if (e.id.rfind(g.id + ".", 0) != 0) {
        error("category-group-mismatch", e.id, "category '" + e.id + "' is not prefixed by group '" + g.id + "'");
      }
    }
  }
  if (const auto* privacy = c.find_group("privacy")) {
    std::set<std::string> have;
    for (const auto& e : privacy->categories) have.insert(e.id);
    std::set<std::string> want(kPrivacyCategories.begin(), kPrivacyCategories.end());
    if (have != want) error("privacy-categories", "privacy", "privacy group must hold exactly the seven privacy threats");
  } else {
    error("privacy-categories", "privacy", "privacy threat group missing");
  }

  for (const auto& [letter, target] : c.stride) {
    if (!c.find_threat(target)) {
      error("unknown-reference", std::string(1, letter), "STRIDE " + std::string(1, letter) +
                                                             " maps to unknown threat category '" + target + "'");
    }
  }
  for (char letter : kStrideLetters) {
    if (!c.stride.count(letter)) error("stride-mapping", std::string(1, letter), "no mapping for STRIDE letter");
  }

  // Attack categories: fixed top level, hardware split three ways.
  std::set<std::string> top_level;
  std::size_t hardware_children = 0;
  for (const auto& e : c.attack_categories) {
    if (!e.parent) {
      top_level.insert(e.id);
    } else {
      if (!c.find_attack_category(*e.parent)) {
        error("unknown-reference", e.id, "parent '" + *e.parent + "' of '" + e.id + "' does not exist");
      }
      if (*e.parent == "hardware") ++hardware_children;
    }
    for (const auto& stage : e.stages) {
      if (!stage_order(stage)) error("unknown-stage", e.id, "attack category '" + e.id + "' names unknown stage '" + stage + "'");
    }
  }
  std::set<std::string> want_top(kTopLevelAttackCategories.begin(), kTopLevelAttackCategories.end());
  if (top_level != want_top) {
    error("attack-top-level", "attack_categories", "top-level attack categories must be exactly the eight defaults");
  }
  if (hardware_children != 3) {
    error("hardware-children", "hardware",
          "hardware must have exactly 3 sub-categories (found " + std::to_string(hardware_children) + ")");
  }

  for (const auto& p : c.source_profiles) {
    if (p.capabilities.empty()) error("empty-capabilities", p.id, "profile '" + p.id + "' has no capabilities");
  }

  if (c.risk_bands.critical <= c.risk_bands.high || c.risk_bands.high <= c.risk_bands.medium) {
    error("risk-bands", "risk_matrix", "risk thresholds must satisfy critical > high > medium");
  }

  // The frozen counts only bind the catalog as shipped; overlays may add.
  if (c.overlays.empty()) {
    if (group_ids.size() != 10) {
      error("threat-group-count", "threat_groups", "expected 10 threat groups, found " + std::to_string(group_ids.size()));
    }
    if (category_ids.size() != 48) {
      error("threat-category-count", "threat_groups",
            "expected 48 threat categories, found " + std::to_string(category_ids.size()));
    }
  }
  (void)attack_ids;
  return out;
}

// --- lookup ---------------------------------------------------------------

std::vector<std::pair<EntryKind, std::string>> all_entry_ids(const TaxonomyCatalog& c) {
  std::vector<std::pair<EntryKind, std::string>> out;
  for (const auto& e : c.component_kinds) out.emplace_back(EntryKind::component_kind, e.id);
  for (const auto& e : c.asset_kinds) out.emplace_back(EntryKind::asset_kind, e.id);
  for (const auto& g : c.threat_groups) out.emplace_back(EntryKind::threat_group, g.id);
  for (const auto& g : c.threat_groups) {
    for (const auto& e : g.categories) out.emplace_back(EntryKind::threat_category, e.id);
  }
  for (const auto& e : c.attack_categories) out.emplace_back(EntryKind::attack_category, e.id);
  for (const auto& e : c.attack_categories) {
    for (const auto& t : e.techniques) out.emplace_back(EntryKind::technique, e.technique_ref(t));
  }
  for (const auto& s : c.lifecycle_stages) out.emplace_back(EntryKind::lifecycle_stage, s.id);
  for (const auto& p : c.source_profiles) out.emplace_back(EntryKind::source_profile, p.id);
  return out;
}

CatalogEntry lookup_entry(const TaxonomyCatalog& c, std::string_view id, std::optional<EntryKind> kind) {
  auto wants = [&](EntryKind k) { return !kind || *kind == k; };
  const std::string key(id);
  if (wants(EntryKind::component_kind)) {
    if (const auto* e = c.find_component_kind(id)) return {EntryKind::component_kind, e->id, e->name, "", e};
  }
  if (wants(EntryKind::asset_kind)) {
    if (const auto* e = c.find_asset_kind(id)) return {EntryKind::asset_kind, e->id, e->name, "", e};
  }
  if (wants(EntryKind::threat_group)) {
    if (const auto* g = c.find_group(id)) return {EntryKind::threat_group, g->id, g->name, "", g};
  }
  if (wants(EntryKind::threat_category)) {
    for (const auto& g : c.threat_groups) {
      for (const auto& e : g.categories) {
        if (e.id == id) return {EntryKind::threat_category, e.id, e.name, g.id, &e};
      }
    }
  }
  if (wants(EntryKind::attack_category)) {
    if (const auto* e = c.find_attack_category(id)) {
      return {EntryKind::attack_category, e->id, e->name, e->parent.value_or(""), e};
    }
  }
  if (wants(EntryKind::technique)) {
    if (const auto* t = c.find_technique(id)) {
      const auto* category = c.find_attack_category(id.substr(0, id.find(':')));
      return {EntryKind::technique, key, t->name, category->id, TechniqueEntry{category, t}};
    }
  }
  if (wants(EntryKind::lifecycle_stage)) {
    for (const auto& s : c.lifecycle_stages) {
      if (s.id == id) return {EntryKind::lifecycle_stage, s.id, s.name, "", &s};
    }
  }
  if (wants(EntryKind::source_profile)) {
    if (const auto* p = c.find_profile(id)) return {EntryKind::source_profile, p->id, p->name, "", p};
  }
  std::vector<std::string> candidates;
  for (const auto& [k, candidate] : all_entry_ids(c)) {
    if (wants(k)) candidates.push_back(candidate);
  }
  throw NotFoundError(kind ? std::string(to_string(*kind)) : "catalog id", key, text::nearest(id, candidates));
}

std::vector<const ThreatCategoryEntry*> entries_in_group(const TaxonomyCatalog& c, std::string_view group_id) {
  const auto* g = c.find_group(group_id);
  if (!g) {
    std::vector<std::string> groups;
    for (const auto& x : c.threat_groups) groups.push_back(x.id);
    throw NotFoundError("threat group", std::string(group_id), text::nearest(group_id, groups));
  }
  std::vector<const ThreatCategoryEntry*> out;
  for (const auto& e : g->categories) out.push_back(&e);
  return out;
}

}  // namespace threatsmith::taxonomy
