// Copyright 2026 The Threatsmith Authors
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

#include "threatsmith/enumeration.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <tuple>

#include "embedded_data.hpp"
#include "threatsmith/error.hpp"
#include "threatsmith/strings.hpp"
#include "yaml_support.hpp"

namespace threatsmith::enumeration {

using model::DeviceModel;
using model::ElementKind;
using taxonomy::Capability;
using taxonomy::CapabilitySet;
using taxonomy::TaxonomyCatalog;
using taxonomy::ThreatCategoryEntry;

namespace {

constexpr std::array<std::string_view, 4> kStatusNames = {"candidate", "confirmed", "rejected", "mitigated"};
constexpr std::array<std::string_view, 3> kSourceNames = {"vulnerability", "stride", "attack_surface"};

Capability capability_or_fail(const yaml::Document& doc, const YAML::Node& at, const std::string& name) {
  auto parsed = taxonomy::parse_capability(name);
  if (!parsed) doc.fail(at, "unknown capability '" + name + "'");
  return *parsed;
}

void reject_unknown_keys(const yaml::Document& doc, const YAML::Node& map,
                         std::initializer_list<std::string_view> known, const char* where) {
  for (const auto& kv : map) {
    auto key = kv.first.as<std::string>();
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      doc.fail(kv.first, "unknown key '" + key + "' in " + where);
    }
  }
}

Rule parse_rule(const yaml::Document& doc, const YAML::Node& n) {
  if (!n.IsMap()) doc.fail(n, "a rule must be a mapping");
  reject_unknown_keys(doc, n,
                      {"id", "source", "components", "interface", "stages", "yields", "threats", "capability",
                       "rationale"},
                      "rule");
  Rule r;
  r.id = doc.str(n, "id");
  r.source = doc.opt_str(n, "source").value_or("");
  r.components = doc.str_list(n, "components", true);
  r.interface = doc.opt_str(n, "interface");
  r.stages = doc.str_list(n, "stages", true);
  r.yields = doc.str_list(n, "yields", true);
  r.threats = doc.str_list(n, "threats");
  r.capability = capability_or_fail(doc, n["capability"], doc.str(n, "capability"));
  r.rationale = doc.opt_str(n, "rationale").value_or("");
  return r;
}

std::string top_level_of(const TaxonomyCatalog& catalog, const std::string& category) {
  const auto* c = catalog.find_attack_category(category);
  if (!c) return category;
  return c->parent ? *c->parent : c->id;
}

template <typename T>
void push_unique(std::vector<T>& into, const T& value) {
  if (std::find(into.begin(), into.end(), value) == into.end()) into.push_back(value);
}

// "denial of service" for a catalog id, the alias text as written otherwise.
std::string category_label(const ThreatCategoryEntry& c, std::string_view written) {
  if (written == c.id) return text::to_lower(c.name);
  return text::trim(written);
}

std::string scenario_label(const std::string& label, const ThreatCategoryEntry& c, std::string_view written) {
  if (label.empty()) return c.name;
  return label + " (" + category_label(c, written) + ")";
}

bool goals_overlap(const model::AssetInstance& asset, const ThreatCategoryEntry& threat) {
  if (asset.goals.empty()) return true;
  for (const auto& g : asset.goals) {
    auto parsed = taxonomy::parse_security_goal(g);
    if (parsed && std::find(threat.goals.begin(), threat.goals.end(), *parsed) != threat.goals.end()) return true;
  }
  return false;
}

std::string endpoint_name(const DeviceModel& m, const model::Endpoint& e) {
  if (e.kind == ElementKind::external_entity) {
    if (const auto* a = m.find_actor(e.id)) return a->display_name();
  } else if (const auto* c = m.find_component(e.id)) {
    return c->display_name();
  }
  return e.id;
}

std::string stride_action(char letter, ElementKind element, const std::string& subject) {
  if (element == ElementKind::data_flow) {
    switch (letter) {
      case 'T': return "Tamper with " + subject + " in transit";
      case 'I': return "Disclose " + subject + " in transit";
      default: return "Block " + subject + " in transit";
    }
  }
  switch (letter) {
    case 'S': return "Spoof " + subject;
    case 'T': return "Tamper with " + subject;
    case 'R': return "Repudiate actions of " + subject;
    case 'I': return "Disclose data held by " + subject;
    case 'D': return "Deny service of " + subject;
    default: return "Elevate privileges on " + subject;
  }
}

// Collects scenarios in order, merging those with the same dedup key.
class Collector {
 public:
  // Returns the index of the scenario now holding `s`.
  std::size_t add(ThreatScenario s) {
    auto key = dedup_key(s);
    auto [it, inserted] = index_.emplace(key, items_.size());
    if (inserted) {
      items_.push_back(std::move(s));
      return items_.size() - 1;
    }
    auto& kept = items_[it->second];
    for (const auto& alt : s.required_capabilities) push_unique(kept.required_capabilities, alt);
    std::vector<std::string> fresh;
    for (const auto& p : s.provenance) {
      if (std::find(kept.provenance.begin(), kept.provenance.end(), p) == kept.provenance.end()) fresh.push_back(p);
    }
    if (!fresh.empty()) {
      kept.provenance.insert(kept.provenance.end(), fresh.begin(), fresh.end());
      kept.note += (kept.note.empty() ? "also " : "; also ") + text::join(fresh, ", ");
    }
    for (const auto& a : s.assets) push_unique(kept.assets, a);
    return it->second;
  }

  std::vector<ThreatScenario>& items() { return items_; }

 private:
  std::vector<ThreatScenario> items_;
  std::map<std::string, std::size_t> index_;
};

void from_vulnerabilities(const DeviceModel& m, const TaxonomyCatalog& catalog, const RuleSet& rules,
                          std::vector<std::vector<ThreatScenario>>& families) {
  for (const auto& v : m.vulnerabilities) {
    std::string written = v.threat.value_or(catalog.stride.count('E') ? catalog.stride.at('E') : "");
    const auto* threat = catalog.resolve_threat(written);
    if (!threat) continue;

    ThreatScenario parent;
    parent.vulnerability = v.id;
    parent.threat = threat->id;
    parent.threat_label = scenario_label(v.label, *threat, written);
    parent.action = v.action;
    parent.assets = v.assets;
    parent.note = v.note;
    parent.source = ScenarioSource::vulnerability;
    parent.provenance = {v.id};
    parent.cvss = v.cvss;
    parent.likelihood = v.likelihood;
    std::vector<std::string> affected_interfaces;
    for (const auto& target : v.affects) {
      if (const auto* i = m.find_interface(target)) {
        parent.interfaces.push_back(i->id);
        affected_interfaces.push_back(i->id);
        push_unique(parent.required_capabilities, CapabilitySet{rules.capability_for_interface(i->kind)});
      } else if (m.find_component(target)) {
        if (parent.component.empty()) parent.component = target;
        push_unique(parent.required_capabilities, CapabilitySet{Capability::physical_access});
      }
    }

    Collector children;
    for (const auto& x : m.interactions) {
      if (!x.abuse) continue;
      if (std::find(affected_interfaces.begin(), affected_interfaces.end(), x.via) == affected_interfaces.end()) continue;
      const auto* abused = catalog.resolve_threat(*x.abuse);
      const auto* via = m.find_interface(x.via);
      if (!abused || !via) continue;
      ThreatScenario child;
      child.vulnerability = v.id;
      child.threat = abused->id;
      child.threat_label = scenario_label(x.abuse_label, *abused, *x.abuse);
      child.interfaces = {x.via};
      child.action = x.purpose;
      child.assets = x.assets;
      child.source = ScenarioSource::vulnerability;
      child.provenance = {x.id};
      child.required_capabilities = {CapabilitySet{rules.capability_for_interface(via->kind)}};
      child.cvss = v.cvss;
      child.likelihood = v.likelihood;
      children.add(std::move(child));
    }
    std::vector<ThreatScenario> family{std::move(parent)};
    for (auto& c : children.items()) family.push_back(std::move(c));
    families.push_back(std::move(family));
  }
}

void from_stride(const DeviceModel& m, const TaxonomyCatalog& catalog, const RuleSet& rules, Collector& out) {
  for (const auto& flow : model::derive_data_flows(m, catalog)) {
    const auto* via = m.find_interface(flow.via);
    const auto* interaction = m.find_interaction(flow.interaction);
    const auto& component = flow.source.kind == ElementKind::external_entity ? flow.sink : flow.source;
    for (const auto& t : stride_threats_for_flow(flow, catalog)) {
      const auto* threat = catalog.find_threat(t.threat);
      if (!threat) continue;
      std::string subject;
      if (t.element == ElementKind::data_flow) {
        subject = flow.item;
      } else {
        subject = endpoint_name(m, t.element_id == flow.source.id ? flow.source : flow.sink);
      }
      ThreatScenario s;
      s.threat = threat->id;
      s.threat_label = threat->name;
      s.interfaces = {flow.via};
      s.action = stride_action(t.letter, t.element, subject);
      if (interaction) s.assets = interaction->assets;
      s.note = "STRIDE " + text::to_lower(stride_name(t.letter)) + " on " + std::string(model::to_string(t.element)) +
               " " + t.element_id;
      if (t.element != ElementKind::data_flow) s.note += " (" + flow.id + ")";
      s.source = ScenarioSource::stride;
      s.component = component.id;
      s.provenance = {flow.id};
      if (via) s.required_capabilities = {CapabilitySet{rules.capability_for_interface(via->kind)}};
      out.add(std::move(s));
    }
  }
}

void from_attack_surface(const DeviceModel& m, const TaxonomyCatalog& catalog, const RuleSet& rules,
                         Collector& out) {
  struct Group {
    std::string component;
    std::string attack;
    std::vector<std::string> stages;
    std::set<std::string> rules;
  };
  std::vector<Group> groups;
  std::map<std::pair<std::string, std::string>, std::size_t> index;
  for (const auto& e : enumerate_attack_surface(m, catalog, rules)) {
    auto [it, inserted] = index.emplace(std::make_pair(e.component, e.attack), groups.size());
    if (inserted) groups.push_back({e.component, e.attack, {}, {}});
    auto& g = groups[it->second];
    g.stages.push_back(e.stage);
    g.rules.insert(e.rules.begin(), e.rules.end());
  }
  std::stable_sort(groups.begin(), groups.end(), [](const Group& a, const Group& b) {
    return std::make_tuple(a.component, *taxonomy::stage_order(a.stages.front()), a.attack) <
           std::make_tuple(b.component, *taxonomy::stage_order(b.stages.front()), b.attack);
  });

  for (const auto& g : groups) {
    const auto* component = m.find_component(g.component);
    const auto* technique = catalog.find_technique(g.attack);
    std::vector<const model::AssetInstance*> hosted;
    for (const auto& a : m.assets) {
      if (std::find(a.on.begin(), a.on.end(), g.component) != a.on.end()) hosted.push_back(&a);
    }
    for (const auto& rule_id : g.rules) {
      const auto* rule = rules.find_rule(rule_id);
      std::vector<std::string> stages;
      for (const auto& st : g.stages) {
        if (std::find(rule->stages.begin(), rule->stages.end(), st) != rule->stages.end()) stages.push_back(st);
      }
      std::vector<std::string> interfaces;
      if (rule->interface) {
        for (const auto& i : m.interfaces) {
          if (i.component == g.component && i.kind == *rule->interface) interfaces.push_back(i.id);
        }
      }
      for (const auto& threat_id : rule->threats) {
        const auto* threat = catalog.find_threat(threat_id);
        if (!threat) continue;
        std::vector<std::string> assets;
        for (const auto* a : hosted) {
          if (goals_overlap(*a, *threat)) assets.push_back(a->id);
        }
        if (!hosted.empty() && assets.empty()) continue;
        ThreatScenario s;
        s.threat = threat->id;
        s.threat_label = threat->name;
        s.interfaces = interfaces;
        s.action = technique->name + " on " + component->display_name();
        s.assets = assets;
        s.note = rule->id + " (" + text::join(stages, ", ") + ")";
        s.source = ScenarioSource::attack_surface;
        s.component = g.component;
        s.technique = g.attack;
        s.provenance = {rule->id};
        s.required_capabilities = {CapabilitySet{rule->capability}};
        out.add(std::move(s));
      }
    }
  }
}

nlohmann::json opt_json(const std::optional<std::string>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); }
nlohmann::json opt_json(const std::optional<int>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); }

[[noreturn]] void json_fail(const std::string& message) { throw ParseError(message, 0, 0, "scenario"); }

}  // namespace

// --- rule sets ---------------------------------------------------------------

bool Rule::matches_kind(std::string_view kind) const {
  return std::any_of(components.begin(), components.end(), [&](const std::string& c) { return c == "*" || c == kind; });
}

const Rule* RuleSet::find_rule(std::string_view id) const {
  for (const auto& r : rules) if (r.id == id) return &r;
  return nullptr;
}

Capability RuleSet::capability_for_interface(std::string_view kind) const {
  auto it = interface_capabilities.find(std::string(kind));
  return it == interface_capabilities.end() ? Capability::physical_access : it->second;
}

RuleSet parse_ruleset(const std::string& text, const std::string& name) {
  yaml::Document doc(text, name);
  const auto& root = doc.root();
  if (!root.IsMap()) doc.fail(root, "a rule set must be a mapping");
  reject_unknown_keys(doc, root, {"ruleset", "version", "interface_capabilities", "rules"}, "rule set");
  RuleSet out;
  out.name = doc.opt_str(root, "ruleset").value_or(name);
  out.version = doc.opt_str(root, "version").value_or("");
  if (auto caps = root["interface_capabilities"]; caps && !caps.IsNull()) {
    if (!caps.IsMap()) doc.fail(caps, "'interface_capabilities' must be a mapping");
    for (const auto& kv : caps) {
      out.interface_capabilities[kv.first.as<std::string>()] =
          capability_or_fail(doc, kv.second, kv.second.as<std::string>());
    }
  }
  for (const auto& n : doc.seq(root, "rules")) out.rules.push_back(parse_rule(doc, n));
  return out;
}

const RuleSet& load_default_ruleset() {
  static const RuleSet rules = [] {
    RuleSet merged;
    bool first = true;
    for (const auto& f : embedded::rule_files()) {
      auto next = parse_ruleset(f.text, f.name);
      merged = first ? next : merge_rulesets(merged, next);
      first = false;
    }
    return merged;
  }();
  return rules;
}

RuleSet merge_rulesets(const RuleSet& base, const RuleSet& overlay) {
  RuleSet out = base;
  for (const auto& [kind, cap] : overlay.interface_capabilities) {
    auto [it, inserted] = out.interface_capabilities.emplace(kind, cap);
    if (!inserted && it->second != cap) {
      throw ConfigError("rule overlay '" + overlay.name + "' redefines the capability of interface kind '" + kind +
                        "'");
    }
  }
  for (const auto& r : overlay.rules) {
    if (out.find_rule(r.id)) throw ConfigError("rule overlay '" + overlay.name + "' redefines rule '" + r.id + "'");
    out.rules.push_back(r);
  }
  out.overlays.push_back(overlay.name);
  return out;
}

Findings validate_ruleset(const RuleSet& rs, const TaxonomyCatalog& catalog) {
  Findings out;
  auto error = [&](const std::string& code, const std::string& subject, const std::string& message) {
    out.push_back({Severity::error, code, subject, message, 0});
  };
  auto known_interface = [](const std::string& kind) {
    return std::find(model::kInterfaceKinds.begin(), model::kInterfaceKinds.end(), kind) != model::kInterfaceKinds.end();
  };
  for (const auto& [kind, cap] : rs.interface_capabilities) {
    if (!known_interface(kind)) error("unknown-interface-kind", kind, "unknown interface kind '" + kind + "'");
  }
  std::set<std::string> seen;
  std::set<std::string> covered;
  for (const auto& r : rs.rules) {
    if (!seen.insert(r.id).second) error("duplicate-rule-id", r.id, "duplicate rule id '" + r.id + "'");
    if (!r.source.empty()) {
      if (!catalog.find_attack_category(r.source)) {
        error("unknown-attack-category", r.id, "unknown attack category '" + r.source + "'");
      } else {
        covered.insert(top_level_of(catalog, r.source));
      }
    }
    if (r.components.empty()) error("empty-components", r.id, "rule matches no component kind");
    for (const auto& c : r.components) {
      if (c != "*" && !catalog.find_component_kind(c)) {
        error("unknown-component-kind", r.id, "unknown component kind '" + c + "'");
      }
    }
    if (r.interface && !known_interface(*r.interface)) {
      error("unknown-interface-kind", r.id, "unknown interface kind '" + *r.interface + "'");
    }
    if (r.stages.empty()) error("empty-stages", r.id, "rule has no life-cycle stage");
    for (const auto& s : r.stages) {
      if (!taxonomy::stage_order(s)) error("unknown-stage", r.id, "unknown life-cycle stage '" + s + "'");
    }
    if (r.yields.empty()) error("empty-yields", r.id, "rule yields no technique");
    for (const auto& y : r.yields) {
      if (!catalog.find_technique(y)) error("unknown-technique", r.id, "unknown attack technique '" + y + "'");
    }
    for (const auto& t : r.threats) {
      if (!catalog.find_threat(t)) error("unknown-threat", r.id, "unknown threat category '" + t + "'");
    }
  }
  for (auto top : taxonomy::kTopLevelAttackCategories) {
    if (!covered.count(std::string(top))) {
      out.push_back({Severity::warning, "uncovered-attack-category", std::string(top),
                     "no rule for attack category '" + std::string(top) + "'", 0});
    }
  }
  return out;
}

void check_ruleset(const RuleSet& rs, const TaxonomyCatalog& catalog) {
  std::vector<std::string> errors;
  for (const auto& f : validate_ruleset(rs, catalog)) {
    if (f.severity == Severity::error) errors.push_back(f.subject + ": " + f.message);
  }
  if (!errors.empty()) throw ConfigError("invalid rule set '" + rs.name + "': " + text::join(errors, "; "));
}

nlohmann::json to_json(const RuleSet& rs) {
  nlohmann::json caps = nlohmann::json::object();
  for (const auto& [kind, cap] : rs.interface_capabilities) caps[kind] = taxonomy::to_string(cap);
  nlohmann::json rules = nlohmann::json::array();
  for (const auto& r : rs.rules) {
    rules.push_back({{"id", r.id},
                     {"source", r.source},
                     {"components", r.components},
                     {"interface", opt_json(r.interface)},
                     {"stages", r.stages},
                     {"yields", r.yields},
                     {"threats", r.threats},
                     {"capability", taxonomy::to_string(r.capability)},
                     {"rationale", r.rationale}});
  }
  return {{"ruleset", rs.name},
          {"version", rs.version},
          {"interface_capabilities", caps},
          {"rules", rules},
          {"overlays", rs.overlays}};
}

// --- attack surface ----------------------------------------------------------

std::vector<AttackSurfaceEntry> enumerate_attack_surface(const DeviceModel& m, const TaxonomyCatalog& catalog,
                                                         const RuleSet& rs) {
  check_ruleset(rs, catalog);
  using Key = std::tuple<std::string, std::size_t, std::string>;
  std::map<Key, std::set<std::string>> hits;
  for (const auto& c : m.components) {
    for (const auto& r : rs.rules) {
      if (!r.matches_kind(c.kind)) continue;
      if (r.interface && std::none_of(m.interfaces.begin(), m.interfaces.end(), [&](const model::Interface& i) {
            return i.component == c.id && i.kind == *r.interface;
          })) {
        continue;
      }
      for (const auto& stage : r.stages) {
        auto order = *taxonomy::stage_order(stage);
        for (const auto& y : r.yields) hits[{c.id, order, y}].insert(r.id);
      }
    }
  }
  std::vector<AttackSurfaceEntry> out;
  out.reserve(hits.size());
  for (const auto& [key, rule_ids] : hits) {
    const auto& [component, order, attack] = key;
    out.push_back({component, std::string(taxonomy::kLifecycleStages[order]), attack,
                   std::vector<std::string>(rule_ids.begin(), rule_ids.end())});
  }
  return out;
}

nlohmann::json to_json(const AttackSurfaceEntry& e) {
  return {{"component", e.component}, {"stage", e.stage}, {"attack", e.attack}, {"rules", e.rules}};
}

// --- STRIDE ------------------------------------------------------------------

std::string_view stride_letters(ElementKind kind) {
  switch (kind) {
    case ElementKind::external_entity: return "SR";
    case ElementKind::process: return "STRIDE";
    case ElementKind::data_store: return "TRID";
    case ElementKind::data_flow: return "TID";
  }
  return "";
}

std::string_view stride_name(char letter) {
  switch (letter) {
    case 'S': return "Spoofing";
    case 'T': return "Tampering";
    case 'R': return "Repudiation";
    case 'I': return "Information disclosure";
    case 'D': return "Denial of service";
    case 'E': return "Elevation of privilege";
  }
  return "";
}

std::vector<StrideThreat> stride_threats_for_flow(const model::DataFlow& flow, const TaxonomyCatalog& catalog) {
  std::vector<StrideThreat> out;
  auto emit = [&](ElementKind kind, const std::string& id) {
    for (char letter : stride_letters(kind)) {
      auto it = catalog.stride.find(letter);
      if (it != catalog.stride.end()) out.push_back({letter, kind, id, it->second});
    }
  };
  emit(ElementKind::data_flow, flow.id);
  emit(flow.source.kind, flow.source.id);
  emit(flow.sink.kind, flow.sink.id);
  return out;
}

// --- scenarios ---------------------------------------------------------------

ScenarioNumber::ScenarioNumber(std::vector<int> parts) : parts_(std::move(parts)) {
  for (int p : parts_) {
    if (p <= 0) throw DomainError("scenario number parts must be positive");
  }
}

ScenarioNumber ScenarioNumber::parse(std::string_view text) {
  std::vector<int> parts;
  for (const auto& piece : text::split(text, '.')) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(piece.data(), piece.data() + piece.size(), value);
    if (piece.empty() || ec != std::errc() || ptr != piece.data() + piece.size() || value <= 0) {
      throw ParseError("malformed scenario number '" + std::string(text) + "'", 0, 0);
    }
    parts.push_back(value);
  }
  return ScenarioNumber(std::move(parts));
}

std::string ScenarioNumber::str() const {
  std::string out;
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (i) out += '.';
    out += std::to_string(parts_[i]);
  }
  return out;
}

ScenarioNumber ScenarioNumber::child(int index) const {
  auto parts = parts_;
  parts.push_back(index);
  return ScenarioNumber(std::move(parts));
}

std::optional<ScenarioNumber> ScenarioNumber::parent() const {
  if (parts_.size() < 2) return std::nullopt;
  return ScenarioNumber(std::vector<int>(parts_.begin(), parts_.end() - 1));
}

std::string_view to_string(ScenarioStatus s) { return kStatusNames[static_cast<std::size_t>(s)]; }

std::optional<ScenarioStatus> parse_scenario_status(std::string_view s) {
  for (std::size_t i = 0; i < kStatusNames.size(); ++i) {
    if (kStatusNames[i] == s) return static_cast<ScenarioStatus>(i);
  }
  return std::nullopt;
}

std::string_view to_string(ScenarioSource s) { return kSourceNames[static_cast<std::size_t>(s)]; }

std::string dedup_key(const ThreatScenario& s) {
  return s.threat + '\x1f' + text::join(s.interfaces, ",") + '\x1f' + s.action + '\x1f' + s.vulnerability.value_or("");
}

std::vector<ThreatScenario> enumerate_threat_scenarios(const DeviceModel& m, const TaxonomyCatalog& catalog,
                                                       const RuleSet& rules) {
  check_ruleset(rules, catalog);
  std::vector<std::vector<ThreatScenario>> families;
  from_vulnerabilities(m, catalog, rules, families);
  Collector flat;
  from_stride(m, catalog, rules, flat);
  from_attack_surface(m, catalog, rules, flat);

  std::vector<ThreatScenario> out;
  std::set<std::string> keys;
  int next = 1;
  for (auto& family : families) {
    if (!keys.insert(dedup_key(family.front())).second) continue;
    ScenarioNumber parent({next++});
    family.front().number = parent;
    out.push_back(std::move(family.front()));
    for (std::size_t i = 1; i < family.size(); ++i) {
      family[i].number = parent.child(static_cast<int>(i));
      keys.insert(dedup_key(family[i]));
      out.push_back(std::move(family[i]));
    }
  }
  for (auto& s : flat.items()) {
    if (!keys.insert(dedup_key(s)).second) continue;
    s.number = ScenarioNumber({next++});
    out.push_back(std::move(s));
  }
  return out;
}

bool in_reach(const ThreatScenario& s, const CapabilitySet& capabilities) {
  if (s.required_capabilities.empty()) return true;
  return std::any_of(s.required_capabilities.begin(), s.required_capabilities.end(), [&](const CapabilitySet& need) {
    return std::includes(capabilities.begin(), capabilities.end(), need.begin(), need.end());
  });
}

std::vector<ThreatScenario> filter_by_source_profile(const std::vector<ThreatScenario>& scenarios,
                                                     const taxonomy::ThreatSourceProfile& profile) {
  std::vector<ThreatScenario> out;
  std::copy_if(scenarios.begin(), scenarios.end(), std::back_inserter(out),
               [&](const ThreatScenario& s) { return in_reach(s, profile.capabilities); });
  return out;
}

void apply_mitigations(std::vector<ThreatScenario>& scenarios, const DeviceModel& m) {
  for (auto& s : scenarios) {
    if (!s.vulnerability) continue;
    const auto* v = m.find_vulnerability(*s.vulnerability);
    bool mitigated = v && v->status == model::VulnerabilityStatus::mitigated;
    for (const auto& mit : m.mitigations) {
      if (mit.enabled && std::find(mit.mitigates.begin(), mit.mitigates.end(), *s.vulnerability) != mit.mitigates.end()) {
        mitigated = true;
      }
    }
    if (mitigated) s.status = ScenarioStatus::mitigated;
  }
}

nlohmann::json to_json(const ThreatScenario& s) {
  nlohmann::json caps = nlohmann::json::array();
  for (const auto& alt : s.required_capabilities) {
    nlohmann::json set = nlohmann::json::array();
    for (auto c : alt) set.push_back(taxonomy::to_string(c));
    caps.push_back(set);
  }
  return {{"number", s.number.str()},
          {"vulnerability", opt_json(s.vulnerability)},
          {"threat", s.threat},
          {"threat_label", s.threat_label},
          {"interfaces", s.interfaces},
          {"action", s.action},
          {"assets", s.assets},
          {"note", s.note},
          {"status", to_string(s.status)},
          {"source", to_string(s.source)},
          {"component", s.component},
          {"technique", opt_json(s.technique)},
          {"provenance", s.provenance},
          {"required_capabilities", caps},
          {"cvss", opt_json(s.cvss)},
          {"likelihood", opt_json(s.likelihood)},
          {"impact_override", opt_json(s.impact_override)}};
}

ThreatScenario scenario_from_json(const nlohmann::json& j) {
  if (!j.is_object()) json_fail("scenario must be an object");
  try {
    ThreatScenario s;
    s.number = ScenarioNumber::parse(j.at("number").get<std::string>());
    if (j.contains("vulnerability") && !j["vulnerability"].is_null()) s.vulnerability = j["vulnerability"];
    s.threat = j.at("threat").get<std::string>();
    s.threat_label = j.value("threat_label", "");
    s.interfaces = j.value("interfaces", std::vector<std::string>{});
    s.action = j.value("action", "");
    s.assets = j.value("assets", std::vector<std::string>{});
    s.note = j.value("note", "");
    auto status = parse_scenario_status(j.value("status", "candidate"));
    if (!status) json_fail("unknown scenario status '" + j.value("status", "") + "'");
    s.status = *status;
    auto source = j.value("source", "vulnerability");
    auto it = std::find(kSourceNames.begin(), kSourceNames.end(), source);
    if (it == kSourceNames.end()) json_fail("unknown scenario source '" + source + "'");
    s.source = static_cast<ScenarioSource>(it - kSourceNames.begin());
    s.component = j.value("component", "");
    if (j.contains("technique") && !j["technique"].is_null()) s.technique = j["technique"];
    s.provenance = j.value("provenance", std::vector<std::string>{});
    for (const auto& alt : j.value("required_capabilities", nlohmann::json::array())) {
      CapabilitySet set;
      for (const auto& c : alt) {
        auto parsed = taxonomy::parse_capability(c.get<std::string>());
        if (!parsed) json_fail("unknown capability '" + c.get<std::string>() + "'");
        set.insert(*parsed);
      }
      s.required_capabilities.push_back(std::move(set));
    }
    if (j.contains("cvss") && !j["cvss"].is_null()) s.cvss = j["cvss"];
    if (j.contains("likelihood") && !j["likelihood"].is_null()) s.likelihood = j["likelihood"].get<int>();
    if (j.contains("impact_override") && !j["impact_override"].is_null()) {
      s.impact_override = j["impact_override"].get<int>();
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    json_fail(e.what());
  }
}

}  // namespace threatsmith::enumeration
