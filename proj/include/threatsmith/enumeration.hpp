// Copyright 2026 The Threatsmith Authors
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

// Rule engine: components x life-cycle stages -> attack techniques, STRIDE on
// data flows, and numbered threat scenarios.

#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "threatsmith/device_model.hpp"
#include "threatsmith/finding.hpp"
#include "threatsmith/taxonomy.hpp"

namespace threatsmith::enumeration {

struct Rule {
  std::string id;
  std::string source;                   // attack category the rule belongs to
  std::vector<std::string> components;  // component kinds, or "*"
  std::optional<std::string> interface; // interface kind the component must expose
  std::vector<std::string> stages;
  std::vector<std::string> yields;      // "<category>:<technique>"
  std::vector<std::string> threats;     // threat category ids
  taxonomy::Capability capability = taxonomy::Capability::physical_access;
  std::string rationale;

  bool matches_kind(std::string_view kind) const;
  bool operator==(const Rule&) const = default;
};

struct RuleSet {
  std::string name;
  std::string version;
  std::map<std::string, taxonomy::Capability> interface_capabilities;
  std::vector<Rule> rules;
  std::vector<std::string> overlays;

  const Rule* find_rule(std::string_view id) const;
  /// Capability needed to reach a device through an interface kind;
  /// physical access when the kind is not listed.
  taxonomy::Capability capability_for_interface(std::string_view kind) const;
  bool operator==(const RuleSet&) const = default;
};

/// The seed rule set shipped with the binary.
const RuleSet& load_default_ruleset();
RuleSet parse_ruleset(const std::string& text, const std::string& name = {});
/// Additive merge. Throws ConfigError when the overlay reuses a rule id.
RuleSet merge_rulesets(const RuleSet& base, const RuleSet& overlay);

/// Errors for duplicate rule ids and references the catalog does not know;
/// a warning per top-level attack category without any rule.
Findings validate_ruleset(const RuleSet& rules, const taxonomy::TaxonomyCatalog& catalog);
/// Throws ConfigError listing every error finding of validate_ruleset.
void check_ruleset(const RuleSet& rules, const taxonomy::TaxonomyCatalog& catalog);

nlohmann::json to_json(const RuleSet& rules);

struct AttackSurfaceEntry {
  std::string component;
  std::string stage;
  std::string attack;              // "<category>:<technique>"
  std::vector<std::string> rules;  // provenance, sorted; front() is the primary rule

  bool operator==(const AttackSurfaceEntry&) const = default;
};

/// Union of every matching rule over all (component, stage) pairs, sorted by
/// (component id, stage order, attack id). Throws ConfigError before matching
/// when the rule set references unknown catalog ids.
std::vector<AttackSurfaceEntry> enumerate_attack_surface(const model::DeviceModel& model,
                                                         const taxonomy::TaxonomyCatalog& catalog,
                                                         const RuleSet& rules);

nlohmann::json to_json(const AttackSurfaceEntry& entry);

/// STRIDE letters applicable to an element kind, in S T R I D E order.
std::string_view stride_letters(model::ElementKind kind);
std::string_view stride_name(char letter);

struct StrideThreat {
  char letter = 'S';
  model::ElementKind element = model::ElementKind::data_flow;
  std::string element_id;  // flow id, actor id or component id
  std::string threat;      // mapped threat category id

  bool operator==(const StrideThreat&) const = default;
};

/// Letters for the flow itself, then its source and sink endpoints, each
/// mapped through the catalog's STRIDE table.
std::vector<StrideThreat> stride_threats_for_flow(const model::DataFlow& flow,
                                                  const taxonomy::TaxonomyCatalog& catalog);

/// Hierarchical scenario number such as "1.2"; compares numerically.
class ScenarioNumber {
 public:
  ScenarioNumber() = default;
  explicit ScenarioNumber(std::vector<int> parts);
  /// Throws ParseError unless the text is dot-separated positive integers.
  static ScenarioNumber parse(std::string_view text);

  const std::vector<int>& parts() const { return parts_; }
  bool empty() const { return parts_.empty(); }
  std::string str() const;
  ScenarioNumber child(int index) const;
  std::optional<ScenarioNumber> parent() const;

  auto operator<=>(const ScenarioNumber&) const = default;
  bool operator==(const ScenarioNumber&) const = default;

 private:
  std::vector<int> parts_;
};

enum class ScenarioStatus { candidate, confirmed, rejected, mitigated };
std::string_view to_string(ScenarioStatus s);
std::optional<ScenarioStatus> parse_scenario_status(std::string_view s);

enum class ScenarioSource { vulnerability, stride, attack_surface };
std::string_view to_string(ScenarioSource s);

struct ThreatScenario {
  ScenarioNumber number;
  std::optional<std::string> vulnerability;
  std::string threat;        // threat category id
  std::string threat_label;  // "Login as administrator (obtaining of control)"
  std::vector<std::string> interfaces;
  std::string action;
  std::vector<std::string> assets;
  std::string note;
  ScenarioStatus status = ScenarioStatus::candidate;
  ScenarioSource source = ScenarioSource::vulnerability;
  std::string component;                 // attack-surface and STRIDE scenarios
  std::optional<std::string> technique;  // attack-surface scenarios
  std::vector<std::string> provenance;   // rule, flow or interaction ids
  /// Alternatives: the scenario is in reach of a profile holding every
  /// capability of at least one set. Empty means always in reach.
  std::vector<taxonomy::CapabilitySet> required_capabilities;
  std::optional<std::string> cvss;
  std::optional<int> likelihood;
  std::optional<int> impact_override;

  bool operator==(const ThreatScenario&) const = default;
};

/// (threat category, interfaces, action, vulnerability)
std::string dedup_key(const ThreatScenario& s);

/// Scenarios from declared vulnerabilities (a parent per vulnerability, a
/// child per abused interaction on its interfaces), from STRIDE on derived
/// flows, and from attack-surface entries joined to the assets their
/// components hold. All candidates; numbered 1, 1.1, ..., in that order.
std::vector<ThreatScenario> enumerate_threat_scenarios(const model::DeviceModel& model,
                                                       const taxonomy::TaxonomyCatalog& catalog,
                                                       const RuleSet& rules);

bool in_reach(const ThreatScenario& s, const taxonomy::CapabilitySet& capabilities);

/// Scenarios whose required capabilities the profile holds; order preserved.
std::vector<ThreatScenario> filter_by_source_profile(const std::vector<ThreatScenario>& scenarios,
                                                     const taxonomy::ThreatSourceProfile& profile);

/// Marks a vulnerability-derived scenario mitigated when every vulnerability
/// it stems from has an enabled mitigation.
void apply_mitigations(std::vector<ThreatScenario>& scenarios, const model::DeviceModel& model);

nlohmann::json to_json(const ThreatScenario& s);
ThreatScenario scenario_from_json(const nlohmann::json& j);

}  // namespace threatsmith::enumeration
