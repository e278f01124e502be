// Copyright 2026 The Threatsmith Authors
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

// Knowledge base of component kinds, asset kinds, threat categories, attack
// techniques, life-cycle stages and threat-source profiles.
//
// The default catalog is compiled into the library from data/catalog/*.yaml.
// Catalog values never change after loading; overlays produce a new value.

#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

#include "threatsmith/finding.hpp"

namespace threatsmith::taxonomy {

enum class ComponentCategory { hardware, software, data };
enum class Stakeholder { manufacturer, owner, user, common };
enum class SecurityGoal {
  authenticity,
  integrity,
  non_repudiation,
  confidentiality,
  availability,
  authorization,
  safety,
  privacy
};
enum class Capability {
  remote_network,
  local_network,
  physical_access,
  supply_chain_access,
  insider_privileges,
  chip_lab
};
enum class Resourcing { low, medium, high };

using CapabilitySet = std::set<Capability>;

std::string_view to_string(ComponentCategory v);
std::string_view to_string(Stakeholder v);
std::string_view to_string(SecurityGoal v);
std::string_view to_string(Capability v);
std::string_view to_string(Resourcing v);

std::optional<ComponentCategory> parse_component_category(std::string_view s);
std::optional<Stakeholder> parse_stakeholder(std::string_view s);
std::optional<SecurityGoal> parse_security_goal(std::string_view s);
std::optional<Capability> parse_capability(std::string_view s);
std::optional<Resourcing> parse_resourcing(std::string_view s);

const std::vector<Capability>& all_capabilities();

/// The seven life-cycle stages in their fixed order.
inline constexpr std::array<std::string_view, 7> kLifecycleStages = {
    "design", "production", "distribution", "setup", "operation", "maintenance", "end_of_life"};

/// Index into kLifecycleStages, or nullopt for an unknown id.
std::optional<std::size_t> stage_order(std::string_view stage);

/// Kinds present in every valid catalog (hardware, software and data slices).
inline constexpr std::array<std::string_view, 15> kCoreComponentKinds = {
    "circuit_board", "microprocessor", "memory",       "security_chip",      "sensor_actuator",
    "application",   "services_api",   "connectivity", "cryptography",       "firmware_os",
    "code",          "configuration_data", "application_data", "access_data_keys", "log_data"};

inline constexpr std::array<std::string_view, 8> kTopLevelAttackCategories = {
    "hardware", "firmware", "application", "cryptography",
    "network",  "user_behavior", "ecosystem", "supply_chain"};

inline constexpr std::array<std::string_view, 7> kPrivacyCategories = {
    "privacy.identification",      "privacy.inventory_attack",       "privacy.lifecycle_transition",
    "privacy.linkage",             "privacy.localization_tracking",  "privacy.interaction_disclosure",
    "privacy.profiling"};

struct ComponentKindEntry {
  std::string id;
  ComponentCategory category = ComponentCategory::hardware;
  std::string name;
  std::string description;
  std::vector<std::string> default_interfaces;

  bool operator==(const ComponentKindEntry&) const = default;
};

struct AssetKindEntry {
  std::string id;
  Stakeholder stakeholder = Stakeholder::common;
  std::string name;
  std::string description;

  bool operator==(const AssetKindEntry&) const = default;
};

struct ThreatCategoryEntry {
  std::string id;  // "<group>.<category>"
  std::string name;
  std::string description;
  std::vector<SecurityGoal> goals;
  bool curated = false;
  std::vector<std::string> aliases;

  bool operator==(const ThreatCategoryEntry&) const = default;
};

struct ThreatGroup {
  std::string id;
  std::string name;
  std::vector<ThreatCategoryEntry> categories;

  bool operator==(const ThreatGroup&) const = default;
};

struct Technique {
  std::string id;  // local to its category
  std::string name;

  bool operator==(const Technique&) const = default;
};

struct AttackCategoryEntry {
  std::string id;
  std::string name;
  std::optional<std::string> parent;
  std::vector<std::string> stages;
  std::vector<Technique> techniques;

  /// "<category>:<technique>", the form rules and reports use.
  std::string technique_ref(const Technique& t) const { return id + ":" + t.id; }

  bool operator==(const AttackCategoryEntry&) const = default;
};

struct LifecycleStage {
  std::string id;
  std::string name;

  bool operator==(const LifecycleStage&) const = default;
};

struct ThreatSourceProfile {
  std::string id;
  std::string name;
  CapabilitySet capabilities;
  std::string intent;
  Resourcing resourcing = Resourcing::medium;

  bool operator==(const ThreatSourceProfile&) const = default;
};

/// Likelihood + impact thresholds, evaluated from critical downwards.
struct RiskBands {
  int critical = 9;
  int high = 7;
  int medium = 5;

  bool operator==(const RiskBands&) const = default;
};

struct TaxonomyCatalog {
  std::string version;
  std::vector<ComponentKindEntry> component_kinds;
  std::vector<AssetKindEntry> asset_kinds;
  std::vector<ThreatGroup> threat_groups;
  std::vector<AttackCategoryEntry> attack_categories;
  std::vector<LifecycleStage> lifecycle_stages;
  std::vector<ThreatSourceProfile> source_profiles;
  std::map<char, std::string> stride;  // 'S','T','R','I','D','E' -> threat category id
  RiskBands risk_bands;
  std::vector<std::string> overlays;  // names of overlays merged into this value

  bool operator==(const TaxonomyCatalog&) const = default;

  const ComponentKindEntry* find_component_kind(std::string_view id) const;
  const AssetKindEntry* find_asset_kind(std::string_view id) const;
  const ThreatGroup* find_group(std::string_view id) const;
  const ThreatCategoryEntry* find_threat(std::string_view id) const;
  /// Threat category by id or (case-insensitive) alias.
  const ThreatCategoryEntry* resolve_threat(std::string_view id_or_alias) const;
  const AttackCategoryEntry* find_attack_category(std::string_view id) const;
  /// Technique by "<category>:<technique>" reference.
  const Technique* find_technique(std::string_view ref) const;
  const ThreatSourceProfile* find_profile(std::string_view id) const;

  std::size_t threat_category_count() const;
};

// --- loading --------------------------------------------------------------

/// A named text document in YAML (or JSON, which YAML accepts).
struct CatalogSource {
  std::string name;
  std::string text;
};

/// Catalog compiled into the library. Throws ParseError naming the bundled
/// file and line when the data does not load.
const TaxonomyCatalog& load_default_catalog();

/// Builds a catalog from a manifest and its parts. The first source must be
/// the manifest; remaining sources are matched to `parts` by name.
TaxonomyCatalog load_catalog(const std::vector<CatalogSource>& sources);

/// Reads catalog.yaml and its parts from a directory.
TaxonomyCatalog load_catalog_directory(const std::string& directory);

/// Parses a single document holding any subset of the catalog sections (the
/// canonical JSON form holds all of them).
TaxonomyCatalog parse_catalog_document(const std::string& text, const std::string& name);

/// Adds the entries of an overlay document. Redefining an existing id throws
/// ConfigError; `stride` and `risk_matrix` may be remapped.
TaxonomyCatalog apply_overlay(const TaxonomyCatalog& base, const CatalogSource& overlay);

nlohmann::json to_json(const TaxonomyCatalog& catalog);
TaxonomyCatalog catalog_from_json(const nlohmann::json& j);

// --- validation and queries -----------------------------------------------

Findings validate_catalog(const TaxonomyCatalog& catalog);

enum class EntryKind {
  component_kind,
  asset_kind,
  threat_group,
  threat_category,
  attack_category,
  technique,
  lifecycle_stage,
  source_profile
};

std::string_view to_string(EntryKind kind);

struct TechniqueEntry {
  const AttackCategoryEntry* category;
  const Technique* technique;
};

using EntryValue =
    std::variant<const ComponentKindEntry*, const AssetKindEntry*, const ThreatGroup*,
                 const ThreatCategoryEntry*, const AttackCategoryEntry*, TechniqueEntry,
                 const LifecycleStage*, const ThreatSourceProfile*>;

/// A catalog entry of any kind. Pointers refer into the catalog it came from.
struct CatalogEntry {
  EntryKind kind;
  std::string id;
  std::string name;
  std::string container;  // owning group, parent category, or empty
  EntryValue value;
};

/// Returns the entry with `id`. Where several kinds share an id (component
/// kind and attack category "cryptography"), the first kind in EntryKind
/// order wins unless `kind` narrows the search. Throws NotFoundError with
/// nearest-id suggestions.
CatalogEntry lookup_entry(const TaxonomyCatalog& catalog, std::string_view id,
                          std::optional<EntryKind> kind = std::nullopt);

/// Threat categories of a group in catalog order. Throws NotFoundError.
std::vector<const ThreatCategoryEntry*> entries_in_group(const TaxonomyCatalog& catalog,
                                                         std::string_view group_id);

/// Every id the catalog defines, with its kind, in catalog order.
std::vector<std::pair<EntryKind, std::string>> all_entry_ids(const TaxonomyCatalog& catalog);

}  // namespace threatsmith::taxonomy
