// Copyright 2026 The Threatsmith Authors
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

// Analyst-authored device description (.tm files) and derived data flows.
//
//   device "Electric actuator" { version "2.1"; environment critical_infrastructure }
//   component application app { name "Control application" }
//   interface mobile_app ble { component app; auth true; transport bluetooth }
//   actor operator op
//   interaction login { actor op; via ble; data credentials; direction in }
//
// Sections: device, component, interface, actor, interaction, asset,
// vulnerability, mitigation. Statements are `key value[, value...]`, ended by
// a newline or ';'. Comments start with '#' or '//'.

#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "threatsmith/finding.hpp"
#include "threatsmith/taxonomy.hpp"

namespace threatsmith::model {

/// Where a declaration came from. Ignored by equality so that
/// parse(render(m)) == m holds.
struct SourceLocation {
  int line = 0;
  int column = 0;

  bool operator==(const SourceLocation&) const { return true; }
};

inline constexpr std::array<std::string_view, 8> kInterfaceKinds = {
    "local_hmi", "fieldbus", "ethernet", "wireless", "debug_port", "removable_media", "cloud_api", "mobile_app"};
inline constexpr std::array<std::string_view, 5> kActorRoles = {
    "commissioning", "operator", "maintenance", "remote_service", "external_system"};

enum class Direction { in, out, both };
std::string_view to_string(Direction d);
std::optional<Direction> parse_direction(std::string_view s);

enum class VulnerabilityStatus { open, mitigated };
std::string_view to_string(VulnerabilityStatus s);

struct Metadata {
  std::string name;
  std::string version;
  std::vector<std::string> environment;
  std::string description;

  bool operator==(const Metadata&) const = default;
};

struct ComponentInstance {
  std::string id;
  std::string kind;  // catalog component kind id
  std::string name;
  std::map<std::string, std::string> properties;
  SourceLocation location;

  /// `name`, falling back to the id.
  const std::string& display_name() const { return name.empty() ? id : name; }
  bool operator==(const ComponentInstance&) const = default;
};

struct Interface {
  std::string id;
  std::string kind;  // one of kInterfaceKinds
  std::string component;
  bool authentication = false;
  std::string transport;
  std::string name;
  SourceLocation location;

  const std::string& display_name() const { return name.empty() ? id : name; }
  bool operator==(const Interface&) const = default;
};

struct Actor {
  std::string id;
  std::string role;  // one of kActorRoles
  std::string name;
  std::vector<std::string> privileges;
  SourceLocation location;

  const std::string& display_name() const { return name.empty() ? id : name; }
  bool operator==(const Actor&) const = default;
};

struct Interaction {
  std::string id;
  std::string actor;
  std::string via;  // interface id
  std::string purpose;
  std::vector<std::string> data;
  Direction direction = Direction::in;
  /// Threat category id or alias an attacker realizes by abusing this
  /// interaction, with the scenario-level label for it.
  std::optional<std::string> abuse;
  std::string abuse_label;
  std::vector<std::string> assets;
  SourceLocation location;

  bool operator==(const Interaction&) const = default;
};

struct AssetInstance {
  std::string id;
  std::string kind;  // catalog asset kind id
  std::string name;
  std::optional<std::string> stakeholder;
  int criticality = 1;
  std::vector<std::string> goals;
  std::vector<std::string> on;  // component ids holding the asset
  SourceLocation location;

  const std::string& display_name() const { return name.empty() ? id : name; }
  bool operator==(const AssetInstance&) const = default;
};

struct Vulnerability {
  std::string id;
  std::string title;
  std::string cause;
  std::string description;
  std::vector<std::string> affects;  // interface or component ids
  VulnerabilityStatus status = VulnerabilityStatus::open;
  std::optional<std::string> threat;  // threat category id or alias
  std::string label;
  std::string action;
  std::string note;
  std::vector<std::string> assets;
  std::optional<std::string> cvss;
  std::optional<int> likelihood;
  SourceLocation location;

  /// "Default PIN (users did not change it)"
  std::string display_title() const { return cause.empty() ? title : title + " (" + cause + ")"; }
  bool operator==(const Vulnerability&) const = default;
};

struct Mitigation {
  std::string id;
  std::string title;
  std::vector<std::string> mitigates;
  bool enabled = false;
  SourceLocation location;

  bool operator==(const Mitigation&) const = default;
};

struct DeviceModel {
  Metadata device;
  std::vector<ComponentInstance> components;
  std::vector<Interface> interfaces;
  std::vector<Actor> actors;
  std::vector<Interaction> interactions;
  std::vector<AssetInstance> assets;
  std::vector<Vulnerability> vulnerabilities;
  std::vector<Mitigation> mitigations;

  const ComponentInstance* find_component(std::string_view id) const;
  const Interface* find_interface(std::string_view id) const;
  const Actor* find_actor(std::string_view id) const;
  const Interaction* find_interaction(std::string_view id) const;
  const AssetInstance* find_asset(std::string_view id) const;
  const Vulnerability* find_vulnerability(std::string_view id) const;
  const Mitigation* find_mitigation(std::string_view id) const;

  bool operator==(const DeviceModel&) const = default;
};

/// Throws ParseError (with line and column) on syntax errors, duplicate ids
/// within a section and unknown sections or keys. Does not consult the catalog.
DeviceModel parse_model(std::string_view text, const std::string& source_name = {});

/// Normalized DSL.
std::string render_model(const DeviceModel& model);

nlohmann::json to_json(const DeviceModel& model);
/// Throws ParseError on malformed JSON structure or duplicate ids.
DeviceModel model_from_json(const nlohmann::json& j);

/// Reference, range and catalog checks. Assets without security goals and
/// vulnerabilities without a threat are warnings; everything else is an error.
Findings validate_model(const DeviceModel& model, const taxonomy::TaxonomyCatalog& catalog);

enum class ElementKind { external_entity, process, data_store, data_flow };
std::string_view to_string(ElementKind k);

struct Endpoint {
  std::string id;  // actor or component id
  ElementKind kind = ElementKind::process;

  bool operator==(const Endpoint&) const = default;
};

struct DataFlow {
  std::string id;
  Endpoint source;
  Endpoint sink;
  std::string via;  // interface id
  std::string item;
  Direction direction = Direction::in;  // in or out, never both
  std::string interaction;

  bool operator==(const DataFlow&) const = default;
};

/// Element kind of a component according to its catalog category: data
/// kinds are data stores, everything else is a process.
ElementKind element_kind_of(const ComponentInstance& component, const taxonomy::TaxonomyCatalog& catalog);

/// One flow per interaction x data item x direction, sorted by id. Interactions with
/// unresolved references are skipped.
std::vector<DataFlow> derive_data_flows(const DeviceModel& model, const taxonomy::TaxonomyCatalog& catalog);

nlohmann::json to_json(const DataFlow& flow);

}  // namespace threatsmith::model
