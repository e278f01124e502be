// Copyright 2026 The Threatsmith Authors
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

// End-to-end analysis: validate, enumerate, apply analyst triage and what-if
// toggles, score, and assemble the report. Shared by the CLI and the service.

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "threatsmith/device_model.hpp"
#include "threatsmith/enumeration.hpp"
#include "threatsmith/reporting.hpp"
#include "threatsmith/scoring.hpp"
#include "threatsmith/taxonomy.hpp"

namespace threatsmith::pipeline {

/// Analyst edits to one scenario. A field that is set but empty clears the
/// value.
struct ScenarioPatch {
  std::optional<enumeration::ScenarioStatus> status;
  std::optional<std::optional<std::string>> cvss;
  std::optional<std::optional<int>> likelihood;
  std::optional<std::optional<int>> impact_override;

  bool empty() const { return !status && !cvss && !likelihood && !impact_override; }
  /// Later fields win.
  void merge(const ScenarioPatch& later);
  bool operator==(const ScenarioPatch&) const = default;
};

/// Throws ParseError on unknown keys or ill-typed values. Validates CVSS
/// vectors and 1-5 ranges.
ScenarioPatch patch_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ScenarioPatch& p);

struct Options {
  std::optional<std::string> profile;         // threat-source profile id
  std::map<std::string, bool> mitigations;     // mitigation id -> enabled
  std::map<std::string, ScenarioPatch> patches;  // scenario number -> edits
};

struct Analysis {
  Findings findings;
  std::vector<enumeration::AttackSurfaceEntry> attack_surface;
  /// After triage and mitigations, filtered by the profile when one is set.
  std::vector<enumeration::ThreatScenario> scenarios;
  std::vector<scoring::RiskRecord> records;
  model::DeviceModel effective_model;  // mitigation toggles applied
};

/// Throws NotFoundError for an unknown profile or mitigation id and
/// ConfigError for an invalid rule set.
Analysis analyze(const model::DeviceModel& model, const taxonomy::TaxonomyCatalog& catalog,
                 const enumeration::RuleSet& rules, const Options& options = {});

/// "Threat analysis: <device name>"
std::string default_title(const model::DeviceModel& model);

reporting::ReportDocument make_report(const Analysis& analysis, const taxonomy::TaxonomyCatalog& catalog,
                                      const enumeration::RuleSet& rules, const Options& options,
                                      const std::string& title, const std::string& generated_at = {});

}  // namespace threatsmith::pipeline
