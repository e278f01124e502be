// Copyright 2026 The Threatsmith Authors
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

// Scenario table, risk register and full-analysis documents in Markdown, CSV
// and canonical JSON.

#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "threatsmith/device_model.hpp"
#include "threatsmith/enumeration.hpp"
#include "threatsmith/scoring.hpp"

namespace threatsmith::reporting {

inline constexpr std::array<std::string_view, 6> kScenarioColumns = {
    "No.", "Vulnerability", "Threat (Category)", "Attack Vector / Interface", "Attack Vector / Action", "Note"};

struct ScenarioRow {
  std::string number;
  std::string vulnerability;  // blank on child rows
  std::string threat;
  std::string interface;
  std::string action;
  std::string note;
  std::string status;  // carried in JSON only

  bool operator==(const ScenarioRow&) const = default;
};

struct ScenarioTable {
  std::vector<ScenarioRow> rows;
  bool operator==(const ScenarioTable&) const = default;
};

struct RegisterRow {
  std::string number;
  std::string cvss_vector;  // empty when unscored by CVSS
  std::string cvss_score;
  std::string cvss_rating;
  int likelihood = 1;
  int impact = 1;
  std::string risk_level;

  bool operator==(const RegisterRow&) const = default;
};

struct RiskRegister {
  std::vector<RegisterRow> rows;
  std::vector<std::string> unscored;  // scenario numbers

  bool operator==(const RiskRegister&) const = default;
};

struct SurfaceRow {
  std::string component;
  std::string stage;
  std::string attack;
  std::string rules;

  bool operator==(const SurfaceRow&) const = default;
};

struct ModelSummary {
  std::string device;
  std::string version;
  std::vector<std::string> environment;
  int components = 0;
  int interfaces = 0;
  int actors = 0;
  int interactions = 0;
  int assets = 0;
  int vulnerabilities = 0;
  int mitigations = 0;
  std::string catalog_version;
  std::string ruleset;
  std::string profile;  // empty when no threat-source filter applied

  bool operator==(const ModelSummary&) const = default;
};

struct ReportDocument {
  std::string title;
  std::string generated_at;  // excluded from canonical hashing
  ModelSummary summary;
  ScenarioTable scenarios;
  RiskRegister risk_register;
  std::vector<SurfaceRow> attack_surface;

  bool operator==(const ReportDocument&) const = default;
};

/// Rows in hierarchical number order. Throws DomainError on a duplicate number.
ScenarioTable build_scenario_table(const std::vector<enumeration::ThreatScenario>& scenarios,
                                   const model::DeviceModel& model);

/// Ordered by risk level desc, CVSS score desc, number asc. Active scenarios
/// without a record go to the unscored block. Throws DomainError for a
/// record whose scenario is not in the list.
RiskRegister build_risk_register(const std::vector<enumeration::ThreatScenario>& scenarios,
                                 const std::vector<scoring::RiskRecord>& records);

std::vector<SurfaceRow> build_attack_surface_listing(const std::vector<enumeration::AttackSurfaceEntry>& entries);

ModelSummary summarize_model(const model::DeviceModel& model);

enum class Format { markdown, csv, json };
std::string_view to_string(Format f);
/// "md", "markdown", "csv" or "json". Throws ConfigError listing the
/// supported formats otherwise.
Format parse_format(std::string_view name);
/// report.md, report-csv.zip, report.json
std::string output_file_name(Format f);

std::string render_scenario_table_markdown(const ScenarioTable& table);
std::string render_report(const ReportDocument& doc, Format format);
std::string render_report(const ReportDocument& doc, std::string_view format);

/// Files bundled into the CSV archive, before zipping.
std::vector<std::pair<std::string, std::string>> render_csv_files(const ReportDocument& doc);

nlohmann::json to_json(const ReportDocument& doc);
ReportDocument report_from_json(const nlohmann::json& j);

/// Hash of the canonical JSON without the timestamp.
std::string canonical_hash(const ReportDocument& doc);

}  // namespace threatsmith::reporting
