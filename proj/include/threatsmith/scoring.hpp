// Copyright 2026 The Threatsmith Authors
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

// CVSS v3.1 base scoring and the likelihood/impact risk matrix.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "threatsmith/device_model.hpp"
#include "threatsmith/enumeration.hpp"
#include "threatsmith/taxonomy.hpp"

namespace threatsmith::scoring {

enum class AttackVector { physical, local, adjacent, network };
enum class AttackComplexity { high, low };
enum class PrivilegesRequired { high, low, none };
enum class UserInteraction { required, none };
enum class Scope { unchanged, changed };
enum class CiaImpact { none, low, high };

// Enumerators are ordered from least to most severe so that `<` reads as
// "less exploitable / less impact".
struct CvssVector {
  AttackVector attack_vector = AttackVector::network;
  AttackComplexity attack_complexity = AttackComplexity::low;
  PrivilegesRequired privileges_required = PrivilegesRequired::none;
  UserInteraction user_interaction = UserInteraction::none;
  Scope scope = Scope::unchanged;
  CiaImpact confidentiality = CiaImpact::none;
  CiaImpact integrity = CiaImpact::none;
  CiaImpact availability = CiaImpact::none;

  bool operator==(const CvssVector&) const = default;
};

/// Accepts "CVSS:3.1/" followed by the eight base metrics in any order.
/// Throws ParseError naming the offending metric.
CvssVector parse_cvss_vector(std::string_view text);

/// Canonical form: AV, AC, PR, UI, S, C, I, A.
std::string render_cvss_vector(const CvssVector& v);

/// All 2,592 base vectors.
std::vector<CvssVector> all_cvss_vectors();

enum class CvssRating { none, low, medium, high, critical };
std::string_view to_string(CvssRating r);

struct CvssScore {
  int tenths = 0;  // 0..100
  CvssRating rating = CvssRating::none;

  double value() const { return tenths / 10.0; }
  /// "9.8"
  std::string text() const;
  bool operator==(const CvssScore&) const = default;
};

CvssRating rating_for(int tenths);
CvssScore cvss_base_score(const CvssVector& v);

/// round-half-up of x*100000, then up to the next tenth. Returns tenths.
int roundup_tenths(double x);

enum class RiskLevel { low, medium, high, critical };
std::string_view to_string(RiskLevel level);
std::optional<RiskLevel> parse_risk_level(std::string_view s);

/// Matrix lookup on likelihood + impact. Throws DomainError outside 1..5.
RiskLevel risk_level(int likelihood, int impact, const taxonomy::RiskBands& bands = {});

/// Max of `criticalities`, 1 when empty; `override_impact` wins when set.
/// Throws DomainError for an override outside 1..5.
int derive_impact(const std::vector<int>& criticalities, std::optional<int> override_impact = std::nullopt);

/// Impact of a scenario from the criticality of the assets it affects.
int derive_impact(const enumeration::ThreatScenario& scenario, const model::DeviceModel& model);

struct RiskRecord {
  enumeration::ScenarioNumber scenario;
  std::optional<std::string> cvss_vector;  // canonical form
  std::optional<CvssScore> cvss;
  int likelihood = 1;
  int impact = 1;
  RiskLevel level = RiskLevel::low;

  bool operator==(const RiskRecord&) const = default;
};

/// std::nullopt when the scenario has no likelihood. Throws ParseError for a
/// malformed vector and DomainError for out-of-range likelihood or impact.
std::optional<RiskRecord> assess_scenario(const enumeration::ThreatScenario& scenario,
                                          const model::DeviceModel& model,
                                          const taxonomy::TaxonomyCatalog& catalog);

/// Records for every scored scenario that is neither rejected nor mitigated.
std::vector<RiskRecord> assess_scenarios(const std::vector<enumeration::ThreatScenario>& scenarios,
                                         const model::DeviceModel& model,
                                         const taxonomy::TaxonomyCatalog& catalog);

bool is_active(const enumeration::ThreatScenario& scenario);

nlohmann::json to_json(const RiskRecord& record);
RiskRecord risk_record_from_json(const nlohmann::json& j);

}  // namespace threatsmith::scoring
