// Copyright 2026 The Threatsmith Authors
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

#include "threatsmith/scoring.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "threatsmith/error.hpp"

namespace threatsmith::scoring {

namespace {

struct Metric {
  std::string_view key;
  std::string_view letters;  // accepted values, index = enumerator value
};

// Canonical render order; letters follow each enum's declaration order.
constexpr std::array<Metric, 8> kMetrics = {{
    {"AV", "PLAN"},
    {"AC", "HL"},
    {"PR", "HLN"},
    {"UI", "RN"},
    {"S", "UC"},
    {"C", "NLH"},
    {"I", "NLH"},
    {"A", "NLH"},
}};

constexpr std::string_view kPrefix = "CVSS:3.1/";

std::array<int, 8> to_indices(const CvssVector& v) {
  return {static_cast<int>(v.attack_vector),     static_cast<int>(v.attack_complexity),
          static_cast<int>(v.privileges_required), static_cast<int>(v.user_interaction),
          static_cast<int>(v.scope),             static_cast<int>(v.confidentiality),
          static_cast<int>(v.integrity),         static_cast<int>(v.availability)};
}

CvssVector from_indices(const std::array<int, 8>& idx) {
  CvssVector v;
  v.attack_vector = static_cast<AttackVector>(idx[0]);
  v.attack_complexity = static_cast<AttackComplexity>(idx[1]);
  v.privileges_required = static_cast<PrivilegesRequired>(idx[2]);
  v.user_interaction = static_cast<UserInteraction>(idx[3]);
  v.scope = static_cast<Scope>(idx[4]);
  v.confidentiality = static_cast<CiaImpact>(idx[5]);
  v.integrity = static_cast<CiaImpact>(idx[6]);
  v.availability = static_cast<CiaImpact>(idx[7]);
  return v;
}

double av_weight(AttackVector v) {
  switch (v) {
    case AttackVector::network: return 0.85;
    case AttackVector::adjacent: return 0.62;
    case AttackVector::local: return 0.55;
    case AttackVector::physical: return 0.2;
  }
  return 0;
}

double pr_weight(PrivilegesRequired v, Scope s) {
  switch (v) {
    case PrivilegesRequired::none: return 0.85;
    case PrivilegesRequired::low: return s == Scope::changed ? 0.68 : 0.62;
    case PrivilegesRequired::high: return s == Scope::changed ? 0.5 : 0.27;
  }
  return 0;
}

double cia_weight(CiaImpact v) {
  switch (v) {
    case CiaImpact::high: return 0.56;
    case CiaImpact::low: return 0.22;
    case CiaImpact::none: return 0;
  }
  return 0;
}

}  // namespace

CvssVector parse_cvss_vector(std::string_view text) {
  auto fail = [&](const std::string& message, std::size_t at) -> void {
    throw ParseError(message, 0, static_cast<int>(at) + 1);
  };
  if (text.substr(0, kPrefix.size()) != kPrefix) fail("malformed prefix: expected 'CVSS:3.1/'", 0);

  std::array<int, 8> idx{};
  std::array<bool, 8> seen{};
  std::size_t pos = kPrefix.size();
  while (pos <= text.size()) {
    auto end = text.find('/', pos);
    if (end == std::string_view::npos) end = text.size();
    auto token = text.substr(pos, end - pos);
    auto colon = token.find(':');
    if (colon == std::string_view::npos || colon == 0) fail("malformed metric '" + std::string(token) + "'", pos);
    auto key = token.substr(0, colon);
    auto value = token.substr(colon + 1);
    auto metric = std::find_if(kMetrics.begin(), kMetrics.end(), [&](const Metric& m) { return m.key == key; });
    if (metric == kMetrics.end()) fail("unknown metric " + std::string(key), pos);
    auto m = static_cast<std::size_t>(metric - kMetrics.begin());
    if (seen[m]) fail("duplicate metric " + std::string(key), pos);
    seen[m] = true;
    auto letter = value.size() == 1 ? metric->letters.find(value[0]) : std::string_view::npos;
    if (letter == std::string_view::npos) {
      fail("bad value '" + std::string(value) + "' for metric " + std::string(key), pos + colon + 1);
    }
    idx[m] = static_cast<int>(letter);
    pos = end + 1;
  }
  for (std::size_t m = 0; m < kMetrics.size(); ++m) {
    if (!seen[m]) fail("missing metric " + std::string(kMetrics[m].key), text.size());
  }
  return from_indices(idx);
}

std::string render_cvss_vector(const CvssVector& v) {
  std::string out(kPrefix);
  auto idx = to_indices(v);
  for (std::size_t m = 0; m < kMetrics.size(); ++m) {
    if (m) out += '/';
    out += kMetrics[m].key;
    out += ':';
    out += kMetrics[m].letters[static_cast<std::size_t>(idx[m])];
  }
  return out;
}

std::vector<CvssVector> all_cvss_vectors() {
  std::vector<CvssVector> out;
  std::array<int, 8> idx{};
  while (true) {
    out.push_back(from_indices(idx));
    std::size_t m = kMetrics.size();
    while (m > 0) {
      --m;
      if (++idx[m] < static_cast<int>(kMetrics[m].letters.size())) break;
      idx[m] = 0;
      if (m == 0) return out;
    }
  }
}

std::string_view to_string(CvssRating r) {
  static constexpr std::array<std::string_view, 5> kNames = {"None", "Low", "Medium", "High", "Critical"};
  return kNames[static_cast<std::size_t>(r)];
}

std::string CvssScore::text() const { return std::to_string(tenths / 10) + "." + std::to_string(tenths % 10); }

CvssRating rating_for(int tenths) {
  if (tenths == 0) return CvssRating::none;
  if (tenths < 40) return CvssRating::low;
  if (tenths < 70) return CvssRating::medium;
  if (tenths < 90) return CvssRating::high;
  return CvssRating::critical;
}

int roundup_tenths(double x) {
  const auto scaled = static_cast<long long>(std::llround(x * 100000.0));
  if (scaled % 10000 == 0) return static_cast<int>(scaled / 10000);
  return static_cast<int>(scaled / 10000 + 1);
}

CvssScore cvss_base_score(const CvssVector& v) {
  const bool changed = v.scope == Scope::changed;
  const double iss = 1.0 - (1.0 - cia_weight(v.confidentiality)) * (1.0 - cia_weight(v.integrity)) *
                               (1.0 - cia_weight(v.availability));
  const double impact =
      changed ? 7.52 * (iss - 0.029) - 3.25 * std::pow(iss - 0.02, 15) : 6.42 * iss;
  const double exploitability = 8.22 * av_weight(v.attack_vector) *
                                (v.attack_complexity == AttackComplexity::low ? 0.77 : 0.44) *
                                pr_weight(v.privileges_required, v.scope) *
                                (v.user_interaction == UserInteraction::none ? 0.85 : 0.62);
  int tenths = 0;
  if (impact > 0) {
    const double raw = changed ? 1.08 * (impact + exploitability) : impact + exploitability;
    tenths = roundup_tenths(std::min(raw, 10.0));
  }
  return {tenths, rating_for(tenths)};
}

std::string_view to_string(RiskLevel level) {
  static constexpr std::array<std::string_view, 4> kNames = {"low", "medium", "high", "critical"};
  return kNames[static_cast<std::size_t>(level)];
}

std::optional<RiskLevel> parse_risk_level(std::string_view s) {
  for (auto level : {RiskLevel::low, RiskLevel::medium, RiskLevel::high, RiskLevel::critical}) {
    if (to_string(level) == s) return level;
  }
  return std::nullopt;
}

RiskLevel risk_level(int likelihood, int impact, const taxonomy::RiskBands& bands) {
  if (likelihood < 1 || likelihood > 5) throw DomainError("likelihood " + std::to_string(likelihood) + " outside 1-5");
  if (impact < 1 || impact > 5) throw DomainError("impact " + std::to_string(impact) + " outside 1-5");
  const int sum = likelihood + impact;
  if (sum >= bands.critical) return RiskLevel::critical;
  if (sum >= bands.high) return RiskLevel::high;
  if (sum >= bands.medium) return RiskLevel::medium;
  return RiskLevel::low;
}

int derive_impact(const std::vector<int>& criticalities, std::optional<int> override_impact) {
  if (override_impact) {
    if (*override_impact < 1 || *override_impact > 5) {
      throw DomainError("impact override " + std::to_string(*override_impact) + " outside 1-5");
    }
    return *override_impact;
  }
  int impact = 1;
  for (int c : criticalities) impact = std::max(impact, c);
  return impact;
}

int derive_impact(const enumeration::ThreatScenario& scenario, const model::DeviceModel& model) {
  std::vector<int> criticalities;
  for (const auto& id : scenario.assets) {
    if (const auto* a = model.find_asset(id)) criticalities.push_back(a->criticality);
  }
  return derive_impact(criticalities, scenario.impact_override);
}

bool is_active(const enumeration::ThreatScenario& scenario) {
  return scenario.status != enumeration::ScenarioStatus::rejected &&
         scenario.status != enumeration::ScenarioStatus::mitigated;
}

std::optional<RiskRecord> assess_scenario(const enumeration::ThreatScenario& scenario,
                                          const model::DeviceModel& model,
                                          const taxonomy::TaxonomyCatalog& catalog) {
  if (!scenario.likelihood) return std::nullopt;
  RiskRecord r;
  r.scenario = scenario.number;
  if (scenario.cvss) {
    auto vector = parse_cvss_vector(*scenario.cvss);
    r.cvss_vector = render_cvss_vector(vector);
    r.cvss = cvss_base_score(vector);
  }
  r.likelihood = *scenario.likelihood;
  r.impact = derive_impact(scenario, model);
  r.level = risk_level(r.likelihood, r.impact, catalog.risk_bands);
  return r;
}

std::vector<RiskRecord> assess_scenarios(const std::vector<enumeration::ThreatScenario>& scenarios,
                                         const model::DeviceModel& model,
                                         const taxonomy::TaxonomyCatalog& catalog) {
  std::vector<RiskRecord> out;
  for (const auto& s : scenarios) {
    if (!is_active(s)) continue;
    if (auto r = assess_scenario(s, model, catalog)) out.push_back(std::move(*r));
  }
  return out;
}

nlohmann::json to_json(const RiskRecord& r) {
  nlohmann::json j = {{"scenario", r.scenario.str()},
                      {"cvss_vector", r.cvss_vector ? nlohmann::json(*r.cvss_vector) : nlohmann::json()},
                      {"cvss_score", r.cvss ? nlohmann::json(r.cvss->text()) : nlohmann::json()},
                      {"cvss_rating", r.cvss ? nlohmann::json(to_string(r.cvss->rating)) : nlohmann::json()},
                      {"likelihood", r.likelihood},
                      {"impact", r.impact},
                      {"risk_level", to_string(r.level)}};
  return j;
}

RiskRecord risk_record_from_json(const nlohmann::json& j) {
  try {
    RiskRecord r;
    r.scenario = enumeration::ScenarioNumber::parse(j.at("scenario").get<std::string>());
    if (j.contains("cvss_vector") && !j["cvss_vector"].is_null()) {
      auto vector = parse_cvss_vector(j["cvss_vector"].get<std::string>());
      r.cvss_vector = render_cvss_vector(vector);
      r.cvss = cvss_base_score(vector);
    }
    r.likelihood = j.at("likelihood").get<int>();
    r.impact = j.at("impact").get<int>();
    auto level = parse_risk_level(j.at("risk_level").get<std::string>());
    if (!level) throw ParseError("unknown risk level '" + j["risk_level"].get<std::string>() + "'", 0, 0);
    r.level = *level;
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(e.what(), 0, 0, "risk record");
  }
}

}  // namespace threatsmith::scoring
