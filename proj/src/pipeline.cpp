// Copyright 2026 The Threatsmith Authors
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

#include "threatsmith/pipeline.hpp"

#include <algorithm>

#include "threatsmith/error.hpp"
#include "threatsmith/strings.hpp"

namespace threatsmith::pipeline {

namespace {

[[noreturn]] void patch_fail(const std::string& message) { throw ParseError(message, 0, 0); }

std::optional<int> ranged(const nlohmann::json& v, const char* key) {
  if (v.is_null()) return std::nullopt;
  if (!v.is_number_integer()) patch_fail(std::string("'") + key + "' must be an integer or null");
  int x = v.get<int>();
  if (x < 1 || x > 5) patch_fail(std::string("'") + key + "' out of range 1-5 (got " + std::to_string(x) + ")");
  return x;
}

template <typename T>
nlohmann::json opt(const std::optional<T>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json();
}

}  // namespace

void ScenarioPatch::merge(const ScenarioPatch& later) {
  if (later.status) status = later.status;
  if (later.cvss) cvss = later.cvss;
  if (later.likelihood) likelihood = later.likelihood;
  if (later.impact_override) impact_override = later.impact_override;
}

ScenarioPatch patch_from_json(const nlohmann::json& j) {
  if (!j.is_object()) patch_fail("patch body must be a JSON object");
  ScenarioPatch p;
  for (const auto& [key, v] : j.items()) {
    if (key == "revision") continue;
    if (key == "status") {
      if (!v.is_string()) patch_fail("'status' must be a string");
      auto s = enumeration::parse_scenario_status(v.get<std::string>());
      if (!s) patch_fail("unknown status '" + v.get<std::string>() + "'; expected candidate, confirmed, rejected or mitigated");
      p.status = *s;
    } else if (key == "cvss") {
      if (v.is_null()) {
        p.cvss = std::optional<std::string>{};
      } else {
        if (!v.is_string()) patch_fail("'cvss' must be a vector string or null");
        auto vector = scoring::parse_cvss_vector(v.get<std::string>());
        p.cvss = scoring::render_cvss_vector(vector);
      }
    } else if (key == "likelihood") {
      p.likelihood = ranged(v, "likelihood");
    } else if (key == "impact") {
      p.impact_override = ranged(v, "impact");
    } else {
      patch_fail("unknown patch field '" + key + "'");
    }
  }
  return p;
}

nlohmann::json to_json(const ScenarioPatch& p) {
  nlohmann::json j = nlohmann::json::object();
  if (p.status) j["status"] = enumeration::to_string(*p.status);
  if (p.cvss) j["cvss"] = opt(*p.cvss);
  if (p.likelihood) j["likelihood"] = opt(*p.likelihood);
  if (p.impact_override) j["impact"] = opt(*p.impact_override);
  return j;
}

Analysis analyze(const model::DeviceModel& model, const taxonomy::TaxonomyCatalog& catalog,
                 const enumeration::RuleSet& rules, const Options& options) {
  Analysis a;
  a.effective_model = model;
  for (const auto& [id, enabled] : options.mitigations) {
    auto it = std::find_if(a.effective_model.mitigations.begin(), a.effective_model.mitigations.end(),
                           [&](const model::Mitigation& m) { return m.id == id; });
    if (it == a.effective_model.mitigations.end()) {
      std::vector<std::string> ids;
      for (const auto& m : model.mitigations) ids.push_back(m.id);
      throw NotFoundError("mitigation", id, text::nearest(id, ids));
    }
    it->enabled = enabled;
  }
  const taxonomy::ThreatSourceProfile* profile = nullptr;
  if (options.profile) {
    profile = catalog.find_profile(*options.profile);
    if (!profile) {
      std::vector<std::string> ids;
      for (const auto& p : catalog.source_profiles) ids.push_back(p.id);
      throw NotFoundError("threat-source profile", *options.profile, text::nearest(*options.profile, ids));
    }
  }

  a.findings = model::validate_model(a.effective_model, catalog);
  a.attack_surface = enumeration::enumerate_attack_surface(a.effective_model, catalog, rules);
  auto scenarios = enumeration::enumerate_threat_scenarios(a.effective_model, catalog, rules);
  for (auto& s : scenarios) {
    auto it = options.patches.find(s.number.str());
    if (it == options.patches.end()) continue;
    const auto& p = it->second;
    if (p.status) s.status = *p.status;
    if (p.cvss) s.cvss = *p.cvss;
    if (p.likelihood) s.likelihood = *p.likelihood;
    if (p.impact_override) s.impact_override = *p.impact_override;
  }
  enumeration::apply_mitigations(scenarios, a.effective_model);
  a.scenarios = profile ? enumeration::filter_by_source_profile(scenarios, *profile) : std::move(scenarios);
  a.records = scoring::assess_scenarios(a.scenarios, a.effective_model, catalog);
  return a;
}

std::string default_title(const model::DeviceModel& model) {
  return "Threat analysis: " + (model.device.name.empty() ? std::string("device") : model.device.name);
}

reporting::ReportDocument make_report(const Analysis& analysis, const taxonomy::TaxonomyCatalog& catalog,
                                      const enumeration::RuleSet& rules, const Options& options,
                                      const std::string& title, const std::string& generated_at) {
  reporting::ReportDocument doc;
  doc.title = title;
  doc.generated_at = generated_at;
  doc.summary = reporting::summarize_model(analysis.effective_model);
  doc.summary.catalog_version = catalog.version;
  doc.summary.ruleset = rules.name + (rules.version.empty() ? "" : " " + rules.version);
  for (const auto& o : rules.overlays) doc.summary.ruleset += " + " + o;
  doc.summary.profile = options.profile.value_or("");
  doc.scenarios = reporting::build_scenario_table(analysis.scenarios, analysis.effective_model);
  doc.risk_register = reporting::build_risk_register(analysis.scenarios, analysis.records);
  doc.attack_surface = reporting::build_attack_surface_listing(analysis.attack_surface);
  return doc;
}

}  // namespace threatsmith::pipeline
