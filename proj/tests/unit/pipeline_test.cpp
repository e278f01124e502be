// Copyright 2026 The Threatsmith Authors
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

#include "threatsmith/pipeline.hpp"

#include <gtest/gtest.h>

#include "test_support.hpp"
#include "threatsmith/error.hpp"

namespace threatsmith::pipeline {
namespace {

using enumeration::ScenarioStatus;
using nlohmann::json;

const taxonomy::TaxonomyCatalog& catalog() { return taxonomy::load_default_catalog(); }
const enumeration::RuleSet& rules() { return enumeration::load_default_ruleset(); }
model::DeviceModel actuator() { return model::parse_model(testing_support::fixture("actuator.tm"), "actuator.tm"); }

const enumeration::ThreatScenario* find(const Analysis& a, const std::string& number) {
  for (const auto& s : a.scenarios) {
    if (s.number.str() == number) return &s;
  }
  return nullptr;
}

TEST(Patch, ParsesAndCanonicalizes) {
  auto p = patch_from_json(json::parse(
      R"({"status": "confirmed", "cvss": "CVSS:3.1/A:H/I:H/C:H/S:U/UI:N/PR:N/AC:L/AV:N", "likelihood": 3, "impact": null, "revision": 9})"));
  EXPECT_EQ(p.status, ScenarioStatus::confirmed);
  ASSERT_TRUE(p.cvss.has_value());
  EXPECT_EQ(*p.cvss, std::optional<std::string>("CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H"));
  EXPECT_EQ(p.likelihood, std::optional<std::optional<int>>(3));
  ASSERT_TRUE(p.impact_override.has_value());
  EXPECT_FALSE(p.impact_override->has_value());
  EXPECT_EQ(patch_from_json(to_json(p)), p);
  EXPECT_TRUE(patch_from_json(json::object()).empty());
}

TEST(Patch, RejectsBadInput) {
  EXPECT_THROW(patch_from_json(json::parse(R"({"colour": "red"})")), ParseError);
  EXPECT_THROW(patch_from_json(json::parse(R"({"status": "done"})")), ParseError);
  EXPECT_THROW(patch_from_json(json::parse(R"({"likelihood": 6})")), ParseError);
  EXPECT_THROW(patch_from_json(json::parse(R"({"impact": "high"})")), ParseError);
  EXPECT_THROW(patch_from_json(json::parse(R"({"cvss": "CVSS:3.1/AV:Q"})")), ParseError);
  EXPECT_THROW(patch_from_json(json::parse("[1]")), ParseError);
}

TEST(Patch, LaterFieldsWin) {
  ScenarioPatch a;
  a.status = ScenarioStatus::confirmed;
  a.likelihood = 2;
  ScenarioPatch b;
  b.likelihood = std::optional<int>{};
  a.merge(b);
  EXPECT_EQ(a.status, ScenarioStatus::confirmed);
  ASSERT_TRUE(a.likelihood.has_value());
  EXPECT_FALSE(a.likelihood->has_value());
}

TEST(Analyze, DefaultRunScoresDefaultPinFamily) {
  auto a = analyze(actuator(), catalog(), rules());
  EXPECT_EQ(count_errors(a.findings), 0u);
  EXPECT_EQ(a.records.size(), 4u);
  EXPECT_FALSE(a.attack_surface.empty());
}

TEST(Analyze, MitigationToggleMarksFamilyMitigated) {
  Options o;
  o.mitigations["change_default_pin"] = true;
  auto a = analyze(actuator(), catalog(), rules(), o);
  for (const auto* n : {"1", "1.1", "1.2", "1.3"}) {
    ASSERT_NE(find(a, n), nullptr) << n;
    EXPECT_EQ(find(a, n)->status, ScenarioStatus::mitigated) << n;
  }
  EXPECT_TRUE(a.records.empty());
  auto statuses_unchanged = [&](const Analysis& x) {
    for (const auto& s : x.scenarios) {
      if (s.number.parts()[0] != 1 && s.status != ScenarioStatus::candidate) return false;
    }
    return true;
  };
  EXPECT_TRUE(statuses_unchanged(a));
}

TEST(Analyze, UnknownIdsSuggestAlternatives) {
  Options o;
  o.mitigations["change_default_pn"] = true;
  try {
    analyze(actuator(), catalog(), rules(), o);
    FAIL();
  } catch (const NotFoundError& e) {
    EXPECT_NE(std::string(e.what()).find("change_default_pin"), std::string::npos) << e.what();
  }
  Options p;
  p.profile = "insidr";
  try {
    analyze(actuator(), catalog(), rules(), p);
    FAIL();
  } catch (const NotFoundError& e) {
    EXPECT_NE(std::string(e.what()).find("insider"), std::string::npos) << e.what();
  }
}

TEST(Analyze, PatchesDriveTriageAndScores) {
  Options o;
  ScenarioPatch reject;
  reject.status = ScenarioStatus::rejected;
  o.patches["1.1"] = reject;
  ScenarioPatch score;
  score.cvss = std::optional<std::string>("CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H");
  score.likelihood = 2;
  o.patches["2"] = score;
  auto a = analyze(actuator(), catalog(), rules(), o);
  EXPECT_EQ(find(a, "1.1")->status, ScenarioStatus::rejected);
  bool has_2 = false;
  for (const auto& r : a.records) {
    EXPECT_NE(r.scenario.str(), "1.1");
    if (r.scenario.str() == "2") {
      has_2 = true;
      EXPECT_EQ(r.cvss->tenths, 98);
      EXPECT_EQ(r.likelihood, 2);
    }
  }
  EXPECT_TRUE(has_2);
  EXPECT_EQ(a.records.size(), 4u);
}

TEST(Analyze, ProfileSwitchNeverShrinksRegister) {
  auto m = actuator();
  std::size_t last = 0;
  for (const auto* id : {"remote_criminal", "insider", "nation_state"}) {
    Options o;
    o.profile = id;
    auto a = analyze(m, catalog(), rules(), o);
    if (std::string(id) != "insider") {
      EXPECT_GE(a.scenarios.size(), last) << id;
      last = a.scenarios.size();
    }
  }
  Options all;
  EXPECT_EQ(analyze(m, catalog(), rules(), all).scenarios.size(), last);
}

TEST(Report, TitleAndProvenance) {
  auto m = actuator();
  Options o;
  o.profile = "insider";
  auto doc = make_report(analyze(m, catalog(), rules(), o), catalog(), rules(), o, default_title(m), "now");
  EXPECT_EQ(doc.title, "Threat analysis: Electric valve actuator");
  EXPECT_EQ(doc.generated_at, "now");
  EXPECT_EQ(doc.summary.profile, "insider");
  EXPECT_EQ(default_title(model::DeviceModel{}), "Threat analysis: device");
}

}  // namespace
}  // namespace threatsmith::pipeline
