// Copyright 2026 The Threatsmith Authors
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

#include "threatsmith/device_model.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "test_support.hpp"
#include "threatsmith/error.hpp"

namespace threatsmith::model {
namespace {

const taxonomy::TaxonomyCatalog& catalog() { return taxonomy::load_default_catalog(); }

DeviceModel actuator() { return parse_model(testing_support::fixture("actuator.tm"), "actuator.tm"); }

std::string parse_error(std::string_view text) {
  try {
    parse_model(text);
  } catch (const ParseError& e) {
    return e.message();
  }
  return "";
}

std::set<std::string> codes(const Findings& findings) {
  std::set<std::string> out;
  for (const auto& f : findings) out.insert(f.code);
  return out;
}

TEST(ParseModel, Minimal) {
  auto m = parse_model(testing_support::fixture("minimal.tm"));
  ASSERT_EQ(m.components.size(), 1u);
  EXPECT_EQ(m.components[0].kind, "memory");
  EXPECT_EQ(m.components[0].id, "mem1");
  EXPECT_TRUE(derive_data_flows(m, catalog()).empty());
  EXPECT_EQ(validate_model(m, catalog()), Findings{});
}

TEST(ParseModel, ActuatorFixture) {
  auto m = actuator();
  EXPECT_EQ(m.device.name, "Electric valve actuator");
  EXPECT_EQ(m.device.environment, (std::vector<std::string>{"critical_infrastructure", "water"}));
  EXPECT_EQ(m.components.size(), 4u);
  EXPECT_EQ(m.interfaces.size(), 2u);
  EXPECT_EQ(m.vulnerabilities.size(), 1u);
  EXPECT_EQ(m.interfaces[0].transport, "bluetooth");
  EXPECT_TRUE(m.interfaces[0].authentication);
  const auto& v = m.vulnerabilities[0];
  EXPECT_EQ(v.display_title(), "Default PIN (users did not change it)");
  EXPECT_EQ(v.action, "Authenticate using default PIN");
  EXPECT_EQ(v.affects, (std::vector<std::string>{"mobile_app", "local_hmi"}));
  EXPECT_EQ(v.likelihood, 4);
  EXPECT_EQ(m.find_interaction("manage_accounts")->direction, Direction::both);
  EXPECT_EQ(m.find_asset("firmware_ip")->on, (std::vector<std::string>{"flash", "mcu"}));
  EXPECT_EQ(m.mitigations[0].enabled, false);
}

TEST(ParseModel, Errors) {
  EXPECT_EQ(parse_error("component microprocessor cpu\ncomponent memory cpu\n"), "duplicate id 'cpu'");
  EXPECT_EQ(parse_error("gadget x\n"), "unknown section 'gadget'");
  EXPECT_EQ(parse_error("interface local_hmi h { colour red }\n"), "unknown key 'colour' in interface");
  EXPECT_EQ(parse_error("interface local_hmi h { auth maybe }\n"), "'auth' must be true or false");
  EXPECT_EQ(parse_error("interaction i { direction sideways }\n"), "direction must be in, out or both");
  EXPECT_EQ(parse_error("asset common.passwords p { criticality high }\n"), "'criticality' must be an integer");
  EXPECT_EQ(parse_error("component memory m { name \"x\n"), "unterminated string");
  EXPECT_EQ(parse_error("component memory m {\n  name \"x\"\n"), "unterminated block; expected '}'");
  EXPECT_EQ(parse_error("component memory m { name \"a\"; name \"b\" }\n"), "duplicate key 'name'");
  EXPECT_EQ(parse_error("device \"a\"\ndevice \"b\"\n"), "duplicate section 'device'");
  EXPECT_EQ(parse_error("component memory m @\n"), "unexpected character '@'");
  try {
    parse_model("component memory a\n\ncomponent memory a\n", "m.tm");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_EQ(e.column(), 18);
    EXPECT_EQ(std::string(e.what()), "m.tm:3:18: duplicate id 'a'");
  }
}

TEST(ParseModel, SyntaxVariants) {
  auto m = parse_model(
      "// c++ style comment\n"
      "component memory m { name \"Flash\"; vendor \"Acme\"; size 16MB }\n"
      "interaction i {\n  data a,\n    b, \"c d\"\n}\n");
  EXPECT_EQ(m.components[0].properties, (std::map<std::string, std::string>{{"size", "16MB"}, {"vendor", "Acme"}}));
  EXPECT_EQ(m.interactions[0].data, (std::vector<std::string>{"a", "b", "c d"}));
}

TEST(RenderModel, RoundTrip) {
  auto m = actuator();
  auto text = render_model(m);
  EXPECT_EQ(parse_model(text), m);
  EXPECT_EQ(render_model(parse_model(text)), text);
  EXPECT_EQ(model_from_json(to_json(m)), m);
  EXPECT_EQ(to_json(model_from_json(to_json(m))), to_json(m));
  auto minimal = parse_model("component memory mem1");
  EXPECT_EQ(render_model(minimal), "component memory mem1\n");
}

TEST(RenderModel, QuotesAwkwardValues) {
  DeviceModel m;
  m.components.push_back({"c1", "memory", "Say \"hi\"\n", {{"note", "a\\b"}}, {}});
  m.interactions.push_back({"i1", "a", "b", "", {"two words", "x"}, Direction::out, "a b c", "", {}, {}});
  EXPECT_EQ(parse_model(render_model(m)), m);
}

TEST(ModelJson, Errors) {
  EXPECT_THROW(model_from_json(nlohmann::json::parse(R"({"widgets": []})")), ParseError);
  EXPECT_THROW(model_from_json(nlohmann::json::parse(R"({"components": [{"id": "a", "kind": "memory"},
      {"id": "a", "kind": "memory"}]})")),
               ParseError);
  EXPECT_THROW(model_from_json(nlohmann::json::parse(R"({"components": [{"kind": "memory"}]})")), ParseError);
}

TEST(ValidateModel, ActuatorIsClean) { EXPECT_EQ(validate_model(actuator(), catalog()), Findings{}); }

TEST(ValidateModel, UnknownComponentKind) {
  auto m = parse_model("component quantum_romulator q\n");
  auto f = validate_model(m, catalog());
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(f[0].code, "unknown-component-kind");
  EXPECT_EQ(f[0].severity, Severity::error);
  EXPECT_NE(f[0].message.find("unknown component kind"), std::string::npos);
  EXPECT_EQ(f[0].line, 1);
}

TEST(ValidateModel, CriticalityOutOfRange) {
  auto m = parse_model("component memory m\nasset common.passwords p { criticality 9; goals integrity }\n");
  auto f = validate_model(m, catalog());
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(f[0].code, "criticality-range");
  EXPECT_NE(f[0].message.find("criticality out of range 1–5"), std::string::npos);
  EXPECT_EQ(f[0].line, 2);
}

TEST(ValidateModel, AssetWithoutGoalsIsWarning) {
  auto m = parse_model("component memory m\nasset common.passwords p { criticality 3 }\n");
  auto f = validate_model(m, catalog());
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(f[0].severity, Severity::warning);
  EXPECT_EQ(count_errors(f), 0u);
}

TEST(ValidateModel, ReferenceErrors) {
  auto m = parse_model(
      "interface bluetooth_low_energy b { component ghost }\n"
      "actor janitor j\n"
      "interaction i { actor nobody; via b; abuse nefarious.levitation; assets vault }\n"
      "asset common.passwords p { stakeholder user; goals bravery; on ghost }\n"
      "vulnerability v { affects nowhere; threat nefarious.data_tampering; cvss \"CVSS:3.1/AV:N\"; likelihood 0 }\n"
      "mitigation x { mitigates unknown }\n");
  auto c = codes(validate_model(m, catalog()));
  for (const char* want : {"no-components", "unknown-interface-kind", "unresolved-reference", "unknown-actor-role",
                           "unknown-threat", "stakeholder-mismatch", "unknown-security-goal", "invalid-cvss",
                           "likelihood-range"}) {
    EXPECT_TRUE(c.count(want)) << want;
  }
}

TEST(ValidateModel, DuplicateIdsInBuiltModels) {
  DeviceModel m;
  m.components.push_back({"a", "memory", "", {}, {}});
  m.components.push_back({"a", "memory", "", {}, {}});
  EXPECT_TRUE(codes(validate_model(m, catalog())).count("duplicate-id"));
}

TEST(DataFlows, ActuatorAuthentication) {
  auto flows = derive_data_flows(actuator(), catalog());
  auto it = std::find_if(flows.begin(), flows.end(), [](const DataFlow& f) { return f.item == "credentials"; });
  ASSERT_NE(it, flows.end());
  EXPECT_EQ(it->source, (Endpoint{"operator", ElementKind::external_entity}));
  EXPECT_EQ(it->sink, (Endpoint{"application", ElementKind::process}));
  EXPECT_EQ(it->via, "mobile_app");
  EXPECT_EQ(it->direction, Direction::in);
  EXPECT_EQ(std::count_if(flows.begin(), flows.end(), [](const DataFlow& f) { return f.item == "credentials"; }), 1);
  // 3 one-way interactions with one item each, plus one bidirectional.
  EXPECT_EQ(flows.size(), 5u);
  EXPECT_TRUE(std::is_sorted(flows.begin(), flows.end(), [](const auto& a, const auto& b) { return a.id < b.id; }));
}

TEST(DataFlows, BidirectionalProduct) {
  auto m = parse_model(
      "component application app\ninterface local_hmi h { component app }\nactor operator op\n"
      "interaction i { actor op; via h; data a, b; direction both }\n");
  auto flows = derive_data_flows(m, catalog());
  EXPECT_EQ(flows.size(), 4u);
  std::set<std::string> ids;
  for (const auto& f : flows) ids.insert(f.id);
  EXPECT_EQ(ids.size(), 4u);
}

TEST(DataFlows, DataComponentsAreStores) {
  auto m = parse_model(
      "component log_data logs\ninterface removable_media usb { component logs }\nactor maintenance t\n"
      "interaction export { actor t; via usb; data events; direction out }\n");
  auto flows = derive_data_flows(m, catalog());
  ASSERT_EQ(flows.size(), 1u);
  EXPECT_EQ(flows[0].source, (Endpoint{"logs", ElementKind::data_store}));
  EXPECT_EQ(flows[0].sink.kind, ElementKind::external_entity);
}

TEST(DataFlows, IdempotentAndOrderInsensitive) {
  auto m = actuator();
  auto flows = derive_data_flows(m, catalog());
  EXPECT_EQ(derive_data_flows(m, catalog()), flows);
  std::mt19937 rng(7);
  for (int i = 0; i < 10; ++i) {
    auto shuffled = m;
    std::shuffle(shuffled.interactions.begin(), shuffled.interactions.end(), rng);
    std::shuffle(shuffled.actors.begin(), shuffled.actors.end(), rng);
    EXPECT_EQ(derive_data_flows(shuffled, catalog()), flows);
  }
}

TEST(DataFlows, IdsStableUnderUnrelatedEdits) {
  auto m = actuator();
  auto before = derive_data_flows(m, catalog());
  auto edited = m;
  edited.interactions.push_back({"extra", "operator", "local_hmi", "Read status", {"status"}, Direction::out,
                                 std::nullopt, "", {}, {}});
  auto after = derive_data_flows(edited, catalog());
  for (const auto& f : before) {
    EXPECT_NE(std::find(after.begin(), after.end(), f), after.end()) << f.id;
  }
  EXPECT_EQ(after.size(), before.size() + 1);
}

}  // namespace
}  // namespace threatsmith::model
