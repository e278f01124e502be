// Copyright 2026 The Threatsmith Authors
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

#include "threatsmith/cli.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles/cutset_oracle.hpp"
#include "oracles/cvss_oracle.hpp"
#include "test_support.hpp"
#include "threatsmith/attack_tree.hpp"
#include "threatsmith/device_model.hpp"

namespace threatsmith::cli {
namespace {

namespace fs = std::filesystem;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path write_temp(const std::string& name, const std::string& content) {
  auto path = fs::temp_directory_path() / ("threatsmith-cli-" + std::to_string(::getpid()) + "-" + name);
  std::ofstream(path, std::ios::binary) << content;
  return path;
}

TEST(Cli, ValidateCleanFixture) {
  auto r = run({"validate", testing_support::fixture_path("actuator.tm")});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out, "0 errors, 0 warnings\n");
}

TEST(Cli, ValidateReportsErrorFindings) {
  auto path = write_temp("bad.tm", "component gizmo g {}\ninterface ethernet e { component missing }\n");
  auto r = run({"validate", path.string()});
  EXPECT_EQ(r.code, kExitFindings);
  EXPECT_NE(r.out.find("error: unknown-component-kind"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("(line 1)"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("2 errors"), std::string::npos) << r.out;
  fs::remove(path);
}

TEST(Cli, ParseErrorsCarryPosition) {
  auto path = write_temp("syntax.tm", "device \"x\" {\n  version @\n}\n");
  auto r = run({"validate", path.string()});
  EXPECT_EQ(r.code, kExitFindings);
  EXPECT_NE(r.err.find(":2:11: unexpected character '@'"), std::string::npos) << r.err;
  fs::remove(path);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run({}).code, kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(run({"validate"}).code, kExitUsage);
  EXPECT_EQ(run({"tree", "paint", testing_support::fixture_path("fig6.atk")}).code, kExitUsage);
  auto missing = run({"validate", "/nonexistent/model.tm"});
  EXPECT_EQ(missing.code, kExitUsage);
  EXPECT_NE(missing.err.find("cannot read"), std::string::npos);
  auto profile = run({"enumerate", testing_support::fixture_path("actuator.tm"), "--profile", "insidr"});
  EXPECT_EQ(profile.code, kExitUsage);
  EXPECT_NE(profile.err.find("did you mean 'insider'"), std::string::npos) << profile.err;
}

TEST(Cli, HelpAndVersion) {
  auto help = run({"--help"});
  EXPECT_EQ(help.code, kExitOk);
  EXPECT_NE(help.out.find("report"), std::string::npos);
  EXPECT_EQ(run({"--version"}).out, "threatsmith 1.0.0\n");
}

TEST(Cli, ScoreCvssMatchesOracle) {
  const std::string v = "CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H";
  auto r = run({"score", "cvss", v});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_EQ(r.out, "9.8 Critical\n");
  EXPECT_EQ(oracle::base_score_tenths(v), 98);
  EXPECT_EQ(run({"score", "cvss", "CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:N/I:N/A:N"}).out, "0.0 None\n");
  EXPECT_EQ(run({"score", "cvss", "CVSS:3.1/AV:N"}).code, kExitFindings);
  EXPECT_EQ(run({"score", "risk", "5", "5"}).out, "critical\n");
  EXPECT_EQ(run({"score", "risk", "6", "1"}).code, kExitUsage);
}

TEST(Cli, TreeCutSetsMatchBruteForce) {
  auto path = testing_support::fixture_path("fig6.atk");
  auto r = run({"tree", "cutsets", path});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  auto tree = attack_tree::parse_tree(testing_support::fixture("fig6.atk"));
  std::string expected;
  for (const auto& cs : oracle::brute_force_cut_sets(tree)) {
    ASSERT_EQ(cs.size(), 1u);
    expected += "{" + *cs.begin() + "}\n";
  }
  EXPECT_EQ(r.out, expected + "4 minimal cut sets\n");
}

TEST(Cli, TreeCostAndPrune) {
  auto path = testing_support::fixture_path("fig6.atk");
  auto cost = run({"tree", "cost", path});
  EXPECT_EQ(cost.code, kExitOk);
  EXPECT_NE(cost.out.find("min cost: 4\n"), std::string::npos) << cost.out;
  auto pruned = run({"tree", "prune", path, "--profile", "remote_criminal"});
  EXPECT_EQ(pruned.code, kExitOk);
  EXPECT_NE(pruned.out.find("[id=rce"), std::string::npos);
  EXPECT_EQ(pruned.out.find("side_channel"), std::string::npos);
  auto cut = run({"tree", "cutsets", path, "--profile", "remote_criminal"});
  EXPECT_EQ(cut.out, "{rce}\n1 minimal cut set\n");
  auto capped = run({"tree", "cutsets", path, "--cap", "2"});
  EXPECT_EQ(capped.code, kExitFindings);
  EXPECT_NE(capped.err.find("exceeds cap of 2"), std::string::npos) << capped.err;
}

TEST(Cli, EnumerateMatchesGoldenTable) {
  auto r = run({"enumerate", testing_support::fixture_path("actuator.tm")});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out, testing_support::read_file(testing_support::golden_path("actuator_scenarios.md")));
  auto js = run({"enumerate", testing_support::fixture_path("actuator.tm"), "--json"});
  EXPECT_EQ(nlohmann::json::parse(js.out).size(), 95u);  // 92 top-level rows plus 3 children
  auto remote = run({"enumerate", testing_support::fixture_path("actuator.tm"), "--json", "--profile", "remote_criminal"});
  EXPECT_LT(nlohmann::json::parse(remote.out).size(), 95u);
}

TEST(Cli, RulesetOverlayAddsRules) {
  auto overlay = write_temp("extra.yaml",
                            "rules:\n"
                            "  - id: R-X-01\n"
                            "    components: [access_data_keys]\n"
                            "    stages: [end_of_life]\n"
                            "    yields: [hardware.chip:side_channel]\n"
                            "    threats: [nefarious.information_disclosure]\n"
                            "    capability: chip_lab\n"
                            "    rationale: Discarded key stores leak.\n");
  auto base = run({"enumerate", testing_support::fixture_path("actuator.tm"), "--surface"});
  auto extra = run({"enumerate", testing_support::fixture_path("actuator.tm"), "--surface", "--ruleset", overlay.string()});
  ASSERT_EQ(extra.code, kExitOk) << extra.err;
  EXPECT_NE(extra.out.find("userdb\tend_of_life\thardware.chip:side_channel\tR-X-01"), std::string::npos) << extra.out;
  EXPECT_GT(extra.out.size(), base.out.size());
  auto clash = write_temp("clash.yaml",
                          "rules:\n  - id: R-HW-03\n    components: [memory]\n    stages: [operation]\n"
                          "    yields: [hardware.chip:side_channel]\n    capability: chip_lab\n    rationale: x\n");
  auto r = run({"enumerate", testing_support::fixture_path("actuator.tm"), "--ruleset", clash.string()});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("redefines rule 'R-HW-03'"), std::string::npos) << r.err;
  fs::remove(overlay);
  fs::remove(clash);
}

TEST(Cli, ReportWritesEachFormat) {
  auto dir = fs::temp_directory_path() / ("threatsmith-cli-report-" + std::to_string(::getpid()));
  fs::remove_all(dir);
  auto model = testing_support::fixture_path("actuator.tm");
  auto md = run({"report", model, "--out", dir.string(), "--format", "md"});
  ASSERT_EQ(md.code, kExitOk) << md.err;
  EXPECT_EQ(testing_support::read_file((dir / "report.md").string()),
            testing_support::read_file(testing_support::golden_path("actuator_report.md")));
  EXPECT_EQ(run({"report", model, "--out", dir.string(), "--format", "csv"}).code, kExitOk);
  EXPECT_TRUE(fs::exists(dir / "report-csv.zip"));
  EXPECT_EQ(run({"report", model, "--out", dir.string(), "--format", "json", "--timestamp", "2026-01-01"}).code,
            kExitOk);
  auto doc = nlohmann::json::parse(testing_support::read_file((dir / "report.json").string()));
  EXPECT_EQ(doc["generated_at"], "2026-01-01");
  auto pdf = run({"report", model, "--out", dir.string(), "--format", "pdf"});
  EXPECT_EQ(pdf.code, kExitUsage);
  EXPECT_NE(pdf.err.find("supported formats: md (markdown), csv, json"), std::string::npos);
  auto mitigated = run({"report", model, "--out", dir.string(), "--format", "md", "--enable", "change_default_pin"});
  ASSERT_EQ(mitigated.code, kExitOk);
  auto text = testing_support::read_file((dir / "report.md").string());
  EXPECT_NE(text.find("## Risk register\n\n| No. | CVSS | Rating | Vector | Likelihood | Impact | Risk level |\n"
                      "| --- | --- | --- | --- | --- | --- | --- |\n\n"),
            std::string::npos);
  EXPECT_EQ(run({"report", model, "--format", "md"}).code, kExitUsage);
  fs::remove_all(dir);
}

TEST(Cli, JsonModelsAreAccepted) {
  auto m = model::parse_model(testing_support::fixture("actuator.tm"));
  auto path = write_temp("actuator.json", model::to_json(m).dump(2));
  auto a = run({"enumerate", path.string()});
  EXPECT_EQ(a.code, kExitOk) << a.err;
  EXPECT_EQ(a.out, testing_support::read_file(testing_support::golden_path("actuator_scenarios.md")));
  fs::remove(path);
}

}  // namespace
}  // namespace threatsmith::cli
