// Copyright 2026 The Threatsmith Authors
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

#include "threatsmith/service.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "test_support.hpp"
#include "threatsmith/cli.hpp"
#include "threatsmith/reporting.hpp"

namespace threatsmith::service {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path fresh_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("threatsmith-" + name + "-" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

class Client {
 public:
  explicit Client(Service& s) : service_(s) {}

  Response call(const std::string& method, const std::string& target, const std::string& body = {},
                std::map<std::string, std::string> headers = {}) {
    Request r;
    r.method = method;
    auto q = target.find('?');
    r.path = target.substr(0, q);
    if (q != std::string::npos) {
      std::istringstream params(target.substr(q + 1));
      std::string kv;
      while (std::getline(params, kv, '&')) {
        auto eq = kv.find('=');
        r.query[kv.substr(0, eq)] = eq == std::string::npos ? "" : kv.substr(eq + 1);
      }
    }
    r.headers = std::move(headers);
    if (!r.headers.count("authorization") && token) r.headers["authorization"] = "Bearer " + *token;
    r.body = body;
    return service_.handle(r);
  }

  json json_call(const std::string& method, const std::string& target, const std::string& body = {},
                 int expected_status = 200, std::map<std::string, std::string> headers = {}) {
    auto res = call(method, target, body, std::move(headers));
    EXPECT_EQ(res.status, expected_status) << method << " " << target << ": " << res.body;
    return json::parse(res.body);
  }

  // Session with the actuator model uploaded and enumerated (revision 2).
  std::string actuator_session() {
    auto id = json_call("POST", "/sessions", "", 201)["id"].get<std::string>();
    json_call("PUT", "/sessions/" + id + "/model", testing_support::fixture("actuator.tm"));
    json_call("POST", "/sessions/" + id + "/enumerate");
    return id;
  }

  std::optional<std::string> token;

 private:
  Service& service_;
};

TEST(Service, CreateReturnsFreshIdAtRevisionZero) {
  Service svc(Config{});
  Client c(svc);
  auto a = c.json_call("POST", "/sessions", "", 201);
  auto b = c.json_call("POST", "/sessions", "", 201);
  EXPECT_EQ(a["revision"], 0);
  EXPECT_EQ(a["id"].get<std::string>().size(), 16u);
  EXPECT_NE(a["id"], b["id"]);
  EXPECT_EQ(svc.session_count(), 2u);
}

TEST(Service, ModelUploadReturnsFindingsAndRevision) {
  Service svc(Config{});
  Client c(svc);
  auto id = c.json_call("POST", "/sessions", "", 201)["id"].get<std::string>();
  auto res = c.json_call("PUT", "/sessions/" + id + "/model", testing_support::fixture("actuator.tm"));
  EXPECT_EQ(res["revision"], 1);
  EXPECT_EQ(res["errors"], 0);

  auto bad = c.json_call("PUT", "/sessions/" + id + "/model", "device \"x\" {\n  version \"1\n}\n", 400);
  EXPECT_EQ(bad["line"], 2);
  EXPECT_EQ(c.json_call("GET", "/sessions/" + id)["revision"], 1);

  auto invalid = c.json_call("PUT", "/sessions/" + id + "/model", "component gizmo g {}\n");
  EXPECT_EQ(invalid["revision"], 2);
  EXPECT_GE(invalid["errors"], 1);
  EXPECT_EQ(invalid["findings"][0]["code"], "unknown-component-kind");
  auto refused = c.json_call("POST", "/sessions/" + id + "/enumerate", "", 400);
  EXPECT_TRUE(refused.contains("findings"));
}

TEST(Service, JsonModelUploadMatchesDsl) {
  Service svc(Config{});
  Client c(svc);
  auto dsl = c.actuator_session();
  auto model_json = c.json_call("GET", "/sessions/" + dsl + "/model")["model"];
  auto js = c.json_call("POST", "/sessions", "", 201)["id"].get<std::string>();
  c.json_call("PUT", "/sessions/" + js + "/model", json{{"model", model_json}}.dump(), 200,
              {{"content-type", "application/json"}});
  c.json_call("POST", "/sessions/" + js + "/enumerate");
  EXPECT_EQ(c.json_call("GET", "/sessions/" + js + "/scenarios")["scenarios"],
            c.json_call("GET", "/sessions/" + dsl + "/scenarios")["scenarios"]);
}

TEST(Service, WhatIfToggleOnOffRestoresRegisterByteIdentically) {
  Service svc(Config{});
  Client c(svc);
  auto id = c.actuator_session();
  auto original = c.json_call("GET", "/sessions/" + id + "/register")["risk_register"].dump();
  ASSERT_EQ(json::parse(original)["rows"].size(), 4u);

  auto on = c.json_call("POST", "/sessions/" + id + "/whatif", R"({"mitigations": {"change_default_pin": true}})");
  EXPECT_EQ(on["revision"], 3);
  for (const auto* n : {"1", "1.1", "1.2", "1.3"}) EXPECT_EQ(on["statuses"][n], "mitigated") << n;
  EXPECT_EQ(on["statuses"]["2"], "candidate");
  EXPECT_TRUE(on["risk_register"]["rows"].empty());
  for (const auto& n : on["risk_register"]["unscored"]) {
    for (const auto* family : {"1", "1.1", "1.2", "1.3"}) EXPECT_NE(n, family);
  }

  auto off = c.json_call("POST", "/sessions/" + id + "/whatif", R"({"mitigations": {"change_default_pin": false}})");
  EXPECT_EQ(off["revision"], 4);
  EXPECT_EQ(off["risk_register"].dump(), original);
  EXPECT_EQ(c.json_call("GET", "/sessions/" + id + "/register")["risk_register"].dump(), original);
}

TEST(Service, EmptyWhatIfStillIncrementsRevision) {
  Service svc(Config{});
  Client c(svc);
  auto id = c.actuator_session();
  auto before = c.json_call("GET", "/sessions/" + id + "/register")["risk_register"].dump();
  auto res = c.json_call("POST", "/sessions/" + id + "/whatif", "{}");
  EXPECT_EQ(res["revision"], 3);
  EXPECT_EQ(res["risk_register"].dump(), before);
}

TEST(Service, ProfileSwitchNeverShrinksRegister) {
  Service svc(Config{});
  Client c(svc);
  auto id = c.actuator_session();
  auto size = [](const json& reg) { return reg["rows"].size() + reg["unscored"].size(); };
  auto remote = c.json_call("POST", "/sessions/" + id + "/whatif", R"({"profile": "remote_criminal"})");
  auto nation = c.json_call("POST", "/sessions/" + id + "/whatif", R"({"profile": "nation_state"})");
  EXPECT_LE(size(remote["risk_register"]), size(nation["risk_register"]));
  EXPECT_EQ(nation["profile"], "nation_state");
  auto cleared = c.json_call("POST", "/sessions/" + id + "/whatif", R"({"profile": null})");
  EXPECT_TRUE(cleared["profile"].is_null());
}

TEST(Service, WhatIfRejectsUnknownIds) {
  Service svc(Config{});
  Client c(svc);
  auto id = c.actuator_session();
  auto bad = c.json_call("POST", "/sessions/" + id + "/whatif", R"({"mitigations": {"nope": true}})", 400);
  EXPECT_NE(bad["error"].get<std::string>().find("unknown mitigation 'nope'"), std::string::npos) << bad;
  c.json_call("POST", "/sessions/" + id + "/whatif", R"({"profile": "martian"})", 400);
  c.json_call("POST", "/sessions/" + id + "/whatif", R"({"toggles": {}})", 400);
  EXPECT_EQ(c.json_call("GET", "/sessions/" + id)["revision"], 2);
}

TEST(Service, StaleRevisionPatchIsConflict) {
  Service svc(Config{});
  Client c(svc);
  auto id = c.actuator_session();
  for (int i = 0; i < 3; ++i) c.json_call("POST", "/sessions/" + id + "/whatif", "{}");
  ASSERT_EQ(c.json_call("GET", "/sessions/" + id)["revision"], 5);

  auto conflict = c.json_call("PATCH", "/sessions/" + id + "/scenarios/1.1", R"({"status": "confirmed", "revision": 3})", 409);
  EXPECT_EQ(conflict["revision"], 5);
  c.json_call("PATCH", "/sessions/" + id + "/scenarios/1.1", R"({"status": "confirmed"})", 409, {{"if-match", "3"}});
  c.json_call("PATCH", "/sessions/" + id + "/scenarios/1.1?revision=4", R"({"status": "confirmed"})", 409);
  EXPECT_EQ(c.json_call("GET", "/sessions/" + id)["revision"], 5);

  auto ok = c.json_call("PATCH", "/sessions/" + id + "/scenarios/1.1", R"({"status": "confirmed", "revision": 5})");
  EXPECT_EQ(ok["revision"], 6);
  EXPECT_EQ(ok["scenario"]["status"], "confirmed");
}

TEST(Service, PatchUpdatesStatusAndScores) {
  Service svc(Config{});
  Client c(svc);
  auto id = c.actuator_session();
  auto res = c.json_call("PATCH", "/sessions/" + id + "/scenarios/2",
                         R"({"cvss": "CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H", "likelihood": 5})");
  EXPECT_EQ(res["scenario"]["risk"]["cvss_score"], "9.8");
  EXPECT_EQ(res["scenario"]["risk"]["risk_level"], "critical");
  auto reg = c.json_call("GET", "/sessions/" + id + "/register")["risk_register"];
  EXPECT_EQ(reg["rows"].size(), 5u);
  EXPECT_EQ(reg["rows"][0]["number"], "2");

  c.json_call("PATCH", "/sessions/" + id + "/scenarios/1", R"({"status": "rejected"})");
  auto rejected = c.json_call("GET", "/sessions/" + id + "/scenarios?status=rejected")["scenarios"];
  ASSERT_EQ(rejected.size(), 1u);
  EXPECT_EQ(rejected[0]["number"], "1");

  c.json_call("PATCH", "/sessions/" + id + "/scenarios/2", R"({"likelihood": 9})", 400);
  c.json_call("PATCH", "/sessions/" + id + "/scenarios/2", R"({"bogus": 1})", 400);
  c.json_call("PATCH", "/sessions/" + id + "/scenarios/999", R"({"status": "confirmed"})", 404);
}

TEST(Service, NewModelResetsTriage) {
  Service svc(Config{});
  Client c(svc);
  auto id = c.actuator_session();
  c.json_call("PATCH", "/sessions/" + id + "/scenarios/1", R"({"status": "rejected"})");
  c.json_call("PUT", "/sessions/" + id + "/model", testing_support::fixture("actuator.tm"));
  auto state = c.json_call("GET", "/sessions/" + id);
  EXPECT_TRUE(state["patches"].empty());
  EXPECT_FALSE(state["enumerated"]);
  c.json_call("GET", "/sessions/" + id + "/scenarios", "", 400);
}

TEST(Service, ErrorStatuses) {
  Service svc(Config{});
  Client c(svc);
  c.json_call("GET", "/sessions/0000000000000000", "", 404);
  c.json_call("GET", "/nowhere", "", 404);
  c.json_call("DELETE", "/sessions", "", 405);
  auto id = c.json_call("POST", "/sessions", "", 201)["id"].get<std::string>();
  c.json_call("POST", "/sessions/" + id + "/enumerate", "", 400);
  c.json_call("GET", "/sessions/" + id + "/register", "", 400);
  c.json_call("PUT", "/sessions/" + id + "/model", "{not json", 400, {{"content-type", "application/json"}});
  c.json_call("GET", "/sessions/" + id + "/unknown", "", 404);
  c.json_call("GET", "/sessions/" + id + "/trees/nope", "", 404);
  c.json_call("GET", "/sessions/" + id + "/enumerate", "", 405);
}

TEST(Service, BearerTokenRequiredWhenConfigured) {
  Config config;
  config.token = "s3cret";
  Service svc(config);
  Client c(svc);
  c.json_call("POST", "/sessions", "", 401);
  c.json_call("GET", "/catalog", "", 401, {{"authorization", "Bearer wrong"}});
  c.token = "s3cret";
  c.json_call("POST", "/sessions", "", 201);
  c.json_call("GET", "/catalog");
}

TEST(Service, CatalogEndpoint) {
  Service svc(Config{});
  Client c(svc);
  auto cat = c.json_call("GET", "/catalog");
  EXPECT_EQ(cat, taxonomy::to_json(taxonomy::load_default_catalog()));
}

TEST(Service, TreesReportCutSetsAndCost) {
  Service svc(Config{});
  Client c(svc);
  auto id = c.json_call("POST", "/sessions", "", 201)["id"].get<std::string>();
  auto put = c.json_call("PUT", "/sessions/" + id + "/trees/fig6", testing_support::fixture("fig6.atk"));
  EXPECT_EQ(put["revision"], 1);
  const auto& tree = put["tree"];
  EXPECT_EQ(tree["cut_sets"].size(), 4u);
  for (const auto& cs : tree["cut_sets"]) EXPECT_EQ(cs.size(), 1u);
  EXPECT_EQ(tree["min_cost"], 4.0);
  auto listed = c.json_call("GET", "/sessions/" + id + "/trees?profile=remote_criminal")["trees"];
  ASSERT_EQ(listed.size(), 1u);
  EXPECT_EQ(listed[0]["cut_sets"], json::parse(R"([["rce"]])"));
  c.json_call("PUT", "/sessions/" + id + "/trees/bad", "AND \"x\"\n", 400);
  auto json_put = c.json_call("PUT", "/sessions/" + id + "/trees/copy", tree["tree"].dump(), 200,
                              {{"content-type", "application/json"}});
  EXPECT_EQ(json_put["tree"]["cut_sets"], tree["cut_sets"]);
}

TEST(Service, ReportsMatchCliByteForByte) {
  Service svc(Config{});
  Client c(svc);
  auto id = c.actuator_session();
  auto out_dir = fresh_dir("cli-report");
  for (const auto* format : {"md", "csv", "json"}) {
    std::ostringstream out, err;
    int code = cli::run_cli({"report", testing_support::fixture_path("actuator.tm"), "--out", out_dir.string(),
                             "--format", format},
                            out, err);
    ASSERT_EQ(code, 0) << err.str();
    auto file = out_dir / reporting::output_file_name(reporting::parse_format(format));
    auto res = c.call("GET", "/sessions/" + id + "/report?format=" + std::string(format));
    ASSERT_EQ(res.status, 200);
    EXPECT_EQ(res.body, testing_support::read_file(file.string())) << format;
  }
  EXPECT_EQ(c.call("GET", "/sessions/" + id + "/report?format=md").content_type, "text/markdown; charset=utf-8");
  EXPECT_EQ(c.call("GET", "/sessions/" + id + "/report?format=csv").content_type, "application/zip");
  c.json_call("GET", "/sessions/" + id + "/report?format=pdf", "", 400);
  fs::remove_all(out_dir);
}

TEST(Service, ReplayingLogReproducesSessions) {
  auto dir = fresh_dir("replay");
  Config config;
  config.data_dir = dir.string();
  std::string id;
  json state, scenarios, reg, trees;
  {
    Service svc(config);
    Client c(svc);
    id = c.actuator_session();
    c.json_call("PATCH", "/sessions/" + id + "/scenarios/1.1", R"({"status": "confirmed", "likelihood": 2})");
    c.json_call("POST", "/sessions/" + id + "/whatif", R"({"profile": "insider"})");
    c.json_call("PUT", "/sessions/" + id + "/trees/fig6", testing_support::fixture("fig6.atk"));
    c.json_call("POST", "/sessions/" + id + "/whatif", R"({"mitigations": {"change_default_pin": true}})", 200);
    c.json_call("POST", "/sessions/" + id + "/whatif", R"({"mitigations": {"bogus": true}})", 400);
    state = c.json_call("GET", "/sessions/" + id);
    scenarios = c.json_call("GET", "/sessions/" + id + "/scenarios");
    reg = c.json_call("GET", "/sessions/" + id + "/register");
    trees = c.json_call("GET", "/sessions/" + id + "/trees");
  }
  EXPECT_TRUE(fs::exists(dir / "sessions" / (id + ".jsonl")));
  EXPECT_TRUE(fs::exists(dir / "sessions" / (id + ".snapshot.json")));
  Service replayed(config);
  Client c(replayed);
  EXPECT_EQ(replayed.session_count(), 1u);
  EXPECT_EQ(c.json_call("GET", "/sessions/" + id), state);
  EXPECT_EQ(c.json_call("GET", "/sessions/" + id + "/scenarios"), scenarios);
  EXPECT_EQ(c.json_call("GET", "/sessions/" + id + "/register"), reg);
  EXPECT_EQ(c.json_call("GET", "/sessions/" + id + "/trees"), trees);
  EXPECT_EQ(state["revision"], 6);
  fs::remove_all(dir);
}

TEST(Service, ConcurrentMutationsFormOneTotalOrder) {
  auto dir = fresh_dir("concurrent");
  Config config;
  config.data_dir = dir.string();
  Service svc(config);
  Client setup(svc);
  auto id = setup.actuator_session();
  constexpr int kThreads = 4;
  constexpr int kEach = 10;
  std::vector<std::thread> threads;
  for (int t = 0; t < kThreads; ++t) {
    threads.emplace_back([&svc, &id, t] {
      Client c(svc);
      for (int i = 0; i < kEach; ++i) {
        auto body = json{{"likelihood", 1 + (t + i) % 5}}.dump();
        c.call("PATCH", "/sessions/" + id + "/scenarios/" + std::to_string(2 + t), body);
        c.call("GET", "/sessions/" + id + "/register");
      }
    });
  }
  for (auto& th : threads) th.join();
  EXPECT_EQ(setup.json_call("GET", "/sessions/" + id)["revision"], 2 + kThreads * kEach);
  std::ifstream log(dir / "sessions" / (id + ".jsonl"));
  std::string line;
  int expected = 0;
  while (std::getline(log, line)) EXPECT_EQ(json::parse(line)["revision"], expected++);
  EXPECT_EQ(expected, 3 + kThreads * kEach);
  fs::remove_all(dir);
}

TEST(HttpServer, ServesRequestsOnEphemeralPort) {
  Config config;
  config.port = 0;
  config.token = "tok";
  Service svc(config);
  std::ostringstream log;
  HttpServer server(svc, config, log);
  int port = server.bind();
  ASSERT_GT(port, 0);
  std::thread thread([&] { server.listen(); });
  httplib::Client client(config.host, port);
  client.set_connection_timeout(5);
  auto unauth = client.Post("/sessions");
  ASSERT_TRUE(unauth);
  EXPECT_EQ(unauth->status, 401);
  httplib::Headers auth = {{"Authorization", "Bearer tok"}};
  auto created = client.Post("/sessions", auth, "", "application/json");
  ASSERT_TRUE(created);
  EXPECT_EQ(created->status, 201);
  auto id = json::parse(created->body)["id"].get<std::string>();
  auto put = client.Put(("/sessions/" + id + "/model").c_str(), auth, testing_support::fixture("actuator.tm"),
                        "text/plain");
  ASSERT_TRUE(put);
  EXPECT_EQ(put->status, 200);
  auto enumerated = client.Post(("/sessions/" + id + "/enumerate").c_str(), auth, "", "application/json");
  ASSERT_TRUE(enumerated);
  EXPECT_EQ(enumerated->status, 200);
  auto report = client.Get(("/sessions/" + id + "/report?format=md").c_str(), auth);
  ASSERT_TRUE(report);
  EXPECT_EQ(report->status, 200);
  EXPECT_EQ(report->get_header_value("Content-Type"), "text/markdown; charset=utf-8");
  EXPECT_EQ(report->body, testing_support::read_file(testing_support::golden_path("actuator_report.md")));
  auto conflict = client.Patch(("/sessions/" + id + "/scenarios/1").c_str(), auth,
                               R"({"status": "confirmed", "revision": 0})", "application/json");
  ASSERT_TRUE(conflict);
  EXPECT_EQ(conflict->status, 409);
  server.stop();
  thread.join();
  EXPECT_NE(log.str().find("\"status\":409"), std::string::npos);
}

}  // namespace
}  // namespace threatsmith::service
