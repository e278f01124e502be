// Copyright 2026 The Threatsmith Authors
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

#include "threatsmith/cli.hpp"

#include <algorithm>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "threatsmith/attack_tree.hpp"
#include "threatsmith/device_model.hpp"
#include "threatsmith/enumeration.hpp"
#include "threatsmith/error.hpp"
#include "threatsmith/pipeline.hpp"
#include "threatsmith/reporting.hpp"
#include "threatsmith/scoring.hpp"
#include "threatsmith/service.hpp"
#include "threatsmith/strings.hpp"
#include "threatsmith/taxonomy.hpp"

namespace threatsmith::cli {

namespace {

namespace fs = std::filesystem;

// Missing or unreadable input files are usage errors.
struct UsageError : Error {
  using Error::Error;
};

std::string read_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool is_json_path(const std::string& path) { return fs::path(path).extension() == ".json"; }

model::DeviceModel load_model(const std::string& path) {
  auto text = read_input(path);
  if (!is_json_path(path)) return model::parse_model(text, path);
  try {
    return model::model_from_json(nlohmann::json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), 0, 0, path);
  }
}

attack_tree::AttackTree load_tree(const std::string& path) {
  auto text = read_input(path);
  if (!is_json_path(path)) return attack_tree::parse_tree(text, path);
  try {
    return attack_tree::tree_from_json(nlohmann::json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), 0, 0, path);
  }
}

std::string render_finding(const ValidationFinding& f) {
  std::string s = std::string(to_string(f.severity)) + ": " + f.code;
  if (!f.subject.empty()) s += " [" + f.subject + "]";
  s += ": " + f.message;
  if (f.line > 0) s += " (line " + std::to_string(f.line) + ")";
  return s;
}

void print_findings(const Findings& findings, std::ostream& os) {
  for (const auto& f : findings) os << render_finding(f) << "\n";
}

std::string plural(std::size_t n, const char* word) {
  return std::to_string(n) + " " + word + (n == 1 ? "" : "s");
}

std::string render_cut_set(const attack_tree::CutSet& cs) {
  return "{" + text::join(std::vector<std::string>(cs.begin(), cs.end()), ", ") + "}";
}

// Shared state of the subcommand callbacks.
struct Context {
  std::ostream& out;
  std::ostream& err;
  std::optional<std::string> catalog_dir;
  std::optional<taxonomy::TaxonomyCatalog> custom_catalog;
  std::optional<enumeration::RuleSet> custom_rules;

  const taxonomy::TaxonomyCatalog& catalog() {
    if (!catalog_dir) return taxonomy::load_default_catalog();
    if (!custom_catalog) custom_catalog = taxonomy::load_catalog_directory(*catalog_dir);
    return *custom_catalog;
  }

  const enumeration::RuleSet& rules(const std::vector<std::string>& overlays) {
    if (overlays.empty()) return enumeration::load_default_ruleset();
    auto merged = enumeration::load_default_ruleset();
    for (const auto& path : overlays) {
      merged = enumeration::merge_rulesets(merged,
                                           enumeration::parse_ruleset(read_input(path), fs::path(path).stem().string()));
    }
    enumeration::check_ruleset(merged, catalog());
    custom_rules = std::move(merged);
    return *custom_rules;
  }

  // Validation errors stop the pipeline with exit 1.
  bool check_model(const model::DeviceModel& m) {
    auto findings = model::validate_model(m, catalog());
    if (count_errors(findings) == 0) return true;
    print_findings(findings, err);
    err << plural(count_errors(findings), "error") << "; fix the model before continuing\n";
    return false;
  }
};

int cmd_validate(Context& ctx, const std::string& path) {
  auto m = load_model(path);
  auto findings = model::validate_model(m, ctx.catalog());
  print_findings(findings, ctx.out);
  auto errors = count_errors(findings);
  ctx.out << plural(errors, "error") << ", " << plural(findings.size() - errors, "warning") << "\n";
  return errors > 0 ? kExitFindings : kExitOk;
}

int cmd_enumerate(Context& ctx, const std::string& path, const std::optional<std::string>& profile,
                  const std::vector<std::string>& ruleset, bool as_json, bool surface) {
  auto m = load_model(path);
  if (!ctx.check_model(m)) return kExitFindings;
  pipeline::Options options;
  options.profile = profile;
  auto analysis = pipeline::analyze(m, ctx.catalog(), ctx.rules(ruleset), options);
  if (surface) {
    if (as_json) {
      nlohmann::json j = nlohmann::json::array();
      for (const auto& e : analysis.attack_surface) j.push_back(enumeration::to_json(e));
      ctx.out << j.dump(2) << "\n";
    } else {
      for (const auto& row : reporting::build_attack_surface_listing(analysis.attack_surface)) {
        ctx.out << row.component << "\t" << row.stage << "\t" << row.attack << "\t" << row.rules << "\n";
      }
    }
    return kExitOk;
  }
  if (as_json) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& s : analysis.scenarios) j.push_back(enumeration::to_json(s));
    ctx.out << j.dump(2) << "\n";
  } else {
    ctx.out << reporting::render_scenario_table_markdown(
        reporting::build_scenario_table(analysis.scenarios, analysis.effective_model));
  }
  return kExitOk;
}

attack_tree::AttackTree pruned(Context& ctx, const attack_tree::AttackTree& tree,
                               const std::optional<std::string>& profile_id) {
  if (!profile_id) return tree;
  const auto& catalog = ctx.catalog();
  const auto* profile = catalog.find_profile(*profile_id);
  if (!profile) {
    std::vector<std::string> ids;
    for (const auto& p : catalog.source_profiles) ids.push_back(p.id);
    throw NotFoundError("threat-source profile", *profile_id, text::nearest(*profile_id, ids));
  }
  return attack_tree::prune_by_capability(tree, *profile);
}

int cmd_tree(Context& ctx, const std::string& action, const std::string& path,
             const std::optional<std::string>& profile, std::size_t cap) {
  auto tree = pruned(ctx, load_tree(path), profile);
  if (action == "prune") {
    if (tree.empty()) {
      ctx.out << "(empty tree: no attack remains within the profile's capabilities)\n";
    } else {
      ctx.out << attack_tree::render_tree(tree);
    }
    return kExitOk;
  }
  if (action == "cutsets") {
    auto sets = attack_tree::minimal_cut_sets(tree, cap);
    for (const auto& cs : sets) ctx.out << render_cut_set(cs) << "\n";
    ctx.out << plural(sets.size(), "minimal cut set") << "\n";
    return kExitOk;
  }
  // cost
  if (tree.empty()) {
    ctx.out << "min cost: none (empty tree)\n";
    return kExitOk;
  }
  auto costs = attack_tree::propagate_min_cost(tree);
  for (const auto* node : attack_tree::nodes(tree)) {
    ctx.out << node->id << "\t" << text::format_number(costs.at(node->id)) << "\n";
  }
  ctx.out << "min cost: " << text::format_number(costs.at(tree.root->id)) << "\n";
  return kExitOk;
}

int cmd_score_cvss(Context& ctx, const std::string& vector) {
  auto score = scoring::cvss_base_score(scoring::parse_cvss_vector(vector));
  auto rating = std::string(scoring::to_string(score.rating));
  if (!rating.empty()) rating[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(rating[0])));
  ctx.out << score.text() << " " << rating << "\n";
  return kExitOk;
}

int cmd_score_risk(Context& ctx, int likelihood, int impact) {
  ctx.out << scoring::to_string(scoring::risk_level(likelihood, impact, ctx.catalog().risk_bands)) << "\n";
  return kExitOk;
}

struct ReportArgs {
  std::string model;
  std::string out_dir;
  std::string format = "md";
  std::optional<std::string> profile;
  std::vector<std::string> ruleset;
  std::optional<std::string> title;
  std::string timestamp;
  std::vector<std::string> enable;
  std::vector<std::string> disable;
};

int cmd_report(Context& ctx, const ReportArgs& a) {
  auto format = reporting::parse_format(a.format);
  auto m = load_model(a.model);
  if (!ctx.check_model(m)) return kExitFindings;
  pipeline::Options options;
  options.profile = a.profile;
  for (const auto& id : a.enable) options.mitigations[id] = true;
  for (const auto& id : a.disable) options.mitigations[id] = false;
  const auto& rules = ctx.rules(a.ruleset);
  auto analysis = pipeline::analyze(m, ctx.catalog(), rules, options);
  auto doc = pipeline::make_report(analysis, ctx.catalog(), rules, options,
                                   a.title.value_or(pipeline::default_title(m)), a.timestamp);
  std::error_code ec;
  fs::create_directories(a.out_dir, ec);
  if (ec) throw UsageError("cannot create output directory '" + a.out_dir + "': " + ec.message());
  auto path = fs::path(a.out_dir) / reporting::output_file_name(format);
  std::ofstream file(path, std::ios::binary);
  file << reporting::render_report(doc, format);
  file.close();
  if (!file) throw UsageError("cannot write '" + path.string() + "'");
  ctx.out << path.string() << "\n";
  return kExitOk;
}

service::HttpServer* g_server = nullptr;

void stop_server(int) {
  if (g_server) g_server->stop();
}

int cmd_serve(Context& ctx, service::Config config) {
  service::Service svc(config, ctx.catalog());
  service::HttpServer server(svc, config, ctx.err);
  int port = server.bind();
  if (port < 0) {
    ctx.err << "error: cannot bind " << config.host << ":" << config.port << "\n";
    return kExitUsage;
  }
  ctx.out << "listening on http://" << config.host << ":" << port << std::endl;
  g_server = &server;
  std::signal(SIGINT, stop_server);
  std::signal(SIGTERM, stop_server);
  bool ok = server.listen();
  g_server = nullptr;
  return ok ? kExitOk : kExitUsage;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Context ctx{out, err, {}, {}, {}};
  std::function<int()> action;

  CLI::App app{"Threat analysis for industrial IoT devices", "threatsmith"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "threatsmith 1.0.0");
  std::string catalog_dir;
  app.add_option("--catalog", catalog_dir, "Catalog directory replacing the built-in catalog")->check(CLI::ExistingDirectory);

  std::string model_path;
  std::optional<std::string> profile;
  std::vector<std::string> ruleset;

  auto* validate = app.add_subcommand("validate", "Parse and validate a device model");
  validate->add_option("model", model_path, "Model file (.tm DSL or .json)")->required();
  validate->callback([&] { action = [&] { return cmd_validate(ctx, model_path); }; });

  bool as_json = false;
  bool surface = false;
  auto* enumerate = app.add_subcommand("enumerate", "Enumerate threat scenarios for a model");
  enumerate->add_option("model", model_path, "Model file (.tm DSL or .json)")->required();
  enumerate->add_option("--profile", profile, "Threat-source profile id");
  enumerate->add_option("--ruleset", ruleset, "Rule overlay file merged onto the built-in rules");
  enumerate->add_flag("--json", as_json, "Print scenarios as JSON");
  enumerate->add_flag("--surface", surface, "Print the attack surface instead of scenarios");
  enumerate->callback(
      [&] { action = [&] { return cmd_enumerate(ctx, model_path, profile, ruleset, as_json, surface); }; });

  std::string tree_action;
  std::string tree_path;
  std::size_t cap = attack_tree::kDefaultCutSetCap;
  auto* tree = app.add_subcommand("tree", "Analyze an attack tree");
  tree->add_option("action", tree_action, "cutsets, cost or prune")
      ->required()
      ->check(CLI::IsMember({"cutsets", "cost", "prune"}));
  tree->add_option("tree", tree_path, "Tree file (.atk DSL or .json)")->required();
  tree->add_option("--profile", profile, "Prune to a threat-source profile first");
  tree->add_option("--cap", cap, "Cut-set cap per node")->check(CLI::PositiveNumber);
  tree->callback([&] { action = [&] { return cmd_tree(ctx, tree_action, tree_path, profile, cap); }; });

  auto* score = app.add_subcommand("score", "Score a CVSS vector or a risk-matrix cell");
  score->require_subcommand(1);
  std::string vector;
  auto* cvss = score->add_subcommand("cvss", "CVSS v3.1 base score");
  cvss->add_option("vector", vector, "CVSS:3.1/AV:.../A:...")->required();
  cvss->callback([&] { action = [&] { return cmd_score_cvss(ctx, vector); }; });
  int likelihood = 1;
  int impact = 1;
  auto* risk = score->add_subcommand("risk", "Risk level for likelihood and impact");
  risk->add_option("likelihood", likelihood, "1-5")->required()->check(CLI::Range(1, 5));
  risk->add_option("impact", impact, "1-5")->required()->check(CLI::Range(1, 5));
  risk->callback([&] { action = [&] { return cmd_score_risk(ctx, likelihood, impact); }; });

  ReportArgs report_args;
  auto* report = app.add_subcommand("report", "Write a scenario table and risk register");
  report->add_option("model", report_args.model, "Model file (.tm DSL or .json)")->required();
  report->add_option("--out", report_args.out_dir, "Output directory")->required();
  report->add_option("--format", report_args.format, "md, csv or json")->capture_default_str();
  report->add_option("--profile", report_args.profile, "Threat-source profile id");
  report->add_option("--ruleset", report_args.ruleset, "Rule overlay file merged onto the built-in rules");
  report->add_option("--title", report_args.title, "Report title");
  report->add_option("--timestamp", report_args.timestamp, "Generation timestamp to record (default none)");
  report->add_option("--enable", report_args.enable, "Enable a mitigation for this run");
  report->add_option("--disable", report_args.disable, "Disable a mitigation for this run");
  report->callback([&] { action = [&] { return cmd_report(ctx, report_args); }; });

  service::Config config;
  std::optional<int> port;
  std::optional<std::string> host;
  std::optional<std::string> data_dir;
  std::optional<std::string> token;
  std::optional<std::string> static_dir;
  auto* serve = app.add_subcommand("serve", "Run the HTTP/JSON service");
  serve->add_option("--port", port, "Port (0 picks a free one; default $THREATSMITH_PORT or 8080)");
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--data-dir", data_dir, "Session log directory (default $THREATSMITH_DATA_DIR)");
  serve->add_option("--token", token, "Bearer token (default $THREATSMITH_TOKEN)");
  serve->add_option("--static", static_dir, "Built UI directory served at /");
  serve->callback([&] {
    action = [&] {
      config = service::config_from_environment();
      if (port) config.port = *port;
      if (host) config.host = *host;
      if (data_dir) config.data_dir = *data_dir;
      if (token) config.token = *token;
      if (static_dir) config.static_dir = *static_dir;
      return cmd_serve(ctx, config);
    };
  });

  auto* catalog = app.add_subcommand("catalog", "Print the taxonomy catalog as JSON");
  catalog->callback([&] {
    action = [&] {
      out << taxonomy::to_json(ctx.catalog()).dump(2) << "\n";
      return kExitOk;
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << "threatsmith 1.0.0\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    err << "run 'threatsmith --help' for usage\n";
    return kExitUsage;
  }
  if (!catalog_dir.empty()) ctx.catalog_dir = catalog_dir;

  try {
    return action ? action() : kExitUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitFindings;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NotFoundError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitFindings;
  }
}

}  // namespace threatsmith::cli
