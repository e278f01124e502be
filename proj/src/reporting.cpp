// Copyright 2026 The Threatsmith Authors
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

#include "threatsmith/reporting.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "threatsmith/error.hpp"
#include "threatsmith/strings.hpp"
#include "zip_writer.hpp"

namespace threatsmith::reporting {

using enumeration::ScenarioNumber;
using enumeration::ThreatScenario;

namespace {

std::string md_cell(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '|') {
      out += "\\|";
    } else if (c == '\n') {
      out += "<br>";
    } else if (c != '\r') {
      out += c;
    }
  }
  return out;
}

std::string md_row(const std::vector<std::string>& cells) {
  std::string out = "|";
  for (const auto& c : cells) {
    auto cell = md_cell(c);
    out += cell.empty() ? " |" : " " + cell + " |";
  }
  return out + "\n";
}

std::string md_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::string out = md_row(header);
  out += "|";
  for (std::size_t i = 0; i < header.size(); ++i) out += " --- |";
  out += "\n";
  for (const auto& r : rows) out += md_row(r);
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string csv_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  auto line = [](const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += csv_field(cells[i]);
    }
    return out + "\r\n";
  };
  std::string out = line(header);
  for (const auto& r : rows) out += line(r);
  return out;
}

std::vector<std::string> scenario_header() { return {kScenarioColumns.begin(), kScenarioColumns.end()}; }

std::vector<std::vector<std::string>> scenario_cells(const ScenarioTable& t) {
  std::vector<std::vector<std::string>> out;
  for (const auto& r : t.rows) out.push_back({r.number, r.vulnerability, r.threat, r.interface, r.action, r.note});
  return out;
}

const std::vector<std::string> kRegisterHeader = {"No.", "CVSS", "Rating", "Vector", "Likelihood", "Impact",
                                                  "Risk level"};

std::vector<std::vector<std::string>> register_cells(const RiskRegister& r) {
  std::vector<std::vector<std::string>> out;
  for (const auto& row : r.rows) {
    out.push_back({row.number, row.cvss_score, row.cvss_rating, row.cvss_vector, std::to_string(row.likelihood),
                   std::to_string(row.impact), row.risk_level});
  }
  return out;
}

const std::vector<std::string> kSurfaceHeader = {"Component", "Stage", "Attack", "Rules"};

std::vector<std::vector<std::string>> surface_cells(const std::vector<SurfaceRow>& rows) {
  std::vector<std::vector<std::string>> out;
  for (const auto& r : rows) out.push_back({r.component, r.stage, r.attack, r.rules});
  return out;
}

std::vector<std::pair<std::string, std::string>> summary_fields(const ModelSummary& s) {
  return {{"Device", s.device},
          {"Version", s.version},
          {"Environment", text::join(s.environment, ", ")},
          {"Components", std::to_string(s.components)},
          {"Interfaces", std::to_string(s.interfaces)},
          {"Actors", std::to_string(s.actors)},
          {"Interactions", std::to_string(s.interactions)},
          {"Assets", std::to_string(s.assets)},
          {"Vulnerabilities", std::to_string(s.vulnerabilities)},
          {"Mitigations", std::to_string(s.mitigations)},
          {"Catalog version", s.catalog_version},
          {"Rule set", s.ruleset},
          {"Threat-source profile", s.profile.empty() ? "all" : s.profile}};
}

std::string render_markdown(const ReportDocument& doc) {
  std::string out = "# " + md_cell(doc.title) + "\n\n";
  if (!doc.generated_at.empty()) out += "Generated: " + md_cell(doc.generated_at) + "\n\n";

  out += "## Model summary\n\n";
  std::vector<std::vector<std::string>> summary;
  for (auto& [k, v] : summary_fields(doc.summary)) summary.push_back({k, v});
  out += md_table({"Field", "Value"}, summary);

  out += "\n## Attack scenarios\n\n" + render_scenario_table_markdown(doc.scenarios);

  out += "\n## Risk register\n\n" + md_table(kRegisterHeader, register_cells(doc.risk_register));
  out += "\nUnscored: " + (doc.risk_register.unscored.empty() ? "none" : text::join(doc.risk_register.unscored, ", ")) +
         "\n";

  out += "\n## Attack surface\n\n" + md_table(kSurfaceHeader, surface_cells(doc.attack_surface));
  return out;
}

std::string render_json(const ReportDocument& doc) { return to_json(doc).dump(2) + "\n"; }

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

}  // namespace

ScenarioTable build_scenario_table(const std::vector<ThreatScenario>& scenarios, const model::DeviceModel& model) {
  std::vector<const ThreatScenario*> ordered;
  for (const auto& s : scenarios) ordered.push_back(&s);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const ThreatScenario* a, const ThreatScenario* b) { return a->number < b->number; });
  std::set<ScenarioNumber> numbers;
  ScenarioTable table;
  for (const auto* s : ordered) {
    if (!numbers.insert(s->number).second) throw DomainError("duplicate scenario number " + s->number.str());
    ScenarioRow row;
    row.number = s->number.str();
    const bool child = s->number.parent() && numbers.count(*s->number.parent());
    if (s->vulnerability && !child) {
      const auto* v = model.find_vulnerability(*s->vulnerability);
      row.vulnerability = v ? v->display_title() : *s->vulnerability;
    }
    row.threat = s->threat_label;
    std::vector<std::string> names;
    for (const auto& id : s->interfaces) {
      const auto* i = model.find_interface(id);
      names.push_back(i ? i->display_name() : id);
    }
    row.interface = text::join(names, ", ");
    row.action = s->action;
    row.note = s->note;
    row.status = std::string(enumeration::to_string(s->status));
    table.rows.push_back(std::move(row));
  }
  return table;
}

RiskRegister build_risk_register(const std::vector<ThreatScenario>& scenarios,
                                 const std::vector<scoring::RiskRecord>& records) {
  std::map<ScenarioNumber, const ThreatScenario*> by_number;
  for (const auto& s : scenarios) by_number.emplace(s.number, &s);
  std::set<ScenarioNumber> scored;
  std::vector<const scoring::RiskRecord*> ordered;
  for (const auto& r : records) {
    if (!by_number.count(r.scenario)) throw DomainError("risk record for unknown scenario " + r.scenario.str());
    if (!scored.insert(r.scenario).second) throw DomainError("two risk records for scenario " + r.scenario.str());
    ordered.push_back(&r);
  }
  std::stable_sort(ordered.begin(), ordered.end(), [](const scoring::RiskRecord* a, const scoring::RiskRecord* b) {
    int sa = a->cvss ? a->cvss->tenths : -1;
    int sb = b->cvss ? b->cvss->tenths : -1;
    if (a->level != b->level) return a->level > b->level;
    if (sa != sb) return sa > sb;
    return a->scenario < b->scenario;
  });
  RiskRegister out;
  for (const auto* r : ordered) {
    RegisterRow row;
    row.number = r->scenario.str();
    if (r->cvss) {
      row.cvss_vector = r->cvss_vector.value_or("");
      row.cvss_score = r->cvss->text();
      row.cvss_rating = std::string(scoring::to_string(r->cvss->rating));
    }
    row.likelihood = r->likelihood;
    row.impact = r->impact;
    row.risk_level = std::string(scoring::to_string(r->level));
    out.rows.push_back(std::move(row));
  }
  for (const auto& [number, s] : by_number) {
    if (scoring::is_active(*s) && !scored.count(number)) out.unscored.push_back(number.str());
  }
  return out;
}

std::vector<SurfaceRow> build_attack_surface_listing(const std::vector<enumeration::AttackSurfaceEntry>& entries) {
  std::vector<SurfaceRow> out;
  for (const auto& e : entries) out.push_back({e.component, e.stage, e.attack, text::join(e.rules, ", ")});
  return out;
}

ModelSummary summarize_model(const model::DeviceModel& m) {
  ModelSummary s;
  s.device = m.device.name;
  s.version = m.device.version;
  s.environment = m.device.environment;
  s.components = static_cast<int>(m.components.size());
  s.interfaces = static_cast<int>(m.interfaces.size());
  s.actors = static_cast<int>(m.actors.size());
  s.interactions = static_cast<int>(m.interactions.size());
  s.assets = static_cast<int>(m.assets.size());
  s.vulnerabilities = static_cast<int>(m.vulnerabilities.size());
  s.mitigations = static_cast<int>(m.mitigations.size());
  return s;
}

std::string_view to_string(Format f) {
  switch (f) {
    case Format::markdown: return "markdown";
    case Format::csv: return "csv";
    case Format::json: return "json";
  }
  return "";
}

Format parse_format(std::string_view name) {
  if (name == "md" || name == "markdown") return Format::markdown;
  if (name == "csv") return Format::csv;
  if (name == "json") return Format::json;
  throw ConfigError("unknown report format '" + std::string(name) + "'; supported formats: md (markdown), csv, json");
}

std::string output_file_name(Format f) {
  switch (f) {
    case Format::markdown: return "report.md";
    case Format::csv: return "report-csv.zip";
    case Format::json: return "report.json";
  }
  return "";
}

std::string render_scenario_table_markdown(const ScenarioTable& table) {
  return md_table(scenario_header(), scenario_cells(table));
}

std::vector<std::pair<std::string, std::string>> render_csv_files(const ReportDocument& doc) {
  auto register_rows = register_cells(doc.risk_register);
  for (const auto& n : doc.risk_register.unscored) register_rows.push_back({n, "", "", "", "", "", "unscored"});
  std::vector<std::vector<std::string>> summary;
  for (auto& [k, v] : summary_fields(doc.summary)) summary.push_back({k, v});
  summary.insert(summary.begin(), {"Title", doc.title});
  return {{"summary.csv", csv_table({"Field", "Value"}, summary)},
          {"scenarios.csv", csv_table(scenario_header(), scenario_cells(doc.scenarios))},
          {"risk_register.csv", csv_table(kRegisterHeader, register_rows)},
          {"attack_surface.csv", csv_table(kSurfaceHeader, surface_cells(doc.attack_surface))}};
}

std::string render_report(const ReportDocument& doc, Format format) {
  switch (format) {
    case Format::markdown: return render_markdown(doc);
    case Format::json: return render_json(doc);
    case Format::csv: {
      std::vector<zip::Entry> entries;
      for (auto& [name, data] : render_csv_files(doc)) entries.push_back({name, data});
      return zip::write_stored(entries);
    }
  }
  return "";
}

std::string render_report(const ReportDocument& doc, std::string_view format) {
  return render_report(doc, parse_format(format));
}

nlohmann::json to_json(const ReportDocument& doc) {
  const auto& s = doc.summary;
  nlohmann::json summary = {{"device", s.device},
                            {"version", s.version},
                            {"environment", s.environment},
                            {"components", s.components},
                            {"interfaces", s.interfaces},
                            {"actors", s.actors},
                            {"interactions", s.interactions},
                            {"assets", s.assets},
                            {"vulnerabilities", s.vulnerabilities},
                            {"mitigations", s.mitigations},
                            {"catalog_version", s.catalog_version},
                            {"ruleset", s.ruleset},
                            {"profile", s.profile}};
  nlohmann::json scenarios = nlohmann::json::array();
  for (const auto& r : doc.scenarios.rows) {
    scenarios.push_back({{"number", r.number},
                         {"vulnerability", r.vulnerability},
                         {"threat", r.threat},
                         {"interface", r.interface},
                         {"action", r.action},
                         {"note", r.note},
                         {"status", r.status}});
  }
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : doc.risk_register.rows) {
    rows.push_back({{"number", r.number},
                    {"cvss_vector", r.cvss_vector},
                    {"cvss_score", r.cvss_score},
                    {"cvss_rating", r.cvss_rating},
                    {"likelihood", r.likelihood},
                    {"impact", r.impact},
                    {"risk_level", r.risk_level}});
  }
  nlohmann::json surface = nlohmann::json::array();
  for (const auto& r : doc.attack_surface) {
    surface.push_back({{"component", r.component}, {"stage", r.stage}, {"attack", r.attack}, {"rules", r.rules}});
  }
  return {{"title", doc.title},
          {"generated_at", doc.generated_at},
          {"summary", summary},
          {"scenarios", scenarios},
          {"risk_register", {{"rows", rows}, {"unscored", doc.risk_register.unscored}}},
          {"attack_surface", surface}};
}

ReportDocument report_from_json(const nlohmann::json& j) {
  try {
    ReportDocument doc;
    doc.title = j.at("title").get<std::string>();
    doc.generated_at = get_or<std::string>(j, "generated_at", "");
    const auto& s = j.at("summary");
    doc.summary.device = s.at("device").get<std::string>();
    doc.summary.version = s.at("version").get<std::string>();
    doc.summary.environment = s.at("environment").get<std::vector<std::string>>();
    doc.summary.components = s.at("components").get<int>();
    doc.summary.interfaces = s.at("interfaces").get<int>();
    doc.summary.actors = s.at("actors").get<int>();
    doc.summary.interactions = s.at("interactions").get<int>();
    doc.summary.assets = s.at("assets").get<int>();
    doc.summary.vulnerabilities = s.at("vulnerabilities").get<int>();
    doc.summary.mitigations = s.at("mitigations").get<int>();
    doc.summary.catalog_version = s.at("catalog_version").get<std::string>();
    doc.summary.ruleset = s.at("ruleset").get<std::string>();
    doc.summary.profile = s.at("profile").get<std::string>();
    for (const auto& r : j.at("scenarios")) {
      doc.scenarios.rows.push_back({r.at("number"), r.at("vulnerability"), r.at("threat"), r.at("interface"),
                                    r.at("action"), r.at("note"), r.at("status")});
    }
    const auto& reg = j.at("risk_register");
    for (const auto& r : reg.at("rows")) {
      doc.risk_register.rows.push_back({r.at("number"), r.at("cvss_vector"), r.at("cvss_score"), r.at("cvss_rating"),
                                        r.at("likelihood"), r.at("impact"), r.at("risk_level")});
    }
    doc.risk_register.unscored = reg.at("unscored").get<std::vector<std::string>>();
    for (const auto& r : j.at("attack_surface")) {
      doc.attack_surface.push_back({r.at("component"), r.at("stage"), r.at("attack"), r.at("rules")});
    }
    return doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(e.what(), 0, 0, "report");
  }
}

std::string canonical_hash(const ReportDocument& doc) {
  auto j = to_json(doc);
  j.erase("generated_at");
  return text::hex64(text::fnv1a(j.dump()));
}

}  // namespace threatsmith::reporting
