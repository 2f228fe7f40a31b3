#pragma once

#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "delphinet/bn/json_io.hpp"
#include "delphinet/bn/xmlbif.hpp"
#include "delphinet/reporting.hpp"
#include "delphinet/scenarios.hpp"
#include "delphinet/service/http.hpp"
#include "delphinet/views.hpp"

// Headless single-user commands. Exit codes: 0 success, 1 the input was
// rejected (invalid network, impossible evidence, ...), 2 usage error.

namespace delphinet::cli {

using json = nlohmann::json;

inline constexpr int kOk = 0;
inline constexpr int kRejected = 1;
inline constexpr int kUsage = 2;

namespace detail {

inline bn::BayesianNetwork load_valid(const std::string& path) {
  auto net = bn::load_network(path);
  auto report = bn::validate_network(net);
  if (!report.ok()) {
    const auto& f = report.findings.front();
    throw Error(f.code, f.subject + ": " + f.message);
  }
  return net;
}

/// "Name=state" pairs; the first '=' separates them.
inline inference::Evidence parse_evidence(const std::vector<std::string>& items) {
  inference::Evidence e;
  for (const auto& item : items) {
    auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == item.size()) {
      throw CLI::ValidationError("--evidence", "expected Variable=state, got '" + item + "'");
    }
    e.set(item.substr(0, eq), item.substr(eq + 1));
  }
  return e;
}

inline std::vector<scenarios::Scenario> load_scenarios(const std::string& path) {
  auto doc = bn::read_json_file(path);
  const json& list = doc.is_array() ? doc : doc.value("scenarios", json::array());
  std::vector<scenarios::Scenario> out;
  int n = 0;
  for (const auto& j : list) {
    auto s = scenarios::scenario_from_json(j);
    if (s.id.empty()) s.id = "s" + std::to_string(++n);
    out.push_back(std::move(s));
  }
  return out;
}

/// Scenarios from a file, or those stored in the network document, plus Base.
inline scenarios::Scenario find_scenario(const bn::BayesianNetwork& net, const std::string& net_path,
                                         const std::string& scenarios_path, const std::string& name) {
  std::vector<scenarios::Scenario> list{scenarios::make_base_scenario(net, "")};
  auto more = scenarios_path.empty() ? std::vector<scenarios::Scenario>{} : load_scenarios(scenarios_path);
  if (scenarios_path.empty()) {
    auto doc = bn::read_json_file(net_path);
    for (const auto& j : doc.value("scenarios", json::array())) more.push_back(scenarios::scenario_from_json(j));
  }
  list.insert(list.end(), more.begin(), more.end());
  for (const auto& s : list) {
    if (s.name == name || (!s.id.empty() && s.id == name)) return s;
  }
  throw Error(ErrorCode::UnknownScenario, "no scenario named '" + name + "'");
}

inline void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (!f) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
}

inline std::atomic<service::HttpServer*> running_server{nullptr};

inline void stop_server(int) {
  if (auto* s = running_server.load()) s->stop();
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bayesian network reasoning: validation, inference, scenarios, explanations and the group service",
               "delphinet"};
  app.require_subcommand(1);

  std::string net_path, scenarios_path, format = "table", output, scenario_name, level = "summary", input_path,
                        draft_path, config_path, bootstrap;
  std::vector<std::string> evidence, targets;
  int port = -1;
  std::string data_dir;

  auto* validate = app.add_subcommand("validate", "Check a network document");
  validate->add_option("network", net_path, "Network JSON")->required()->check(CLI::ExistingFile);

  auto* infer = app.add_subcommand("infer", "Posterior distributions given evidence");
  infer->add_option("network", net_path, "Network JSON")->required()->check(CLI::ExistingFile);
  infer->add_option("--evidence,-e", evidence, "Observation as Variable=state (repeatable)");
  infer->add_option("--targets,-t", targets, "Variables to report (comma separated)")->delimiter(',');
  infer->add_option("--format", format, "table or json")->check(CLI::IsMember({"table", "json"}));

  auto* scenario = app.add_subcommand("scenario", "Scenario operations");
  scenario->require_subcommand(1);
  auto* scenario_run = scenario->add_subcommand("run", "Evaluate every scenario of a file");
  scenario_run->add_option("network", net_path, "Network JSON")->required()->check(CLI::ExistingFile);
  scenario_run->add_option("scenarios", scenarios_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
  scenario_run->add_option("--format", format, "table or json")->check(CLI::IsMember({"table", "json"}));

  auto* explain = app.add_subcommand("explain", "Explain a scenario in words and numbers");
  explain->add_option("network", net_path, "Network JSON")->required()->check(CLI::ExistingFile);
  explain->add_option("--scenario,-s", scenario_name, "Scenario name (Base when omitted)");
  explain->add_option("--scenarios", scenarios_path, "Scenario JSON file")->check(CLI::ExistingFile);
  explain->add_option("--level", level, "summary or detail")->check(CLI::IsMember({"summary", "detail"}));
  explain->add_option("--format", format, "table (text) or json")->check(CLI::IsMember({"table", "json"}));

  auto* report = app.add_subcommand("report", "Report drafts");
  report->require_subcommand(1);
  auto* autofill = report->add_subcommand("autofill", "Fill report sections from a scenario explanation");
  autofill->add_option("draft", draft_path, "Report draft HTML")->required()->check(CLI::ExistingFile);
  autofill->add_option("network", net_path, "Network JSON")->required()->check(CLI::ExistingFile);
  autofill->add_option("--scenario,-s", scenario_name, "Scenario name (Base when omitted)");
  autofill->add_option("--scenarios", scenarios_path, "Scenario JSON file")->check(CLI::ExistingFile);
  autofill->add_option("-o,--output", output, "Output HTML (stdout when omitted)");
  std::string title = "Report";
  std::vector<std::string> questions;
  auto* report_new = report->add_subcommand("new", "Start an empty report draft");
  report_new->add_option("--title", title, "Report title");
  report_new->add_option("--question,-q", questions, "Question to answer (repeatable)");
  report_new->add_option("-o,--output", output, "Output HTML (stdout when omitted)");

  auto* import = app.add_subcommand("import-xmlbif", "Convert XMLBIF to a network document");
  import->add_option("input", input_path, "XMLBIF file")->required()->check(CLI::ExistingFile);
  import->add_option("-o,--output", output, "Output JSON (stdout when omitted)");

  auto* export_cmd = app.add_subcommand("export-xmlbif", "Convert a network document to XMLBIF");
  export_cmd->add_option("network", net_path, "Network JSON")->required()->check(CLI::ExistingFile);
  export_cmd->add_option("-o,--output", output, "Output XML (stdout when omitted)");

  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--config,-c", config_path, "Config JSON")->check(CLI::ExistingFile);
  serve->add_option("--port,-p", port, "Port (overrides config and environment)");
  serve->add_option("--data-dir", data_dir, "Data directory (overrides config and environment)");
  serve->add_option("--bootstrap-admin", bootstrap, "user:password for the first administrator");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return kUsage;
  }

  try {
    if (*validate) {
      bn::BayesianNetwork net;
      try {
        net = bn::load_network(net_path);
      } catch (const Error& e) {
        err << "invalid: " << e.what() << "\n";
        return kRejected;
      }
      auto r = bn::validate_network(net);
      for (const auto& f : r.findings) {
        err << to_string(f.code) << ": " << f.subject << ": " << f.message << "\n";
        if (f.code == ErrorCode::CycleError) out << "cycle: " << f.subject << "\n";
      }
      if (!r.ok()) return kRejected;
      out << "ok: " << net.variables.size() << " variables, " << net.arrows.size() << " arrows";
      if (!bn::is_complete(net)) out << " (unspecified cells take the uniform residual)";
      out << "\n";
      return kOk;
    }
    if (*infer) {
      auto net = detail::load_valid(net_path);
      scenarios::Scenario s;
      s.id = "adhoc";
      s.name = "Ad hoc";
      s.evidence = detail::parse_evidence(evidence);
      s.outputs = targets.empty() ? scenarios::default_outputs(net) : targets;
      auto e = scenarios::evaluate_scenario(net, s);
      if (format == "json") {
        out << json{{"posteriors", views::posteriors_json(net, e.posteriors)}}.dump(2) << "\n";
      } else {
        out << views::posteriors_table(net, e.posteriors);
      }
      return kOk;
    }
    if (*scenario_run) {
      auto net = detail::load_valid(net_path);
      json all = json::array();
      std::vector<scenarios::Scenario> list{scenarios::make_base_scenario(net, "")};
      for (auto& s : detail::load_scenarios(scenarios_path)) list.push_back(std::move(s));
      for (const auto& s : list) {
        auto normalized = scenarios::normalized(net, s);
        auto e = scenarios::evaluate_scenario(net, normalized);
        if (format == "json") {
          all.push_back(views::evaluation_json(net, normalized, e));
        } else {
          out << "== " << s.name << " ==\n";
          auto ev = views::evidence_json(net, normalized.evidence);
          if (!ev.empty()) {
            out << "evidence:";
            for (const auto& [k, v] : ev.items()) out << " " << k << "=" << v.get<std::string>();
            out << "\n";
          }
          out << views::posteriors_table(net, e.posteriors) << e.summary.text() << "\n";
        }
      }
      if (format == "json") out << all.dump(2) << "\n";
      return kOk;
    }
    if (*explain) {
      auto net = detail::load_valid(net_path);
      auto s = detail::find_scenario(net, net_path, scenarios_path, scenario_name.empty() ? "Base" : scenario_name);
      if (level == "summary") {
        auto e = scenarios::evaluate_scenario(net, s);
        if (format == "json") {
          out << views::summary_json(e.summary).dump(2) << "\n";
        } else {
          out << e.summary.text();
        }
      } else {
        auto d = scenarios::explain_scenario(net, s);
        if (format == "json") {
          out << views::detail_json(d).dump(2) << "\n";
        } else {
          out << d.markdown();
        }
      }
      return kOk;
    }
    if (*autofill) {
      auto net = detail::load_valid(net_path);
      auto s = detail::find_scenario(net, net_path, scenarios_path, scenario_name.empty() ? "Base" : scenario_name);
      std::ifstream in(draft_path, std::ios::binary);
      std::stringstream html;
      html << in.rdbuf();
      auto draft = reporting::draft_from_html(html.str());
      auto version = scenarios::network_version(net);
      auto filled =
          reporting::autofill_from_explanation(draft, scenarios::explain_scenario(net, s), version, version);
      detail::write_output(output, reporting::render_html(filled), out);
      return kOk;
    }
    if (*report_new) {
      detail::write_output(output, reporting::render_html(reporting::instantiate_template(title, questions)), out);
      return kOk;
    }
    if (*import) {
      std::ifstream in(input_path);
      auto net = bn::read_xmlbif(in);
      detail::write_output(output, bn::to_json(net).dump(2) + "\n", out);
      return kOk;
    }
    if (*export_cmd) {
      detail::write_output(output, bn::write_xmlbif(detail::load_valid(net_path)), out);
      return kOk;
    }
    if (*serve) {
      auto config = service::load_config(config_path);
      if (port >= 0) config.port = port;
      if (!data_dir.empty()) config.data_dir = data_dir;
      service::Platform platform(config, nullptr, service::system_seconds,
                                 [&err](const std::string& w) { err << "warning: " << w << "\n"; });
      if (!bootstrap.empty() && !platform.has_users()) {
        auto colon = bootstrap.find(':');
        if (colon == std::string::npos) throw CLI::ValidationError("--bootstrap-admin", "expected user:password");
        platform.create_user(std::nullopt, bootstrap.substr(0, colon), bootstrap.substr(colon + 1), true);
      }
      service::HttpServer server(platform);
      int bound = server.bind(config.host, config.port);
      out << "listening on http://" << config.host << ":" << bound << "\n" << std::flush;
      detail::running_server = &server;
      std::signal(SIGINT, detail::stop_server);
      std::signal(SIGTERM, detail::stop_server);
      server.listen();
      detail::running_server = nullptr;
      return kOk;
    }
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    if (e.code() == ErrorCode::CycleError && !e.detail().empty()) {
      err << "cycle:";
      for (const auto& v : e.detail()) err << " " << v;
      err << "\n";
    }
    return kRejected;
  }
  return kUsage;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return run(std::vector<std::string>(argv + 1, argv + argc), out, err);
}

}  // namespace delphinet::cli
