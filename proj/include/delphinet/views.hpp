#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "delphinet/explanation.hpp"
#include "delphinet/scenarios.hpp"
#include "delphinet/verbal.hpp"

// JSON shapes shared by the HTTP API and the CLI, so both print the same
// numbers for the same inputs.

namespace delphinet::views {

using json = nlohmann::json;

inline json posteriors_json(const bn::BayesianNetwork& net, const std::vector<inference::Posterior>& posteriors) {
  json out = json::array();
  for (const auto& p : posteriors) {
    json dual = json::array();
    for (double v : p.probabilities) dual.push_back(verbal::dual(v));
    out.push_back({{"id", p.variable},
                   {"variable", net.require(p.variable).name},
                   {"states", p.states},
                   {"probabilities", p.probabilities},
                   {"dual", std::move(dual)}});
  }
  return out;
}

inline json evidence_json(const bn::BayesianNetwork& net, const inference::Evidence& e) {
  json out = json::object();
  for (const auto& [v, s] : e.items()) out[net.resolve(v).name] = s;
  return out;
}

inline json statements_json(const std::vector<explanation::Statement>& statements) {
  json out = json::array();
  for (const auto& s : statements) out.push_back(s.text);
  return out;
}

inline json summary_json(const explanation::ExplanationSummary& s) {
  return {{"targets", statements_json(s.target_statements)},
          {"evidence", s.evidence_list},
          {"changes", statements_json(s.change_statements)},
          {"text", s.text()}};
}

inline json detail_json(const explanation::ExplanationDetail& d) {
  json sections = json::array();
  for (const auto& s : d.sections) {
    sections.push_back({{"id", s.id}, {"title", s.title}, {"statements", statements_json(s.statements)}});
  }
  return {{"sections", std::move(sections)}, {"markdown", d.markdown()}};
}

inline json evaluation_json(const bn::BayesianNetwork& net, const scenarios::Scenario& s,
                            const scenarios::Evaluation& e) {
  return {{"scenario", s.id},
          {"name", s.name},
          {"evidence", evidence_json(net, s.evidence)},
          {"networkVersion", e.network_version},
          {"posteriors", posteriors_json(net, e.posteriors)},
          {"summary", summary_json(e.summary)}};
}

/// Fixed-width table: one line per state, percentage and descriptor.
inline std::string posteriors_table(const bn::BayesianNetwork& net,
                                    const std::vector<inference::Posterior>& posteriors) {
  std::string out;
  for (const auto& p : posteriors) {
    out += net.require(p.variable).name + "\n";
    std::size_t width = 0;
    for (const auto& s : p.states) width = std::max(width, s.size());
    for (std::size_t i = 0; i < p.states.size(); ++i) {
      out += "  " + p.states[i] + std::string(width - p.states[i].size() + 2, ' ') + verbal::dual(p.probabilities[i]) +
             "\n";
    }
  }
  return out;
}

}  // namespace delphinet::views
