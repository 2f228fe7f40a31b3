#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "delphinet/bn/json_io.hpp"
#include "delphinet/bn/ops.hpp"
#include "delphinet/reporting.hpp"
#include "delphinet/scenarios.hpp"
#include "delphinet/workflow/types.hpp"

// Step payloads. Every work item and group-solution step stores JSON in one
// of these shapes:
//   step 1     {"hypotheses": [{"text", "rationale"}], "evidence": [{"text", "rationale"}]}
//   steps 2-4  {"network": <network document>}
//   step 5     {"network": <network document>, "scenarios": [<scenario>]}
//   step 6     {"report": <report draft>}

namespace delphinet::workflow {

using nlohmann::json;

inline void check_step(int step) {
  if (step < 1 || step > kSteps) {
    throw Error(ErrorCode::OutOfRange, "step must be between 1 and " + std::to_string(kSteps));
  }
}

inline bool has_network(int step) { return step >= 2 && step <= kStepNetwork; }

inline bn::BayesianNetwork payload_network(const json& payload) {
  if (!payload.is_object() || !payload.contains("network")) return {};
  return bn::network_from_json(payload.at("network"));
}

inline std::vector<scenarios::Scenario> payload_scenarios(const json& payload) {
  std::vector<scenarios::Scenario> out;
  if (!payload.is_object() || !payload.contains("scenarios")) return out;
  for (const auto& j : payload.at("scenarios")) out.push_back(scenarios::scenario_from_json(j));
  return out;
}

inline reporting::ReportDraft payload_report(const json& payload) {
  try {
    return payload.at("report").get<reporting::ReportDraft>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidPayload, std::string("malformed report draft: ") + e.what());
  }
}

namespace detail {

inline json normalize_items(const json& payload, const char* key) {
  json out = json::array();
  if (!payload.contains(key)) return out;
  const auto& items = payload.at(key);
  if (!items.is_array()) throw Error(ErrorCode::InvalidPayload, std::string("'") + key + "' must be a list");
  for (const auto& item : items) {
    if (item.is_string()) {
      out.push_back({{"text", item.get<std::string>()}, {"rationale", ""}});
    } else if (item.is_object() && item.contains("text") && item.at("text").is_string()) {
      json entry = {{"text", item.at("text")}, {"rationale", item.value("rationale", "")}};
      if (item.contains("adoptedFrom")) entry["adoptedFrom"] = item.value("adoptedFrom", "");
      out.push_back(std::move(entry));
    } else {
      throw Error(ErrorCode::InvalidPayload, std::string("each entry of '") + key + "' needs a text");
    }
  }
  return out;
}

inline json normalize_network(const json& payload, const std::string& author, std::int64_t now) {
  auto net = payload.contains("network") ? bn::network_from_json(payload.at("network")) : bn::BayesianNetwork{};
  auto report = bn::validate_network(net);
  if (!report.ok()) {
    std::vector<std::string> problems;
    for (const auto& f : report.findings) problems.push_back(std::string(to_string(f.code)) + ": " + f.message);
    throw Error(ErrorCode::InvalidPayload, "network is invalid: " + problems.front(), problems);
  }
  if (net.provenance.author.empty()) net.provenance.author = author;
  if (net.provenance.created == 0) net.provenance.created = now;
  net.provenance.modified = now;
  return bn::to_json(net);
}

}  // namespace detail

/// Checks a step payload and brings it into canonical form. Step-5 payloads
/// always end up with exactly one base scenario, listed first.
inline json normalize_payload(int step, const json& content, const std::string& owner, std::int64_t now) {
  check_step(step);
  if (!content.is_object()) throw Error(ErrorCode::InvalidPayload, "step content must be a JSON object");
  if (step == 1) {
    return {{"hypotheses", detail::normalize_items(content, "hypotheses")},
            {"evidence", detail::normalize_items(content, "evidence")}};
  }
  if (step == kStepReport) {
    if (!content.contains("report")) throw Error(ErrorCode::InvalidPayload, "step 6 content needs a 'report'");
    auto draft = payload_report(content);
    reporting::check_template(draft);
    return {{"report", draft}};
  }
  json out = {{"network", detail::normalize_network(content, owner, now)}};
  if (step == kStepNetwork) {
    auto net = bn::network_from_json(out.at("network"));
    std::vector<scenarios::Scenario> kept;
    for (auto s : payload_scenarios(content)) {
      if (s.is_base || s.id == scenarios::kBaseScenarioId) continue;
      s.owner = owner;
      s.network_owner = owner;
      if (s.id.empty()) throw Error(ErrorCode::InvalidPayload, "scenario '" + s.name + "' needs an id");
      for (const auto& k : kept) {
        if (k.id == s.id) throw Error(ErrorCode::InvalidPayload, "duplicate scenario id '" + s.id + "'");
      }
      kept.push_back(scenarios::create_scenario(net, kept, s));
    }
    json list = json::array({scenarios::to_json(scenarios::make_base_scenario(net, owner))});
    for (const auto& s : kept) list.push_back(scenarios::to_json(s));
    out["scenarios"] = std::move(list);
  }
  return out;
}

/// Content that may not be shared: nothing entered yet.
inline bool payload_empty(int step, const json& payload) {
  if (payload.is_null() || (payload.is_object() && payload.empty())) return true;
  if (step == 1) return payload.at("hypotheses").empty() && payload.at("evidence").empty();
  if (step == kStepReport) return payload_report(payload).empty();
  return payload.at("network").value("variables", json::array()).empty();
}

inline json empty_payload(int step, const std::string& title = "",
                          const std::vector<std::string>& questions = {}) {
  if (step == 1) return {{"hypotheses", json::array()}, {"evidence", json::array()}};
  if (step == kStepReport) return {{"report", reporting::instantiate_template(title, questions)}};
  json out = {{"network", bn::to_json(bn::BayesianNetwork{})}};
  if (step == kStepNetwork) out["scenarios"] = json::array();
  return out;
}

/// Which elements of a source payload to copy.
///   {"all": true}                        whole payload
///   {"hypotheses": [i..], "evidence": [i..]}   step 1, by index
///   {"variables": [id..], "arrows": [{"from","to"}..]}  steps 2-5
///   {"sections": [id..]}                 step 6
struct Selection {
  bool all = false;
  std::vector<std::size_t> hypotheses;
  std::vector<std::size_t> evidence;
  std::vector<std::string> variables;
  std::vector<std::pair<std::string, std::string>> arrows;
  std::vector<std::string> sections;

  bool empty() const {
    return !all && hypotheses.empty() && evidence.empty() && variables.empty() && arrows.empty() &&
           sections.empty();
  }
};

inline Selection selection_from_json(const json& j) {
  try {
    Selection s;
    s.all = j.value("all", false);
    s.hypotheses = j.value("hypotheses", std::vector<std::size_t>{});
    s.evidence = j.value("evidence", std::vector<std::size_t>{});
    s.variables = j.value("variables", std::vector<std::string>{});
    for (const auto& a : j.value("arrows", json::array())) {
      if (a.is_array()) {
        s.arrows.emplace_back(a.at(0).get<std::string>(), a.at(1).get<std::string>());
      } else {
        s.arrows.emplace_back(a.at("from").get<std::string>(), a.at("to").get<std::string>());
      }
    }
    s.sections = j.value("sections", std::vector<std::string>{});
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::IncompatibleSelection, std::string("malformed selection: ") + e.what());
  }
}

inline json to_json(const Selection& s) {
  json arrows = json::array();
  for (const auto& [from, to] : s.arrows) arrows.push_back({{"from", from}, {"to", to}});
  return {{"all", s.all},         {"hypotheses", s.hypotheses}, {"evidence", s.evidence},
          {"variables", s.variables}, {"arrows", arrows},        {"sections", s.sections}};
}

namespace detail {

[[noreturn]] inline void incompatible(const std::string& why) {
  throw Error(ErrorCode::IncompatibleSelection, why);
}

inline void adopt_items(json& dest, const json& source, const char* key, const std::vector<std::size_t>& picks,
                        const std::string& note) {
  const auto& items = source.at(key);
  for (auto i : picks) {
    if (i >= items.size()) incompatible(std::string("no ") + key + " entry " + std::to_string(i));
    json item = items[i];
    item["adoptedFrom"] = note;
    dest[key].push_back(std::move(item));
  }
}

/// Copies variables and arrows by name, so ids in the destination stay its
/// own. A CPT is copied along with an adopted variable when its parents
/// exist in the destination under the same names.
inline bn::BayesianNetwork adopt_network(bn::BayesianNetwork dest, const bn::BayesianNetwork& src,
                                         const Selection& sel) {
  std::set<std::string> adopted;
  for (const auto& id : sel.variables) {
    const auto& v = src.resolve(id);
    if (dest.find_by_name(v.name)) continue;
    bn::Variable copy = v;
    copy.id = dest.find(v.id) ? std::string() : v.id;
    dest = bn::add_variable(std::move(dest), std::move(copy));
    adopted.insert(v.name);
  }
  for (const auto& [from_id, to_id] : sel.arrows) {
    const auto* from = src.find(from_id) ? src.find(from_id) : src.find_by_name(from_id);
    const auto* to = src.find(to_id) ? src.find(to_id) : src.find_by_name(to_id);
    if (!from || !to || !src.has_arrow(from->id, to->id)) {
      incompatible("the source has no arrow '" + from_id + "' -> '" + to_id + "'");
    }
    const auto* df = dest.find_by_name(from->name);
    const auto* dt = dest.find_by_name(to->name);
    if (!df || !dt) {
      incompatible("arrow '" + from->name + "' -> '" + to->name +
                   "' needs both endpoint variables in the destination");
    }
    if (df->states != from->states || dt->states != to->states) {
      incompatible("arrow '" + from->name + "' -> '" + to->name + "' joins variables whose states differ");
    }
    std::string df_id = df->id, dt_id = dt->id;
    if (dest.has_arrow(df_id, dt_id)) continue;
    std::string label;
    for (const auto& a : src.arrows) {
      if (a.from == from->id && a.to == to->id) label = a.label;
    }
    dest = bn::add_arrow(std::move(dest), {df_id, dt_id, label});
  }
  for (const auto& name : adopted) {
    const auto& sv = *src.find_by_name(name);
    const auto& scpt = src.cpt(sv.id);
    auto di = *dest.index_of(dest.find_by_name(name)->id);
    std::vector<std::string> src_parents, dest_parents;
    for (const auto& p : scpt.parents) src_parents.push_back(src.require(p).name);
    for (const auto& p : dest.cpts[di].parents) dest_parents.push_back(dest.require(p).name);
    if (src_parents == dest_parents) dest.cpts[di].rows = scpt.rows;
  }
  return dest;
}

}  // namespace detail

/// Merges the selected elements of `source` into `dest` (both normalized
/// payloads of `step`) and returns the new destination payload.
inline json adopt_elements(int step, const json& dest, const json& source, const Selection& sel,
                           const std::string& note) {
  if (sel.empty()) detail::incompatible("nothing selected");
  if (sel.all) {
    if (step == kStepReport) {
      auto draft = payload_report(source);
      for (auto& s : draft.sections) {
        for (auto& b : s.blocks) {
          if (!b.generated) b.source = note;
        }
      }
      return {{"report", draft}};
    }
    return source;
  }
  json out = dest;
  if (step == 1) {
    if (!sel.variables.empty() || !sel.arrows.empty() || !sel.sections.empty()) {
      detail::incompatible("step 1 selections name hypotheses or evidence");
    }
    detail::adopt_items(out, source, "hypotheses", sel.hypotheses, note);
    detail::adopt_items(out, source, "evidence", sel.evidence, note);
    return out;
  }
  if (step == kStepReport) {
    if (sel.sections.empty()) detail::incompatible("step 6 selections name report sections");
    auto draft = payload_report(dest);
    auto src = payload_report(source);
    for (const auto& id : sel.sections) {
      auto* from = [&]() -> reporting::ReportSection* {
        for (auto& s : src.sections) {
          if (s.id == id) return &s;
        }
        return nullptr;
      }();
      if (!from) detail::incompatible("no report section '" + id + "'");
      auto& to = draft.section(id);
      for (auto b : from->blocks) {
        b.source = b.generated ? b.source : note;
        to.blocks.push_back(std::move(b));
      }
    }
    out["report"] = draft;
    return out;
  }
  if (sel.variables.empty() && sel.arrows.empty()) {
    detail::incompatible("network selections name variables or arrows");
  }
  auto net = detail::adopt_network(payload_network(dest), payload_network(source), sel);
  out["network"] = bn::to_json(net);
  return out;
}

}  // namespace delphinet::workflow
