#pragma once

#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "delphinet/bn/json_io.hpp"
#include "delphinet/bn/network.hpp"
#include "delphinet/bn/ops.hpp"
#include "delphinet/explanation.hpp"
#include "delphinet/hash.hpp"
#include "delphinet/inference/elimination.hpp"

namespace delphinet::scenarios {

using inference::Evidence;
using inference::Posterior;

inline constexpr const char* kBaseScenarioId = "base";

/// Named evidence set plus the variables whose distributions it reports.
/// Evidence and outputs are stored by variable id.
struct Scenario {
  std::string id;
  std::string name;
  std::string description;
  Evidence evidence;
  std::vector<std::string> outputs;
  std::map<std::string, std::string> target_states;
  std::string owner;
  std::string network_owner;  // whose step-5 network this runs on
  bool is_base = false;
};

/// Outputs default to the target variables, or every variable if none is
/// marked as a target.
inline std::vector<std::string> default_outputs(const bn::BayesianNetwork& net) {
  auto out = net.target_ids();
  if (out.empty()) {
    for (const auto& v : net.variables) out.push_back(v.id);
  }
  return out;
}

inline Scenario make_base_scenario(const bn::BayesianNetwork& net, const std::string& owner) {
  Scenario s;
  s.id = kBaseScenarioId;
  s.name = "Base";
  s.description = "No evidence entered.";
  s.outputs = default_outputs(net);
  s.owner = owner;
  s.network_owner = owner;
  s.is_base = true;
  return s;
}

/// Rewrites names to ids and checks every reference against `net`.
inline Scenario normalized(const bn::BayesianNetwork& net, Scenario s) {
  Evidence ev;
  for (const auto& [var, state] : s.evidence.items()) {
    const auto& v = net.resolve(var);
    if (!v.state_index(state)) {
      throw Error(ErrorCode::UnknownState, "'" + state + "' is not a state of '" + v.name + "'");
    }
    ev.set(v.id, state);
  }
  s.evidence = std::move(ev);
  if (s.outputs.empty()) s.outputs = default_outputs(net);
  std::vector<std::string> outputs;
  for (const auto& o : s.outputs) outputs.push_back(net.resolve(o).id);
  s.outputs = std::move(outputs);
  std::map<std::string, std::string> states;
  for (const auto& [var, state] : s.target_states) {
    const auto& v = net.resolve(var);
    if (!v.state_index(state)) {
      throw Error(ErrorCode::UnknownState, "'" + state + "' is not a state of '" + v.name + "'");
    }
    states[v.id] = state;
  }
  s.target_states = std::move(states);
  if (s.is_base && !s.evidence.empty()) {
    throw Error(ErrorCode::InvalidEvidence, "the base scenario cannot carry evidence");
  }
  return s;
}

/// Validates and names a new scenario against the scenarios already stored
/// for the same network.
inline Scenario create_scenario(const bn::BayesianNetwork& net, const std::vector<Scenario>& existing,
                                Scenario s) {
  if (s.name.empty()) throw Error(ErrorCode::InvalidPayload, "scenario name must not be empty");
  for (const auto& other : existing) {
    if (other.name == s.name) {
      throw Error(ErrorCode::NameCollision, "a scenario named '" + s.name + "' already exists");
    }
  }
  s.is_base = false;
  return normalized(net, std::move(s));
}

inline nlohmann::json to_json(const Scenario& s) {
  nlohmann::json evidence = nlohmann::json::array();
  for (const auto& [v, st] : s.evidence.items()) evidence.push_back({{"variable", v}, {"state", st}});
  return {{"id", s.id},
          {"name", s.name},
          {"description", s.description},
          {"evidence", evidence},
          {"outputs", s.outputs},
          {"targetStates", s.target_states},
          {"owner", s.owner},
          {"networkOwner", s.network_owner},
          {"isBase", s.is_base}};
}

/// Evidence may be an ordered array of {variable, state} or an object.
inline Scenario scenario_from_json(const nlohmann::json& j) {
  try {
    Scenario s;
    s.id = j.value("id", "");
    s.name = j.value("name", s.id);
    s.description = j.value("description", "");
    if (j.contains("evidence")) {
      const auto& ev = j.at("evidence");
      if (ev.is_array()) {
        for (const auto& item : ev) s.evidence.set(item.at("variable").get<std::string>(), item.at("state").get<std::string>());
      } else {
        for (const auto& [k, v] : ev.items()) s.evidence.set(k, v.get<std::string>());
      }
    }
    s.outputs = j.value("outputs", std::vector<std::string>{});
    s.target_states = j.value("targetStates", std::map<std::string, std::string>{});
    s.owner = j.value("owner", "");
    s.network_owner = j.value("networkOwner", s.owner);
    s.is_base = j.value("isBase", false);
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidPayload, std::string("malformed scenario: ") + e.what());
  }
}

/// Identifies a network for comparison and staleness checks. Provenance
/// timestamps are excluded so that re-saving an unchanged network keeps it.
inline std::string network_version(const bn::BayesianNetwork& net) {
  auto doc = bn::to_json(net);
  doc.erase("provenance");
  return sha256_hex(doc.dump());
}

/// What inference actually depends on: structure and completed CPTs.
inline std::string inference_key(const bn::BayesianNetwork& net, const Scenario& s) {
  auto completed = bn::complete_cpt(net);
  nlohmann::json doc;
  for (const auto& v : completed.variables) doc["v"].push_back({v.id, v.states});
  for (const auto& a : completed.arrows) doc["a"].push_back({a.from, a.to});
  for (const auto& c : completed.cpts) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : c.rows) {
      for (const auto& cell : r) rows.push_back(*cell);
    }
    doc["c"].push_back({c.child, c.parents, rows});
  }
  for (const auto& [v, st] : s.evidence.items()) doc["e"].push_back({v, st});
  doc["o"] = s.outputs;
  return sha256_hex(doc.dump());
}

struct Evaluation {
  std::string scenario_id;
  std::string network_version;
  std::vector<Posterior> posteriors;
  explanation::ExplanationSummary summary;
};

inline nlohmann::json posteriors_json(const bn::BayesianNetwork& net, const std::vector<Posterior>& posteriors) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& p : posteriors) {
    out.push_back({{"id", p.variable},
                   {"variable", net.require(p.variable).name},
                   {"states", p.states},
                   {"probabilities", p.probabilities}});
  }
  return out;
}

/// Caches posteriors by inference_key. Bounded; cleared wholesale when full.
class EvaluationCache {
 public:
  explicit EvaluationCache(std::size_t capacity = 4096) : capacity_(capacity) {}

  std::optional<std::vector<Posterior>> find(const std::string& key) const {
    std::lock_guard lock(mu_);
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    ++hits_;
    return it->second;
  }

  void store(const std::string& key, std::vector<Posterior> value) {
    std::lock_guard lock(mu_);
    if (entries_.size() >= capacity_) entries_.clear();
    entries_[key] = std::move(value);
  }

  std::size_t hits() const {
    std::lock_guard lock(mu_);
    return hits_;
  }

 private:
  std::size_t capacity_;
  mutable std::mutex mu_;
  mutable std::size_t hits_ = 0;
  std::unordered_map<std::string, std::vector<Posterior>> entries_;
};

/// Posteriors for every output plus the regenerated summary explanation.
inline Evaluation evaluate_scenario(const bn::BayesianNetwork& net, const Scenario& input,
                                    EvaluationCache* cache = nullptr,
                                    const inference::FactorLimits& limits = {}) {
  Scenario s = normalized(net, input);
  Evaluation out;
  out.scenario_id = s.id;
  out.network_version = network_version(net);
  std::string key;
  if (cache) {
    key = inference_key(net, s);
    if (auto hit = cache->find(key)) out.posteriors = std::move(*hit);
  }
  if (out.posteriors.empty()) {
    out.posteriors = inference::posterior(net, s.evidence, s.outputs, limits);
    if (cache) cache->store(key, out.posteriors);
  }
  out.summary = explanation::summarize(net, s.evidence, explanation::focus_for(net, s.outputs, s.target_states),
                                       out.posteriors);
  return out;
}

inline explanation::ExplanationDetail explain_scenario(const bn::BayesianNetwork& net, const Scenario& input) {
  Scenario s = normalized(net, input);
  return explanation::explain(net, s.evidence, explanation::focus_for(net, s.outputs, s.target_states));
}

struct ComparisonRow {
  std::string variable;
  std::string state;
  double first = 0.0;
  double second = 0.0;
  double delta = 0.0;  // second - first
};

/// Aligns two evaluations of the same network version variable by variable
/// (variables present in both, in the first evaluation's order).
inline std::vector<ComparisonRow> compare_scenarios(const Evaluation& a, const Evaluation& b) {
  if (a.network_version != b.network_version) {
    throw Error(ErrorCode::VersionMismatch, "scenarios were evaluated on different network versions");
  }
  std::vector<ComparisonRow> rows;
  for (const auto& pa : a.posteriors) {
    for (const auto& pb : b.posteriors) {
      if (pa.variable != pb.variable) continue;
      for (std::size_t i = 0; i < pa.states.size(); ++i) {
        rows.push_back({pa.variable, pa.states[i], pa.probabilities[i], pb.probabilities[i],
                        pb.probabilities[i] - pa.probabilities[i]});
      }
    }
  }
  return rows;
}

/// True when the two networks differ in variables, states or arrows (as
/// opposed to CPT values or annotations only).
inline bool structurally_different(const bn::BayesianNetwork& a, const bn::BayesianNetwork& b) {
  if (a.variables.size() != b.variables.size() || a.arrows.size() != b.arrows.size()) return true;
  for (std::size_t i = 0; i < a.variables.size(); ++i) {
    const auto* other = b.find(a.variables[i].id);
    if (!other || other->states != a.variables[i].states) return true;
  }
  for (const auto& arrow : a.arrows) {
    if (!b.has_arrow(arrow.from, arrow.to)) return true;
  }
  return false;
}

}  // namespace delphinet::scenarios
