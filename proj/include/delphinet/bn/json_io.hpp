#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "delphinet/bn/network.hpp"
#include "delphinet/error.hpp"

namespace delphinet::bn {

inline constexpr const char* kNetworkFormat = "delphinet.network";
inline constexpr int kNetworkFormatVersion = 1;

/// Canonical network document. Layout (see docs/network-format.md):
///   { "format", "version", "name", "variables", "arrows", "cpts",
///     "canvasLabels", "provenance" }
/// CPT rows are keyed by the parent states they condition on ("given");
/// unspecified cells are null.
inline nlohmann::json to_json(const BayesianNetwork& net) {
  using nlohmann::json;
  json doc;
  doc["format"] = kNetworkFormat;
  doc["version"] = kNetworkFormatVersion;
  doc["name"] = net.name;
  json vars = json::array();
  for (const auto& v : net.variables) {
    vars.push_back({{"id", v.id},
                    {"name", v.name},
                    {"kind", std::string(to_string(v.kind))},
                    {"states", v.states},
                    {"isTarget", v.is_target},
                    {"description", v.description},
                    {"rationale", v.rationale}});
  }
  doc["variables"] = std::move(vars);
  json arrows = json::array();
  for (const auto& a : net.arrows) arrows.push_back({{"from", a.from}, {"to", a.to}, {"label", a.label}});
  doc["arrows"] = std::move(arrows);
  json cpts = json::array();
  for (const auto& cpt : net.cpts) {
    json rows = json::array();
    for (std::size_t r = 0; r < cpt.rows.size(); ++r) {
      json given = json::array();
      auto digits = row_combination(net, cpt, r);
      for (std::size_t i = 0; i < digits.size(); ++i) {
        given.push_back(net.require(cpt.parents[i]).states[digits[i]]);
      }
      json p = json::array();
      for (const auto& cell : cpt.rows[r]) p.push_back(cell ? json(*cell) : json(nullptr));
      rows.push_back({{"given", std::move(given)}, {"p", std::move(p)}});
    }
    cpts.push_back({{"child", cpt.child}, {"parents", cpt.parents}, {"rows", std::move(rows)}});
  }
  doc["cpts"] = std::move(cpts);
  json labels = json::array();
  for (const auto& l : net.canvas_labels) labels.push_back({{"text", l.text}, {"x", l.x}, {"y", l.y}});
  doc["canvasLabels"] = std::move(labels);
  doc["provenance"] = {{"author", net.provenance.author},
                       {"created", net.provenance.created},
                       {"modified", net.provenance.modified}};
  return doc;
}

/// Parses a network document. Structural problems that the document format
/// can express (cycles, overflowing rows) are left for validate_network();
/// this only rejects documents it cannot represent.
inline BayesianNetwork network_from_json(const nlohmann::json& doc) {
  auto bad = [](const std::string& why) -> Error { return Error(ErrorCode::InvalidDocument, why); };
  try {
    if (!doc.is_object()) throw bad("network document must be a JSON object");
    if (doc.contains("format") && doc.at("format") != kNetworkFormat) {
      throw bad("unexpected format tag");
    }
    if (doc.contains("version") && doc.at("version").get<int>() != kNetworkFormatVersion) {
      throw bad("unsupported network format version " + doc.at("version").dump());
    }
    BayesianNetwork net;
    net.name = doc.value("name", "");
    for (const auto& jv : doc.value("variables", nlohmann::json::array())) {
      Variable v;
      v.id = jv.at("id").get<std::string>();
      v.name = jv.value("name", v.id);
      auto kind = parse_kind(jv.value("kind", "Unordered"));
      if (!kind) throw bad("unknown variable kind for '" + v.name + "'");
      v.kind = *kind;
      v.states = jv.at("states").get<std::vector<std::string>>();
      v.is_target = jv.value("isTarget", false);
      v.description = jv.value("description", "");
      v.rationale = jv.value("rationale", "");
      net.variables.push_back(std::move(v));
    }
    for (const auto& ja : doc.value("arrows", nlohmann::json::array())) {
      net.arrows.push_back({ja.at("from").get<std::string>(), ja.at("to").get<std::string>(),
                            ja.value("label", "")});
    }
    std::map<std::string, const nlohmann::json*> by_child;
    const auto cpt_docs = doc.value("cpts", nlohmann::json::array());
    for (const auto& jc : cpt_docs) {
      by_child[jc.at("child").get<std::string>()] = &jc;
    }
    for (const auto& v : net.variables) {
      Cpt cpt;
      cpt.child = v.id;
      auto it = by_child.find(v.id);
      if (it == by_child.end()) {
        // Missing CPT: parents from arrows, every cell unspecified.
        for (const auto& a : net.arrows) {
          if (a.to == v.id) cpt.parents.push_back(a.from);
        }
      } else {
        cpt.parents = it->second->value("parents", std::vector<std::string>{});
      }
      std::size_t count = 1;
      std::vector<const Variable*> parents;
      for (const auto& p : cpt.parents) {
        const auto* pv = net.find(p);
        if (!pv) throw bad("CPT of '" + v.name + "' names unknown parent '" + p + "'");
        parents.push_back(pv);
        count *= pv->states.size();
      }
      cpt.rows.assign(count, Cpt::Row(v.states.size(), std::nullopt));
      if (it != by_child.end()) {
        for (const auto& jr : it->second->value("rows", nlohmann::json::array())) {
          auto given = jr.value("given", std::vector<std::string>{});
          if (given.size() != parents.size()) throw bad("CPT row of '" + v.name + "' has wrong 'given'");
          std::size_t index = 0;
          for (std::size_t i = 0; i < parents.size(); ++i) {
            auto s = parents[i]->state_index(given[i]);
            if (!s) throw bad("CPT row of '" + v.name + "' names unknown state '" + given[i] + "'");
            index = index * parents[i]->states.size() + *s;
          }
          const auto& jp = jr.at("p");
          if (jp.size() != v.states.size()) throw bad("CPT row of '" + v.name + "' has wrong width");
          for (std::size_t s = 0; s < jp.size(); ++s) {
            if (!jp[s].is_null()) cpt.rows[index][s] = jp[s].get<double>();
          }
        }
      }
      net.cpts.push_back(std::move(cpt));
    }
    for (const auto& jl : doc.value("canvasLabels", nlohmann::json::array())) {
      net.canvas_labels.push_back({jl.value("text", ""), jl.value("x", 0.0), jl.value("y", 0.0)});
    }
    if (doc.contains("provenance")) {
      const auto& jp = doc.at("provenance");
      net.provenance = {jp.value("author", ""), jp.value("created", std::int64_t{0}),
                        jp.value("modified", std::int64_t{0})};
    }
    return net;
  } catch (const nlohmann::json::exception& e) {
    throw bad(std::string("malformed network document: ") + e.what());
  }
}

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::InvalidDocument, "'" + path + "' is not valid JSON: " + e.what());
  }
}

inline BayesianNetwork load_network(const std::string& path) {
  return network_from_json(read_json_file(path));
}

inline void save_network(const BayesianNetwork& net, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  out << to_json(net).dump(2) << '\n';
}

}  // namespace delphinet::bn
