#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "delphinet/error.hpp"

namespace delphinet::bn {

enum class VariableKind { Boolean, Binary, Ordered, Unordered };

inline std::string_view to_string(VariableKind kind) {
  switch (kind) {
    case VariableKind::Boolean: return "Boolean";
    case VariableKind::Binary: return "Binary";
    case VariableKind::Ordered: return "Ordered";
    case VariableKind::Unordered: return "Unordered";
  }
  return "Unordered";
}

inline std::optional<VariableKind> parse_kind(std::string_view text) {
  if (text == "Boolean") return VariableKind::Boolean;
  if (text == "Binary") return VariableKind::Binary;
  if (text == "Ordered") return VariableKind::Ordered;
  if (text == "Unordered") return VariableKind::Unordered;
  return std::nullopt;
}

/// For Ordered variables the order of `states` is the rank order.
struct Variable {
  std::string id;
  std::string name;
  VariableKind kind = VariableKind::Boolean;
  std::vector<std::string> states;
  bool is_target = false;
  std::string description;
  std::string rationale;

  std::optional<std::size_t> state_index(std::string_view state) const {
    auto it = std::find(states.begin(), states.end(), state);
    if (it == states.end()) return std::nullopt;
    return static_cast<std::size_t>(it - states.begin());
  }

  friend bool operator==(const Variable&, const Variable&) = default;
};

struct Arrow {
  std::string from;
  std::string to;
  std::string label;

  friend bool operator==(const Arrow&, const Arrow&) = default;
};

/// One row per parent-state combination, laid out mixed-radix with the first
/// parent varying slowest. A cell holds nullopt until explicitly specified.
struct Cpt {
  using Row = std::vector<std::optional<double>>;

  std::string child;
  std::vector<std::string> parents;
  std::vector<Row> rows;

  friend bool operator==(const Cpt&, const Cpt&) = default;
};

struct CanvasLabel {
  std::string text;
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const CanvasLabel&, const CanvasLabel&) = default;
};

struct Provenance {
  std::string author;
  std::int64_t created = 0;
  std::int64_t modified = 0;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

/// Plain value type. `cpts[i]` always belongs to `variables[i]`. Use the free
/// functions in ops.hpp to mutate it; they keep the invariants (acyclic,
/// CPT rows keyed by the parent set). Documents loaded from disk are checked
/// with validate_network().
///
/// The ops take the network by value; never pass them a reference into the
/// same network you are moving in (copy the id first).
struct BayesianNetwork {
  std::string name;
  std::vector<Variable> variables;
  std::vector<Arrow> arrows;
  std::vector<Cpt> cpts;
  std::vector<CanvasLabel> canvas_labels;
  Provenance provenance;

  std::optional<std::size_t> index_of(std::string_view id) const {
    for (std::size_t i = 0; i < variables.size(); ++i) {
      if (variables[i].id == id) return i;
    }
    return std::nullopt;
  }

  const Variable* find(std::string_view id) const {
    auto i = index_of(id);
    return i ? &variables[*i] : nullptr;
  }

  const Variable* find_by_name(std::string_view name) const {
    for (const auto& v : variables) {
      if (v.name == name) return &v;
    }
    return nullptr;
  }

  /// Accepts either an id or a display name; ids win on ambiguity.
  const Variable& resolve(std::string_view id_or_name) const {
    if (const auto* v = find(id_or_name)) return *v;
    if (const auto* v = find_by_name(id_or_name)) return *v;
    throw Error(ErrorCode::UnknownVariable, "no variable '" + std::string(id_or_name) + "'");
  }

  const Variable& require(std::string_view id) const {
    if (const auto* v = find(id)) return *v;
    throw Error(ErrorCode::UnknownVariable, "no variable with id '" + std::string(id) + "'");
  }

  const Cpt& cpt(std::string_view id) const {
    auto i = index_of(id);
    if (!i) throw Error(ErrorCode::UnknownVariable, "no variable with id '" + std::string(id) + "'");
    return cpts[*i];
  }

  bool has_arrow(std::string_view from, std::string_view to) const {
    return std::any_of(arrows.begin(), arrows.end(),
                       [&](const Arrow& a) { return a.from == from && a.to == to; });
  }

  std::vector<std::string> parents(std::string_view id) const { return cpt(id).parents; }

  std::vector<std::string> children(std::string_view id) const {
    std::vector<std::string> out;
    for (const auto& a : arrows) {
      if (a.from == id) out.push_back(a.to);
    }
    return out;
  }

  std::vector<std::string> target_ids() const {
    std::vector<std::string> out;
    for (const auto& v : variables) {
      if (v.is_target) out.push_back(v.id);
    }
    return out;
  }

  friend bool operator==(const BayesianNetwork&, const BayesianNetwork&) = default;
};

inline std::size_t row_count(const BayesianNetwork& net, const Cpt& cpt) {
  std::size_t n = 1;
  for (const auto& p : cpt.parents) n *= net.require(p).states.size();
  return n;
}

/// Decodes a row index into one state index per parent.
inline std::vector<std::size_t> row_combination(const BayesianNetwork& net, const Cpt& cpt,
                                                std::size_t row) {
  std::vector<std::size_t> digits(cpt.parents.size());
  for (std::size_t i = cpt.parents.size(); i-- > 0;) {
    std::size_t card = net.require(cpt.parents[i]).states.size();
    digits[i] = row % card;
    row /= card;
  }
  return digits;
}

/// Parent assignment given as parent id (or name) -> state name.
inline std::size_t row_index(const BayesianNetwork& net, const Cpt& cpt,
                             const std::map<std::string, std::string>& combo) {
  if (combo.size() != cpt.parents.size()) {
    throw Error(ErrorCode::UnknownState, "parent combination must name every parent of '" +
                                             net.require(cpt.child).name + "'");
  }
  std::size_t index = 0;
  for (const auto& pid : cpt.parents) {
    const auto& parent = net.require(pid);
    auto it = combo.find(parent.id);
    if (it == combo.end()) it = combo.find(parent.name);
    if (it == combo.end()) {
      throw Error(ErrorCode::UnknownState, "missing state for parent '" + parent.name + "'");
    }
    auto s = parent.state_index(it->second);
    if (!s) {
      throw Error(ErrorCode::UnknownState,
                  "'" + it->second + "' is not a state of '" + parent.name + "'");
    }
    index = index * parent.states.size() + *s;
  }
  return index;
}

}  // namespace delphinet::bn
