#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "delphinet/bn/network.hpp"
#include "delphinet/error.hpp"

namespace delphinet::bn {

/// Slack allowed on the specified mass of a row before it counts as overflow.
inline constexpr double kRowSlack = 1e-9;
/// A fully specified row within this distance of 1 is renormalized.
inline constexpr double kRenormTolerance = 1e-6;
/// Rows already this close to 1 are left untouched, which makes completion
/// idempotent bit-for-bit.
inline constexpr double kNormalizedEpsilon = 1e-12;

inline void check_states(VariableKind kind, const std::vector<std::string>& states,
                         const std::string& name) {
  std::set<std::string> unique(states.begin(), states.end());
  if (unique.size() != states.size()) {
    throw Error(ErrorCode::InvalidStates, "duplicate state name in '" + name + "'");
  }
  for (const auto& s : states) {
    if (s.empty()) throw Error(ErrorCode::InvalidStates, "empty state name in '" + name + "'");
  }
  switch (kind) {
    case VariableKind::Boolean:
      if (states != std::vector<std::string>{"True", "False"}) {
        throw Error(ErrorCode::InvalidStates,
                    "Boolean variable '" + name + "' must have exactly states [True, False]");
      }
      break;
    case VariableKind::Binary:
      if (states.size() != 2) {
        throw Error(ErrorCode::InvalidStates,
                    "Binary variable '" + name + "' must have exactly 2 states");
      }
      break;
    case VariableKind::Ordered:
    case VariableKind::Unordered:
      if (states.size() < 2) {
        throw Error(ErrorCode::InvalidStates, "variable '" + name + "' needs at least 2 states");
      }
      break;
  }
}

namespace detail {

inline std::string slug(const std::string& name) {
  std::string out;
  for (char c : name) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else if (!out.empty() && out.back() != '_') {
      out += '_';
    }
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out.empty() ? "var" : out;
}

inline Cpt::Row empty_row(std::size_t states) { return Cpt::Row(states, std::nullopt); }

inline std::size_t index_or_throw(const BayesianNetwork& net, std::string_view id) {
  auto i = net.index_of(id);
  if (!i) throw Error(ErrorCode::UnknownVariable, "no variable with id '" + std::string(id) + "'");
  return *i;
}

inline void reset_cpt(BayesianNetwork& net, std::size_t index) {
  auto& cpt = net.cpts[index];
  cpt.rows.assign(row_count(net, cpt), empty_row(net.variables[index].states.size()));
}

/// Removes `parent` from the child's CPT, averaging rows uniformly over the
/// removed parent's states. A cell stays specified only if it was specified
/// in every averaged row.
inline void marginalize_parent(BayesianNetwork& net, std::size_t child_index,
                               const std::string& parent) {
  auto& cpt = net.cpts[child_index];
  auto pos = std::find(cpt.parents.begin(), cpt.parents.end(), parent);
  if (pos == cpt.parents.end()) return;
  std::size_t k = static_cast<std::size_t>(pos - cpt.parents.begin());
  std::size_t card = net.require(parent).states.size();
  std::size_t inner = 1;
  for (std::size_t i = k + 1; i < cpt.parents.size(); ++i) {
    inner *= net.require(cpt.parents[i]).states.size();
  }
  std::size_t width = net.variables[child_index].states.size();
  std::size_t new_count = cpt.rows.size() / card;
  std::vector<Cpt::Row> rows(new_count, empty_row(width));
  for (std::size_t r = 0; r < new_count; ++r) {
    std::size_t outer = r / inner, in = r % inner;
    for (std::size_t s = 0; s < width; ++s) {
      double sum = 0.0;
      bool all = true;
      for (std::size_t j = 0; j < card; ++j) {
        const auto& cell = cpt.rows[(outer * card + j) * inner + in][s];
        if (!cell) {
          all = false;
          break;
        }
        sum += *cell;
      }
      if (all) rows[r][s] = sum / static_cast<double>(card);
    }
  }
  cpt.parents.erase(pos);
  cpt.rows = std::move(rows);
}

}  // namespace detail

/// Adds a variable with a single fully unspecified CPT row. An empty id is
/// replaced by a unique slug of the name.
inline BayesianNetwork add_variable(BayesianNetwork net, Variable v) {
  if (v.name.empty()) throw Error(ErrorCode::InvalidStates, "variable name must not be empty");
  if (net.find_by_name(v.name)) {
    throw Error(ErrorCode::DuplicateName, "a variable named '" + v.name + "' already exists");
  }
  if (v.kind == VariableKind::Boolean && v.states.empty()) v.states = {"True", "False"};
  check_states(v.kind, v.states, v.name);
  if (v.id.empty()) {
    std::string base = detail::slug(v.name), id = base;
    for (int n = 2; net.find(id); ++n) id = base + "_" + std::to_string(n);
    v.id = id;
  } else if (net.find(v.id)) {
    throw Error(ErrorCode::DuplicateName, "a variable with id '" + v.id + "' already exists");
  }
  Cpt cpt;
  cpt.child = v.id;
  cpt.rows.push_back(detail::empty_row(v.states.size()));
  net.variables.push_back(std::move(v));
  net.cpts.push_back(std::move(cpt));
  return net;
}

/// Directed path from `from` to `to` (inclusive), if any. Deterministic: the
/// search visits children in arrow insertion order.
inline std::optional<std::vector<std::string>> find_path(const BayesianNetwork& net,
                                                         const std::string& from,
                                                         const std::string& to) {
  std::vector<std::string> path{from};
  std::set<std::string> seen{from};
  auto dfs = [&](auto&& self, const std::string& at) -> bool {
    if (at == to) return true;
    for (const auto& a : net.arrows) {
      if (a.from != at || seen.count(a.to)) continue;
      seen.insert(a.to);
      path.push_back(a.to);
      if (self(self, a.to)) return true;
      path.pop_back();
    }
    return false;
  };
  if (dfs(dfs, from)) return path;
  return std::nullopt;
}

/// The child's rows are replicated across the new parent's states, so the
/// child starts out independent of the new parent.
inline BayesianNetwork add_arrow(BayesianNetwork net, Arrow a) {
  const auto& from = net.require(a.from);
  const auto& to = net.require(a.to);
  if (a.from == a.to) throw Error(ErrorCode::SelfLoop, "arrow from '" + from.name + "' to itself");
  if (net.has_arrow(a.from, a.to)) {
    throw Error(ErrorCode::DuplicateArrow,
                "arrow '" + from.name + "' -> '" + to.name + "' already exists");
  }
  if (auto back = find_path(net, a.to, a.from)) {
    std::vector<std::string> cycle;
    for (const auto& id : *back) cycle.push_back(net.require(id).name);
    cycle.push_back(to.name);
    std::string text;
    for (const auto& n : cycle) text += (text.empty() ? "" : " -> ") + n;
    throw Error(ErrorCode::CycleError, "arrow would create cycle " + text, cycle);
  }
  std::size_t child = detail::index_or_throw(net, a.to);
  std::size_t card = from.states.size();
  auto& cpt = net.cpts[child];
  std::vector<Cpt::Row> rows;
  rows.reserve(cpt.rows.size() * card);
  for (const auto& row : cpt.rows) {
    for (std::size_t j = 0; j < card; ++j) rows.push_back(row);
  }
  cpt.parents.push_back(a.from);
  cpt.rows = std::move(rows);
  net.arrows.push_back(std::move(a));
  return net;
}

inline BayesianNetwork remove_arrow(BayesianNetwork net, const std::string& from,
                                    const std::string& to) {
  auto it = std::find_if(net.arrows.begin(), net.arrows.end(),
                         [&](const Arrow& a) { return a.from == from && a.to == to; });
  if (it == net.arrows.end()) {
    throw Error(ErrorCode::UnknownArrow, "no arrow '" + from + "' -> '" + to + "'");
  }
  net.arrows.erase(it);
  detail::marginalize_parent(net, detail::index_or_throw(net, to), from);
  return net;
}

/// Cascades: incident arrows go, children are re-keyed by marginalizing the
/// deleted parent out uniformly.
inline BayesianNetwork remove_variable(BayesianNetwork net, const std::string& id) {
  std::size_t index = detail::index_or_throw(net, id);
  for (const auto& child : net.children(id)) {
    detail::marginalize_parent(net, detail::index_or_throw(net, child), id);
  }
  std::erase_if(net.arrows, [&](const Arrow& a) { return a.from == id || a.to == id; });
  net.variables.erase(net.variables.begin() + static_cast<std::ptrdiff_t>(index));
  net.cpts.erase(net.cpts.begin() + static_cast<std::ptrdiff_t>(index));
  return net;
}

inline BayesianNetwork rename_variable(BayesianNetwork net, const std::string& id,
                                       const std::string& name) {
  std::size_t index = detail::index_or_throw(net, id);
  if (name.empty()) throw Error(ErrorCode::InvalidStates, "variable name must not be empty");
  if (const auto* other = net.find_by_name(name); other && other->id != id) {
    throw Error(ErrorCode::DuplicateName, "a variable named '" + name + "' already exists");
  }
  net.variables[index].name = name;
  return net;
}

inline BayesianNetwork set_target(BayesianNetwork net, const std::string& id, bool is_target) {
  net.variables[detail::index_or_throw(net, id)].is_target = is_target;
  return net;
}

inline BayesianNetwork annotate_variable(BayesianNetwork net, const std::string& id,
                                         std::string description, std::string rationale) {
  auto& v = net.variables[detail::index_or_throw(net, id)];
  v.description = std::move(description);
  v.rationale = std::move(rationale);
  return net;
}

/// Renaming keeps the CPT (cells are positional).
inline BayesianNetwork rename_state(BayesianNetwork net, const std::string& id,
                                    const std::string& from, const std::string& to) {
  auto& v = net.variables[detail::index_or_throw(net, id)];
  auto s = v.state_index(from);
  if (!s) throw Error(ErrorCode::UnknownState, "'" + from + "' is not a state of '" + v.name + "'");
  auto states = v.states;
  states[*s] = to;
  check_states(v.kind, states, v.name);
  v.states = std::move(states);
  return net;
}

/// Replacing the state list invalidates the variable's own CPT and the rows of
/// every child; all of them are reset to unspecified.
inline BayesianNetwork set_states(BayesianNetwork net, const std::string& id,
                                  VariableKind kind, std::vector<std::string> states) {
  std::size_t index = detail::index_or_throw(net, id);
  auto& v = net.variables[index];
  check_states(kind, states, v.name);
  v.kind = kind;
  v.states = std::move(states);
  detail::reset_cpt(net, index);
  for (const auto& child : net.children(id)) {
    detail::reset_cpt(net, detail::index_or_throw(net, child));
  }
  return net;
}

inline double specified_sum(const Cpt::Row& row) {
  double sum = 0.0;
  for (const auto& cell : row) {
    if (cell) sum += *cell;
  }
  return sum;
}

/// Writes (or with nullopt, clears) one cell.
inline BayesianNetwork set_cpt_entry(BayesianNetwork net, const std::string& child,
                                     std::size_t row, const std::string& child_state,
                                     std::optional<double> p) {
  std::size_t index = detail::index_or_throw(net, child);
  const auto& v = net.variables[index];
  auto s = v.state_index(child_state);
  if (!s) {
    throw Error(ErrorCode::UnknownState,
                "'" + child_state + "' is not a state of '" + v.name + "'");
  }
  auto& cpt = net.cpts[index];
  if (row >= cpt.rows.size()) throw Error(ErrorCode::UnknownState, "row index out of range");
  if (p && !(*p >= 0.0 && *p <= 1.0)) {
    throw Error(ErrorCode::OutOfRange, "probability must lie in [0, 1]");
  }
  auto updated = cpt.rows[row];
  updated[*s] = p;
  if (specified_sum(updated) > 1.0 + kRowSlack) {
    throw Error(ErrorCode::RowOverflow,
                "specified probabilities in a row of '" + v.name + "' exceed 1");
  }
  cpt.rows[row] = std::move(updated);
  return net;
}

inline BayesianNetwork set_cpt_entry(BayesianNetwork net, std::string child,
                                     const std::map<std::string, std::string>& parent_combo,
                                     const std::string& child_state, std::optional<double> p) {
  std::size_t row = row_index(net, net.cpt(child), parent_combo);
  return set_cpt_entry(std::move(net), child, row, child_state, p);
}

/// Convenience for fixtures: sets a whole row at once.
inline BayesianNetwork set_cpt_row(BayesianNetwork net, std::string child, std::size_t row,
                                   const std::vector<double>& values) {
  const auto& v = net.require(child);
  if (values.size() != v.states.size()) {
    throw Error(ErrorCode::UnknownState, "row for '" + v.name + "' has wrong width");
  }
  const auto states = v.states;
  for (std::size_t s = 0; s < values.size(); ++s) net = set_cpt_entry(std::move(net), child, row, states[s], std::nullopt);
  for (std::size_t s = 0; s < values.size(); ++s) net = set_cpt_entry(std::move(net), child, row, states[s], values[s]);
  return net;
}

/// Fills each row's unspecified cells with an equal share of the unused mass.
inline Cpt::Row complete_row(const Cpt::Row& row, const std::string& name) {
  double sum = specified_sum(row);
  if (sum > 1.0 + kRowSlack) {
    throw Error(ErrorCode::RowOverflow, "specified probabilities in a row of '" + name + "' exceed 1");
  }
  auto unspecified = static_cast<std::size_t>(std::count(row.begin(), row.end(), std::nullopt));
  Cpt::Row out = row;
  if (unspecified > 0) {
    double share = std::max(0.0, 1.0 - sum) / static_cast<double>(unspecified);
    for (auto& cell : out) {
      if (!cell) cell = share;
    }
    return out;
  }
  if (std::abs(sum - 1.0) <= kNormalizedEpsilon) return out;
  if (std::abs(sum - 1.0) > kRenormTolerance) {
    throw Error(ErrorCode::RowSumError,
                "fully specified row of '" + name + "' sums to " + std::to_string(sum));
  }
  for (auto& cell : out) cell = *cell / sum;
  return out;
}

inline BayesianNetwork complete_cpt(BayesianNetwork net) {
  for (std::size_t i = 0; i < net.cpts.size(); ++i) {
    for (auto& row : net.cpts[i].rows) row = complete_row(row, net.variables[i].name);
  }
  return net;
}

inline bool is_complete(const BayesianNetwork& net) {
  for (const auto& cpt : net.cpts) {
    for (const auto& row : cpt.rows) {
      if (std::count(row.begin(), row.end(), std::nullopt) > 0) return false;
    }
  }
  return true;
}

/// Kahn's algorithm; ties broken by variable order in the document.
inline std::optional<std::vector<std::string>> topological_order(const BayesianNetwork& net) {
  std::map<std::string, int> indegree;
  for (const auto& v : net.variables) indegree[v.id] = 0;
  for (const auto& a : net.arrows) {
    if (!indegree.count(a.from) || !indegree.count(a.to)) return std::nullopt;
    ++indegree[a.to];
  }
  std::vector<std::string> order;
  std::vector<bool> done(net.variables.size(), false);
  while (order.size() < net.variables.size()) {
    bool progressed = false;
    for (std::size_t i = 0; i < net.variables.size(); ++i) {
      const auto& id = net.variables[i].id;
      if (done[i] || indegree[id] != 0) continue;
      done[i] = true;
      order.push_back(id);
      for (const auto& a : net.arrows) {
        if (a.from == id) --indegree[a.to];
      }
      progressed = true;
      break;
    }
    if (!progressed) return std::nullopt;
  }
  return order;
}

struct Finding {
  ErrorCode code;
  std::string subject;
  std::string message;
};

struct ValidationReport {
  std::vector<Finding> findings;
  std::optional<std::vector<std::string>> topological_order;

  bool ok() const { return findings.empty(); }
};

/// Checks a network (typically freshly loaded) against every structural
/// invariant. Unspecified CPT cells are legal; they are filled at inference.
inline ValidationReport validate_network(const BayesianNetwork& net) {
  ValidationReport report;
  auto add = [&](ErrorCode code, std::string subject, std::string message) {
    report.findings.push_back({code, std::move(subject), std::move(message)});
  };
  std::set<std::string> ids, names;
  bool ids_ok = true;
  for (const auto& v : net.variables) {
    if (v.id.empty() || !ids.insert(v.id).second) {
      add(ErrorCode::DuplicateName, v.name, "variable id '" + v.id + "' is empty or duplicated");
      ids_ok = false;
    }
    if (!names.insert(v.name).second) {
      add(ErrorCode::DuplicateName, v.name, "variable name '" + v.name + "' is duplicated");
    }
    try {
      check_states(v.kind, v.states, v.name);
    } catch (const Error& e) {
      add(e.code(), v.name, e.what());
    }
  }
  std::set<std::pair<std::string, std::string>> seen_arrows;
  bool arrows_ok = ids_ok;
  for (const auto& a : net.arrows) {
    std::string subject = a.from + " -> " + a.to;
    if (!ids.count(a.from) || !ids.count(a.to)) {
      add(ErrorCode::UnknownVariable, subject, "arrow references an unknown variable");
      arrows_ok = false;
      continue;
    }
    if (a.from == a.to) {
      add(ErrorCode::SelfLoop, subject, "arrow from a variable to itself");
      arrows_ok = false;
    }
    if (!seen_arrows.insert({a.from, a.to}).second) {
      add(ErrorCode::DuplicateArrow, subject, "duplicate arrow");
    }
  }
  if (arrows_ok) {
    report.topological_order = topological_order(net);
    if (!report.topological_order) {
      // Name one offending cycle: a variable that can reach itself.
      for (const auto& a : net.arrows) {
        if (auto back = find_path(net, a.to, a.from)) {
          std::string text;
          for (const auto& id : *back) text += net.require(id).name + " -> ";
          text += net.require(a.to).name;
          add(ErrorCode::CycleError, text, "network contains cycle " + text);
          break;
        }
      }
    }
  }
  if (net.cpts.size() != net.variables.size()) {
    add(ErrorCode::InvalidDocument, "cpts", "one CPT per variable is required");
    return report;
  }
  if (!arrows_ok) return report;
  for (std::size_t i = 0; i < net.variables.size(); ++i) {
    const auto& v = net.variables[i];
    const auto& cpt = net.cpts[i];
    if (cpt.child != v.id) {
      add(ErrorCode::InvalidDocument, v.name, "CPT order does not match variable order");
      continue;
    }
    std::set<std::string> declared(cpt.parents.begin(), cpt.parents.end());
    std::set<std::string> from_arrows;
    for (const auto& a : net.arrows) {
      if (a.to == v.id) from_arrows.insert(a.from);
    }
    if (declared != from_arrows || declared.size() != cpt.parents.size()) {
      add(ErrorCode::InvalidDocument, v.name, "CPT parents do not match incoming arrows");
      continue;
    }
    if (cpt.rows.size() != row_count(net, cpt)) {
      add(ErrorCode::InvalidDocument, v.name, "CPT is missing rows for some parent combinations");
      continue;
    }
    for (std::size_t r = 0; r < cpt.rows.size(); ++r) {
      const auto& row = cpt.rows[r];
      std::string subject = v.name + "[row " + std::to_string(r) + "]";
      if (row.size() != v.states.size()) {
        add(ErrorCode::InvalidDocument, subject, "row width differs from state count");
        continue;
      }
      bool range_ok = true;
      for (const auto& cell : row) {
        if (cell && !(*cell >= 0.0 && *cell <= 1.0)) range_ok = false;
      }
      if (!range_ok) {
        add(ErrorCode::OutOfRange, subject, "probability outside [0, 1]");
        continue;
      }
      double sum = specified_sum(row);
      bool full = std::count(row.begin(), row.end(), std::nullopt) == 0;
      if (sum > 1.0 + kRowSlack) {
        add(ErrorCode::RowOverflow, subject, "specified probabilities exceed 1");
      } else if (full && std::abs(sum - 1.0) > kRenormTolerance) {
        add(ErrorCode::RowSumError, subject, "fully specified row does not sum to 1");
      }
    }
  }
  return report;
}

}  // namespace delphinet::bn
