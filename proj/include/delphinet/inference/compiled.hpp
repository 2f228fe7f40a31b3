#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "delphinet/bn/network.hpp"
#include "delphinet/bn/ops.hpp"
#include "delphinet/error.hpp"

namespace delphinet::inference {

/// Observed state per variable id. Insertion order is kept because the
/// explanation walks evidence items in the order they were entered.
class Evidence {
 public:
  Evidence() = default;
  Evidence(std::initializer_list<std::pair<std::string, std::string>> items) {
    for (const auto& [v, s] : items) set(v, s);
  }

  /// A variable may appear at most once.
  void set(const std::string& variable, const std::string& state) {
    for (const auto& [v, s] : items_) {
      if (v == variable) {
        throw Error(ErrorCode::InvalidEvidence, "variable '" + variable + "' is observed twice");
      }
    }
    items_.emplace_back(variable, state);
  }

  bool contains(const std::string& variable) const {
    for (const auto& [v, s] : items_) {
      if (v == variable) return true;
    }
    return false;
  }

  const std::vector<std::pair<std::string, std::string>>& items() const { return items_; }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }

  Evidence prefix(std::size_t n) const {
    Evidence out;
    for (std::size_t i = 0; i < n && i < items_.size(); ++i) out.items_.push_back(items_[i]);
    return out;
  }

  Evidence with(const std::string& variable, const std::string& state) const {
    Evidence out = *this;
    out.set(variable, state);
    return out;
  }

  friend bool operator==(const Evidence&, const Evidence&) = default;

 private:
  std::vector<std::pair<std::string, std::string>> items_;
};

struct Posterior {
  std::string variable;
  std::vector<std::string> states;
  std::vector<double> probabilities;

  double at(const std::string& state) const {
    for (std::size_t i = 0; i < states.size(); ++i) {
      if (states[i] == state) return probabilities[i];
    }
    throw Error(ErrorCode::UnknownState, "'" + state + "' is not a state of '" + variable + "'");
  }

  friend bool operator==(const Posterior&, const Posterior&) = default;
};

/// Joint evidence probability below this is treated as zero.
inline constexpr double kImpossibleEvidence = 1e-12;

/// Dense, index-based view of a completed network shared by the inference
/// routines. Variable i has `cards[i]` states; its CPT is stored row-major
/// over (parents..., child) with the child varying fastest.
struct CompiledNetwork {
  std::vector<std::string> ids;
  std::vector<std::size_t> cards;
  std::vector<std::vector<std::size_t>> parents;
  std::vector<std::vector<double>> tables;
  std::vector<int> observed;  // -1 = unobserved, else state index

  std::size_t index(const std::string& id) const {
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (ids[i] == id) return i;
    }
    throw Error(ErrorCode::UnknownVariable, "no variable with id '" + id + "'");
  }
};

/// Completes the CPTs (uniform residual) and flattens them. Evidence and
/// targets may name variables by id or display name.
inline CompiledNetwork compile(const bn::BayesianNetwork& input, const Evidence& evidence) {
  auto report = bn::validate_network(input);
  if (!report.ok()) {
    const auto& f = report.findings.front();
    throw Error(f.code, f.message);
  }
  const bn::BayesianNetwork net = bn::complete_cpt(input);
  CompiledNetwork c;
  for (const auto& v : net.variables) {
    c.ids.push_back(v.id);
    c.cards.push_back(v.states.size());
  }
  for (std::size_t i = 0; i < net.variables.size(); ++i) {
    const auto& cpt = net.cpts[i];
    std::vector<std::size_t> ps;
    for (const auto& p : cpt.parents) ps.push_back(*net.index_of(p));
    c.parents.push_back(std::move(ps));
    std::vector<double> table;
    table.reserve(cpt.rows.size() * c.cards[i]);
    for (const auto& row : cpt.rows) {
      for (const auto& cell : row) table.push_back(*cell);
    }
    c.tables.push_back(std::move(table));
  }
  c.observed.assign(c.ids.size(), -1);
  for (const auto& [var, state] : evidence.items()) {
    const auto& v = net.resolve(var);
    auto s = v.state_index(state);
    if (!s) throw Error(ErrorCode::UnknownState, "'" + state + "' is not a state of '" + v.name + "'");
    auto i = *net.index_of(v.id);
    if (c.observed[i] >= 0) {
      throw Error(ErrorCode::InvalidEvidence, "variable '" + v.name + "' is observed twice");
    }
    c.observed[i] = static_cast<int>(*s);
  }
  return c;
}

inline std::vector<std::size_t> resolve_targets(const bn::BayesianNetwork& net,
                                                const std::vector<std::string>& targets) {
  std::vector<std::size_t> out;
  for (const auto& t : targets) out.push_back(*net.index_of(net.resolve(t).id));
  return out;
}

inline Posterior make_posterior(const bn::BayesianNetwork& net, std::size_t index,
                                std::vector<double> probabilities) {
  const auto& v = net.variables[index];
  return {v.id, v.states, std::move(probabilities)};
}

}  // namespace delphinet::inference
