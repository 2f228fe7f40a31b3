#pragma once

#include <algorithm>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "delphinet/bn/network.hpp"
#include "delphinet/bn/ops.hpp"
#include "delphinet/inference/compiled.hpp"

namespace delphinet::nets {

using bn::BayesianNetwork;
using bn::VariableKind;

inline BayesianNetwork boolean_net(const std::vector<std::string>& names) {
  BayesianNetwork net;
  for (const auto& n : names) net = bn::add_variable(std::move(net), {n, n, VariableKind::Boolean, {}, false, "", ""});
  return net;
}

/// A -> C <- B with independent causes.
inline BayesianNetwork collider() {
  auto net = boolean_net({"A", "B", "C"});
  net = bn::add_arrow(std::move(net), {"A", "C", ""});
  net = bn::add_arrow(std::move(net), {"B", "C", ""});
  net = bn::set_cpt_row(std::move(net), "A", 0, {0.3, 0.7});
  net = bn::set_cpt_row(std::move(net), "B", 0, {0.4, 0.6});
  // Rows (A,B): (T,T) (T,F) (F,T) (F,F)
  net = bn::set_cpt_row(std::move(net), "C", 0, {0.95, 0.05});
  net = bn::set_cpt_row(std::move(net), "C", 1, {0.8, 0.2});
  net = bn::set_cpt_row(std::move(net), "C", 2, {0.7, 0.3});
  net = bn::set_cpt_row(std::move(net), "C", 3, {0.05, 0.95});
  net.variables[0].is_target = true;
  return net;
}

/// B <- A -> C.
inline BayesianNetwork common_cause() {
  auto net = boolean_net({"A", "B", "C"});
  net = bn::add_arrow(std::move(net), {"A", "B", ""});
  net = bn::add_arrow(std::move(net), {"A", "C", ""});
  net = bn::set_cpt_row(std::move(net), "A", 0, {0.35, 0.65});
  net = bn::set_cpt_row(std::move(net), "B", 0, {0.9, 0.1});
  net = bn::set_cpt_row(std::move(net), "B", 1, {0.2, 0.8});
  net = bn::set_cpt_row(std::move(net), "C", 0, {0.75, 0.25});
  net = bn::set_cpt_row(std::move(net), "C", 1, {0.1, 0.9});
  net.variables[1].is_target = true;
  return net;
}

/// A -> B with P(A=t)=0.5 and P(B=t|A) = 0.8 / 0.2.
inline BayesianNetwork chain() {
  auto net = boolean_net({"A", "B"});
  net = bn::add_arrow(std::move(net), {"A", "B", ""});
  net = bn::set_cpt_row(std::move(net), "A", 0, {0.5, 0.5});
  net = bn::set_cpt_row(std::move(net), "B", 0, {0.8, 0.2});
  net = bn::set_cpt_row(std::move(net), "B", 1, {0.2, 0.8});
  return net;
}

/// A -> B -> D, A -> C -> D.
inline BayesianNetwork diamond() {
  auto net = boolean_net({"A", "B", "C", "D"});
  for (auto [f, t] : std::vector<std::pair<std::string, std::string>>{{"A", "B"}, {"A", "C"}, {"B", "D"}, {"C", "D"}}) {
    net = bn::add_arrow(std::move(net), {f, t, ""});
  }
  return net;
}

struct RandomNetOptions {
  std::size_t min_vars = 1;
  std::size_t max_vars = 8;
  std::size_t max_states = 3;
  std::size_t max_parents = 3;
  double edge_probability = 0.4;
  double zero_probability = 0.05;  // chance a cell is exactly 0
};

/// Random DAG (edges only from earlier to later variables in a shuffled
/// order) with random complete CPTs.
inline BayesianNetwork random_network(std::mt19937_64& rng, const RandomNetOptions& o = {}) {
  std::uniform_int_distribution<std::size_t> nvars(o.min_vars, o.max_vars);
  std::uniform_int_distribution<std::size_t> nstates(2, o.max_states);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t n = nvars(rng);
  BayesianNetwork net;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t k = nstates(rng);
    std::vector<std::string> states;
    for (std::size_t s = 0; s < k; ++s) states.push_back("s" + std::to_string(s));
    std::string id = "v" + std::to_string(i);
    net = bn::add_variable(std::move(net), {id, "V" + std::to_string(i),
                                            k == 2 ? VariableKind::Binary : VariableKind::Unordered, states,
                                            false, "", ""});
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t j = 1; j < n; ++j) {
    std::size_t parents = 0;
    for (std::size_t i = 0; i < j && parents < o.max_parents; ++i) {
      if (unit(rng) < o.edge_probability) {
        net = bn::add_arrow(std::move(net), {"v" + std::to_string(order[i]), "v" + std::to_string(order[j]), ""});
        ++parents;
      }
    }
  }
  for (auto& cpt : net.cpts) {
    for (auto& row : cpt.rows) {
      double sum = 0.0;
      std::vector<double> w(row.size());
      for (auto& x : w) {
        x = unit(rng) < o.zero_probability ? 0.0 : unit(rng) + 1e-3;
        sum += x;
      }
      if (sum == 0.0) {
        w[0] = 1.0;
        sum = 1.0;
      }
      for (std::size_t s = 0; s < row.size(); ++s) row[s] = w[s] / sum;
    }
  }
  return net;
}

/// Up to `max_items` observations of distinct random variables.
inline inference::Evidence random_evidence(std::mt19937_64& rng, const BayesianNetwork& net,
                                           std::size_t max_items) {
  std::vector<std::size_t> idx(net.variables.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  std::uniform_int_distribution<std::size_t> count(0, std::min(max_items, idx.size()));
  inference::Evidence e;
  std::size_t k = count(rng);
  for (std::size_t i = 0; i < k; ++i) {
    const auto& v = net.variables[idx[i]];
    std::uniform_int_distribution<std::size_t> st(0, v.states.size() - 1);
    e.set(v.id, v.states[st(rng)]);
  }
  return e;
}

}  // namespace delphinet::nets
