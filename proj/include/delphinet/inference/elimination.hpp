#pragma once

#include <algorithm>
#include <cstddef>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "delphinet/bn/network.hpp"
#include "delphinet/inference/compiled.hpp"
#include "delphinet/inference/factor.hpp"

namespace delphinet::inference {

namespace detail {

/// CPT of variable `i` as a factor, with observed variables fixed and
/// dropped from the scope.
inline Factor cpt_factor(const CompiledNetwork& c, std::size_t i) {
  std::vector<std::size_t> full = c.parents[i];
  full.push_back(i);
  Factor f;
  for (auto v : full) {
    if (c.observed[v] < 0) {
      f.scope.push_back(v);
      f.cards.push_back(c.cards[v]);
    }
  }
  std::size_t total = 1;
  for (auto k : f.cards) total *= k;
  f.table.assign(total, 0.0);
  std::vector<std::size_t> x(full.size(), 0);
  for (std::size_t j = 0; j < full.size(); ++j) {
    if (c.observed[full[j]] >= 0) x[j] = static_cast<std::size_t>(c.observed[full[j]]);
  }
  for (std::size_t cell = 0; cell < total; ++cell) {
    std::size_t src = 0;
    for (std::size_t j = 0; j < full.size(); ++j) src = src * c.cards[full[j]] + x[j];
    f.table[cell] = c.tables[i][src];
    for (std::size_t j = full.size(); j-- > 0;) {
      if (c.observed[full[j]] >= 0) continue;
      if (++x[j] < c.cards[full[j]]) break;
      x[j] = 0;
    }
  }
  return f;
}

/// Ancestors of `seeds` (inclusive). Everything else is barren for the query.
inline std::vector<bool> relevant(const CompiledNetwork& c, const std::vector<std::size_t>& seeds) {
  std::vector<bool> keep(c.ids.size(), false);
  std::vector<std::size_t> stack = seeds;
  while (!stack.empty()) {
    auto v = stack.back();
    stack.pop_back();
    if (keep[v]) continue;
    keep[v] = true;
    for (auto p : c.parents[v]) stack.push_back(p);
  }
  return keep;
}

}  // namespace detail

/// Greedy min-fill over the interaction graph of `factors`; ties go to the
/// lexicographically smallest variable id. Returns the order in which the
/// `eliminate` variables are removed.
inline std::vector<std::size_t> min_fill_order(const CompiledNetwork& c,
                                               const std::vector<Factor>& factors,
                                               std::vector<std::size_t> eliminate) {
  std::vector<std::set<std::size_t>> adj(c.ids.size());
  for (const auto& f : factors) {
    for (auto a : f.scope) {
      for (auto b : f.scope) {
        if (a != b) adj[a].insert(b);
      }
    }
  }
  std::vector<std::size_t> order;
  while (!eliminate.empty()) {
    std::size_t best = 0;
    std::size_t best_fill = static_cast<std::size_t>(-1);
    for (std::size_t k = 0; k < eliminate.size(); ++k) {
      auto v = eliminate[k];
      std::vector<std::size_t> nb(adj[v].begin(), adj[v].end());
      std::size_t fill = 0;
      for (std::size_t i = 0; i < nb.size(); ++i) {
        for (std::size_t j = i + 1; j < nb.size(); ++j) {
          if (!adj[nb[i]].count(nb[j])) ++fill;
        }
      }
      if (fill < best_fill || (fill == best_fill && c.ids[v] < c.ids[eliminate[best]])) {
        best = k;
        best_fill = fill;
      }
    }
    auto v = eliminate[best];
    for (auto a : adj[v]) {
      for (auto b : adj[v]) {
        if (a != b) adj[a].insert(b);
      }
      adj[a].erase(v);
    }
    adj[v].clear();
    order.push_back(v);
    eliminate.erase(eliminate.begin() + static_cast<std::ptrdiff_t>(best));
  }
  return order;
}

/// Unnormalized distribution over `target` (or, when the target is observed,
/// a one-element vector holding P(e)) by variable elimination.
inline std::vector<double> eliminate_for(const CompiledNetwork& c, std::size_t target,
                                         const FactorLimits& limits) {
  std::vector<std::size_t> seeds{target};
  for (std::size_t i = 0; i < c.ids.size(); ++i) {
    if (c.observed[i] >= 0) seeds.push_back(i);
  }
  auto keep = detail::relevant(c, seeds);
  std::vector<Factor> factors;
  std::vector<std::size_t> hidden;
  for (std::size_t i = 0; i < c.ids.size(); ++i) {
    if (!keep[i]) continue;
    factors.push_back(detail::cpt_factor(c, i));
    if (c.observed[i] < 0 && i != target) hidden.push_back(i);
  }
  for (auto v : min_fill_order(c, factors, hidden)) {
    limits.check(0);
    Factor joined;
    std::vector<Factor> rest;
    for (auto& f : factors) {
      if (f.has(v)) {
        joined = multiply(joined, f, limits);
      } else {
        rest.push_back(std::move(f));
      }
    }
    rest.push_back(sum_out(joined, v));
    factors = std::move(rest);
  }
  Factor result;
  for (const auto& f : factors) result = multiply(result, f, limits);
  return result.table;
}

/// Exact posteriors by variable elimination, one elimination run per target.
inline std::vector<Posterior> posterior(const bn::BayesianNetwork& net, const Evidence& evidence,
                                        const std::vector<std::string>& targets,
                                        const FactorLimits& limits = {}) {
  const CompiledNetwork c = compile(net, evidence);
  std::vector<Posterior> out;
  for (auto t : resolve_targets(net, targets)) {
    auto table = eliminate_for(c, t, limits);
    double z = 0.0;
    for (double x : table) z += x;
    if (z < kImpossibleEvidence) {
      throw Error(ErrorCode::ImpossibleEvidence, "the evidence has zero probability under the model");
    }
    std::vector<double> dist(c.cards[t], 0.0);
    if (c.observed[t] >= 0) {
      dist[static_cast<std::size_t>(c.observed[t])] = 1.0;
    } else {
      for (std::size_t s = 0; s < dist.size(); ++s) dist[s] = table[s] / z;
    }
    out.push_back(make_posterior(net, t, std::move(dist)));
  }
  return out;
}

/// Evidence-free posteriors: the "base" view of the model.
inline std::vector<Posterior> prior_marginals(const bn::BayesianNetwork& net,
                                              const std::vector<std::string>& targets,
                                              const FactorLimits& limits = {}) {
  return posterior(net, Evidence{}, targets, limits);
}

/// P(e) by elimination, with every unobserved variable summed out.
inline double evidence_probability(const bn::BayesianNetwork& net, const Evidence& evidence) {
  const CompiledNetwork c = compile(net, evidence);
  std::vector<std::size_t> seeds;
  for (std::size_t i = 0; i < c.ids.size(); ++i) {
    if (c.observed[i] >= 0) seeds.push_back(i);
  }
  if (seeds.empty()) return 1.0;
  double z = 0.0;
  for (double x : eliminate_for(c, seeds.front(), {})) z += x;
  return z;
}

struct Impact {
  Posterior before;
  Posterior after;
};

/// Target distribution before and after adding one evidence item to `base`.
inline Impact evidence_impact(const bn::BayesianNetwork& net, const Evidence& base,
                              const std::pair<std::string, std::string>& item,
                              const std::string& target, const FactorLimits& limits = {}) {
  const std::string item_id = net.resolve(item.first).id;
  for (const auto& [v, s] : base.items()) {
    if (net.resolve(v).id == item_id) {
      throw Error(ErrorCode::EvidenceAlreadyPresent,
                  "'" + net.resolve(v).name + "' is already part of the base evidence");
    }
  }
  auto before = posterior(net, base, {target}, limits);
  auto after = posterior(net, base.with(item.first, item.second), {target}, limits);
  return {std::move(before.front()), std::move(after.front())};
}

}  // namespace delphinet::inference
