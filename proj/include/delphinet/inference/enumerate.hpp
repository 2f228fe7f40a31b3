#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "delphinet/bn/network.hpp"
#include "delphinet/inference/compiled.hpp"

namespace delphinet::inference {

/// Largest joint table the brute-force oracle agrees to sum over.
inline constexpr std::size_t kOracleMaxCells = std::size_t{1} << 24;

/// Reference implementation: sums the full joint over every assignment.
/// Deliberately shares nothing with the elimination engine beyond CPT
/// flattening, so it can serve as the test oracle.
inline std::vector<Posterior> enumerate_posteriors(const bn::BayesianNetwork& net,
                                                   const Evidence& evidence,
                                                   const std::vector<std::string>& targets) {
  const CompiledNetwork c = compile(net, evidence);
  const auto target_idx = resolve_targets(net, targets);
  const std::size_t n = c.ids.size();
  std::size_t cells = 1;
  for (auto k : c.cards) {
    if (cells > kOracleMaxCells / k) {
      throw Error(ErrorCode::NetworkTooLarge, "joint distribution exceeds 2^24 cells");
    }
    cells *= k;
  }
  std::vector<std::vector<double>> mass(target_idx.size());
  for (std::size_t t = 0; t < target_idx.size(); ++t) mass[t].assign(c.cards[target_idx[t]], 0.0);
  double total = 0.0;
  std::vector<std::size_t> x(n, 0);
  for (std::size_t cell = 0; cell < cells; ++cell) {
    bool consistent = true;
    for (std::size_t i = 0; i < n && consistent; ++i) {
      if (c.observed[i] >= 0 && x[i] != static_cast<std::size_t>(c.observed[i])) consistent = false;
    }
    if (consistent) {
      double p = 1.0;
      for (std::size_t i = 0; i < n; ++i) {
        std::size_t row = 0;
        for (auto parent : c.parents[i]) row = row * c.cards[parent] + x[parent];
        p *= c.tables[i][row * c.cards[i] + x[i]];
      }
      total += p;
      for (std::size_t t = 0; t < target_idx.size(); ++t) mass[t][x[target_idx[t]]] += p;
    }
    for (std::size_t i = n; i-- > 0;) {
      if (++x[i] < c.cards[i]) break;
      x[i] = 0;
    }
  }
  if (total < kImpossibleEvidence) {
    throw Error(ErrorCode::ImpossibleEvidence, "the evidence has zero probability under the model");
  }
  std::vector<Posterior> out;
  for (std::size_t t = 0; t < target_idx.size(); ++t) {
    for (auto& m : mass[t]) m /= total;
    out.push_back(make_posterior(net, target_idx[t], std::move(mass[t])));
  }
  return out;
}

}  // namespace delphinet::inference
