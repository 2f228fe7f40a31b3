#pragma once

#include <string>
#include <utility>
#include <vector>

#include "delphinet/bn/network.hpp"
#include "delphinet/bn/ops.hpp"

// Small reference networks used by the demo, the CLI tests and the
// acceptance suite.

namespace delphinet::samples {

/// Doping-test network: an athlete's event sets the base rate of cheating;
/// two splits of one urine specimen are tested, and the legal medication
/// M879 raises the false-positive rate of both. The CPTs were fitted so
/// that the posterior of Drug Cheat = True runs 2.33% (no evidence),
/// 32.41% (+ Sample A positive), 95.79% (+ Sample B positive) and
/// 49.24% (+ Taking M879 = Yes).
inline bn::BayesianNetwork drug_cheat() {
  using bn::VariableKind;
  bn::BayesianNetwork net;
  net.name = "Drug Cheat";
  net = bn::add_variable(std::move(net), {"event", "Event", VariableKind::Unordered,
                                          {"Weightlifting", "Running", "Swimming"}, false,
                                          "The event the athlete competes in.", ""});
  net = bn::add_variable(std::move(net), {"drug_cheat", "Drug Cheat", VariableKind::Boolean, {"True", "False"},
                                          true, "Whether the athlete has taken performance enhancing drugs.",
                                          ""});
  net = bn::add_variable(std::move(net), {"taking_m879", "Taking M879", VariableKind::Binary, {"Yes", "No"},
                                          false, "Whether the athlete takes the legal medication M879.", ""});
  net = bn::add_variable(std::move(net), {"sample_a_result", "Sample A Result", VariableKind::Binary,
                                          {"positive", "negative"}, false, "Laboratory test of sample A.",
                                          "The test detects the drug in 99% of users; M879 causes false "
                                          "positives."});
  net = bn::add_variable(std::move(net), {"sample_b_result", "Sample B Result", VariableKind::Binary,
                                          {"positive", "negative"}, false,
                                          "Independent laboratory test of sample B.",
                                          "Sample B is a split of the same specimen, tested separately."});
  net = bn::add_arrow(std::move(net), {"event", "drug_cheat", ""});
  net = bn::add_arrow(std::move(net), {"drug_cheat", "sample_a_result", ""});
  net = bn::add_arrow(std::move(net), {"taking_m879", "sample_a_result", ""});
  net = bn::add_arrow(std::move(net), {"drug_cheat", "sample_b_result", ""});
  net = bn::add_arrow(std::move(net), {"taking_m879", "sample_b_result", ""});

  net = bn::set_cpt_row(std::move(net), "event", 0, {0.2, 0.5, 0.3});
  net = bn::set_cpt_row(std::move(net), "drug_cheat", 0, {0.06, 0.94});
  net = bn::set_cpt_row(std::move(net), "drug_cheat", 1, {0.01, 0.99});
  net = bn::set_cpt_row(std::move(net), "drug_cheat", 2, {0.021, 0.979});
  net = bn::set_cpt_row(std::move(net), "taking_m879", 0, {0.02, 0.98});
  // Rows: (cheat, M879) = (T,Yes), (T,No), (F,Yes), (F,No).
  const std::vector<std::pair<std::string, std::vector<double>>> samples = {
      {"sample_a_result", {0.99, 0.99, 0.15525, 0.04709}},
      {"sample_b_result", {0.99, 0.99, 0.15525, 0.01182}},
  };
  for (const auto& [id, positive] : samples) {
    for (std::size_t r = 0; r < positive.size(); ++r) {
      net = bn::set_cpt_row(std::move(net), id, r, {positive[r], 1.0 - positive[r]});
    }
  }
  return net;
}

/// The evidence sequence of the walkthrough, by variable name.
inline std::vector<std::pair<std::string, std::string>> drug_cheat_evidence() {
  return {{"Sample A Result", "positive"}, {"Sample B Result", "positive"}, {"Taking M879", "Yes"}};
}

/// Reported posteriors of Drug Cheat = True after 0..3 evidence items.
inline constexpr double kDrugCheatPosteriors[4] = {0.0233, 0.3241, 0.9579, 0.4924};

}  // namespace delphinet::samples
