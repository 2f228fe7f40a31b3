#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "delphinet/bn/network.hpp"
#include "delphinet/inference/elimination.hpp"
#include "delphinet/verbal.hpp"

// Template-based explanation of scenario results. Every sentence comes from a
// fixed template with slots, so output is deterministic and auditable; every
// probability goes through verbal::dual() and is recorded as a Quote next to
// the query that produced it.

namespace delphinet::explanation {

using inference::Evidence;

/// Section ids of the detailed explanation, in report-template order.
inline constexpr std::array<std::string_view, 6> kDetailSectionIds = {
    "structure", "priors", "source_reliability", "relevance", "impact", "conclusion"};

inline constexpr std::array<std::string_view, 6> kDetailSectionTitles = {
    "Causal structure",       "Target probabilities without evidence",
    "Reliability of the evidence sources", "Relevance of the evidence",
    "Impact of the evidence", "Conclusion"};

/// |joint shift - sum of single-item shifts| above this earns an interaction note.
inline constexpr double kInteractionThreshold = 0.05;

/// A probability quoted in generated text and the query that produced it.
struct Quote {
  Evidence evidence;
  std::string variable;
  std::string state;
  double value = 0.0;
};

struct Statement {
  Statement() = default;
  Statement(std::string t, std::vector<Quote> q = {}, std::vector<std::string> v = {})
      : text(std::move(t)), quotes(std::move(q)), verbatim(std::move(v)) {}

  std::string text;
  std::vector<Quote> quotes;
  /// Analyst-written text (descriptions, rationales) reproduced unchanged
  /// inside `text`. It is not generated, so it is not re-rendered.
  std::vector<std::string> verbatim;
};

/// A (variable, state) pair the explanation is focused on.
struct Focus {
  std::string variable;
  std::string state;
};

struct ExplanationSummary {
  std::vector<Statement> target_statements;
  std::vector<std::string> evidence_list;
  std::vector<Statement> change_statements;

  std::vector<const Statement*> statements() const {
    std::vector<const Statement*> out;
    for (const auto& s : target_statements) out.push_back(&s);
    for (const auto& s : change_statements) out.push_back(&s);
    return out;
  }

  std::string text() const {
    std::string out;
    for (const auto& s : target_statements) out += s.text + "\n";
    if (!evidence_list.empty()) {
      out += "Evidence entered: ";
      for (std::size_t i = 0; i < evidence_list.size(); ++i) {
        out += (i ? "; " : "") + evidence_list[i];
      }
      out += ".\n";
    }
    for (const auto& s : change_statements) out += s.text + "\n";
    return out;
  }
};

struct DetailSection {
  std::string id;
  std::string title;
  std::vector<Statement> statements;

  std::string text() const {
    std::string out;
    for (const auto& s : statements) out += (out.empty() ? "" : "\n") + s.text;
    return out;
  }
};

struct ExplanationDetail {
  std::vector<DetailSection> sections;

  const DetailSection& section(std::string_view id) const {
    for (const auto& s : sections) {
      if (s.id == id) return s;
    }
    throw Error(ErrorCode::InvalidPayload, "no explanation section '" + std::string(id) + "'");
  }

  std::string markdown() const {
    std::string out;
    for (const auto& s : sections) {
      out += "## " + s.title + "\n\n";
      for (const auto& st : s.statements) out += "- " + st.text + "\n";
      out += "\n";
    }
    return out;
  }
};

enum class ChangeKind { Unchanged, Strengthened, Weakened };

inline std::string_view to_string(ChangeKind k) {
  switch (k) {
    case ChangeKind::Unchanged: return "unchanged";
    case ChangeKind::Strengthened: return "strengthened";
    case ChangeKind::Weakened: return "weakened";
  }
  return "unchanged";
}

struct Change {
  ChangeKind kind;
  verbal::Descriptor from;
  verbal::Descriptor to;
};

/// Qualitative change judged on descriptor bands, not raw numbers.
inline Change classify_change(double prior, double posterior) {
  auto from = verbal::to_descriptor(verbal::snap(prior));
  auto to = verbal::to_descriptor(verbal::snap(posterior));
  ChangeKind kind = ChangeKind::Unchanged;
  if (to > from) kind = ChangeKind::Strengthened;
  if (to < from) kind = ChangeKind::Weakened;
  return {kind, from, to};
}

namespace detail {

inline std::string label(const bn::BayesianNetwork& net, const std::string& id) {
  return net.require(id).name;
}

inline std::string assignment(const bn::BayesianNetwork& net, const std::string& id,
                              const std::string& state) {
  return label(net, id) + " = " + state;
}

inline std::string points(double delta) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%+.2f points", delta * 100.0);
  return buf;
}

inline double query(const bn::BayesianNetwork& net, const Evidence& e, const Focus& f) {
  return inference::posterior(net, e, {f.variable}).front().at(f.state);
}

inline Statement probability_sentence(const bn::BayesianNetwork& net, const std::string& prefix,
                                      const Focus& f, const Evidence& e, double p) {
  return {prefix + " the probability that " + assignment(net, f.variable, f.state) + " is " +
              verbal::dual(p) + ".",
          {{e, f.variable, f.state, p}}};
}

/// All simple directed paths from `from` to `to`, capped to keep text bounded.
inline std::vector<std::vector<std::string>> directed_paths(const bn::BayesianNetwork& net,
                                                            const std::string& from,
                                                            const std::string& to,
                                                            std::size_t cap = 32) {
  std::vector<std::vector<std::string>> out;
  std::vector<std::string> path{from};
  auto dfs = [&](auto&& self, const std::string& at) -> void {
    if (out.size() >= cap) return;
    if (at == to && path.size() > 1) {
      out.push_back(path);
      return;
    }
    for (const auto& child : net.children(at)) {
      path.push_back(child);
      self(self, child);
      path.pop_back();
    }
  };
  if (from != to) dfs(dfs, from);
  return out;
}

/// Shortest trail ignoring arrow direction (BFS, neighbours in document order).
inline std::optional<std::vector<std::string>> undirected_trail(const bn::BayesianNetwork& net,
                                                                const std::string& from,
                                                                const std::string& to) {
  std::map<std::string, std::string> prev;
  std::deque<std::string> queue{from};
  prev[from] = from;
  while (!queue.empty()) {
    auto at = queue.front();
    queue.pop_front();
    if (at == to) break;
    for (const auto& a : net.arrows) {
      std::string next;
      if (a.from == at) next = a.to;
      if (a.to == at) next = a.from;
      if (next.empty() || prev.count(next)) continue;
      prev[next] = at;
      queue.push_back(next);
    }
  }
  if (!prev.count(to)) return std::nullopt;
  std::vector<std::string> trail{to};
  while (trail.back() != from) trail.push_back(prev[trail.back()]);
  return std::vector<std::string>(trail.rbegin(), trail.rend());
}

inline std::string join_path(const bn::BayesianNetwork& net, const std::vector<std::string>& ids,
                             std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out += (i ? std::string(sep) : "") + label(net, ids[i]);
  }
  return out;
}

inline std::vector<std::string> evidence_ids(const bn::BayesianNetwork& net, const Evidence& e) {
  std::vector<std::string> out;
  for (const auto& [v, s] : e.items()) out.push_back(net.resolve(v).id);
  return out;
}

}  // namespace detail

/// Focus list: the scenario's outputs that are marked as targets (or all
/// outputs if none are), each on its requested state or its first state.
inline std::vector<Focus> focus_for(const bn::BayesianNetwork& net,
                                    const std::vector<std::string>& outputs,
                                    const std::map<std::string, std::string>& target_states = {}) {
  std::vector<std::string> chosen;
  for (const auto& o : outputs) {
    const auto& v = net.resolve(o);
    if (v.is_target) chosen.push_back(v.id);
  }
  if (chosen.empty()) {
    for (const auto& o : outputs) chosen.push_back(net.resolve(o).id);
  }
  std::vector<Focus> out;
  for (const auto& id : chosen) {
    const auto& v = net.require(id);
    std::string state = v.states.front();
    if (auto it = target_states.find(id); it != target_states.end()) state = it->second;
    if (auto it = target_states.find(v.name); it != target_states.end()) state = it->second;
    if (!v.state_index(state)) {
      throw Error(ErrorCode::UnknownState, "'" + state + "' is not a state of '" + v.name + "'");
    }
    out.push_back({id, state});
  }
  return out;
}

/// Causes and effects of each target, then every directed path between each
/// evidence variable and each target.
inline std::vector<Statement> describe_structure(const bn::BayesianNetwork& net,
                                                 const std::vector<std::string>& targets,
                                                 const std::vector<std::string>& evidence_vars = {}) {
  std::vector<Statement> out;
  for (const auto& t : targets) {
    const auto& tv = net.resolve(t);
    auto parents = net.parents(tv.id);
    auto children = net.children(tv.id);
    if (parents.empty() && children.empty()) {
      out.push_back({tv.name + " has no modeled causes or effects.", {}});
      continue;
    }
    std::string text;
    for (const auto& p : parents) text += (text.empty() ? "" : "; ") + detail::label(net, p) + " influences " + tv.name;
    for (const auto& c : children) text += (text.empty() ? "" : "; ") + tv.name + " influences " + detail::label(net, c);
    out.push_back({text + ".", {}});
  }
  for (const auto& e : evidence_vars) {
    const auto& ev = net.resolve(e);
    for (const auto& t : targets) {
      const auto& tv = net.resolve(t);
      if (ev.id == tv.id) continue;
      auto forward = detail::directed_paths(net, ev.id, tv.id);
      auto backward = detail::directed_paths(net, tv.id, ev.id);
      for (const auto& p : forward) out.push_back({"Directed path: " + detail::join_path(net, p, " -> ") + ".", {}});
      for (const auto& p : backward) out.push_back({"Directed path: " + detail::join_path(net, p, " -> ") + ".", {}});
      if (forward.empty() && backward.empty()) {
        out.push_back({"There is no directed path between " + ev.name + " and " + tv.name + ".", {}});
      }
    }
  }
  return out;
}

inline std::string describe_structure_text(const bn::BayesianNetwork& net,
                                           const std::vector<std::string>& targets,
                                           const std::vector<std::string>& evidence_vars = {}) {
  std::string out;
  for (const auto& s : describe_structure(net, targets, evidence_vars)) out += (out.empty() ? "" : "\n") + s.text;
  return out;
}

/// Summary shown after every evaluation. `posteriors` are the scenario's
/// results; focus variables missing from them are queried directly.
inline ExplanationSummary summarize(const bn::BayesianNetwork& net, const Evidence& evidence,
                                    const std::vector<Focus>& focus,
                                    const std::vector<inference::Posterior>& posteriors = {}) {
  ExplanationSummary summary;
  auto posterior_of = [&](const Focus& f) {
    for (const auto& p : posteriors) {
      if (p.variable == f.variable) return p.at(f.state);
    }
    return detail::query(net, evidence, f);
  };
  std::vector<double> priors;
  for (const auto& f : focus) {
    double prior = detail::query(net, {}, f);
    priors.push_back(prior);
    summary.target_statements.push_back(detail::probability_sentence(net, "Without evidence,", f, {}, prior));
  }
  if (evidence.empty()) return summary;
  for (const auto& [v, s] : evidence.items()) {
    summary.evidence_list.push_back(detail::assignment(net, net.resolve(v).id, s));
  }
  for (std::size_t i = 0; i < focus.size(); ++i) {
    const auto& f = focus[i];
    double post = posterior_of(f);
    auto change = classify_change(priors[i], post);
    std::string subject = "Given the evidence, the probability that " +
                          detail::assignment(net, f.variable, f.state);
    std::string text;
    switch (change.kind) {
      case ChangeKind::Strengthened:
        text = subject + " increases from " + verbal::dual(priors[i]) + " to " + verbal::dual(post) + ".";
        break;
      case ChangeKind::Weakened:
        text = subject + " decreases from " + verbal::dual(priors[i]) + " to " + verbal::dual(post) + ".";
        break;
      case ChangeKind::Unchanged:
        text = subject + " is unchanged: it is " + verbal::dual(post) + ", compared with " +
               verbal::dual(priors[i]) + " without evidence.";
        break;
    }
    summary.change_statements.push_back({text, {{{}, f.variable, f.state, priors[i]}, {evidence, f.variable, f.state, post}}});
  }
  return summary;
}

struct ImpactItem {
  std::string variable;
  std::string state;
  std::string target;
  double before = 0.0;
  double after = 0.0;

  int direction() const {
    double d = after - before;
    if (std::abs(d) < 5e-5) return 0;
    return d > 0 ? 1 : -1;
  }
};

/// Item-by-item impacts in evidence insertion order, per focus.
inline std::vector<ImpactItem> impact_sequence(const bn::BayesianNetwork& net, const Evidence& evidence,
                                               const Focus& f) {
  std::vector<ImpactItem> out;
  for (std::size_t i = 0; i < evidence.size(); ++i) {
    const auto& item = evidence.items()[i];
    auto impact = inference::evidence_impact(net, evidence.prefix(i), item, f.variable);
    out.push_back({net.resolve(item.first).id, item.second, f.variable, impact.before.at(f.state),
                   impact.after.at(f.state)});
  }
  return out;
}

/// Detailed explanation, one section per kDetailSectionIds entry.
inline ExplanationDetail explain(const bn::BayesianNetwork& net, const Evidence& evidence,
                                 const std::vector<Focus>& focus) {
  ExplanationDetail out;
  auto add_section = [&](std::size_t i) -> DetailSection& {
    out.sections.push_back({std::string(kDetailSectionIds[i]), std::string(kDetailSectionTitles[i]), {}});
    return out.sections.back();
  };
  const auto ev_ids = detail::evidence_ids(net, evidence);
  std::vector<std::string> targets;
  for (const auto& f : focus) targets.push_back(f.variable);
  const Statement no_evidence{"No evidence entered.", {}};

  add_section(0).statements = describe_structure(net, targets, ev_ids);

  auto& priors = add_section(1);
  std::vector<double> prior_values;
  for (const auto& f : focus) {
    double p = detail::query(net, {}, f);
    prior_values.push_back(p);
    priors.statements.push_back(detail::probability_sentence(net, "Without evidence,", f, {}, p));
  }
  if (focus.size() < 2) {
    priors.statements.push_back({"There is a single target, so no relations between targets are described.", {}});
  }
  for (std::size_t i = 0; i < focus.size(); ++i) {
    for (std::size_t j = 0; j < focus.size(); ++j) {
      if (i == j) continue;
      const auto& a = focus[i];
      const auto& b = focus[j];
      Evidence given{{a.variable, a.state}};
      std::string known = detail::assignment(net, a.variable, a.state);
      std::string other = detail::assignment(net, b.variable, b.state);
      try {
        double p = detail::query(net, given, b);
        if (std::abs(p - prior_values[j]) <= 1e-9) {
          priors.statements.push_back({"Learning " + known + " would leave the probability that " + other +
                                           " at " + verbal::dual(p) + "; the two targets are independent without evidence.",
                                       {{given, b.variable, b.state, p}}});
        } else {
          priors.statements.push_back({"Learning " + known + " would change the probability that " + other +
                                           " from " + verbal::dual(prior_values[j]) + " to " + verbal::dual(p) + ".",
                                       {{{}, b.variable, b.state, prior_values[j]}, {given, b.variable, b.state, p}}});
        }
      } catch (const Error& e) {
        if (e.code() != ErrorCode::ImpossibleEvidence) throw;
        priors.statements.push_back({known + " is impossible in the model.", {}});
      }
    }
  }

  auto& reliability = add_section(2);
  if (evidence.empty()) reliability.statements.push_back(no_evidence);
  for (const auto& id : ev_ids) {
    const auto& v = net.require(id);
    if (v.description.empty() && v.rationale.empty()) {
      reliability.statements.push_back(
          {"No information about the reliability or bias of " + v.name + " has been recorded.", {}});
      continue;
    }
    Statement st{v.name + ":", {}, {}};
    if (!v.description.empty()) {
      st.text += " " + v.description;
      st.verbatim.push_back(v.description);
    }
    if (!v.rationale.empty()) {
      st.text += " Rationale: " + v.rationale;
      st.verbatim.push_back(v.rationale);
    }
    reliability.statements.push_back(std::move(st));
  }

  auto& relevance = add_section(3);
  if (evidence.empty()) relevance.statements.push_back(no_evidence);
  for (const auto& e : ev_ids) {
    for (const auto& t : targets) {
      const std::string en = detail::label(net, e), tn = detail::label(net, t);
      if (e == t) {
        relevance.statements.push_back({tn + " is itself observed.", {}});
        continue;
      }
      auto down = detail::directed_paths(net, t, e, 1);
      auto up = detail::directed_paths(net, e, t, 1);
      if (!down.empty()) {
        relevance.statements.push_back({en + " is an effect of " + tn + " (" + detail::join_path(net, down.front(), " -> ") +
                                            "), so observing it is diagnostic of " + tn + ".", {}});
      } else if (!up.empty()) {
        relevance.statements.push_back({en + " is a cause of " + tn + " (" + detail::join_path(net, up.front(), " -> ") +
                                            "), so observing it is predictive of " + tn + ".", {}});
      } else if (auto trail = detail::undirected_trail(net, e, t)) {
        relevance.statements.push_back({en + " is connected to " + tn + " only indirectly (" +
                                            detail::join_path(net, *trail, " - ") +
                                            "); whether it matters depends on the other evidence.", {}});
      } else {
        relevance.statements.push_back({en + " has no structural connection to " + tn + ", so it cannot change it.", {}});
      }
    }
  }

  auto& impact = add_section(4);
  if (evidence.empty()) impact.statements.push_back(no_evidence);
  for (std::size_t fi = 0; !evidence.empty() && fi < focus.size(); ++fi) {
    const auto& f = focus[fi];
    const std::string subject = detail::assignment(net, f.variable, f.state);
    auto seq = impact_sequence(net, evidence, f);
    for (std::size_t i = 0; i < seq.size(); ++i) {
      const auto& it = seq[i];
      std::string item = detail::assignment(net, it.variable, it.state);
      std::string effect = it.direction() > 0 ? "raises" : it.direction() < 0 ? "lowers" : "does not change";
      std::string text = "Adding " + item + " " + effect + " the probability that " + subject + ": " +
                         verbal::dual(it.before) + " before, " + verbal::dual(it.after) + " after (" +
                         detail::points(it.after - it.before) + ").";
      impact.statements.push_back({text,
                                   {{evidence.prefix(i), f.variable, f.state, it.before},
                                    {evidence.prefix(i + 1), f.variable, f.state, it.after}}});
    }
    double single_sum = 0.0;
    for (const auto& [v, s] : evidence.items()) {
      single_sum += detail::query(net, Evidence{{v, s}}, f) - prior_values[fi];
    }
    double joint = seq.back().after - prior_values[fi];
    if (std::abs(joint - single_sum) > kInteractionThreshold) {
      impact.statements.push_back({"Interaction note: one at a time, the evidence items would shift the probability that " +
                                       subject + " by a combined " + detail::points(single_sum) +
                                       ", but together they shift it by " + detail::points(joint) +
                                       ", so the items interact rather than adding up.",
                                   {}});
    }
  }

  auto& conclusion = add_section(5);
  for (std::size_t fi = 0; fi < focus.size(); ++fi) {
    const auto& f = focus[fi];
    double p = evidence.empty() ? prior_values[fi] : detail::query(net, evidence, f);
    conclusion.statements.push_back(detail::probability_sentence(
        net, evidence.empty() ? "With no evidence entered," : "Given all the evidence,", f, evidence, p));
  }
  return out;
}

}  // namespace delphinet::explanation
