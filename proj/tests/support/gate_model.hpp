#pragma once

#include <algorithm>
#include <deque>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "support/groups.hpp"

// Checks the sharing gate: an analyst never obtains another analyst's step-s
// work, the step-s forum or the step-s group solution before sharing their
// own step-s work. In Classic mode analysts never obtain peer work or
// forums at all.

namespace delphinet::gate {

using workflow::Group;
using workflow::json;

/// Every read an analyst could attempt against the current state.
inline std::vector<std::string> check_reads(const Group& g, int steps) {
  std::vector<std::string> out;
  const auto analysts = g.analysts();
  const bool classic = g.problem().mode == workflow::DelphiMode::Classic;
  auto succeeds = [](auto&& f) {
    try {
      f();
      return true;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::GateClosed) throw;
      return false;
    }
  };
  for (const auto& v : analysts) {
    for (int s = 1; s <= steps; ++s) {
      const bool shared = g.has_shared(v, s);
      for (const auto& o : analysts) {
        if (o == v) continue;
        bool seen = succeeds([&] { g.view_work(v, o, s); });
        if (seen != g.can_view(v, o, s)) out.push_back("can_view disagrees with view_work");
        if (seen && !shared) out.push_back(v + " saw " + o + " step " + std::to_string(s) + " before sharing");
        if (seen && classic) out.push_back(v + " saw peer work in Classic mode");
      }
      for (const auto& w : g.visible_work(v, s)) {
        if (w.owner != v && !shared) out.push_back(v + " listed peer work before sharing");
      }
      if (succeeds([&] { g.forum(v, s); }) && (!shared || classic)) {
        out.push_back(v + " read forum " + std::to_string(s) + " before sharing");
      }
      if (succeeds([&] { g.view_group_solution(v, s); }) && !shared) {
        out.push_back(v + " saw the group solution " + std::to_string(s) + " before sharing");
      }
    }
  }
  return out;
}

/// Commands that read peer material as a side effect (adopt, post) must be
/// refused unless the actor had shared the step beforehand.
inline std::vector<std::string> check_command(const Group& before, const json& cmd, bool succeeded) {
  if (!succeeded) return {};
  const auto type = cmd.at("type").get<std::string>();
  if (type != "adopt" && type != "post") return {};
  const auto actor = cmd.at("actor").get<std::string>();
  if (before.role_of(actor) != workflow::Role::Analyst) return {};
  const int step = cmd.at("step").get<int>();
  if (before.has_shared(actor, step) && before.problem().mode != workflow::DelphiMode::Classic) return {};
  return {actor + " succeeded at " + type + " on step " + std::to_string(step) + " before sharing"};
}

struct Exploration {
  std::size_t states = 0;
  std::size_t transitions = 0;
  std::vector<std::string> violations;
};

/// The part of the state every gate decision depends on. Analysts are
/// interchangeable for those decisions, so their parts are sorted: states
/// that differ only by a renaming of analysts share a key.
inline std::string abstract_key(const Group& g, int steps) {
  std::vector<std::string> parts;
  for (const auto& a : g.analysts()) {
    const auto& nav = g.navigation(a);
    std::string part = std::to_string(nav.current) + std::to_string(nav.max_reached);
    for (int s = 1; s <= steps; ++s) {
      const auto* item = g.work_item(a, s);
      // A shared item edited again behaves like a shared one for every gate
      // decision (sharing it again just moves it back), so both map to 'S'.
      part += !item || item->version == 0 ? '0' : item->is_shared() ? 'S' : 'P';
    }
    parts.push_back(std::move(part));
  }
  std::sort(parts.begin(), parts.end());
  std::string key;
  for (const auto& p : parts) key += p + '|';
  for (int s = 1; s <= steps; ++s) {
    const auto* sol = g.solution_step(s);
    key += sol && sol->is_published() ? 'p' : '-';
  }
  for (int r : g.released_steps()) key += std::to_string(r);
  return key;
}

/// Smallest valid non-empty payload, to keep exploration cheap.
inline json tiny_content(int step) {
  if (step == 1 || step == workflow::kStepReport) return groups::content(step);
  bn::BayesianNetwork net;
  net = bn::add_variable(std::move(net), {"x", "X", bn::VariableKind::Boolean, {}, false, "", ""});
  return {{"network", bn::to_json(net)}};
}

inline bool try_dispatch(Group& g, const json& c) {
  try {
    workflow::detail::dispatch(g, c);
    return true;
  } catch (const Error&) {
    return false;
  }
}

struct Vocabulary {
  bool navigate = true;  // moving back only lowers `current` below `max_reached`
  bool adopt = true;
};

/// Breadth-first exploration of every interleaving of analyst commands
/// (edit, share, advance, post, and optionally navigate and adopt) plus,
/// outside RealTime mode, facilitator releases, over `analysts` x `steps`.
/// States that agree on abstract_key() are merged; all reads are checked in
/// every state.
inline Exploration explore(int analysts, int steps, workflow::DelphiMode mode, bool strict,
                           Vocabulary vocabulary = {}) {
  Exploration result;
  std::deque<Group> frontier{groups::make_group(analysts, mode, strict)};
  std::unordered_set<std::string> seen{abstract_key(frontier.front(), steps)};
  std::vector<json> commands;
  for (int i = 1; i <= analysts; ++i) {
    const auto a = groups::analyst(i);
    commands.push_back(groups::cmd("advance", a));
    for (int s = 1; s <= steps; ++s) {
      auto put = groups::put(a, s);
      put["content"] = tiny_content(s);
      commands.push_back(put);
      commands.push_back(groups::share(a, s));
      if (vocabulary.navigate) {
        auto nav = groups::cmd("navigate", a);
        nav["step"] = s;
        commands.push_back(nav);
      }
      auto post = groups::cmd("post", a);
      post["step"] = s;
      post["body"] = "hello";
      commands.push_back(post);
      for (int j = 1; j <= analysts && vocabulary.adopt; ++j) {
        if (j == i) continue;
        auto adopt = groups::cmd("adopt", a);
        adopt["step"] = s;
        adopt["source"] = groups::analyst(j);
        adopt["selection"] = {{"all", true}};
        commands.push_back(adopt);
      }
    }
  }
  if (mode != workflow::DelphiMode::RealTime) {
    for (int s = 2; s <= steps; ++s) {
      auto release = groups::cmd("release_step", "f");
      release["step"] = s;
      commands.push_back(release);
    }
  }
  while (!frontier.empty()) {
    Group g = std::move(frontier.front());
    frontier.pop_front();
    ++result.states;
    for (auto& v : check_reads(g, steps)) result.violations.push_back(std::move(v));
    for (const auto& c : commands) {
      if (c.at("type") == "advance" && g.navigation(c.at("actor").get<std::string>()).current >= steps) continue;
      Group next = g;
      bool ok = try_dispatch(next, c);
      ++result.transitions;
      for (auto& v : check_command(g, c, ok)) result.violations.push_back(std::move(v));
      if (!ok) continue;
      if (seen.insert(abstract_key(next, steps)).second) frontier.push_back(std::move(next));
    }
    if (result.violations.size() > 20) break;
  }
  return result;
}

/// Same decisions as check_reads() through the non-throwing queries; cheap
/// enough to run after every command of a long trace.
inline std::vector<std::string> check_decisions(const Group& g, int steps) {
  std::vector<std::string> out;
  const auto analysts = g.analysts();
  const bool classic = g.problem().mode == workflow::DelphiMode::Classic;
  for (const auto& v : analysts) {
    for (int s = 1; s <= steps; ++s) {
      const bool shared = g.has_shared(v, s);
      for (const auto& o : analysts) {
        if (o != v && g.can_view(v, o, s) && (!shared || classic)) {
          out.push_back(v + " may view " + o + " step " + std::to_string(s) + " before sharing");
        }
      }
      if (!g.forum_denial(v, s) && (!shared || classic)) out.push_back(v + " may read forum " + std::to_string(s));
      if (!g.solution_denial(v, s) && !shared) out.push_back(v + " may view solution " + std::to_string(s));
    }
  }
  return out;
}

struct TraceStats {
  std::size_t traces = 0;
  std::size_t commands = 0;
  std::size_t accepted = 0;
  int deepest_step = 1;
  std::vector<std::string> violations;
};

/// Random command traces over the four mode configurations in turn. Every
/// command is audited, decisions are checked after every accepted command
/// and every read path at the end of each trace.
inline TraceStats random_traces(std::uint64_t seed, int traces, int analysts, int steps, int length) {
  static const std::pair<workflow::DelphiMode, bool> kConfigs[] = {{workflow::DelphiMode::RealTime, true},
                                                                   {workflow::DelphiMode::RealTime, false},
                                                                   {workflow::DelphiMode::Variant, true},
                                                                   {workflow::DelphiMode::Classic, true}};
  TraceStats stats;
  std::mt19937_64 rng(seed);
  for (int t = 0; t < traces && stats.violations.size() < 20; ++t) {
    const auto& [mode, strict] = kConfigs[t % 4];
    auto g = groups::make_group(analysts, mode, strict);
    for (int i = 0; i < length; ++i) {
      auto c = groups::random_command(rng, g, analysts, steps, i);
      const Group before = g;
      bool ok = groups::try_apply(g, c);
      ++stats.commands;
      for (auto& v : check_command(before, c, ok)) stats.violations.push_back(std::move(v));
      if (!ok) continue;
      ++stats.accepted;
      for (auto& v : check_decisions(g, steps)) stats.violations.push_back(std::move(v));
    }
    for (auto& v : check_reads(g, steps)) stats.violations.push_back(std::move(v));
    for (const auto& a : g.analysts()) stats.deepest_step = std::max(stats.deepest_step, g.navigation(a).max_reached);
    ++stats.traces;
  }
  return stats;
}

}  // namespace delphinet::gate
