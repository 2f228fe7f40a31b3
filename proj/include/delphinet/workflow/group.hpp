#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "delphinet/collaboration.hpp"
#include "delphinet/hash.hpp"
#include "delphinet/reporting.hpp"
#include "delphinet/scenarios.hpp"
#include "delphinet/workflow/payload.hpp"
#include "delphinet/workflow/types.hpp"

namespace delphinet::workflow {

/// What a viewer gets back for one work item or group-solution step.
struct WorkView {
  std::string owner;  // user id, or kGroupOwner
  int step = 1;
  int version = 0;
  WorkStatus status = WorkStatus::Private;
  bool draft = false;  // the working copy rather than a shared/published version
  Payload content;
  std::vector<std::string> provenance;
};

/// A scenario together with the network it runs on.
struct ScenarioRef {
  scenarios::Scenario scenario;
  bn::BayesianNetwork network;
  bool is_private = false;
};

/// One group working one problem. All mutations take the acting user id and
/// the command time (seconds); the class never reads a clock, so replaying
/// the same commands rebuilds the same state.
///
/// Visibility rule shared by work items, the group solution and forums: an
/// analyst sees step-s material of others only after sharing their own
/// step-s work at least once. Facilitators and observers see everything
/// that has been shared. In Classic mode analysts never see peer work or
/// forums, only the published group solution.
class Group {
 public:
  Group() = default;

  Group(std::string id, Problem problem, const std::vector<Membership>& roster)
      : id_(std::move(id)), problem_(std::move(problem)) {
    check_problem(problem_);
    int facilitators = 0;
    for (const auto& m : roster) facilitators += m.role == Role::Facilitator;
    if (facilitators != 1) {
      throw Error(ErrorCode::FacilitatorSingularity,
                  "a group needs exactly one facilitator (got " + std::to_string(facilitators) + ")");
    }
    for (const auto& m : roster) insert_member(m);
  }

  const std::string& id() const { return id_; }
  const Problem& problem() const { return problem_; }
  const std::vector<Membership>& members() const { return members_; }
  bool facilitator_absent() const { return facilitator_absent_; }
  const std::set<int>& released_steps() const { return released_; }
  const std::optional<FinalSubmission>& submission() const { return submission_; }
  const std::map<std::string, std::string>& export_files() const { return export_files_; }
  std::uint64_t seq() const { return seq_; }

  // ---- membership -------------------------------------------------------

  const Membership* member(const std::string& user) const {
    for (const auto& m : members_) {
      if (m.user == user) return &m;
    }
    return nullptr;
  }

  const Membership& require_member(const std::string& user) const {
    if (const auto* m = member(user)) return *m;
    throw Error(ErrorCode::UnknownMember, "'" + user + "' is not a member of group '" + id_ + "'");
  }

  Role role_of(const std::string& user) const { return require_member(user).role; }

  const Membership* by_pseudonym(const std::string& pseudonym) const {
    for (const auto& m : members_) {
      if (m.pseudonym == pseudonym) return &m;
    }
    return nullptr;
  }

  /// Pseudonym for a user id; "group" stays "group".
  std::string display(const std::string& user) const {
    if (user == kGroupOwner) return kGroupOwner;
    if (const auto* m = member(user)) return m->pseudonym;
    return "former member";
  }

  /// Maps a pseudonym (or "group") from a request back to the owner id.
  std::string owner_from_pseudonym(const std::string& pseudonym) const {
    if (pseudonym == kGroupOwner) return kGroupOwner;
    if (const auto* m = by_pseudonym(pseudonym)) return m->user;
    throw Error(ErrorCode::UnknownMember, "no member with pseudonym '" + pseudonym + "'");
  }

  const std::string& facilitator() const {
    for (const auto& m : members_) {
      if (m.role == Role::Facilitator) return m.user;
    }
    throw Error(ErrorCode::FacilitatorSingularity, "group has no facilitator");
  }

  std::vector<std::string> analysts() const {
    std::vector<std::string> out;
    for (const auto& m : members_) {
      if (m.role == Role::Analyst) out.push_back(m.user);
    }
    return out;
  }

  void add_member(const Membership& m) {
    if (m.role == Role::Facilitator) {
      throw Error(ErrorCode::FacilitatorSingularity,
                  "the group already has a facilitator; use replace_facilitator");
    }
    insert_member(m);
  }

  /// Swaps the facilitator atomically; the previous facilitator leaves.
  void replace_facilitator(const std::string& user, const std::string& pseudonym) {
    if (member(user)) throw Error(ErrorCode::InvalidPayload, "'" + user + "' is already a member");
    std::string old = facilitator();
    Membership next{user, Role::Facilitator, pseudonym.empty() ? display(old) : pseudonym};
    if (next.pseudonym != display(old) && by_pseudonym(next.pseudonym)) {
      throw Error(ErrorCode::DuplicatePseudonym, "pseudonym '" + next.pseudonym + "' is taken");
    }
    for (auto& m : members_) {
      if (m.user == old) m = next;
    }
  }

  void set_facilitator_absent(bool absent) { facilitator_absent_ = absent; }

  // ---- work items -------------------------------------------------------

  const WorkItem* work_item(const std::string& owner, int step) const {
    auto it = work_.find(owner);
    if (it == work_.end()) return nullptr;
    auto jt = it->second.find(step);
    return jt == it->second.end() ? nullptr : &jt->second;
  }

  /// True once `user` has shared step `step` at least once.
  bool has_shared(const std::string& user, int step) const {
    const auto* item = work_item(user, step);
    return item && item->is_shared();
  }

  /// Replaces the working copy of the actor's own step item. Returns the new
  /// version. `expected_version`, when given, must match the current one.
  int put_work(const std::string& actor, int step, const json& content, std::optional<int> expected_version,
               std::int64_t now) {
    check_step(step);
    require_analyst(actor, "edit their own work");
    check_writable(actor, now);
    if (step > navigation(actor).max_reached) {
      gate_closed(reason::kNotReached, "step " + std::to_string(step) + " has not been reached yet");
    }
    auto& item = item_for(actor, step);
    if (expected_version && *expected_version != item.version) {
      throw Error(ErrorCode::VersionConflict, "work item is at version " + std::to_string(item.version) +
                                                  ", not " + std::to_string(*expected_version));
    }
    item.content = normalize_payload(step, content, actor, now);
    item.version += 1;
    item.status = WorkStatus::Private;
    return item.version;
  }

  /// Shares the current version. Sharing an already shared version is a
  /// no-op that returns it again.
  int share_work(const std::string& actor, int step, std::int64_t now) {
    check_step(step);
    require_analyst(actor, "share work");
    check_writable(actor, now);
    auto* item = mutable_item(actor, step);
    if (!item || item->version == 0 || payload_empty(step, item->content)) {
      throw Error(ErrorCode::EmptyContent, "there is nothing to share at step " + std::to_string(step));
    }
    if (item->status == WorkStatus::Shared) return item->version;
    if (step == kStepNetwork && item->is_shared()) {
      invalidate_if_structural(actor, item->shared.back().content, item->content);
    }
    item->shared.push_back({item->version, item->content, now, ++seq_});
    item->status = WorkStatus::Shared;
    return item->version;
  }

  /// Why `viewer` may not see `owner`'s step item, or nullopt if they may.
  /// Private working copies are never visible to anyone but their owner.
  std::optional<const char*> work_denial(const std::string& viewer, const std::string& owner, int step) const {
    if (owner == kGroupOwner) return solution_denial(viewer, step);
    const auto& v = require_member(viewer);
    require_member(owner);
    if (viewer == owner) return std::nullopt;
    if (v.role == Role::Analyst) {
      if (problem_.mode == DelphiMode::Classic) return reason::kClassicMode;
      if (!has_shared(viewer, step)) return reason::kDelphiGate;
    }
    if (!has_shared(owner, step)) return reason::kNotShared;
    return std::nullopt;
  }

  bool can_view(const std::string& viewer, const std::string& owner, int step) const {
    return !work_denial(viewer, owner, step).has_value();
  }

  /// The owner sees their working copy; everyone else the latest shared version.
  WorkView view_work(const std::string& viewer, const std::string& owner, int step) const {
    check_step(step);
    if (owner == kGroupOwner) return view_group_solution(viewer, step);
    if (auto why = work_denial(viewer, owner, step)) {
      gate_closed(*why, "step " + std::to_string(step) + " work of " + display(owner) + " is not visible");
    }
    const auto* item = work_item(owner, step);
    if (viewer == owner) {
      if (!item || item->version == 0) {
        return {owner, step, 0, WorkStatus::Private, true, initial_payload(step), {}};
      }
      return {owner, step, item->version, item->status, true, item->content, item->provenance};
    }
    const auto& last = item->shared.back();
    return {owner, step, last.version, WorkStatus::Shared, false, last.content, item->provenance};
  }

  /// Every item at `step` the viewer may see, own working copy first.
  std::vector<WorkView> visible_work(const std::string& viewer, int step) const {
    check_step(step);
    std::vector<WorkView> out;
    if (role_of(viewer) == Role::Analyst) out.push_back(view_work(viewer, viewer, step));
    for (const auto& m : members_) {
      if (m.user == viewer || m.role != Role::Analyst) continue;
      if (can_view(viewer, m.user, step)) out.push_back(view_work(viewer, m.user, step));
    }
    return out;
  }

  // ---- group solution ---------------------------------------------------

  int put_group_solution(const std::string& actor, int step, const json& content,
                         std::optional<int> expected_version, std::int64_t now) {
    check_step(step);
    require_facilitator(actor, "edit the group solution");
    check_writable(actor, now);
    auto& sol = solution_[step];
    if (expected_version && *expected_version != sol.version) {
      throw Error(ErrorCode::VersionConflict, "group solution is at version " + std::to_string(sol.version) +
                                                  ", not " + std::to_string(*expected_version));
    }
    auto normalized = normalize_payload(step, content, kGroupOwner, now);
    if (step == kStepNetwork && sol.version > 0) {
      invalidate_if_structural(kGroupOwner, sol.content, normalized);
    }
    sol.content = std::move(normalized);
    sol.version += 1;
    return sol.version;
  }

  /// Publishes the current group solution for `step` as a new version; older
  /// publications stay in the history.
  int publish_group_solution(const std::string& actor, int step, std::int64_t now) {
    check_step(step);
    require_facilitator(actor, "publish the group solution");
    check_writable(actor, now);
    auto it = solution_.find(step);
    if (it == solution_.end() || it->second.version == 0 || payload_empty(step, it->second.content)) {
      throw Error(ErrorCode::EmptyContent, "the group solution for step " + std::to_string(step) + " is empty");
    }
    auto& sol = it->second;
    if (!sol.published.empty() && sol.published.back().version == sol.version) return sol.version;
    sol.published.push_back({sol.version, sol.content, now, ++seq_});
    return sol.version;
  }

  const SolutionStep* solution_step(int step) const {
    auto it = solution_.find(step);
    return it == solution_.end() ? nullptr : &it->second;
  }

  std::optional<const char*> solution_denial(const std::string& viewer, int step) const {
    const auto role = role_of(viewer);
    if (role == Role::Facilitator) return std::nullopt;
    if (role == Role::Analyst && !has_shared(viewer, step)) return reason::kDelphiGate;
    const auto* sol = solution_step(step);
    if (!sol || !sol->is_published()) return reason::kNotPublished;
    return std::nullopt;
  }

  /// The facilitator sees the working copy; others the latest publication.
  WorkView view_group_solution(const std::string& viewer, int step) const {
    check_step(step);
    if (auto why = solution_denial(viewer, step)) {
      gate_closed(*why, "the step " + std::to_string(step) + " group solution is not visible");
    }
    const auto* sol = solution_step(step);
    if (role_of(viewer) == Role::Facilitator) {
      if (!sol || sol->version == 0) {
        return {kGroupOwner, step, 0, WorkStatus::Private, true, initial_payload(step), {}};
      }
      bool published = sol->is_published() && sol->published.back().version == sol->version;
      return {kGroupOwner, step, sol->version, published ? WorkStatus::Shared : WorkStatus::Private, true,
              sol->content, sol->provenance};
    }
    const auto& last = sol->published.back();
    return {kGroupOwner, step, last.version, WorkStatus::Shared, false, last.content, sol->provenance};
  }

  // ---- adoption ---------------------------------------------------------

  /// Copies elements of a visible item into the actor's own work (analysts)
  /// or into the group solution (facilitator). A facilitator adopting a
  /// whole network replaces the group's structure and parameter steps.
  int adopt(const std::string& actor, const std::string& source_owner, int step, const Selection& sel,
            std::int64_t now) {
    check_step(step);
    const auto role = role_of(actor);
    if (role == Role::Observer) throw Error(ErrorCode::RoleError, "observers cannot adopt work");
    check_writable(actor, now);
    if (source_owner == actor) throw Error(ErrorCode::IncompatibleSelection, "cannot adopt from your own work");
    auto source = view_work(actor, source_owner, step);
    std::string note = "adopted from " + display(source_owner) + " v" + std::to_string(source.version);
    if (role == Role::Facilitator) {
      if (source_owner == kGroupOwner) {
        throw Error(ErrorCode::IncompatibleSelection, "the group solution is already the destination");
      }
      auto& sol = solution_[step];
      json dest = sol.version ? sol.content.get() : initial_payload(step);
      auto merged = normalize_payload(step, adopt_elements(step, dest, source.content, sel, note), kGroupOwner, now);
      if (sel.all && has_network(step)) {
        for (int s : {3, 4}) {
          if (s == step) continue;
          auto& other = solution_[s];
          auto replaced = normalize_payload(s, json{{"network", merged.at("network")}}, kGroupOwner, now);
          other.content = std::move(replaced);
          other.version += 1;
          other.provenance.push_back(note);
        }
      }
      if (step == kStepNetwork && sol.version > 0) invalidate_if_structural(kGroupOwner, sol.content, merged);
      sol.content = std::move(merged);
      sol.version += 1;
      sol.provenance.push_back(note);
      return sol.version;
    }
    if (step > navigation(actor).max_reached) {
      gate_closed(reason::kNotReached, "step " + std::to_string(step) + " has not been reached yet");
    }
    auto& item = item_for(actor, step);
    json dest = item.version ? item.content.get() : initial_payload(step);
    item.content = normalize_payload(step, adopt_elements(step, dest, source.content, sel, note), actor, now);
    item.version += 1;
    item.status = WorkStatus::Private;
    item.provenance.push_back(note);
    return item.version;
  }

  // ---- navigation -------------------------------------------------------

  const Navigation& navigation(const std::string& user) const {
    require_analyst(user, "navigate between steps");
    return nav_.at(user);
  }

  /// Moves the analyst one step forward.
  const Navigation& advance(const std::string& actor) {
    const auto& current = navigation(actor);
    int from = current.current;
    if (from >= kSteps) gate_closed(reason::kLastStep, "already at the last step");
    if (problem_.mode == DelphiMode::RealTime) {
      if (problem_.strict_advance && !has_shared(actor, from)) {
        gate_closed(reason::kNotShared, "share step " + std::to_string(from) + " before moving on");
      }
    } else if (!facilitator_absent_ && !released_.count(from + 1) && current.max_reached <= from) {
      gate_closed(reason::kNotReleased, "the facilitator has not released step " + std::to_string(from + 1));
    }
    auto& nav = nav_.at(actor);
    nav.current = from + 1;
    nav.max_reached = std::max(nav.max_reached, nav.current);
    return nav;
  }

  /// Goes back, or forward to any step reached before.
  const Navigation& go_to_step(const std::string& actor, int step) {
    check_step(step);
    const auto& current = navigation(actor);
    if (step > current.max_reached) {
      gate_closed(reason::kNotReached, "step " + std::to_string(step) + " has not been reached yet");
    }
    auto& nav = nav_.at(actor);
    nav.current = step;
    return nav;
  }

  /// Classic and Variant modes: lets analysts move on to `step`.
  void release_step(const std::string& actor, int step, std::int64_t now) {
    check_step(step);
    require_facilitator(actor, "release steps");
    check_writable(actor, now);
    if (step < 2) throw Error(ErrorCode::OutOfRange, "step 1 is always open");
    released_.insert(step);
  }

  // ---- forums -----------------------------------------------------------

  std::optional<const char*> forum_denial(const std::string& viewer, int step) const {
    check_step(step);
    if (role_of(viewer) != Role::Analyst) return std::nullopt;
    if (problem_.mode == DelphiMode::Classic) return reason::kForumsDisabled;
    if (!has_shared(viewer, step)) return reason::kDelphiGate;
    return std::nullopt;
  }

  const collaboration::ForumPost& post_to_forum(const std::string& actor, int step, const std::string& thread,
                                                const std::string& body,
                                                const std::vector<std::string>& attachments, std::int64_t now) {
    check_step(step);
    if (role_of(actor) == Role::Observer) throw Error(ErrorCode::RoleError, "observers cannot post");
    if (auto why = forum_denial(actor, step)) {
      gate_closed(*why, "the step " + std::to_string(step) + " forum is closed to you");
    }
    check_open(actor, now);
    if (body.empty() && attachments.empty()) throw Error(ErrorCode::EmptyContent, "post is empty");
    collaboration::ForumPost post;
    post.id = ++seq_;
    post.step = step;
    post.thread = thread.empty() ? "general" : thread;
    post.author = actor;
    post.body = body;
    post.attachments = attachments;
    post.at = now;
    for (const auto& name : collaboration::mentions_in(body)) {
      if (by_pseudonym(name)) post.mentions.push_back(name);
    }
    posts_.push_back(std::move(post));
    return posts_.back();
  }

  std::vector<collaboration::ForumPost> forum(const std::string& viewer, int step) const {
    if (auto why = forum_denial(viewer, step)) {
      gate_closed(*why, "the step " + std::to_string(step) + " forum is closed to you");
    }
    std::vector<collaboration::ForumPost> out;
    for (const auto& p : posts_) {
      if (p.step == step) out.push_back(p);
    }
    return out;
  }

  // ---- direct messages --------------------------------------------------

  /// One copy per recipient. Only the facilitator may address several
  /// members (or anyone other than the facilitator).
  std::vector<collaboration::DirectMessage> send_message(const std::string& sender,
                                                         const std::vector<std::string>& recipients,
                                                         const std::string& body, bool nudge, std::int64_t now) {
    const auto role = role_of(sender);
    check_open(sender, now);
    if (recipients.empty()) throw Error(ErrorCode::InvalidPayload, "a message needs a recipient");
    if (body.empty()) throw Error(ErrorCode::EmptyContent, "message is empty");
    std::set<std::string> unique(recipients.begin(), recipients.end());
    for (const auto& r : unique) {
      const auto target = role_of(r);
      if (r == sender) throw Error(ErrorCode::InvalidPayload, "cannot message yourself");
      if (role == Role::Facilitator) continue;
      if (target == Role::Analyst && role == Role::Analyst) {
        throw Error(ErrorCode::AnalystToAnalyst, "analysts can only message the facilitator");
      }
      if (target != Role::Facilitator) throw Error(ErrorCode::RoleError, "you can only message the facilitator");
    }
    std::vector<collaboration::DirectMessage> out;
    std::uint64_t fanout = seq_ + 1;
    for (const auto& r : recipients) {
      if (!unique.erase(r)) continue;
      collaboration::DirectMessage m{++seq_, fanout, sender, r, body, nudge, now};
      messages_.push_back(m);
      out.push_back(std::move(m));
    }
    return out;
  }

  /// Messages the user sent or received. A recipient's copy names only them.
  std::vector<collaboration::DirectMessage> inbox(const std::string& user) const {
    require_member(user);
    std::vector<collaboration::DirectMessage> out;
    for (const auto& m : messages_) {
      if (m.sender == user || m.recipient == user) out.push_back(m);
    }
    return out;
  }

  // ---- reports and ratings ----------------------------------------------

  /// Report ids are the owner's user id, or "group" for the group report.
  std::optional<const char*> report_denial(const std::string& viewer, const std::string& report) const {
    return work_denial(viewer, report, kStepReport);
  }

  std::vector<std::string> shared_reports() const {
    std::vector<std::string> out;
    for (const auto& m : members_) {
      if (m.role == Role::Analyst && has_shared(m.user, kStepReport)) out.push_back(m.user);
    }
    const auto* sol = solution_step(kStepReport);
    if (sol && sol->is_published()) out.push_back(kGroupOwner);
    return out;
  }

  void rate_report(const std::string& actor, const std::string& report, int score, std::int64_t now) {
    require_analyst(actor, "rate reports");
    collaboration::check_score(score);
    check_writable(actor, now);
    if (report == actor) throw Error(ErrorCode::RoleError, "analysts cannot rate their own report");
    if (report != kGroupOwner) {
      const auto* m = member(report);
      if (!m || m->role != Role::Analyst) throw Error(ErrorCode::UnknownReport, "no such report");
    }
    if (auto why = report_denial(actor, report)) gate_closed(*why, "that report is not visible to you");
    ratings_[report][actor] = score;
  }

  std::optional<int> own_rating(const std::string& user, const std::string& report) const {
    auto it = ratings_.find(report);
    if (it == ratings_.end()) return std::nullopt;
    auto jt = it->second.find(user);
    if (jt == it->second.end()) return std::nullopt;
    return jt->second;
  }

  /// Analysts see the mean only after rating the report themselves
  /// (nullopt = hidden). The facilitator and observers always see it.
  /// Returns {0, 0} when nobody has rated yet.
  std::optional<collaboration::RatingSummary> rating_summary(const std::string& viewer,
                                                             const std::string& report) const {
    if (auto why = report_denial(viewer, report)) gate_closed(*why, "that report is not visible to you");
    if (role_of(viewer) == Role::Analyst && !own_rating(viewer, report)) return std::nullopt;
    auto it = ratings_.find(report);
    if (it == ratings_.end()) return collaboration::RatingSummary{};
    return collaboration::summarize_ratings(it->second).value_or(collaboration::RatingSummary{});
  }

  // ---- scenarios --------------------------------------------------------

  /// Network the viewer sees for `network_owner`'s step-5 item (their draft
  /// for their own item, otherwise the latest shared/published version).
  json network_payload(const std::string& viewer, const std::string& network_owner) const {
    return view_work(viewer, network_owner, kStepNetwork).content;
  }

  /// Scenarios listed on `network_owner`'s step-5 network for this viewer:
  /// the network's own scenarios followed by the viewer's private ones.
  std::vector<ScenarioRef> scenarios_on(const std::string& viewer, const std::string& network_owner) const {
    auto payload = network_payload(viewer, network_owner);
    auto net = payload_network(payload);
    std::vector<ScenarioRef> out;
    auto listed = payload_scenarios(payload);
    if (listed.empty()) listed.push_back(scenarios::make_base_scenario(net, network_owner));
    for (auto& s : listed) out.push_back({std::move(s), net, false});
    for (const auto& [id, p] : private_) {
      if (p.scenario.owner == viewer && p.scenario.network_owner == network_owner) {
        out.push_back({p.scenario, net, true});
      }
    }
    return out;
  }

  const PrivateScenario* private_scenario(const std::string& id) const {
    auto it = private_.find(id);
    return it == private_.end() ? nullptr : &it->second;
  }

  ScenarioRef find_scenario(const std::string& viewer, const std::string& network_owner,
                            const std::string& scenario_id) const {
    if (const auto* p = private_scenario(scenario_id)) {
      if (p->scenario.owner == viewer && p->scenario.network_owner == network_owner) {
        if (p->invalidated) {
          throw Error(ErrorCode::VersionMismatch,
                      "scenario '" + p->scenario.name + "' was invalidated by a structural change to its network");
        }
        return {p->scenario, payload_network(network_payload(viewer, network_owner)), true};
      }
    }
    for (auto& ref : scenarios_on(viewer, network_owner)) {
      if (ref.scenario.id == scenario_id) return ref;
    }
    throw Error(ErrorCode::UnknownScenario, "no scenario '" + scenario_id + "' on that network");
  }

  /// Adds a scenario. On the actor's own network (or the group network, for
  /// the facilitator) it becomes part of that step-5 payload; on anybody
  /// else's network it is private to the actor. Returns the scenario id.
  std::string add_scenario(const std::string& actor, const std::string& network_owner, scenarios::Scenario s,
                           std::int64_t now) {
    const auto role = role_of(actor);
    if (role == Role::Observer) throw Error(ErrorCode::RoleError, "observers cannot create scenarios");
    check_writable(actor, now);
    bool own = network_owner == actor || (network_owner == kGroupOwner && role == Role::Facilitator);
    auto payload = network_payload(actor, network_owner);
    auto net = payload_network(payload);
    auto existing = payload_scenarios(payload);
    for (const auto& [id, p] : private_) {
      if (p.scenario.owner == actor && p.scenario.network_owner == network_owner) existing.push_back(p.scenario);
    }
    s.id = "s" + std::to_string(++seq_);
    s.owner = own ? network_owner : actor;
    s.network_owner = network_owner;
    auto created = scenarios::create_scenario(net, existing, std::move(s));
    if (own) {
      json scenarios_json = payload.value("scenarios", json::array());
      scenarios_json.push_back(scenarios::to_json(created));
      payload["scenarios"] = std::move(scenarios_json);
      if (network_owner == kGroupOwner) {
        put_group_solution(actor, kStepNetwork, payload, std::nullopt, now);
      } else {
        put_work(actor, kStepNetwork, payload, std::nullopt, now);
      }
    } else {
      private_[created.id] = {created, false};
    }
    return created.id;
  }

  void delete_scenario(const std::string& actor, const std::string& network_owner, const std::string& scenario_id,
                       std::int64_t now) {
    const auto role = role_of(actor);
    if (role == Role::Observer) throw Error(ErrorCode::RoleError, "observers cannot delete scenarios");
    check_writable(actor, now);
    if (scenario_id == scenarios::kBaseScenarioId) {
      throw Error(ErrorCode::UndeletableScenario, "the base scenario cannot be deleted");
    }
    auto it = private_.find(scenario_id);
    if (it != private_.end() && it->second.scenario.owner == actor &&
        it->second.scenario.network_owner == network_owner) {
      private_.erase(it);
      return;
    }
    bool own = network_owner == actor || (network_owner == kGroupOwner && role == Role::Facilitator);
    if (!own) throw Error(ErrorCode::UnknownScenario, "no scenario '" + scenario_id + "' of yours there");
    auto payload = network_payload(actor, network_owner);
    auto list = payload.value("scenarios", json::array());
    auto before = list.size();
    list.erase(std::remove_if(list.begin(), list.end(),
                              [&](const json& j) { return j.value("id", "") == scenario_id; }),
               list.end());
    if (list.size() == before) throw Error(ErrorCode::UnknownScenario, "no scenario '" + scenario_id + "'");
    payload["scenarios"] = std::move(list);
    if (network_owner == kGroupOwner) {
      put_group_solution(actor, kStepNetwork, payload, std::nullopt, now);
    } else {
      put_work(actor, kStepNetwork, payload, std::nullopt, now);
    }
  }

  // ---- submission -------------------------------------------------------

  /// Freezes one report and builds the export bundle. HighestRated may be
  /// triggered by an analyst when the facilitator is absent.
  const FinalSubmission& submit(const std::string& actor, SelectionMethod method, const std::string& report,
                                std::int64_t now) {
    const auto role = role_of(actor);
    if (submission_) throw Error(ErrorCode::AlreadySubmitted, "the group has already submitted");
    bool allowed = role == Role::Facilitator ||
                   (method == SelectionMethod::HighestRated && role == Role::Analyst && facilitator_absent_);
    if (!allowed) throw Error(ErrorCode::RoleError, "only the facilitator can submit the final report");
    check_open(actor, now, role == Role::Facilitator);
    std::string chosen;
    if (method == SelectionMethod::FacilitatorChoice) {
      auto shared = shared_reports();
      if (std::find(shared.begin(), shared.end(), report) == shared.end()) {
        gate_closed(report == kGroupOwner ? reason::kNotPublished : reason::kNotShared,
                    "only shared reports can be submitted");
      }
      chosen = report;
    } else {
      std::vector<reporting::Candidate> candidates;
      for (const auto& r : shared_reports()) {
        auto it = ratings_.find(r);
        if (it == ratings_.end() || it->second.empty()) continue;
        reporting::Candidate c{r, 0, static_cast<std::int64_t>(it->second.size()), first_share_seq(r)};
        for (const auto& [rater, score] : it->second) c.score_sum += score;
        candidates.push_back(c);
      }
      auto best = reporting::select_highest_rated(candidates);
      if (!best) throw Error(ErrorCode::NoRatedReports, "no shared report has been rated");
      chosen = *best;
    }
    export_files_ = build_export(chosen, method, now);
    FinalSubmission sub;
    sub.report_id = chosen;
    sub.method = method;
    sub.at = now;
    sub.document_hash = sha256_hex(export_files_.at("report.html"));
    for (const auto& [name, content] : export_files_) sub.file_hashes[name] = sha256_hex(content);
    submission_ = std::move(sub);
    ++seq_;
    return *submission_;
  }

  // ---- state ------------------------------------------------------------

  json to_json() const {
    json work = json::object();
    for (const auto& [owner, steps] : work_) {
      for (const auto& [step, item] : steps) work[owner][std::to_string(step)] = item;
    }
    json solution = json::object();
    for (const auto& [step, sol] : solution_) solution[std::to_string(step)] = sol;
    json ratings = json::object();
    for (const auto& [report, by] : ratings_) ratings[report] = by;
    json priv = json::object();
    for (const auto& [id, p] : private_) priv[id] = p;
    return {{"id", id_},
            {"problem", problem_},
            {"members", members_},
            {"work", work},
            {"solution", solution},
            {"navigation", nav_},
            {"released", released_},
            {"posts", posts_},
            {"messages", messages_},
            {"ratings", ratings},
            {"privateScenarios", priv},
            {"facilitatorAbsent", facilitator_absent_},
            {"submission", submission_ ? json(*submission_) : json(nullptr)},
            {"exportFiles", export_files_},
            {"seq", seq_}};
  }

  static Group from_json(const json& j) {
    Group g;
    g.id_ = j.at("id").get<std::string>();
    g.problem_ = j.at("problem").get<Problem>();
    g.members_ = j.at("members").get<std::vector<Membership>>();
    for (const auto& [owner, steps] : j.at("work").items()) {
      for (const auto& [step, item] : steps.items()) g.work_[owner][std::stoi(step)] = item.get<WorkItem>();
    }
    for (const auto& [step, sol] : j.at("solution").items()) g.solution_[std::stoi(step)] = sol.get<SolutionStep>();
    g.nav_ = j.at("navigation").get<std::map<std::string, Navigation>>();
    g.released_ = j.at("released").get<std::set<int>>();
    g.posts_ = j.at("posts").get<std::vector<collaboration::ForumPost>>();
    g.messages_ = j.at("messages").get<std::vector<collaboration::DirectMessage>>();
    for (const auto& [report, by] : j.at("ratings").items()) {
      g.ratings_[report] = by.get<std::map<std::string, int>>();
    }
    for (const auto& [id, p] : j.at("privateScenarios").items()) g.private_[id] = p.get<PrivateScenario>();
    g.facilitator_absent_ = j.at("facilitatorAbsent").get<bool>();
    if (!j.at("submission").is_null()) g.submission_ = j.at("submission").get<FinalSubmission>();
    g.export_files_ = j.at("exportFiles").get<std::map<std::string, std::string>>();
    g.seq_ = j.at("seq").get<std::uint64_t>();
    return g;
  }

  std::string state_hash() const { return sha256_hex(to_json().dump()); }

 private:
  void insert_member(Membership m) {
    if (m.user.empty()) throw Error(ErrorCode::InvalidPayload, "member needs a user id");
    if (member(m.user)) throw Error(ErrorCode::InvalidPayload, "'" + m.user + "' is already a member");
    if (m.user == kGroupOwner) throw Error(ErrorCode::InvalidPayload, "'group' is reserved");
    if (m.pseudonym.empty()) m.pseudonym = "Member" + std::to_string(members_.size() + 1);
    if (m.pseudonym == kGroupOwner || by_pseudonym(m.pseudonym)) {
      throw Error(ErrorCode::DuplicatePseudonym, "pseudonym '" + m.pseudonym + "' is taken");
    }
    if (m.role == Role::Analyst) nav_[m.user] = Navigation{};
    members_.push_back(std::move(m));
  }

  void require_analyst(const std::string& user, const char* what) const {
    if (role_of(user) != Role::Analyst) throw Error(ErrorCode::RoleError, std::string("only analysts can ") + what);
  }

  void require_facilitator(const std::string& user, const char* what) const {
    if (role_of(user) != Role::Facilitator) {
      throw Error(ErrorCode::RoleError, std::string("only the facilitator can ") + what);
    }
  }

  /// Deadline check for every mutation. The facilitator keeps a grace period
  /// after the end for submitting.
  void check_open(const std::string& actor, std::int64_t now, bool submitting = false) const {
    (void)actor;
    if (problem_.starts_at && now < *problem_.starts_at) {
      throw Error(ErrorCode::Frozen, "the problem has not started yet");
    }
    if (problem_.ends_at && now >= *problem_.ends_at) {
      if (submitting && now < *problem_.ends_at + kSubmissionGraceSeconds) return;
      throw Error(ErrorCode::Frozen, "the problem has ended; work is read-only");
    }
  }

  /// Work, solutions, ratings and scenarios also freeze at submission.
  void check_writable(const std::string& actor, std::int64_t now) const {
    check_open(actor, now);
    if (submission_) throw Error(ErrorCode::Frozen, "the group has submitted; work is read-only");
  }

  json initial_payload(int step) const {
    if (step == kStepReport) return empty_payload(step, problem_.title, problem_.questions);
    auto p = empty_payload(step);
    if (step == kStepNetwork) return normalize_payload(step, p, kGroupOwner, 0);
    return p;
  }

  WorkItem& item_for(const std::string& owner, int step) {
    auto& item = work_[owner][step];
    if (item.version == 0) {
      item.owner = owner;
      item.step = step;
    }
    return item;
  }

  WorkItem* mutable_item(const std::string& owner, int step) {
    auto it = work_.find(owner);
    if (it == work_.end()) return nullptr;
    auto jt = it->second.find(step);
    return jt == it->second.end() ? nullptr : &jt->second;
  }

  std::uint64_t first_share_seq(const std::string& report) const {
    if (report == kGroupOwner) return solution_step(kStepReport)->published.front().seq;
    return work_item(report, kStepReport)->shared.front().seq;
  }

  /// Private scenarios on `network_owner`'s network stop working when the
  /// structure they were written against changes.
  void invalidate_if_structural(const std::string& network_owner, const json& before, const json& after) {
    if (!scenarios::structurally_different(payload_network(before), payload_network(after))) return;
    for (auto& [id, p] : private_) {
      if (p.scenario.network_owner == network_owner) p.invalidated = true;
    }
  }

  /// Latest visible payload for `owner` at `step` from the group's point of
  /// view: shared analyst versions, published group versions.
  std::optional<json> released_payload(const std::string& owner, int step) const {
    if (owner == kGroupOwner) {
      const auto* sol = solution_step(step);
      if (sol && sol->is_published()) return std::optional<json>(sol->published.back().content.get());
      return std::nullopt;
    }
    const auto* item = work_item(owner, step);
    if (item && item->is_shared()) return std::optional<json>(item->shared.back().content.get());
    return std::nullopt;
  }

  std::map<std::string, std::string> build_export(const std::string& report, SelectionMethod method,
                                                  std::int64_t now) const {
    std::map<std::string, std::string> files;
    auto draft = payload_report(*released_payload(report, kStepReport));
    files["report.html"] = reporting::render_html(draft);
    bn::BayesianNetwork net;
    json scenario_list = json::array();
    for (int step = kStepNetwork; step >= 2; --step) {
      if (auto payload = released_payload(report, step)) {
        net = payload_network(*payload);
        if (step == kStepNetwork) scenario_list = payload->value("scenarios", json::array());
        break;
      }
    }
    for (auto& s : scenario_list) {
      s["owner"] = display(s.value("owner", ""));
      s["networkOwner"] = display(s.value("networkOwner", ""));
    }
    net.provenance.author = display(net.provenance.author);
    files["network.json"] = bn::to_json(net).dump(2) + "\n";
    files["scenarios.json"] = json{{"scenarios", scenario_list}}.dump(2) + "\n";
    json manifest = {{"group", id_},
                     {"problem", problem_.id},
                     {"report", display(report)},
                     {"method", method},
                     {"submittedAt", now},
                     {"files", json::object()}};
    for (const auto& [name, content] : files) manifest["files"][name] = sha256_hex(content);
    files["manifest.json"] = manifest.dump(2) + "\n";
    return files;
  }

  std::string id_;
  Problem problem_;
  std::vector<Membership> members_;
  std::map<std::string, std::map<int, WorkItem>> work_;
  std::map<int, SolutionStep> solution_;
  std::map<std::string, Navigation> nav_;
  std::set<int> released_;
  std::vector<collaboration::ForumPost> posts_;
  std::vector<collaboration::DirectMessage> messages_;
  std::map<std::string, std::map<std::string, int>> ratings_;
  std::map<std::string, PrivateScenario> private_;
  bool facilitator_absent_ = false;
  std::optional<FinalSubmission> submission_;
  std::map<std::string, std::string> export_files_;
  std::uint64_t seq_ = 0;
};

}  // namespace delphinet::workflow
