#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <semaphore>
#include <set>
#include <shared_mutex>
#include <string>

#include <nlohmann/json.hpp>

#include "delphinet/collaboration.hpp"
#include "delphinet/service/auth.hpp"
#include "delphinet/service/config.hpp"
#include "delphinet/service/store.hpp"
#include "delphinet/views.hpp"
#include "delphinet/workflow/commands.hpp"

namespace delphinet::service {

using workflow::Group;
using workflow::Role;

using Clock = std::function<std::int64_t()>;

inline std::int64_t system_seconds() {
  return std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

/// Machine-readable reasons added by the service itself.
namespace reason {
inline constexpr const char* kNotMember = "NOT_MEMBER";
inline constexpr const char* kNotAdmin = "NOT_ADMIN";
}  // namespace reason

[[noreturn]] inline void forbid(const char* why, const std::string& message) {
  throw Error(ErrorCode::RoleError, message, {why});
}

/// Keys whose string values name a member; responses show pseudonyms there.
inline bool names_member(const std::string& key) {
  static const std::set<std::string> keys{"owner",  "networkOwner", "author", "sender", "recipient",
                                          "user",   "source",       "report", "report_id", "rater",
                                          "recipients", "networkOwners"};
  return keys.count(key) > 0;
}

/// Replaces member ids by pseudonyms under the keys above, recursively.
inline void pseudonymize(json& j, const Group& g) {
  auto swap_id = [&](json& v) {
    if (v.is_string()) {
      if (const auto* m = g.member(v.get<std::string>())) v = m->pseudonym;
    }
  };
  if (j.is_object()) {
    for (auto& [key, value] : j.items()) {
      if (names_member(key)) {
        if (value.is_array()) {
          for (auto& v : value) swap_id(v);
        } else {
          swap_id(value);
        }
      }
      if (value.is_structured()) pseudonymize(value, g);
    }
  } else if (j.is_array()) {
    for (auto& v : j) pseudonymize(v, g);
  }
}

inline json work_view_json(const Group& g, const workflow::WorkView& v) {
  json out = {{"owner", v.owner == workflow::kGroupOwner ? std::string(workflow::kGroupOwner) : g.display(v.owner)},
              {"step", v.step},
              {"version", v.version},
              {"status", v.status},
              {"draft", v.draft},
              {"content", v.content.get()},
              {"provenance", v.provenance}};
  pseudonymize(out["content"], g);
  return out;
}

class Platform {
 public:
  explicit Platform(Config config, std::shared_ptr<collaboration::Notifier> notifier = nullptr,
                    Clock clock = system_seconds, WarningSink warn = {})
      : config_(std::move(config)),
        store_(config_.data_dir, std::move(warn)),
        notifier_(notifier ? std::move(notifier) : std::make_shared<collaboration::LogNotifier>()),
        clock_(std::move(clock)),
        inference_slots_(std::min(config_.inference_workers, 64)),
        admin_log_(store_.open_admin_log()) {
    for (const auto& r : admin_log_.records()) apply_admin(r);
    for (const auto& id : store_.group_ids()) load_group(id);
  }

  const Config& config() const { return config_; }
  const Store& store() const { return store_; }
  collaboration::Notifier& notifier() { return *notifier_; }
  std::int64_t now() const { return clock_(); }

  // ---- accounts -------------------------------------------------------

  bool has_users() const {
    std::shared_lock lock(registry_mu_);
    return !users_.empty();
  }

  /// Creates an account. Only an administrator may do so, except for the
  /// very first account, which is always an administrator.
  void create_user(const std::optional<std::string>& actor, const std::string& id, const std::string& password,
                   bool admin) {
    std::unique_lock lock(registry_mu_);
    if (!users_.empty()) {
      if (!actor || !users_.count(*actor) || !users_.at(*actor).admin) {
        forbid(reason::kNotAdmin, "only administrators can create accounts");
      }
    } else {
      admin = true;
    }
    check_id(id, "user id");
    if (users_.count(id)) throw Error(ErrorCode::DuplicateName, "user '" + id + "' already exists");
    auto h = hash_password(password, config_.pbkdf2_iterations);
    json record = {{"type", "create_user"}, {"id", id},          {"salt", h.salt},
                   {"hash", h.hash},        {"iterations", h.iterations}, {"admin", admin}};
    admin_log_.append(record);
    apply_admin(record);
  }

  struct Login {
    std::string token;
    std::int64_t expires = 0;
  };

  Login login(const std::string& user, const std::string& password) {
    PasswordHash h;
    {
      std::shared_lock lock(registry_mu_);
      auto it = users_.find(user);
      if (it == users_.end()) throw Error(ErrorCode::Unauthenticated, "unknown user or wrong password");
      h = it->second.password;
    }
    if (!verify_password(password, h)) throw Error(ErrorCode::Unauthenticated, "unknown user or wrong password");
    auto t = now();
    auto token = sessions_.open(user, t, config_.session_ttl_seconds);
    return {token, t + config_.session_ttl_seconds};
  }

  std::string authenticate(const std::string& token) { return sessions_.user_for(token, now()); }
  void logout(const std::string& token) { sessions_.close(token); }

  bool is_admin(const std::string& user) const {
    std::shared_lock lock(registry_mu_);
    auto it = users_.find(user);
    return it != users_.end() && it->second.admin;
  }

  // ---- problems -------------------------------------------------------

  json create_problem(const std::string& actor, const json& body) {
    require_admin(actor);
    workflow::Problem p;
    try {
      p = body.get<workflow::Problem>();
    } catch (const json::exception& e) {
      throw Error(ErrorCode::InvalidPayload, std::string("malformed problem: ") + e.what());
    }
    check_id(p.id, "problem id");
    workflow::check_problem(p);
    std::unique_lock lock(registry_mu_);
    if (problems_.count(p.id)) throw Error(ErrorCode::DuplicateName, "problem '" + p.id + "' already exists");
    json record = {{"type", "create_problem"}, {"problem", p}};
    admin_log_.append(record);
    apply_admin(record);
    return record.at("problem");
  }

  /// Administrators see every problem; everyone else the problems of their groups.
  json problems(const std::string& actor) const {
    std::set<std::string> mine;
    const bool admin = is_admin(actor);
    {
      std::shared_lock lock(registry_mu_);
      for (const auto& [id, slot] : groups_) {
        std::shared_lock glock(slot->mu);
        if (slot->group.member(actor)) mine.insert(slot->group.problem().id);
      }
      json out = json::array();
      for (const auto& [id, p] : problems_) {
        if (admin || mine.count(id)) out.push_back(p);
      }
      return out;
    }
  }

  // ---- groups ---------------------------------------------------------

  /// {"id", "problem": problem id, "members": [{"user", "role", "pseudonym"}]}
  json create_group(const std::string& actor, const json& body) {
    require_admin(actor);
    std::string id;
    workflow::Problem problem;
    std::vector<workflow::Membership> members;
    try {
      id = body.at("id").get<std::string>();
      members = body.at("members").get<std::vector<workflow::Membership>>();
    } catch (const json::exception& e) {
      throw Error(ErrorCode::InvalidPayload, std::string("malformed group: ") + e.what());
    }
    check_id(id, "group id");
    std::unique_lock lock(registry_mu_);
    auto pid = body.value("problem", "");
    auto pit = problems_.find(pid);
    if (pit == problems_.end()) throw Error(ErrorCode::UnknownProblem, "no problem '" + pid + "'");
    problem = pit->second;
    for (const auto& m : members) {
      if (!users_.count(m.user)) throw Error(ErrorCode::UnknownMember, "no user '" + m.user + "'");
    }
    if (groups_.count(id)) throw Error(ErrorCode::DuplicateName, "group '" + id + "' already exists");
    Group group(id, problem, members);  // checks roles and pseudonyms
    json record = {{"type", "create_group"}, {"id", id}, {"problem", problem}, {"members", members}};
    auto slot = std::make_shared<Slot>(std::move(group), store_.open_group_log(id));
    if (slot->log.size() != 0) throw Error(ErrorCode::DuplicateName, "a log for group '" + id + "' already exists");
    slot->log.append(record);
    groups_[id] = slot;
    return {{"id", id}, {"problem", problem}, {"members", members}};
  }

  std::vector<std::string> group_ids() const {
    std::shared_lock lock(registry_mu_);
    std::vector<std::string> out;
    for (const auto& [id, slot] : groups_) out.push_back(id);
    return out;
  }

  /// Membership changes: add_member, replace_facilitator, set_facilitator_absent.
  json admin_command(const std::string& actor, const std::string& group, json cmd) {
    require_admin(actor);
    const auto type = cmd.value("type", "");
    if (type != "add_member" && type != "replace_facilitator" && type != "set_facilitator_absent") {
      throw Error(ErrorCode::InvalidPayload, "unknown administrative command '" + type + "'");
    }
    std::string user = type == "add_member" && cmd.contains("member") ? cmd.at("member").value("user", "")
                                                                       : cmd.value("user", "");
    if (type != "set_facilitator_absent") {
      std::shared_lock lock(registry_mu_);
      if (!users_.count(user)) throw Error(ErrorCode::UnknownMember, "no user '" + user + "'");
    }
    cmd["at"] = now();
    cmd.erase("actor");
    return execute(group, cmd);
  }

  /// Runs a member's command. Member references in the body are pseudonyms
  /// and are translated to user ids before the command is logged.
  json command(const std::string& actor, const std::string& group, json cmd) {
    auto slot = find(group);
    std::unique_lock lock(slot->mu);
    const auto& g = slot->group;
    require_member(g, actor);
    static const std::set<std::string> member_commands{
        "put_work", "share_work", "put_group_solution", "publish_group_solution", "adopt",
        "advance",  "navigate",   "release_step",       "post",                   "message",
        "rate",     "add_scenario", "delete_scenario",  "submit"};
    const auto type = cmd.value("type", "");
    if (!member_commands.count(type)) throw Error(ErrorCode::InvalidPayload, "unknown command '" + type + "'");
    cmd["actor"] = actor;
    cmd["at"] = now();
    for (const char* key : {"source", "report", "networkOwner"}) {
      if (cmd.contains(key) && cmd.at(key).is_string()) cmd[key] = from_pseudonym(g, cmd.at(key).get<std::string>());
    }
    if (cmd.contains("recipients") && cmd.at("recipients").is_array()) {
      for (auto& r : cmd["recipients"]) r = from_pseudonym(g, r.get<std::string>());
    }
    if (type == "post") {
      for (const auto& a : cmd.value("attachments", json::array())) {
        if (!a.is_string() || !store_.has_blob(a.get<std::string>())) {
          throw Error(ErrorCode::InvalidPayload, "attachments must name stored blobs");
        }
      }
    }
    auto result = execute_locked(*slot, cmd);
    if (type == "message" && cmd.value("nudge", false)) {
      for (const auto& m : result) {
        notifier_->notify(m.at("recipient").get<std::string>(), "New message from " + g.display(actor),
                          m.at("body").get<std::string>());
      }
    }
    pseudonymize(result, slot->group);
    if (type == "message" && result.is_array()) {
      for (auto& m : result) m.erase("fanout");
    }
    return result;
  }

  /// Runs `f(const Group&)` for a member under a shared lock.
  template <class F>
  auto read(const std::string& actor, const std::string& group, F&& f) const {
    auto slot = find(group);
    std::shared_lock lock(slot->mu);
    require_member(slot->group, actor);
    return f(slot->group);
  }

  /// Runs `f(const Group&)` without a membership check (administration, tests).
  template <class F>
  auto inspect(const std::string& group, F&& f) const {
    auto slot = find(group);
    std::shared_lock lock(slot->mu);
    return f(slot->group);
  }

  std::string state_hash(const std::string& group) const {
    return inspect(group, [](const Group& g) { return g.state_hash(); });
  }

  /// Rebuilds the group from its log alone and returns that state's hash.
  std::string replay_hash(const std::string& group) const {
    auto slot = find(group);
    std::shared_lock lock(slot->mu);
    return rebuild(slot->log.records(), nullptr).state_hash();
  }

  // ---- group views ----------------------------------------------------

  json overview(const std::string& actor, const std::string& group) const {
    return read(actor, group, [&](const Group& g) {
      const auto& me = *g.member(actor);
      json members = json::array();
      for (const auto& m : g.members()) members.push_back({{"pseudonym", m.pseudonym}, {"role", m.role}});
      json out = {{"id", g.id()},
                  {"problem", g.problem()},
                  {"me", {{"pseudonym", me.pseudonym}, {"role", me.role}}},
                  {"members", members},
                  {"releasedSteps", g.released_steps()},
                  {"facilitatorAbsent", g.facilitator_absent()},
                  {"submission", nullptr}};
      if (me.role == Role::Analyst) {
        out["navigation"] = workflow::detail::navigation_json(g.navigation(actor));
      }
      if (g.submission()) {
        const auto& s = *g.submission();
        out["submission"] = {{"report", s.report_id == workflow::kGroupOwner ? s.report_id : g.display(s.report_id)},
                             {"method", s.method},
                             {"at", s.at},
                             {"documentHash", s.document_hash}};
      }
      return out;
    });
  }

  /// Work of one owner (pseudonym) or, without an owner, everything visible.
  json work(const std::string& actor, const std::string& group, int step,
            const std::optional<std::string>& owner) const {
    return read(actor, group, [&](const Group& g) {
      if (owner) return work_view_json(g, g.view_work(actor, from_pseudonym(g, *owner), step));
      json out = json::array();
      for (const auto& v : g.visible_work(actor, step)) out.push_back(work_view_json(g, v));
      return out;
    });
  }

  json group_solution(const std::string& actor, const std::string& group, int step) const {
    return read(actor, group,
                [&](const Group& g) { return work_view_json(g, g.view_group_solution(actor, step)); });
  }

  json forum(const std::string& actor, const std::string& group, int step) const {
    return read(actor, group, [&](const Group& g) {
      json out = g.forum(actor, step);
      pseudonymize(out, g);
      return out;
    });
  }

  json inbox(const std::string& actor, const std::string& group) const {
    return read(actor, group, [&](const Group& g) {
      json out = g.inbox(actor);
      pseudonymize(out, g);
      for (auto& m : out) m.erase("fanout");
      return out;
    });
  }

  json reports(const std::string& actor, const std::string& group) const {
    return read(actor, group, [&](const Group& g) {
      json out = json::array();
      for (const auto& r : g.shared_reports()) {
        if (!g.report_denial(actor, r)) out.push_back(r == workflow::kGroupOwner ? r : g.display(r));
      }
      return out;
    });
  }

  /// The caller's own score and, once they have rated, the mean and count.
  json rating(const std::string& actor, const std::string& group, const std::string& report) const {
    return read(actor, group, [&](const Group& g) {
      auto id = from_pseudonym(g, report);
      if (auto why = g.report_denial(actor, id)) workflow::gate_closed(*why, "that report is not visible to you");
      auto own = g.own_rating(actor, id);
      auto summary = g.rating_summary(actor, id);
      json out = {{"report", report}, {"own", own ? json(*own) : json(nullptr)}, {"hidden", !summary}};
      if (summary) {
        out["average"] = summary->average;
        out["count"] = summary->count;
      }
      return out;
    });
  }

  json submission_files(const std::string& actor, const std::string& group) const {
    return read(actor, group, [&](const Group& g) {
      if (!g.submission()) throw Error(ErrorCode::UnknownReport, "the group has not submitted yet");
      json files = json::object();
      for (const auto& [name, text] : g.export_files()) files[name] = text;
      return files;
    });
  }

  // ---- scenarios and inference -----------------------------------------

  /// Default network: an analyst's own, otherwise the group solution.
  std::string network_owner(const Group& g, const std::string& actor, const std::optional<std::string>& given) const {
    if (given && !given->empty()) return from_pseudonym(g, *given);
    return g.role_of(actor) == Role::Analyst ? actor : std::string(workflow::kGroupOwner);
  }

  json scenario_list(const std::string& actor, const std::string& group,
                     const std::optional<std::string>& network) const {
    return read(actor, group, [&](const Group& g) {
      json out = json::array();
      for (const auto& ref : g.scenarios_on(actor, network_owner(g, actor, network))) {
        auto j = scenarios::to_json(ref.scenario);
        j["private"] = ref.is_private;
        out.push_back(std::move(j));
      }
      pseudonymize(out, g);
      return out;
    });
  }

  json evaluate(const std::string& actor, const std::string& group, const std::string& scenario_id,
                const std::optional<std::string>& network) {
    auto ref = read(actor, group, [&](const Group& g) {
      return g.find_scenario(actor, network_owner(g, actor, network), scenario_id);
    });
    auto evaluation = run_inference([&](const inference::FactorLimits& limits) {
      return scenarios::evaluate_scenario(ref.network, ref.scenario, &cache_, limits);
    });
    auto out = views::evaluation_json(ref.network, ref.scenario, evaluation);
    out["private"] = ref.is_private;
    return out;
  }

  json explain(const std::string& actor, const std::string& group, const std::string& scenario_id,
               const std::optional<std::string>& network, const std::string& level) {
    if (level != "summary" && level != "detail") {
      throw Error(ErrorCode::InvalidPayload, "level must be 'summary' or 'detail'");
    }
    auto ref = read(actor, group, [&](const Group& g) {
      return g.find_scenario(actor, network_owner(g, actor, network), scenario_id);
    });
    return run_inference([&](const inference::FactorLimits&) {
      if (level == "summary") {
        auto e = scenarios::evaluate_scenario(ref.network, ref.scenario, &cache_);
        return json{{"scenario", scenario_id}, {"level", level}, {"summary", views::summary_json(e.summary)}};
      }
      auto d = scenarios::explain_scenario(ref.network, ref.scenario);
      return json{{"scenario", scenario_id}, {"level", level}, {"detail", views::detail_json(d)}};
    });
  }

  /// Stateless evaluation of a posted network (solo use).
  json evaluate_network(const json& body) {
    auto net = bn::network_from_json(body.at("network"));
    auto report = bn::validate_network(net);
    if (!report.ok()) throw Error(report.findings.front().code, report.findings.front().message);
    scenarios::Scenario s;
    s.id = "adhoc";
    s.name = body.value("name", "Ad hoc");
    const auto evidence = body.value("evidence", json::object());
    for (const auto& [k, v] : evidence.items()) s.evidence.set(k, v.get<std::string>());
    s.outputs = body.value("targets", std::vector<std::string>{});
    if (s.outputs.empty()) s.outputs = scenarios::default_outputs(net);
    auto evaluation = run_inference([&](const inference::FactorLimits& limits) {
      return scenarios::evaluate_scenario(net, s, &cache_, limits);
    });
    return views::evaluation_json(net, scenarios::normalized(net, s), evaluation);
  }

  scenarios::EvaluationCache& cache() { return cache_; }

  // ---- blobs, administration ------------------------------------------

  std::string put_blob(const std::string& actor, const std::string& data) {
    (void)actor;
    if (data.empty()) throw Error(ErrorCode::EmptyContent, "empty attachment");
    return store_.put_blob(data);
  }

  std::optional<std::string> get_blob(const std::string& hash) const { return store_.get_blob(hash); }

  /// Everything an administrator configures, with real user ids.
  json admin_config(const std::string& actor) const {
    require_admin(actor);
    std::shared_lock lock(registry_mu_);
    json users = json::array();
    for (const auto& [id, u] : users_) users.push_back({{"id", id}, {"admin", u.admin}});
    json problems = json::array();
    for (const auto& [id, p] : problems_) problems.push_back(p);
    json groups = json::array();
    for (const auto& [id, slot] : groups_) {
      std::shared_lock glock(slot->mu);
      groups.push_back({{"id", id},
                        {"problem", slot->group.problem().id},
                        {"members", slot->group.members()},
                        {"facilitatorAbsent", slot->group.facilitator_absent()}});
    }
    json features = config_.features;
    return {{"users", users}, {"problems", problems}, {"groups", groups}, {"features", features}};
  }

  /// Training-system callback; accepted and ignored.
  void lms_webhook(const std::string& actor, const json&) const { require_admin(actor); }

 private:
  struct User {
    PasswordHash password;
    bool admin = false;
  };

  struct Slot {
    Slot(Group g, CommandLog l) : group(std::move(g)), log(std::move(l)) {}
    mutable std::shared_mutex mu;
    Group group;
    CommandLog log;
  };

  static void check_id(const std::string& id, const char* what) {
    if (id.empty() || id.size() > 64 ||
        id.find_first_not_of("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_-.@") !=
            std::string::npos) {
      throw Error(ErrorCode::InvalidPayload, std::string(what) + " may only use letters, digits and _-.@");
    }
  }

  void require_admin(const std::string& actor) const {
    if (!is_admin(actor)) forbid(reason::kNotAdmin, "administrators only");
  }

  static void require_member(const Group& g, const std::string& actor) {
    if (!g.member(actor)) forbid(reason::kNotMember, "you are not a member of this group");
  }

  static std::string from_pseudonym(const Group& g, const std::string& pseudonym) {
    if (pseudonym == workflow::kGroupOwner) return pseudonym;
    if (const auto* m = g.by_pseudonym(pseudonym)) return m->user;
    throw Error(ErrorCode::UnknownMember, "nobody in this group is called '" + pseudonym + "'");
  }

  std::shared_ptr<Slot> find(const std::string& group) const {
    std::shared_lock lock(registry_mu_);
    auto it = groups_.find(group);
    if (it == groups_.end()) throw Error(ErrorCode::UnknownGroup, "no group '" + group + "'");
    return it->second;
  }

  void apply_admin(const json& r) {
    const auto type = r.at("type").get<std::string>();
    if (type == "create_user") {
      users_[r.at("id").get<std::string>()] = {
          {r.at("salt").get<std::string>(), r.at("hash").get<std::string>(), r.at("iterations").get<int>()},
          r.at("admin").get<bool>()};
    } else if (type == "create_problem") {
      auto p = r.at("problem").get<workflow::Problem>();
      problems_[p.id] = p;
    } else {
      throw Error(ErrorCode::CorruptLog, "unknown administrative record '" + type + "'");
    }
  }

  json execute(const std::string& group, const json& cmd) {
    auto slot = find(group);
    std::unique_lock lock(slot->mu);
    return execute_locked(*slot, cmd);
  }

  /// Applies, then logs. A refused command is never logged.
  json execute_locked(Slot& slot, const json& cmd) {
    auto result = workflow::apply_command(slot.group, cmd);
    auto seq = slot.log.append(cmd);
    if (config_.snapshot_every > 0 && seq % config_.snapshot_every == 0) {
      store_.write_snapshot(slot.group.id(), {seq, slot.group.state_hash(), slot.group.to_json()});
    }
    return result;
  }

  /// Group state after the given records, starting from `snapshot` if usable.
  static Group rebuild(const std::vector<json>& records, const Snapshot* snapshot) {
    if (records.empty() || records.front().value("type", "") != "create_group") {
      throw Error(ErrorCode::CorruptLog, "group log does not start with its creation record");
    }
    std::size_t next = 1;
    std::optional<Group> g;
    if (snapshot && snapshot->seq >= 1 && snapshot->seq <= records.size()) {
      try {
        auto candidate = Group::from_json(snapshot->state);
        if (candidate.state_hash() == snapshot->hash) {
          g = std::move(candidate);
          next = snapshot->seq;
        }
      } catch (const std::exception&) {
      }
    }
    if (!g) {
      const auto& c = records.front();
      g.emplace(c.at("id").get<std::string>(), c.at("problem").get<workflow::Problem>(),
                c.at("members").get<std::vector<workflow::Membership>>());
    }
    for (; next < records.size(); ++next) {
      try {
        workflow::apply_command(*g, records[next]);
      } catch (const Error& e) {
        throw Error(ErrorCode::CorruptLog,
                    "record " + std::to_string(next + 1) + " no longer applies: " + std::string(e.what()));
      }
    }
    return std::move(*g);
  }

  void load_group(const std::string& id) {
    auto log = store_.open_group_log(id);
    if (log.size() == 0) return;
    auto snapshot = store_.read_snapshot(id);
    auto group = rebuild(log.records(), snapshot ? &*snapshot : nullptr);
    groups_[id] = std::make_shared<Slot>(std::move(group), std::move(log));
  }

  template <class F>
  auto run_inference(F&& f) -> decltype(f(std::declval<const inference::FactorLimits&>())) {
    inference_slots_.acquire();
    struct Release {
      std::counting_semaphore<64>& s;
      ~Release() { s.release(); }
    } release{inference_slots_};
    inference::FactorLimits limits;
    limits.max_entries = config_.max_factor_entries;
    return f(limits);
  }

  Config config_;
  Store store_;
  std::shared_ptr<collaboration::Notifier> notifier_;
  Clock clock_;
  std::counting_semaphore<64> inference_slots_;
  scenarios::EvaluationCache cache_;
  SessionTable sessions_;

  mutable std::shared_mutex registry_mu_;
  CommandLog admin_log_;
  std::map<std::string, User> users_;
  std::map<std::string, workflow::Problem> problems_;
  std::map<std::string, std::shared_ptr<Slot>> groups_;
};

}  // namespace delphinet::service
