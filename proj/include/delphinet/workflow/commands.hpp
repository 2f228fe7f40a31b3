#pragma once

#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "delphinet/workflow/group.hpp"

// Group commands as JSON records. The same records are executed live and
// replayed from the command log, so everything a command depends on (actor,
// time, generated ids) is inside the record.
//
//   {"type": "put_work", "actor", "at", "step", "content", "expectedVersion"?}
//   {"type": "share_work", "actor", "at", "step"}
//   {"type": "put_group_solution", "actor", "at", "step", "content", "expectedVersion"?}
//   {"type": "publish_group_solution", "actor", "at", "step"}
//   {"type": "adopt", "actor", "at", "source", "step", "selection"}
//   {"type": "advance", "actor", "at"}
//   {"type": "navigate", "actor", "at", "step"}
//   {"type": "release_step", "actor", "at", "step"}
//   {"type": "post", "actor", "at", "step", "thread", "body", "attachments"}
//   {"type": "message", "actor", "at", "recipients", "body", "nudge"}
//   {"type": "rate", "actor", "at", "report", "score"}
//   {"type": "add_scenario", "actor", "at", "networkOwner", "scenario"}
//   {"type": "delete_scenario", "actor", "at", "networkOwner", "scenarioId"}
//   {"type": "submit", "actor", "at", "method", "report"}
//   {"type": "add_member", "at", "member"}
//   {"type": "replace_facilitator", "at", "user", "pseudonym"}
//   {"type": "set_facilitator_absent", "at", "absent"}

namespace delphinet::workflow {

namespace detail {

inline std::optional<int> optional_int(const json& cmd, const char* key) {
  if (!cmd.contains(key) || cmd.at(key).is_null()) return std::nullopt;
  return cmd.at(key).get<int>();
}

inline json navigation_json(const Navigation& n) { return {{"current", n.current}, {"maxReached", n.max_reached}}; }

inline json dispatch(Group& g, const json& cmd) {
  const auto type = cmd.at("type").get<std::string>();
  const auto at = cmd.at("at").get<std::int64_t>();
  auto actor = [&] { return cmd.at("actor").get<std::string>(); };
  auto step = [&] { return cmd.at("step").get<int>(); };
  if (type == "put_work") {
    return {{"version", g.put_work(actor(), step(), cmd.at("content"), optional_int(cmd, "expectedVersion"), at)}};
  }
  if (type == "share_work") return {{"version", g.share_work(actor(), step(), at)}};
  if (type == "put_group_solution") {
    return {{"version", g.put_group_solution(actor(), step(), cmd.at("content"),
                                             optional_int(cmd, "expectedVersion"), at)}};
  }
  if (type == "publish_group_solution") return {{"version", g.publish_group_solution(actor(), step(), at)}};
  if (type == "adopt") {
    return {{"version", g.adopt(actor(), cmd.at("source").get<std::string>(), step(),
                                selection_from_json(cmd.at("selection")), at)}};
  }
  if (type == "advance") return navigation_json(g.advance(actor()));
  if (type == "navigate") return navigation_json(g.go_to_step(actor(), step()));
  if (type == "release_step") {
    g.release_step(actor(), step(), at);
    return {{"released", step()}};
  }
  if (type == "post") {
    return g.post_to_forum(actor(), step(), cmd.value("thread", ""), cmd.value("body", ""),
                           cmd.value("attachments", std::vector<std::string>{}), at);
  }
  if (type == "message") {
    return g.send_message(actor(), cmd.at("recipients").get<std::vector<std::string>>(),
                          cmd.value("body", ""), cmd.value("nudge", false), at);
  }
  if (type == "rate") {
    g.rate_report(actor(), cmd.at("report").get<std::string>(), cmd.at("score").get<int>(), at);
    return {{"score", cmd.at("score")}};
  }
  if (type == "add_scenario") {
    return {{"id", g.add_scenario(actor(), cmd.at("networkOwner").get<std::string>(),
                                  scenarios::scenario_from_json(cmd.at("scenario")), at)}};
  }
  if (type == "delete_scenario") {
    g.delete_scenario(actor(), cmd.at("networkOwner").get<std::string>(), cmd.at("scenarioId").get<std::string>(),
                      at);
    return {{"deleted", cmd.at("scenarioId")}};
  }
  if (type == "submit") {
    return g.submit(actor(), cmd.at("method").get<SelectionMethod>(), cmd.value("report", ""), at);
  }
  if (type == "add_member") {
    g.add_member(cmd.at("member").get<Membership>());
    return {{"added", cmd.at("member").at("user")}};
  }
  if (type == "replace_facilitator") {
    g.replace_facilitator(cmd.at("user").get<std::string>(), cmd.value("pseudonym", ""));
    return {{"facilitator", cmd.at("user")}};
  }
  if (type == "set_facilitator_absent") {
    g.set_facilitator_absent(cmd.at("absent").get<bool>());
    return {{"absent", cmd.at("absent")}};
  }
  throw Error(ErrorCode::InvalidPayload, "unknown command '" + type + "'");
}

}  // namespace detail

/// Runs one command. On any error the group is left exactly as it was.
inline json apply_command(Group& g, const json& cmd) {
  Group next = g;
  json result;
  try {
    result = detail::dispatch(next, cmd);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidPayload, std::string("malformed command: ") + e.what());
  }
  g = std::move(next);
  return result;
}

}  // namespace delphinet::workflow
