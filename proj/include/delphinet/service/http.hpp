#pragma once

#include <cctype>
#include <functional>
#include <string>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "delphinet/service/platform.hpp"

// Routes (all JSON; authenticated with "Authorization: Bearer <token>"
// except login and health). Members are named by pseudonym throughout.
//
//   POST /api/login                                      {"user", "password"}
//   POST /api/logout
//   GET  /api/health
//   GET|POST /api/problems
//   GET  /api/groups
//   POST /api/groups                                     admin
//   POST /api/groups/{g}/members                         admin
//   GET  /api/groups/{g}
//   GET|PUT /api/groups/{g}/steps/{s}/work               ?owner=Pseudonym
//   POST /api/groups/{g}/steps/{s}/share
//   POST /api/groups/{g}/steps/{s}/adopt                 {"source", "selection"}
//   POST /api/groups/{g}/steps/{s}/release               facilitator
//   GET|PUT /api/groups/{g}/steps/{s}/group-solution
//   POST /api/groups/{g}/steps/{s}/group-solution/publish
//   GET|POST /api/groups/{g}/steps/{s}/forum
//   POST /api/groups/{g}/advance
//   POST /api/groups/{g}/navigate                        {"step"}
//   GET|POST /api/groups/{g}/scenarios                   ?network=Pseudonym|group
//   DELETE /api/groups/{g}/scenarios/{id}
//   POST /api/groups/{g}/scenarios/{id}/evaluate
//   GET  /api/groups/{g}/scenarios/{id}/explanation      ?level=summary|detail
//   GET|POST /api/groups/{g}/messages
//   GET  /api/groups/{g}/reports
//   GET|POST /api/groups/{g}/reports/{r}/rating
//   POST /api/groups/{g}/submit                          {"method", "report"}
//   GET  /api/groups/{g}/submission
//   POST /api/evaluate                                   {"network", "evidence", "targets"}
//   POST /api/blobs, GET /api/blobs/{hash}
//   GET  /api/admin/config
//   POST /api/admin/users | problems | groups
//   POST /api/admin/groups/{g}/members | facilitator | facilitator-absent
//   POST /api/admin/lms                                  accepted, ignored
//
// Errors: {"error": REASON, "message"} with 401 unauthenticated, 403 gate
// and role refusals, 404 unknown resources, 409 version conflicts and
// repeated submission, 422 validation failures.

namespace delphinet::service {

struct HttpError {
  int status = 500;
  std::string reason;
};

/// "ImpossibleEvidence" -> "IMPOSSIBLE_EVIDENCE".
inline std::string screaming_snake(std::string_view name) {
  std::string out;
  for (std::size_t i = 0; i < name.size(); ++i) {
    char c = name[i];
    if (std::isupper(static_cast<unsigned char>(c)) && i > 0) out += '_';
    out += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  return out;
}

inline HttpError classify(const Error& e) {
  const auto code = e.code();
  std::string reason = screaming_snake(to_string(code));
  if ((code == ErrorCode::GateClosed || code == ErrorCode::RoleError) && !e.detail().empty()) {
    reason = e.detail().front();
  }
  switch (code) {
    case ErrorCode::Unauthenticated: return {401, reason};
    case ErrorCode::GateClosed:
    case ErrorCode::RoleError:
    case ErrorCode::AnalystToAnalyst:
    case ErrorCode::Frozen: return {403, reason};
    case ErrorCode::UnknownGroup:
    case ErrorCode::UnknownProblem:
    case ErrorCode::UnknownScenario:
    case ErrorCode::UnknownReport: return {404, reason};
    case ErrorCode::VersionConflict:
    case ErrorCode::AlreadySubmitted: return {409, reason};
    case ErrorCode::Io:
    case ErrorCode::CorruptLog: return {500, reason};
    default: return {422, reason};
  }
}

class HttpServer {
 public:
  explicit HttpServer(Platform& platform) : platform_(platform) { routes(); }

  httplib::Server& server() { return server_; }

  /// Binds to `port` (0 picks a free one) and returns the bound port.
  int bind(const std::string& host, int port) {
    int bound = port == 0 ? server_.bind_to_any_port(host) : (server_.bind_to_port(host, port) ? port : -1);
    if (bound < 0) throw Error(ErrorCode::Io, "cannot listen on " + host + ":" + std::to_string(port));
    return bound;
  }

  void listen() { server_.listen_after_bind(); }
  void stop() { server_.stop(); }
  bool running() const { return server_.is_running(); }

 private:
  using Request = httplib::Request;
  using Response = httplib::Response;
  using Handler = std::function<json(const std::string& user, const Request&, Response&)>;

  static void send(Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  static json body_of(const Request& req) {
    if (req.body.empty()) return json::object();
    try {
      auto j = json::parse(req.body);
      if (!j.is_object()) throw Error(ErrorCode::InvalidPayload, "request body must be a JSON object");
      return j;
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::InvalidPayload, std::string("request body is not JSON: ") + e.what());
    }
  }

  static int step_of(const Request& req) {
    try {
      return std::stoi(req.matches[2].str());
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidPayload, "bad step");
    }
  }

  static std::optional<std::string> param(const Request& req, const char* key) {
    if (!req.has_param(key)) return std::nullopt;
    return req.get_param_value(key);
  }

  std::string user_of(const Request& req) {
    auto auth = req.get_header_value("Authorization");
    const std::string prefix = "Bearer ";
    if (auth.rfind(prefix, 0) != 0) throw Error(ErrorCode::Unauthenticated, "missing bearer token");
    return platform_.authenticate(auth.substr(prefix.size()));
  }

  /// Wraps a handler with authentication and error mapping.
  httplib::Server::Handler guarded(Handler h, int ok_status = 200) {
    return [this, h = std::move(h), ok_status](const Request& req, Response& res) {
      try {
        auto user = user_of(req);
        auto body = h(user, req, res);
        if (res.status == -1 || res.body.empty()) send(res, ok_status, body);
      } catch (const Error& e) {
        auto he = classify(e);
        send(res, he.status, {{"error", he.reason}, {"message", e.what()}});
      } catch (const json::exception& e) {
        send(res, 422, {{"error", "INVALID_PAYLOAD"}, {"message", e.what()}});
      } catch (const std::exception& e) {
        send(res, 500, {{"error", "INTERNAL"}, {"message", e.what()}});
      }
    };
  }

  /// Member command built from the route and body.
  Handler command(std::function<json(const Request&, json body)> build) {
    return [this, build = std::move(build)](const std::string& user, const Request& req, Response&) {
      return platform_.command(user, req.matches[1].str(), build(req, body_of(req)));
    };
  }

  static json typed(const char* type, json body = json::object()) {
    body["type"] = type;
    return body;
  }

  void routes() {
    static const std::string G = R"(/api/groups/([A-Za-z0-9_\-]+))";
    static const std::string S = G + R"(/steps/(\d+))";

    server_.Get("/api/health", [](const Request&, Response& res) { send(res, 200, {{"status", "ok"}}); });
    server_.Post("/api/login", [this](const Request& req, Response& res) {
      try {
        auto body = body_of(req);
        auto login = platform_.login(body.value("user", ""), body.value("password", ""));
        send(res, 200, {{"token", login.token}, {"expiresAt", login.expires}});
      } catch (const Error& e) {
        auto he = classify(e);
        send(res, he.status, {{"error", he.reason}, {"message", e.what()}});
      }
    });
    server_.Post("/api/logout", guarded([this](const std::string&, const Request& req, Response&) {
      platform_.logout(req.get_header_value("Authorization").substr(7));
      return json{{"loggedOut", true}};
    }));

    // problems and groups
    server_.Get("/api/problems",
                guarded([this](const std::string& u, const Request&, Response&) { return platform_.problems(u); }));
    auto create_problem = [this](const std::string& u, const Request& req, Response&) {
      return platform_.create_problem(u, body_of(req));
    };
    server_.Post("/api/problems", guarded(create_problem, 201));
    server_.Post("/api/admin/problems", guarded(create_problem, 201));
    server_.Get("/api/groups", guarded([this](const std::string& u, const Request&, Response&) {
      json out = json::array();
      for (const auto& id : platform_.group_ids()) {
        try {
          out.push_back(platform_.overview(u, id));
        } catch (const Error&) {
        }
      }
      return out;
    }));
    auto create_group = [this](const std::string& u, const Request& req, Response&) {
      return platform_.create_group(u, body_of(req));
    };
    server_.Post("/api/groups", guarded(create_group, 201));
    server_.Post("/api/admin/groups", guarded(create_group, 201));
    auto add_member = [this](const std::string& u, const Request& req, Response&) {
      return platform_.admin_command(u, req.matches[1].str(), typed("add_member", {{"member", body_of(req)}}));
    };
    server_.Post(G + "/members", guarded(add_member, 201));
    server_.Post("/api/admin" + G.substr(4) + "/members", guarded(add_member, 201));
    server_.Post("/api/admin" + G.substr(4) + "/facilitator",
                 guarded([this](const std::string& u, const Request& req, Response&) {
                   return platform_.admin_command(u, req.matches[1].str(), typed("replace_facilitator", body_of(req)));
                 }));
    server_.Post("/api/admin" + G.substr(4) + "/facilitator-absent",
                 guarded([this](const std::string& u, const Request& req, Response&) {
                   auto body = body_of(req);
                   return platform_.admin_command(u, req.matches[1].str(),
                                                  typed("set_facilitator_absent", {{"absent", body.value("absent", true)}}));
                 }));
    server_.Get(G, guarded([this](const std::string& u, const Request& req, Response&) {
      return platform_.overview(u, req.matches[1].str());
    }));

    // work
    server_.Get(S + "/work", guarded([this](const std::string& u, const Request& req, Response&) {
      return platform_.work(u, req.matches[1].str(), step_of(req), param(req, "owner"));
    }));
    server_.Put(S + "/work", guarded(command([](const Request& req, json body) {
      json cmd = typed("put_work", {{"step", step_of(req)}, {"content", body.value("content", json())}});
      if (body.contains("expectedVersion")) cmd["expectedVersion"] = body.at("expectedVersion");
      return cmd;
    })));
    server_.Post(S + "/share", guarded(command([](const Request& req, json) {
      return typed("share_work", {{"step", step_of(req)}});
    })));
    server_.Post(S + "/adopt", guarded(command([](const Request& req, json body) {
      return typed("adopt", {{"step", step_of(req)},
                             {"source", body.value("source", "")},
                             {"selection", body.value("selection", json{{"all", true}})}});
    })));
    server_.Post(S + "/release", guarded(command([](const Request& req, json) {
      return typed("release_step", {{"step", step_of(req)}});
    })));
    server_.Get(S + "/group-solution", guarded([this](const std::string& u, const Request& req, Response&) {
      return platform_.group_solution(u, req.matches[1].str(), step_of(req));
    }));
    server_.Put(S + "/group-solution", guarded(command([](const Request& req, json body) {
      json cmd = typed("put_group_solution", {{"step", step_of(req)}, {"content", body.value("content", json())}});
      if (body.contains("expectedVersion")) cmd["expectedVersion"] = body.at("expectedVersion");
      return cmd;
    })));
    server_.Post(S + "/group-solution/publish", guarded(command([](const Request& req, json) {
      return typed("publish_group_solution", {{"step", step_of(req)}});
    })));
    server_.Get(S + "/forum", guarded([this](const std::string& u, const Request& req, Response&) {
      return platform_.forum(u, req.matches[1].str(), step_of(req));
    }));
    server_.Post(S + "/forum", guarded(command([](const Request& req, json body) {
                   return typed("post", {{"step", step_of(req)},
                                         {"thread", body.value("thread", "")},
                                         {"body", body.value("body", "")},
                                         {"attachments", body.value("attachments", json::array())}});
                 }),
                 201));

    // navigation
    server_.Post(G + "/advance", guarded(command([](const Request&, json) { return typed("advance"); })));
    server_.Post(G + "/navigate", guarded(command([](const Request&, json body) {
      return typed("navigate", {{"step", body.value("step", 0)}});
    })));

    // scenarios
    server_.Get(G + "/scenarios", guarded([this](const std::string& u, const Request& req, Response&) {
      return platform_.scenario_list(u, req.matches[1].str(), param(req, "network"));
    }));
    server_.Post(G + "/scenarios", guarded(
                                       [this](const std::string& u, const Request& req, Response&) {
                                         auto body = body_of(req);
                                         auto network = body.contains("network")
                                                            ? std::optional(body.at("network").get<std::string>())
                                                            : param(req, "network");
                                         return scenario_command(u, req.matches[1].str(), network, "add_scenario",
                                                                 {{"scenario", body.value("scenario", body)}});
                                       },
                                       201));
    server_.Delete(G + R"(/scenarios/([A-Za-z0-9_\-]+))",
                   guarded([this](const std::string& u, const Request& req, Response&) {
                     return scenario_command(u, req.matches[1].str(), param(req, "network"), "delete_scenario",
                                             {{"scenarioId", req.matches[2].str()}});
                   }));
    server_.Post(G + R"(/scenarios/([A-Za-z0-9_\-]+)/evaluate)",
                 guarded([this](const std::string& u, const Request& req, Response&) {
                   auto body = body_of(req);
                   auto network = body.contains("network") ? std::optional(body.at("network").get<std::string>())
                                                           : param(req, "network");
                   return platform_.evaluate(u, req.matches[1].str(), req.matches[2].str(), network);
                 }));
    server_.Get(G + R"(/scenarios/([A-Za-z0-9_\-]+)/explanation)",
                guarded([this](const std::string& u, const Request& req, Response&) {
                  return platform_.explain(u, req.matches[1].str(), req.matches[2].str(), param(req, "network"),
                                           param(req, "level").value_or("summary"));
                }));
    server_.Post("/api/evaluate", guarded([this](const std::string&, const Request& req, Response&) {
      if (!platform_.config().features.at("soloEvaluate")) {
        throw Error(ErrorCode::RoleError, "solo evaluation is disabled", {"FEATURE_DISABLED"});
      }
      return platform_.evaluate_network(body_of(req));
    }));

    // messages, reports, ratings, submission
    server_.Get(G + "/messages", guarded([this](const std::string& u, const Request& req, Response&) {
      return platform_.inbox(u, req.matches[1].str());
    }));
    server_.Post(G + "/messages", guarded(command([](const Request&, json body) {
                   return typed("message", {{"recipients", body.value("recipients", json::array())},
                                            {"body", body.value("body", "")},
                                            {"nudge", body.value("nudge", false)}});
                 }),
                 201));
    server_.Get(G + "/reports", guarded([this](const std::string& u, const Request& req, Response&) {
      return platform_.reports(u, req.matches[1].str());
    }));
    server_.Get(G + R"(/reports/([A-Za-z0-9_\-]+)/rating)",
                guarded([this](const std::string& u, const Request& req, Response&) {
                  return platform_.rating(u, req.matches[1].str(), req.matches[2].str());
                }));
    server_.Post(G + R"(/reports/([A-Za-z0-9_\-]+)/rating)",
                 guarded([this](const std::string& u, const Request& req, Response&) {
                   auto body = body_of(req);
                   platform_.command(u, req.matches[1].str(),
                                     typed("rate", {{"report", req.matches[2].str()}, {"score", body.at("score")}}));
                   return platform_.rating(u, req.matches[1].str(), req.matches[2].str());
                 }));
    server_.Post(G + "/submit", guarded(command([](const Request&, json body) {
      json cmd = typed("submit", {{"method", body.value("method", "HighestRated")}});
      if (body.contains("report")) cmd["report"] = body.at("report");
      return cmd;
    })));
    server_.Get(G + "/submission", guarded([this](const std::string& u, const Request& req, Response&) {
      return platform_.submission_files(u, req.matches[1].str());
    }));

    // blobs
    server_.Post("/api/blobs", guarded(
                                   [this](const std::string& u, const Request& req, Response&) {
                                     return json{{"hash", platform_.put_blob(u, req.body)}};
                                   },
                                   201));
    server_.Get(R"(/api/blobs/([0-9a-f]{64}))", guarded([this](const std::string&, const Request& req, Response& res) {
      auto blob = platform_.get_blob(req.matches[1].str());
      if (!blob) throw Error(ErrorCode::UnknownReport, "no such blob");
      res.status = 200;
      res.set_content(*blob, "application/octet-stream");
      return json();
    }));

    // administration
    server_.Get("/api/admin/config", guarded([this](const std::string& u, const Request&, Response&) {
      return platform_.admin_config(u);
    }));
    server_.Post("/api/admin/users", guarded(
                                         [this](const std::string& u, const Request& req, Response&) {
                                           auto body = body_of(req);
                                           auto id = body.value("id", "");
                                           platform_.create_user(u, id, body.value("password", ""),
                                                                 body.value("admin", false));
                                           return json{{"id", id}};
                                         },
                                         201));
    server_.Post("/api/admin/lms", guarded(
                                       [this](const std::string& u, const Request& req, Response&) {
                                         platform_.lms_webhook(u, body_of(req));
                                         return json{{"accepted", true}};
                                       },
                                       202));
  }

  json scenario_command(const std::string& user, const std::string& group, const std::optional<std::string>& network,
                        const char* type, json fields) {
    auto owner = platform_.read(user, group, [&](const Group& g) {
      auto id = platform_.network_owner(g, user, network);
      return id == workflow::kGroupOwner ? id : g.display(id);
    });
    fields["networkOwner"] = owner;
    return platform_.command(user, group, typed(type, std::move(fields)));
  }

  Platform& platform_;
  httplib::Server server_;
};

}  // namespace delphinet::service
