#include <gtest/gtest.h>

#include <regex>

#include "support/service.hpp"

using namespace delphinet;
using namespace delphinet::fixture;

namespace {

/// One server shared by the tests in this file.
class ServiceTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new TempDir();
    clock_ = new ManualClock();
    notifier_ = std::make_shared<collaboration::LogNotifier>();
    platform_ = new service::Platform(test_config(dir_->str()), notifier_, clock_->clock());
    create_users(*platform_, 3);
    server_ = new LiveServer(*platform_);
    client_ = new Client(server_->port());
    login_all();
  }

  static void login_all() {
    for (const auto& id : {admin_id(), facilitator_id(), observer_id(), outsider_id(), analyst_id(1), analyst_id(2),
                           analyst_id(3)}) {
      tokens_[id] = client_->login(id);
    }
  }

  static void TearDownTestSuite() {
    delete client_;
    delete server_;
    delete platform_;
    delete clock_;
    delete dir_;
    tokens_.clear();
  }

  static Client::Reply call(const std::string& user, const std::string& method, const std::string& path,
                            const json& body = nullptr) {
    return client_->request(method, path, body, user.empty() ? "" : tokens_.at(user));
  }

  static std::string fresh_group(int analysts = 2, workflow::DelphiMode mode = workflow::DelphiMode::RealTime,
                                 bool strict = true) {
    auto id = "g" + std::to_string(++counter_);
    create_group(*platform_, id, analysts, mode, strict);
    return id;
  }

  static void put_share(const std::string& g, int analyst, int step, const json& content = nullptr) {
    auto c = content.is_null() ? groups::content(step) : content;
    ASSERT_EQ(call(analyst_id(analyst), "PUT", "/api/groups/" + g + "/steps/" + std::to_string(step) + "/work",
                   {{"content", c}})
                  .status,
              200);
    ASSERT_EQ(
        call(analyst_id(analyst), "POST", "/api/groups/" + g + "/steps/" + std::to_string(step) + "/share").status,
        200);
  }

  static inline TempDir* dir_ = nullptr;
  static inline ManualClock* clock_ = nullptr;
  static inline std::shared_ptr<collaboration::LogNotifier> notifier_;
  static inline service::Platform* platform_ = nullptr;
  static inline LiveServer* server_ = nullptr;
  static inline Client* client_ = nullptr;
  static inline std::map<std::string, std::string> tokens_;
  static inline int counter_ = 0;
};

}  // namespace

TEST_F(ServiceTest, HealthAndLogin) {
  EXPECT_EQ(client_->request("GET", "/api/health").status, 200);
  auto bad = client_->request("POST", "/api/login", json{{"user", analyst_id(1)}, {"password", "nope nope"}});
  EXPECT_EQ(bad.status, 401);
  EXPECT_EQ(bad.body.at("error"), "UNAUTHENTICATED");
  EXPECT_EQ(tokens_.at(analyst_id(1)).size(), 32u);  // 128 bits, hex
  EXPECT_EQ(client_->request("GET", "/api/problems").status, 401);
  EXPECT_EQ(client_->request("GET", "/api/problems", nullptr, std::string(32, '0')).status, 401);
}

TEST_F(ServiceTest, SessionsExpire) {
  Client c(server_->port());
  auto token = c.login(analyst_id(3));
  EXPECT_EQ(c.request("GET", "/api/problems", nullptr, token).status, 200);
  clock_->advance(3601);
  EXPECT_EQ(c.request("GET", "/api/problems", nullptr, token).status, 401);
  login_all();  // the shared clock moved for every session
}

TEST_F(ServiceTest, PeerWorkBeforeOwnShareIsForbidden) {
  auto g = fresh_group();
  put_share(g, 1, 1);
  auto r = call(analyst_id(2), "GET", "/api/groups/" + g + "/steps/1/work?owner=Analyst1");
  EXPECT_EQ(r.status, 403);
  EXPECT_EQ(r.body.at("error"), "DELPHI_GATE");
  put_share(g, 2, 1);
  r = call(analyst_id(2), "GET", "/api/groups/" + g + "/steps/1/work?owner=Analyst1");
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(r.body.at("owner"), "Analyst1");
}

TEST_F(ServiceTest, ImpossibleEvidenceIs422) {
  auto g = fresh_group(1, workflow::DelphiMode::RealTime, false);
  for (int s = 1; s < workflow::kStepNetwork; ++s) call(analyst_id(1), "POST", "/api/groups/" + g + "/advance");
  auto net = samples::drug_cheat();
  net = bn::set_cpt_row(std::move(net), "taking_m879", 0, {0.0, 1.0});
  ASSERT_EQ(call(analyst_id(1), "PUT", "/api/groups/" + g + "/steps/5/work",
                 {{"content", {{"network", bn::to_json(net)}}}})
                .status,
            200);
  auto created = call(analyst_id(1), "POST", "/api/groups/" + g + "/scenarios",
                      {{"scenario", {{"name", "M879"}, {"evidence", {{"Taking M879", "Yes"}}}}}});
  ASSERT_EQ(created.status, 201) << created.raw;
  auto id = created.body.at("id").get<std::string>();
  auto r = call(analyst_id(1), "POST", "/api/groups/" + g + "/scenarios/" + id + "/evaluate");
  EXPECT_EQ(r.status, 422);
  EXPECT_EQ(r.body.at("error"), "IMPOSSIBLE_EVIDENCE");
  auto base = call(analyst_id(1), "POST", "/api/groups/" + g + "/scenarios/base/evaluate");
  EXPECT_EQ(base.status, 200);
  EXPECT_NEAR(base.body.at("posteriors")[0].at("probabilities")[0].get<double>(), 0.0233, 1e-4);
}

TEST_F(ServiceTest, TwoFacilitatorsAre422) {
  platform_->create_problem(admin_id(), problem_json("prob-two"));
  auto members = roster(1);
  members.push_back({{"user", analyst_id(2)}, {"role", "Facilitator"}, {"pseudonym", "Boss"}});
  auto r = call(admin_id(), "POST", "/api/admin/groups", {{"id", "two"}, {"problem", "prob-two"}, {"members", members}});
  EXPECT_EQ(r.status, 422);
  EXPECT_EQ(r.body.at("error"), "FACILITATOR_SINGULARITY");
  auto g = fresh_group(1);
  r = call(admin_id(), "POST", "/api/admin/groups/" + g + "/members",
           {{"user", analyst_id(2)}, {"role", "Facilitator"}, {"pseudonym", "Boss"}});
  EXPECT_EQ(r.status, 422);
  EXPECT_EQ(r.body.at("error"), "FACILITATOR_SINGULARITY");
  r = call(admin_id(), "POST", "/api/admin/groups/" + g + "/facilitator", {{"user", analyst_id(3)}, {"pseudonym", "Chair"}});
  EXPECT_EQ(r.status, 200) << r.raw;
  EXPECT_EQ(call(analyst_id(3), "GET", "/api/groups/" + g).body.at("me").at("role"), "Facilitator");
}

TEST_F(ServiceTest, StaleVersionIs409) {
  auto g = fresh_group(1);
  auto path = "/api/groups/" + g + "/steps/1/work";
  EXPECT_EQ(call(analyst_id(1), "PUT", path, {{"content", groups::content(1)}}).status, 200);
  auto r = call(analyst_id(1), "PUT", path, {{"content", groups::content(1, 2)}, {"expectedVersion", 0}});
  EXPECT_EQ(r.status, 409);
  EXPECT_EQ(r.body.at("error"), "VERSION_CONFLICT");
}

TEST_F(ServiceTest, MalformedBodiesAre422) {
  auto g = fresh_group(1);
  auto r = client_->request("PUT", "/api/groups/" + g + "/steps/1/work", nullptr, tokens_.at(analyst_id(1)));
  EXPECT_EQ(r.status, 422);
  httplib::Client raw("127.0.0.1", server_->port());
  auto res = raw.Put("/api/groups/" + g + "/steps/1/work",
                     httplib::Headers{{"Authorization", "Bearer " + tokens_.at(analyst_id(1))}}, "{not json",
                     "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 422);
  EXPECT_EQ(call(analyst_id(1), "GET", "/api/groups/nope").status, 404);
}

// Every route, for every kind of caller, on a group where Analyst1 has shared
// step 1 and Analyst2 holds an unshared step-1 draft.
TEST_F(ServiceTest, AuthorizationMatrix) {
  const std::vector<std::string> who = {"A1", "A2", "F", "O", "X", "ANON"};
  auto user_of = [](const std::string& w) -> std::string {
    if (w == "A1") return analyst_id(1);
    if (w == "A2") return analyst_id(2);
    if (w == "F") return facilitator_id();
    if (w == "O") return observer_id();
    if (w == "X") return outsider_id();
    return "";
  };
  struct Row {
    std::string method, path;
    json body;
    std::vector<std::string> expect;  // per caller, "status" or "status REASON"
  };
  const json hyp = {{"content", groups::content(1, 5)}};
  const json adopt = {{"source", "Analyst1"}, {"selection", {{"all", true}}}};
  const json to_f = {{"recipients", {"Facilitator"}}, {"body", "hi"}};
  const json to_a1 = {{"recipients", {"Analyst1"}}, {"body", "hi"}};
  const std::string NM = "403 NOT_MEMBER", UA = "401", RE = "403 ROLE_ERROR";
  const std::vector<Row> rows = {
      {"GET", "", nullptr, {"200", "200", "200", "200", NM, UA}},
      {"GET", "/steps/1/work", nullptr, {"200", "200", "200", "200", NM, UA}},
      {"GET", "/steps/1/work?owner=Analyst1", nullptr, {"200", "403 DELPHI_GATE", "200", "200", NM, UA}},
      {"GET", "/steps/1/work?owner=Analyst2", nullptr, {"403 NOT_SHARED", "200", "403 NOT_SHARED", "403 NOT_SHARED", NM, UA}},
      {"PUT", "/steps/1/work", hyp, {"200", "200", RE, RE, NM, UA}},
      {"POST", "/steps/1/share", nullptr, {"200", "200", RE, RE, NM, UA}},
      {"POST", "/steps/1/adopt", adopt, {"422 INCOMPATIBLE_SELECTION", "403 DELPHI_GATE", "200", RE, NM, UA}},
      {"POST", "/steps/2/release", nullptr, {RE, RE, "200", RE, NM, UA}},
      {"GET", "/steps/1/group-solution", nullptr, {"403 NOT_PUBLISHED", "403 DELPHI_GATE", "200", "403 NOT_PUBLISHED", NM, UA}},
      {"PUT", "/steps/1/group-solution", hyp, {RE, RE, "200", RE, NM, UA}},
      {"POST", "/steps/1/group-solution/publish", nullptr, {RE, RE, "422 EMPTY_CONTENT", RE, NM, UA}},
      {"GET", "/steps/1/forum", nullptr, {"200", "403 DELPHI_GATE", "200", "200", NM, UA}},
      {"POST", "/steps/1/forum", json{{"body", "hello"}}, {"201", "403 DELPHI_GATE", "201", RE, NM, UA}},
      {"POST", "/advance", nullptr, {"200", "403 NOT_SHARED", RE, RE, NM, UA}},
      {"POST", "/navigate", json{{"step", 1}}, {"200", "200", RE, RE, NM, UA}},
      {"GET", "/scenarios", nullptr, {"200", "200", "200", "403 NOT_PUBLISHED", NM, UA}},
      {"POST", "/scenarios/base/evaluate", nullptr, {"200", "200", "200", "403 NOT_PUBLISHED", NM, UA}},
      {"GET", "/scenarios/base/explanation?level=detail", nullptr, {"200", "200", "200", "403 NOT_PUBLISHED", NM, UA}},
      {"POST", "/messages", to_f, {"201", "201", "422 INVALID_PAYLOAD", "201", NM, UA}},
      {"POST", "/messages", to_a1, {"422 INVALID_PAYLOAD", "403 ANALYST_TO_ANALYST", "201", RE, NM, UA}},
      {"GET", "/messages", nullptr, {"200", "200", "200", "200", NM, UA}},
      {"GET", "/reports", nullptr, {"200", "200", "200", "200", NM, UA}},
      {"GET", "/reports/Analyst1/rating", nullptr, {"200", "403 DELPHI_GATE", "403 NOT_SHARED", "403 NOT_SHARED", NM, UA}},
      {"POST", "/reports/Analyst1/rating", json{{"score", 5}}, {RE, "403 DELPHI_GATE", RE, RE, NM, UA}},
      {"POST", "/submit", json{{"method", "HighestRated"}}, {RE, RE, "422 NO_RATED_REPORTS", RE, NM, UA}},
      {"GET", "/submission", nullptr, {"404 UNKNOWN_REPORT", "404 UNKNOWN_REPORT", "404 UNKNOWN_REPORT", "404 UNKNOWN_REPORT", NM, UA}},
  };
  int cells = 0;
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < who.size(); ++i) {
      auto g = fresh_group(2, workflow::DelphiMode::RealTime, true);
      put_share(g, 1, 1);
      ASSERT_EQ(call(analyst_id(2), "PUT", "/api/groups/" + g + "/steps/1/work", {{"content", groups::content(1, 2)}})
                    .status,
                200);
      auto r = call(user_of(who[i]), row.method, "/api/groups/" + g + row.path, row.body);
      std::string got = std::to_string(r.status);
      if (r.status >= 400 && r.status != 401) got += " " + r.body.value("error", "?");
      EXPECT_EQ(got, row.expect[i]) << row.method << " " << row.path << " as " << who[i] << ": " << r.raw;
      ++cells;
    }
  }
  EXPECT_EQ(cells, static_cast<int>(rows.size() * who.size()));
}

TEST_F(ServiceTest, AdminRoutesNeedAnAdministrator) {
  for (const auto& id : {analyst_id(1), facilitator_id(), observer_id()}) {
    auto r = call(id, "GET", "/api/admin/config");
    EXPECT_EQ(r.status, 403);
    EXPECT_EQ(r.body.at("error"), "NOT_ADMIN");
    EXPECT_EQ(call(id, "POST", "/api/admin/users", {{"id", "sneaky"}, {"password", kPassword}}).status, 403);
    EXPECT_EQ(call(id, "POST", "/api/problems", problem_json("sneaky")).status, 403);
    EXPECT_EQ(call(id, "POST", "/api/admin/lms", json::object()).status, 403);
  }
  auto cfg = call(admin_id(), "GET", "/api/admin/config");
  ASSERT_EQ(cfg.status, 200);
  EXPECT_TRUE(cfg.body.contains("groups"));
  EXPECT_EQ(call(admin_id(), "POST", "/api/admin/lms", {{"course", "x"}, {"completed", true}}).status, 202);
  EXPECT_EQ(call(admin_id(), "POST", "/api/admin/users", {{"id", "newbie"}, {"password", "short"}}).status, 422);
  EXPECT_EQ(call(admin_id(), "POST", "/api/admin/users", {{"id", "newbie"}, {"password", kPassword}}).status, 201);
  EXPECT_EQ(client_->login("newbie").size(), 32u);
}

TEST_F(ServiceTest, MessagesFanOutPrivatelyAndNudge) {
  auto g = fresh_group(3);
  auto before = notifier_->events().size();
  auto r = call(facilitator_id(), "POST", "/api/groups/" + g + "/messages",
                {{"recipients", {"Analyst1", "Analyst2", "Analyst3"}}, {"body", "Please share step 1"}, {"nudge", true}});
  ASSERT_EQ(r.status, 201) << r.raw;
  EXPECT_EQ(notifier_->events().size(), before + 3);
  EXPECT_EQ(notifier_->events().back().recipient, analyst_id(3));
  auto inbox = call(analyst_id(2), "GET", "/api/groups/" + g + "/messages").body;
  ASSERT_EQ(inbox.size(), 1u);
  EXPECT_EQ(inbox[0].at("sender"), "Facilitator");
  EXPECT_EQ(inbox[0].at("recipient"), "Analyst2");
  EXPECT_EQ(inbox[0].dump().find("Analyst1"), std::string::npos);
  EXPECT_FALSE(inbox[0].contains("fanout"));
}

TEST_F(ServiceTest, RatingSummaryHiddenUntilOwnRating) {
  auto g = fresh_group(3, workflow::DelphiMode::RealTime, false);
  for (int i = 1; i <= 3; ++i) {
    for (int s = 1; s < workflow::kStepReport; ++s) call(analyst_id(i), "POST", "/api/groups/" + g + "/advance");
    put_share(g, i, workflow::kStepReport);
  }
  auto path = "/api/groups/" + g + "/reports/Analyst1/rating";
  EXPECT_EQ(call(analyst_id(2), "POST", path, {{"score", 7}}).body.at("average"), 7.0);
  auto hidden = call(analyst_id(3), "GET", path).body;
  EXPECT_TRUE(hidden.at("hidden").get<bool>());
  EXPECT_FALSE(hidden.contains("average"));
  auto mine = call(analyst_id(3), "POST", path, {{"score", 9}}).body;
  EXPECT_EQ(mine.at("average"), 8.0);
  EXPECT_EQ(mine.at("count"), 2);
  EXPECT_EQ(mine.at("own"), 9);
  for (const auto& [k, v] : mine.items()) {
    EXPECT_TRUE(k == "report" || k == "own" || k == "hidden" || k == "average" || k == "count") << k;
  }
  EXPECT_EQ(call(analyst_id(3), "POST", path, {{"score", 11}}).body.at("error"), "OUT_OF_RANGE");
  auto sub = call(facilitator_id(), "POST", "/api/groups/" + g + "/submit", {{"method", "HighestRated"}});
  ASSERT_EQ(sub.status, 200) << sub.raw;
  EXPECT_EQ(sub.body.at("report_id"), "Analyst1");
  EXPECT_EQ(call(facilitator_id(), "POST", "/api/groups/" + g + "/submit", {{"method", "HighestRated"}}).status, 409);
  auto files = call(observer_id(), "GET", "/api/groups/" + g + "/submission");
  ASSERT_EQ(files.status, 200);
  EXPECT_TRUE(files.body.contains("report.html"));
}

TEST_F(ServiceTest, AttachmentsAreStoredBlobs) {
  auto g = fresh_group(1);
  put_share(g, 1, 1);
  httplib::Client raw("127.0.0.1", server_->port());
  auto up = raw.Post("/api/blobs", httplib::Headers{{"Authorization", "Bearer " + tokens_.at(analyst_id(1))}},
                     std::string("\x89PNG fake", 9), "application/octet-stream");
  ASSERT_TRUE(up);
  ASSERT_EQ(up->status, 201);
  auto hash = json::parse(up->body).at("hash").get<std::string>();
  auto post = call(analyst_id(1), "POST", "/api/groups/" + g + "/steps/1/forum",
                   {{"body", "see diagram"}, {"attachments", {hash}}});
  EXPECT_EQ(post.status, 201);
  EXPECT_EQ(post.body.at("attachments")[0], hash);
  EXPECT_EQ(call(analyst_id(1), "POST", "/api/groups/" + g + "/steps/1/forum",
                 {{"body", "x"}, {"attachments", {std::string(64, 'f')}}})
                .status,
            422);
  auto down = raw.Get("/api/blobs/" + hash, httplib::Headers{{"Authorization", "Bearer " + tokens_.at(observer_id())}});
  ASSERT_TRUE(down);
  EXPECT_EQ(down->body, std::string("\x89PNG fake", 9));
}

// Random activity by every member, then every read endpoint as every
// analyst: no response may contain another member's user id.
TEST_F(ServiceTest, AnonymityFuzz) {
  std::mt19937_64 rng(17);
  const int analysts = 3;
  std::vector<std::string> all_ids = {facilitator_id(), observer_id()};
  for (int i = 1; i <= analysts; ++i) all_ids.push_back(analyst_id(i));
  int responses = 0;
  for (auto mode : {workflow::DelphiMode::RealTime, workflow::DelphiMode::Variant}) {
    auto g = fresh_group(analysts, mode, false);
    for (int s = 2; s <= workflow::kSteps && mode != workflow::DelphiMode::RealTime; ++s) {
      call(facilitator_id(), "POST", "/api/groups/" + g + "/steps/" + std::to_string(s) + "/release");
    }
    for (int i = 1; i <= analysts; ++i) {
      for (int s = 1; s <= workflow::kSteps; ++s) {
        if (rng() % 3) put_share(g, i, s);
        call(analyst_id(i), "POST", "/api/groups/" + g + "/advance");
      }
      call(analyst_id(i), "POST", "/api/groups/" + g + "/scenarios",
           {{"scenario", {{"name", "pos" + std::to_string(i)}, {"evidence", {{"Sample A Result", "positive"}}}}}});
      call(analyst_id(i), "POST", "/api/groups/" + g + "/scenarios?network=Analyst1",
           {{"scenario", {{"name", "mine" + std::to_string(i)}, {"evidence", {{"Taking M879", "Yes"}}}}}});
    }
    for (int k = 0; k < 150; ++k) {
      auto [actor, cmd] = platform_->inspect(g, [&](const workflow::Group& grp) {
        return random_member_command(rng, grp, analysts, workflow::kSteps);
      });
      try {
        platform_->command(actor, g, cmd);
      } catch (const Error&) {
      }
    }
    for (int i = 1; i <= analysts; ++i) {
      const auto me = analyst_id(i);
      std::vector<std::string> paths = {"", "/messages", "/reports", "/scenarios"};
      for (int s = 1; s <= workflow::kSteps; ++s) {
        auto step = "/steps/" + std::to_string(s);
        paths.push_back(step + "/work");
        paths.push_back(step + "/forum");
        paths.push_back(step + "/group-solution");
        for (int o = 1; o <= analysts; ++o) paths.push_back(step + "/work?owner=Analyst" + std::to_string(o));
      }
      for (int o = 1; o <= analysts; ++o) {
        paths.push_back("/reports/Analyst" + std::to_string(o) + "/rating");
        paths.push_back("/scenarios?network=Analyst" + std::to_string(o));
        for (const auto* sid : {"base", "s1", "s2", "s3", "s4", "s5", "s6", "s7", "s8"}) {
          paths.push_back(std::string("/scenarios/") + sid + "/explanation?level=detail&network=Analyst" +
                          std::to_string(o));
        }
      }
      for (const auto& p : paths) {
        auto r = call(me, "GET", "/api/groups/" + g + p);
        ++responses;
        for (const auto& id : all_ids) {
          if (id == me) continue;
          EXPECT_EQ(r.raw.find(id), std::string::npos) << p << " leaks " << id << " to " << me;
        }
      }
    }
  }
  EXPECT_GT(responses, 300);
}
