#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "delphinet/error.hpp"
#include "delphinet/scenarios.hpp"

namespace delphinet::workflow {

inline constexpr int kSteps = 6;
inline constexpr int kStepNetwork = 5;
inline constexpr int kStepReport = 6;
/// The facilitator may still submit this long after a problem closes.
inline constexpr std::int64_t kSubmissionGraceSeconds = 24 * 3600;
/// Owner id used for the facilitator-maintained group solution.
inline constexpr const char* kGroupOwner = "group";

enum class Role { Analyst, Facilitator, Observer };
enum class DelphiMode { RealTime, Classic, Variant };
enum class WorkStatus { Private, Shared };
enum class SelectionMethod { FacilitatorChoice, HighestRated };

NLOHMANN_JSON_SERIALIZE_ENUM(Role, {{Role::Analyst, "Analyst"},
                                    {Role::Facilitator, "Facilitator"},
                                    {Role::Observer, "Observer"}})
NLOHMANN_JSON_SERIALIZE_ENUM(DelphiMode, {{DelphiMode::RealTime, "RealTime"},
                                          {DelphiMode::Classic, "Classic"},
                                          {DelphiMode::Variant, "Variant"}})
NLOHMANN_JSON_SERIALIZE_ENUM(WorkStatus, {{WorkStatus::Private, "Private"}, {WorkStatus::Shared, "Shared"}})
NLOHMANN_JSON_SERIALIZE_ENUM(SelectionMethod, {{SelectionMethod::FacilitatorChoice, "FacilitatorChoice"},
                                               {SelectionMethod::HighestRated, "HighestRated"}})

/// Machine-readable reasons carried by GateClosed errors (Error::detail()[0]).
namespace reason {
inline constexpr const char* kDelphiGate = "DELPHI_GATE";
inline constexpr const char* kClassicMode = "CLASSIC_MODE";
inline constexpr const char* kNotShared = "NOT_SHARED";
inline constexpr const char* kNotReleased = "NOT_RELEASED";
inline constexpr const char* kNotReached = "NOT_REACHED";
inline constexpr const char* kNotPublished = "NOT_PUBLISHED";
inline constexpr const char* kForumsDisabled = "FORUMS_DISABLED";
inline constexpr const char* kLastStep = "LAST_STEP";
}  // namespace reason

[[noreturn]] inline void gate_closed(const char* why, const std::string& message) {
  throw Error(ErrorCode::GateClosed, message, {why});
}

struct Problem {
  std::string id;
  std::string title;
  std::string statement;
  std::vector<std::string> questions;
  std::optional<std::int64_t> starts_at;
  std::optional<std::int64_t> ends_at;
  DelphiMode mode = DelphiMode::RealTime;
  /// RealTime only: advancing past a step requires sharing it first.
  bool strict_advance = true;
};

inline void check_problem(const Problem& p) {
  if (p.statement.empty()) throw Error(ErrorCode::InvalidPayload, "problem statement must not be empty");
  if (p.starts_at && p.ends_at && *p.starts_at > *p.ends_at) {
    throw Error(ErrorCode::InvalidPayload, "problem must start before it ends");
  }
}

struct Membership {
  std::string user;
  Role role = Role::Analyst;
  std::string pseudonym;
};

/// Immutable step content. Copies share one JSON value, which keeps copying
/// a whole group (done for every command) cheap.
class Payload {
 public:
  Payload() : value_(empty()) {}
  Payload(nlohmann::json value) : value_(std::make_shared<const nlohmann::json>(std::move(value))) {}

  const nlohmann::json& get() const { return *value_; }
  operator const nlohmann::json&() const { return *value_; }
  const nlohmann::json& operator*() const { return *value_; }
  const nlohmann::json* operator->() const { return value_.get(); }

  friend bool operator==(const Payload& a, const Payload& b) {
    return a.value_ == b.value_ || *a.value_ == *b.value_;
  }

 private:
  static const std::shared_ptr<const nlohmann::json>& empty() {
    static const auto value = std::make_shared<const nlohmann::json>();
    return value;
  }

  std::shared_ptr<const nlohmann::json> value_;
};

inline void to_json(nlohmann::json& j, const Payload& p) { j = p.get(); }
inline void from_json(const nlohmann::json& j, Payload& p) { p = Payload(j); }

struct SharedVersion {
  int version = 0;
  Payload content;
  std::int64_t at = 0;
  std::uint64_t seq = 0;
};

/// One analyst's artifact for one step. `content` is the working copy;
/// every share freezes it into `shared`, which is append-only.
struct WorkItem {
  std::string owner;
  int step = 1;
  Payload content;
  int version = 0;
  WorkStatus status = WorkStatus::Private;
  std::vector<SharedVersion> shared;
  std::vector<std::string> provenance;

  bool is_shared() const { return !shared.empty(); }
};

struct SolutionStep {
  Payload content;
  int version = 0;
  std::vector<SharedVersion> published;
  std::vector<std::string> provenance;

  bool is_published() const { return !published.empty(); }
};

struct Navigation {
  int current = 1;
  int max_reached = 1;
};

struct PrivateScenario {
  scenarios::Scenario scenario;
  bool invalidated = false;
};

struct FinalSubmission {
  std::string report_id;
  SelectionMethod method = SelectionMethod::FacilitatorChoice;
  std::int64_t at = 0;
  std::string document_hash;
  std::map<std::string, std::string> file_hashes;
};

/// Files produced by a final submission, keyed by file name.
struct ExportBundle {
  std::map<std::string, std::string> files;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(Membership, user, role, pseudonym)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SharedVersion, version, content, at, seq)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(WorkItem, owner, step, content, version, status, shared, provenance)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SolutionStep, content, version, published, provenance)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(Navigation, current, max_reached)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(FinalSubmission, report_id, method, at, document_hash, file_hashes)

inline void to_json(nlohmann::json& j, const Problem& p) {
  j = {{"id", p.id},
       {"title", p.title},
       {"statement", p.statement},
       {"questions", p.questions},
       {"startsAt", p.starts_at ? nlohmann::json(*p.starts_at) : nlohmann::json(nullptr)},
       {"endsAt", p.ends_at ? nlohmann::json(*p.ends_at) : nlohmann::json(nullptr)},
       {"delphiMode", p.mode},
       {"strictAdvance", p.strict_advance}};
}

inline void from_json(const nlohmann::json& j, Problem& p) {
  p.id = j.value("id", "");
  p.title = j.value("title", "");
  p.statement = j.value("statement", "");
  p.questions = j.value("questions", std::vector<std::string>{});
  p.starts_at.reset();
  p.ends_at.reset();
  if (j.contains("startsAt") && !j.at("startsAt").is_null()) p.starts_at = j.at("startsAt").get<std::int64_t>();
  if (j.contains("endsAt") && !j.at("endsAt").is_null()) p.ends_at = j.at("endsAt").get<std::int64_t>();
  p.mode = j.value("delphiMode", DelphiMode::RealTime);
  p.strict_advance = j.value("strictAdvance", true);
}

inline void to_json(nlohmann::json& j, const PrivateScenario& p) {
  j = {{"scenario", scenarios::to_json(p.scenario)}, {"invalidated", p.invalidated}};
}

inline void from_json(const nlohmann::json& j, PrivateScenario& p) {
  p.scenario = scenarios::scenario_from_json(j.at("scenario"));
  p.invalidated = j.at("invalidated").get<bool>();
}

}  // namespace delphinet::workflow
