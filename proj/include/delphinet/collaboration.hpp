#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "delphinet/error.hpp"

namespace delphinet::collaboration {

/// Step forums are flat threads; replies use the @pseudonym convention.
struct ForumPost {
  std::uint64_t id = 0;
  int step = 1;
  std::string thread;
  std::string author;  // user id, shown to analysts only as a pseudonym
  std::string body;
  std::vector<std::string> mentions;     // pseudonyms referenced with @
  std::vector<std::string> attachments;  // blob hashes
  std::int64_t at = 0;

  friend bool operator==(const ForumPost&, const ForumPost&) = default;
};

/// One recipient's copy. A facilitator fan-out creates one copy per
/// recipient sharing `fanout`; recipients never learn about the others.
struct DirectMessage {
  std::uint64_t id = 0;
  std::uint64_t fanout = 0;
  std::string sender;
  std::string recipient;
  std::string body;
  bool nudge = false;
  std::int64_t at = 0;

  friend bool operator==(const DirectMessage&, const DirectMessage&) = default;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ForumPost, id, step, thread, author, body, mentions, attachments, at)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(DirectMessage, id, fanout, sender, recipient, body, nudge, at)

/// Pseudonyms referenced as @Name in a post body. A pseudonym may contain
/// letters, digits, '_' and '-'.
inline std::vector<std::string> mentions_in(const std::string& body) {
  static const std::regex pattern(R"(@([A-Za-z0-9_\-]+))");
  std::vector<std::string> out;
  for (auto it = std::sregex_iterator(body.begin(), body.end(), pattern); it != std::sregex_iterator(); ++it) {
    out.push_back((*it)[1].str());
  }
  return out;
}

inline constexpr int kMinScore = 1;
inline constexpr int kMaxScore = 10;

inline void check_score(int score) {
  if (score < kMinScore || score > kMaxScore) {
    throw Error(ErrorCode::OutOfRange, "rating must be an integer from 1 to 10");
  }
}

struct RatingSummary {
  double average = 0.0;  // rounded to one decimal
  int count = 0;
};

/// Mean of the active ratings for one report (rater -> score).
inline std::optional<RatingSummary> summarize_ratings(const std::map<std::string, int>& ratings) {
  if (ratings.empty()) return std::nullopt;
  long sum = 0;
  for (const auto& [rater, score] : ratings) sum += score;
  double mean = static_cast<double>(sum) / static_cast<double>(ratings.size());
  return RatingSummary{std::round(mean * 10.0) / 10.0, static_cast<int>(ratings.size())};
}

/// Receives events that should reach people outside the app (e-mail nudges).
class Notifier {
 public:
  virtual ~Notifier() = default;
  virtual void notify(const std::string& recipient, const std::string& subject, const std::string& body) = 0;
};

/// Collects notifications in memory; the default sink and the test double.
class LogNotifier : public Notifier {
 public:
  struct Event {
    std::string recipient;
    std::string subject;
    std::string body;
  };

  void notify(const std::string& recipient, const std::string& subject, const std::string& body) override {
    std::lock_guard lock(mu_);
    events_.push_back({recipient, subject, body});
  }

  std::vector<Event> events() const {
    std::lock_guard lock(mu_);
    return events_;
  }

 private:
  mutable std::mutex mu_;
  std::vector<Event> events_;
};

}  // namespace delphinet::collaboration
