#pragma once

#include <cstdlib>
#include <fstream>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "delphinet/error.hpp"

namespace delphinet::service {

/// Service settings. Precedence: DELPHINET_* environment variables, then
/// the config file, then these defaults.
struct Config {
  std::string data_dir = "delphinet-data";
  std::string host = "127.0.0.1";
  int port = 8080;
  std::int64_t session_ttl_seconds = 12 * 3600;
  int inference_workers = 2;
  std::size_t max_factor_entries = std::size_t{1} << 24;
  std::uint64_t snapshot_every = 50;
  int pbkdf2_iterations = 100000;
  std::map<std::string, bool> features{{"soloEvaluate", true}, {"lmsWebhook", true}};
};

namespace detail {

inline void apply_json(Config& c, const nlohmann::json& j) {
  c.data_dir = j.value("dataDir", c.data_dir);
  c.host = j.value("host", c.host);
  c.port = j.value("port", c.port);
  c.session_ttl_seconds = j.value("sessionTtlSeconds", c.session_ttl_seconds);
  c.inference_workers = j.value("inferenceWorkers", c.inference_workers);
  c.max_factor_entries = j.value("maxFactorEntries", c.max_factor_entries);
  c.snapshot_every = j.value("snapshotEvery", c.snapshot_every);
  c.pbkdf2_iterations = j.value("pbkdf2Iterations", c.pbkdf2_iterations);
  const auto features = j.value("features", nlohmann::json::object());
  for (const auto& [k, v] : features.items()) c.features[k] = v.get<bool>();
}

template <class T>
T parse_env(const char* name, const char* text) {
  try {
    std::size_t used = 0;
    long long v = std::stoll(text, &used);
    if (used != std::string(text).size() || v < 0) throw std::invalid_argument(name);
    return static_cast<T>(v);
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidDocument, std::string(name) + " must be a non-negative integer");
  }
}

}  // namespace detail

/// `env` looks a variable up (std::getenv by default) so tests can inject one.
template <class Env = decltype(&std::getenv)>
Config load_config(const std::string& path = "", Env env = &std::getenv) {
  Config c;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open config '" + path + "'");
    try {
      detail::apply_json(c, nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::InvalidDocument, "bad config '" + path + "': " + e.what());
    }
  }
  if (const char* v = env("DELPHINET_DATA_DIR")) c.data_dir = v;
  if (const char* v = env("DELPHINET_HOST")) c.host = v;
  if (const char* v = env("DELPHINET_PORT")) c.port = detail::parse_env<int>("DELPHINET_PORT", v);
  if (const char* v = env("DELPHINET_SESSION_TTL")) {
    c.session_ttl_seconds = detail::parse_env<std::int64_t>("DELPHINET_SESSION_TTL", v);
  }
  if (const char* v = env("DELPHINET_INFERENCE_WORKERS")) {
    c.inference_workers = detail::parse_env<int>("DELPHINET_INFERENCE_WORKERS", v);
  }
  if (const char* v = env("DELPHINET_MAX_FACTOR_ENTRIES")) {
    c.max_factor_entries = detail::parse_env<std::size_t>("DELPHINET_MAX_FACTOR_ENTRIES", v);
  }
  if (const char* v = env("DELPHINET_SNAPSHOT_EVERY")) {
    c.snapshot_every = detail::parse_env<std::uint64_t>("DELPHINET_SNAPSHOT_EVERY", v);
  }
  if (c.inference_workers < 1) c.inference_workers = 1;
  return c;
}

}  // namespace delphinet::service
