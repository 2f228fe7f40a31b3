#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "delphinet/error.hpp"
#include "delphinet/hash.hpp"

// Durable state is a set of append-only JSON-lines logs plus snapshots and
// a content-addressed blob store:
//
//   <root>/admin.log             users and problems
//   <root>/groups/<id>.log       one group's creation record and commands
//   <root>/snapshots/<id>.json   {"seq", "hash", "state"} of a group
//   <root>/blobs/<sha256>        attachments
//
// Every log line is {"seq": n, "check": sha256(record)[0..16], "record": ...}
// with seq counting from 1. A final line without its newline is a write cut
// short by a crash: it is dropped with a warning. Anything else that does
// not parse or check out is corruption and loading refuses to continue.

namespace delphinet::service {

namespace fs = std::filesystem;
using json = nlohmann::json;

using WarningSink = std::function<void(const std::string&)>;

inline std::string record_check(const json& record) { return sha256_hex(record.dump()).substr(0, 16); }

class CommandLog {
 public:
  /// Opens (creating if needed) the log at `path` and reads every complete
  /// record. A torn final line is reported to `warn` and cut off the file.
  CommandLog(fs::path path, const WarningSink& warn) : path_(std::move(path)) {
    fs::create_directories(path_.parent_path());
    std::string text;
    {
      std::ifstream in(path_, std::ios::binary);
      if (in) {
        std::ostringstream buf;
        buf << in.rdbuf();
        text = buf.str();
      }
    }
    std::size_t pos = 0, line_no = 0;
    while (pos < text.size()) {
      auto nl = text.find('\n', pos);
      if (nl == std::string::npos) {
        if (warn) {
          warn(path_.string() + ": dropped an incomplete final record (" + std::to_string(text.size() - pos) +
               " bytes) after seq " + std::to_string(records_.size()));
        }
        fs::resize_file(path_, pos);
        break;
      }
      ++line_no;
      parse_line(std::string_view(text).substr(pos, nl - pos), line_no);
      pos = nl + 1;
    }
  }

  const std::vector<json>& records() const { return records_; }
  std::uint64_t size() const { return records_.size(); }
  const fs::path& path() const { return path_; }

  /// Appends one record and flushes it to the operating system. Returns its seq.
  std::uint64_t append(const json& record) {
    const std::uint64_t seq = records_.size() + 1;
    json line = {{"seq", seq}, {"check", record_check(record)}, {"record", record}};
    std::ofstream out(path_, std::ios::binary | std::ios::app);
    out << line.dump() << '\n';
    out.flush();
    if (!out) throw Error(ErrorCode::Io, "cannot append to '" + path_.string() + "'");
    records_.push_back(record);
    return seq;
  }

 private:
  void parse_line(std::string_view text, std::size_t line_no) {
    auto corrupt = [&](const std::string& why) {
      throw Error(ErrorCode::CorruptLog, path_.string() + " line " + std::to_string(line_no) + ": " + why);
    };
    json line;
    try {
      line = json::parse(text);
    } catch (const json::parse_error&) {
      corrupt("not valid JSON");
    }
    if (!line.is_object() || !line.contains("record") || !line.contains("seq") || !line.contains("check")) {
      corrupt("missing fields");
    }
    if (line.at("seq") != records_.size() + 1) corrupt("sequence gap");
    if (line.at("check") != record_check(line.at("record"))) corrupt("checksum mismatch");
    records_.push_back(std::move(line.at("record")));
  }

  fs::path path_;
  std::vector<json> records_;
};

struct Snapshot {
  std::uint64_t seq = 0;
  std::string hash;
  json state;
};

class Store {
 public:
  explicit Store(fs::path root, WarningSink warn = {}) : root_(std::move(root)), warn_(std::move(warn)) {
    fs::create_directories(root_ / "groups");
    fs::create_directories(root_ / "snapshots");
    fs::create_directories(root_ / "blobs");
  }

  const fs::path& root() const { return root_; }
  const WarningSink& warn() const { return warn_; }

  CommandLog open_admin_log() const { return CommandLog(root_ / "admin.log", warn_); }

  CommandLog open_group_log(const std::string& group) const {
    return CommandLog(root_ / "groups" / (checked_name(group) + ".log"), warn_);
  }

  std::vector<std::string> group_ids() const {
    std::vector<std::string> out;
    for (const auto& entry : fs::directory_iterator(root_ / "groups")) {
      if (entry.path().extension() == ".log") out.push_back(entry.path().stem().string());
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  void write_snapshot(const std::string& group, const Snapshot& s) const {
    auto path = root_ / "snapshots" / (checked_name(group) + ".json");
    write_atomically(path, json{{"seq", s.seq}, {"hash", s.hash}, {"state", s.state}}.dump());
  }

  /// A snapshot that fails to parse is ignored (the log alone is enough).
  std::optional<Snapshot> read_snapshot(const std::string& group) const {
    auto path = root_ / "snapshots" / (checked_name(group) + ".json");
    std::ifstream in(path);
    if (!in) return std::nullopt;
    try {
      auto j = json::parse(in);
      return Snapshot{j.at("seq").get<std::uint64_t>(), j.at("hash").get<std::string>(), j.at("state")};
    } catch (const json::exception&) {
      if (warn_) warn_(path.string() + ": unreadable snapshot ignored");
      return std::nullopt;
    }
  }

  /// Stores `data` under its SHA-256 and returns the hash.
  std::string put_blob(const std::string& data) const {
    auto hash = sha256_hex(data);
    auto path = root_ / "blobs" / hash;
    if (!fs::exists(path)) write_atomically(path, data);
    return hash;
  }

  std::optional<std::string> get_blob(const std::string& hash) const {
    if (hash.size() != 64 || hash.find_first_not_of("0123456789abcdef") != std::string::npos) return std::nullopt;
    std::ifstream in(root_ / "blobs" / hash, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  }

  bool has_blob(const std::string& hash) const { return get_blob(hash).has_value(); }

 private:
  static std::string checked_name(const std::string& id) {
    if (id.empty() || id.size() > 64 ||
        id.find_first_not_of("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_-") !=
            std::string::npos) {
      throw Error(ErrorCode::InvalidPayload, "ids may only use letters, digits, '_' and '-'");
    }
    return id;
  }

  static void write_atomically(const fs::path& path, const std::string& data) {
    auto tmp = path;
    tmp += ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      out << data;
      if (!out) throw Error(ErrorCode::Io, "cannot write '" + tmp.string() + "'");
    }
    fs::rename(tmp, path);
  }

  fs::path root_;
  WarningSink warn_;
};

}  // namespace delphinet::service
