#pragma once

#include <cstdint>
#include <mutex>
#include <string>
#include <unordered_map>

#include <openssl/crypto.h>
#include <openssl/evp.h>

#include "delphinet/error.hpp"
#include "delphinet/hash.hpp"

namespace delphinet::service {

struct PasswordHash {
  std::string salt;  // hex
  std::string hash;  // hex, PBKDF2-HMAC-SHA256
  int iterations = 0;
};

inline std::string pbkdf2_hex(const std::string& password, const std::string& salt, int iterations) {
  unsigned char out[32];
  if (PKCS5_PBKDF2_HMAC(password.data(), static_cast<int>(password.size()),
                        reinterpret_cast<const unsigned char*>(salt.data()), static_cast<int>(salt.size()),
                        iterations, EVP_sha256(), sizeof out, out) != 1) {
    throw Error(ErrorCode::Io, "password hashing failed");
  }
  return to_hex(out, sizeof out);
}

inline PasswordHash hash_password(const std::string& password, int iterations) {
  if (password.size() < 8) throw Error(ErrorCode::InvalidPayload, "passwords need at least 8 characters");
  PasswordHash h;
  h.salt = random_hex(16);
  h.iterations = iterations;
  h.hash = pbkdf2_hex(password, h.salt, iterations);
  return h;
}

inline bool verify_password(const std::string& password, const PasswordHash& h) {
  auto candidate = pbkdf2_hex(password, h.salt, h.iterations);
  return candidate.size() == h.hash.size() && CRYPTO_memcmp(candidate.data(), h.hash.data(), candidate.size()) == 0;
}

/// Bearer tokens: 128 random bits, hex encoded. Kept in memory only, so a
/// restart signs everybody out.
class SessionTable {
 public:
  struct Session {
    std::string user;
    std::int64_t expires = 0;
  };

  std::string open(const std::string& user, std::int64_t now, std::int64_t ttl) {
    auto token = random_hex(16);
    std::lock_guard lock(mu_);
    sessions_[token] = {user, now + ttl};
    return token;
  }

  /// The user behind a live token; Unauthenticated otherwise.
  std::string user_for(const std::string& token, std::int64_t now) {
    std::lock_guard lock(mu_);
    auto it = sessions_.find(token);
    if (it == sessions_.end()) throw Error(ErrorCode::Unauthenticated, "unknown or revoked session token");
    if (it->second.expires <= now) {
      sessions_.erase(it);
      throw Error(ErrorCode::Unauthenticated, "session expired");
    }
    return it->second.user;
  }

  std::int64_t expiry(const std::string& token) {
    std::lock_guard lock(mu_);
    auto it = sessions_.find(token);
    return it == sessions_.end() ? 0 : it->second.expires;
  }

  void close(const std::string& token) {
    std::lock_guard lock(mu_);
    sessions_.erase(token);
  }

 private:
  std::mutex mu_;
  std::unordered_map<std::string, Session> sessions_;
};

}  // namespace delphinet::service
