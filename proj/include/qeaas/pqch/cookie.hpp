#pragma once
// Stateless HelloRetry cookie. The server keeps no per-client state until a
// ClientHello returns with a valid cookie; everything needed to resume — the
// hash of the first ClientHello and an issuance timestamp — travels inside
// the cookie, authenticated by an HMAC over a server-local secret and the
// client address.
//
// Layout: timestamp_s(8 BE) ‖ ch1_hash(32) ‖ mac(32)
// mac = HMAC-SHA256(secret, "qeaas/cookie" ‖ client_addr ‖ timestamp ‖ ch1_hash)

#include "qeaas/bytes.hpp"

#include <optional>
#include <string>

namespace qeaas::pqch {

constexpr size_t kCookieBytes = 8 + 32 + 32;
constexpr uint64_t kCookieLifetimeSeconds = 60;

struct Cookie {
  uint64_t timestamp_s;
  Bytes ch1_hash;  // 32 bytes
  Bytes mac;       // 32 bytes
};

Bytes mint_cookie(ByteView secret, const std::string& client_addr, ByteView ch1_hash,
                  uint64_t now_s);

// Structural parse only; no authenticity check.
std::optional<Cookie> parse_cookie(ByteView cookie);

// Full check: structure, MAC (constant-time) and freshness window.
bool verify_cookie(ByteView secret, const std::string& client_addr, ByteView cookie,
                   uint64_t now_s);

}  // namespace qeaas::pqch
