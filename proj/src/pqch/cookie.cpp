#include "qeaas/pqch/cookie.hpp"

#include "qeaas/crypto/sha256.hpp"

namespace qeaas::pqch {

namespace {

Bytes cookie_mac(ByteView secret, const std::string& client_addr, ByteView ts_be8,
                 ByteView ch1_hash) {
  Bytes msg = to_bytes("qeaas/cookie");
  msg.insert(msg.end(), client_addr.begin(), client_addr.end());
  msg.insert(msg.end(), ts_be8.begin(), ts_be8.end());
  msg.insert(msg.end(), ch1_hash.begin(), ch1_hash.end());
  return crypto::hmac_sha256(secret, msg);
}

}  // namespace

Bytes mint_cookie(ByteView secret, const std::string& client_addr, ByteView ch1_hash,
                  uint64_t now_s) {
  if (ch1_hash.size() != 32) throw std::invalid_argument("ch1_hash must be 32 bytes");
  Bytes out;
  out.reserve(kCookieBytes);
  put_be(out, now_s, 8);
  out.insert(out.end(), ch1_hash.begin(), ch1_hash.end());
  Bytes mac = cookie_mac(secret, client_addr, ByteView(out).subspan(0, 8), ch1_hash);
  out.insert(out.end(), mac.begin(), mac.end());
  return out;
}

std::optional<Cookie> parse_cookie(ByteView cookie) {
  if (cookie.size() != kCookieBytes) return std::nullopt;
  Cookie c;
  c.timestamp_s = get_be(cookie, 0, 8);
  c.ch1_hash.assign(cookie.begin() + 8, cookie.begin() + 40);
  c.mac.assign(cookie.begin() + 40, cookie.end());
  return c;
}

bool verify_cookie(ByteView secret, const std::string& client_addr, ByteView cookie,
                   uint64_t now_s) {
  auto parsed = parse_cookie(cookie);
  if (!parsed) return false;
  Bytes expected =
      cookie_mac(secret, client_addr, cookie.subspan(0, 8), parsed->ch1_hash);
  if (!ct_equal(expected, parsed->mac)) return false;
  if (parsed->timestamp_s > now_s) return false;  // clock went backwards
  return now_s - parsed->timestamp_s <= kCookieLifetimeSeconds;
}

}  // namespace qeaas::pqch
