// Hash primitives against frozen vectors: SHA3/SHAKE, BLAKE2s, SHA-256,
// HMAC-SHA-256, HKDF, and the handshake key schedule.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qeaas/crypto/blake2s.hpp"
#include "qeaas/crypto/hkdf.hpp"
#include "qeaas/crypto/keccak.hpp"
#include "qeaas/crypto/sha256.hpp"
#include "qeaas/pqch/schedule.hpp"

#include "test_util.hpp"

using namespace qeaas;
using qeaas::test::H;
using qeaas::test::load_vector;

TEST_CASE("sha3 and shake frozen vectors") {
  auto doc = load_vector("sha3_shake.json");
  for (const auto& c : doc["cases"]) {
    INFO("case ", c["name"].get<std::string>());
    Bytes msg = H(c["msg"]);
    CHECK(crypto::sha3_256(msg) == H(c["sha3_256"]));
    CHECK(crypto::sha3_512(msg) == H(c["sha3_512"]));
    CHECK(crypto::shake128(msg, 32) == H(c["shake128_32"]));
    CHECK(crypto::shake256(msg, 32) == H(c["shake256_32"]));
    // Rate-straddling output lengths (SHAKE128 rate = 168, SHAKE256 = 136).
    CHECK(crypto::shake128(msg, 167) == H(c["shake128_167"]));
    CHECK(crypto::shake128(msg, 169) == H(c["shake128_169"]));
    CHECK(crypto::shake256(msg, 137) == H(c["shake256_137"]));
    CHECK(crypto::shake256(msg, 512) == H(c["shake256_512"]));
  }
}

TEST_CASE("shake output prefix property") {
  // An XOF's shorter output is a prefix of its longer output.
  Bytes msg = test::TestRng(42).bytes(100);
  Bytes long_out = crypto::shake128(msg, 300);
  for (size_t n : {1u, 31u, 168u, 299u}) {
    Bytes short_out = crypto::shake128(msg, n);
    CHECK(std::equal(short_out.begin(), short_out.end(), long_out.begin()));
  }
}

TEST_CASE("blake2s frozen vectors") {
  auto doc = load_vector("blake2s.json");
  for (const auto& c : doc["cases"]) {
    CHECK(crypto::blake2s(H(c["msg"])) == H(c["digest"]));
  }
}

TEST_CASE("blake2s multi-part equals concatenated") {
  test::TestRng rng(7);
  for (int i = 0; i < 20; ++i) {
    Bytes a = rng.bytes(rng.below(80)), b = rng.bytes(rng.below(80)),
          c = rng.bytes(rng.below(80));
    CHECK(crypto::blake2s({a, b, c}) == crypto::blake2s(concat({a, b, c})));
  }
}

TEST_CASE("sha256 and hmac frozen vectors") {
  auto doc = load_vector("sha256_hmac.json");
  for (const auto& c : doc["sha256"]) CHECK(crypto::sha256(H(c["msg"])) == H(c["sha256"]));
  for (const auto& c : doc["hmac"])
    CHECK(crypto::hmac_sha256(H(c["key"]), H(c["msg"])) == H(c["mac"]));
}

TEST_CASE("sha256 incremental copies and multi-part") {
  test::TestRng rng(11);
  Bytes msg = rng.bytes(200);
  for (size_t split : {0u, 1u, 63u, 64u, 65u, 199u}) {
    Bytes a(msg.begin(), msg.begin() + split), b(msg.begin() + split, msg.end());
    CHECK(crypto::sha256({a, b}) == crypto::sha256(msg));
  }
  crypto::Sha256 h;
  h.update(ByteView(msg).subspan(0, 100));
  crypto::Sha256 snapshot = h;  // checkpointed transcript copies must diverge
  h.update(ByteView(msg).subspan(100));
  Bytes full = h.finish();
  Bytes half = snapshot.finish();
  CHECK(full == crypto::sha256(msg));
  CHECK(half == crypto::sha256(ByteView(msg).subspan(0, 100)));
  CHECK(full != half);
}

TEST_CASE("hkdf sanity against hmac definition") {
  // Single-block expand: T(1) = HMAC(prk, info || 0x01).
  Bytes salt = H("000102030405060708090a0b0c"), ikm(22, 0x0b), info = H("f0f1f2f3f4f5f6f7f8f9");
  Bytes prk = crypto::hkdf_extract(salt, ikm);
  CHECK(prk == crypto::hmac_sha256(salt, ikm));
  Bytes info1 = info;
  info1.push_back(0x01);
  Bytes t1 = crypto::hmac_sha256(prk, info1);
  Bytes okm = crypto::hkdf_expand(prk, info, 42);
  CHECK(Bytes(okm.begin(), okm.begin() + 32) == t1);
  // Prefix property across lengths.
  Bytes okm16 = crypto::hkdf_expand(prk, info, 16);
  CHECK(std::equal(okm16.begin(), okm16.end(), okm.begin()));
}

TEST_CASE("handshake key schedule frozen vectors") {
  auto doc = load_vector("hkdf_schedule.json");
  for (const auto& c : doc["cases"]) {
    auto keys = pqch::derive_session_keys(H(c["secret"]), H(c["transcript"]));
    CHECK(keys.c_key == H(c["keys"]["c_traffic"]));
    CHECK(keys.s_key == H(c["keys"]["s_traffic"]));
    CHECK(keys.c_iv == H(c["keys"]["c_iv"]));
    CHECK(keys.s_iv == H(c["keys"]["s_iv"]));
    CHECK(keys.c_finished == H(c["keys"]["c_finished"]));
    CHECK(keys.s_finished == H(c["keys"]["s_finished"]));
  }
}

TEST_CASE("key schedule separates directions and transcripts") {
  Bytes ss = test::TestRng(3).bytes(32);
  Bytes th1 = test::TestRng(4).bytes(32), th2 = test::TestRng(5).bytes(32);
  auto k1 = pqch::derive_session_keys(ss, th1);
  auto k2 = pqch::derive_session_keys(ss, th2);
  CHECK(k1.c_key != k1.s_key);
  CHECK(k1.c_iv != k1.s_iv);
  CHECK(k1.c_key != k2.c_key);
  CHECK(k1.s_finished != k2.s_finished);
}
