// ML-DSA-44 against frozen known-answer vectors, plus API contracts.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qeaas/crypto/mldsa44.hpp"

#include "test_util.hpp"

using namespace qeaas;
using namespace qeaas::crypto;
using qeaas::test::H;
using qeaas::test::load_vector;

TEST_CASE("mldsa44 known-answer vectors") {
  auto doc = load_vector("mldsa44_kat.json");
  REQUIRE(doc["cases"].size() >= 6);
  for (const auto& c : doc["cases"]) {
    auto kp = mldsa44::keygen_derand(H(c["xi"]));
    CHECK(kp.pk == H(c["pk"]));
    CHECK(kp.sk == H(c["sk"]));

    Bytes msg = H(c["msg"]), ctx = H(c["ctx"]);
    Bytes sig = mldsa44::sign(kp.sk, msg, ctx);
    CHECK(sig == H(c["sig"]));
    CHECK(mldsa44::verify(kp.pk, msg, sig, ctx));
  }
}

TEST_CASE("mldsa44 rejects modified message, signature, and context") {
  auto doc = load_vector("mldsa44_kat.json");
  const auto& c = doc["cases"][0];
  auto kp = mldsa44::keygen_derand(H(c["xi"]));
  Bytes msg = H(c["msg"]), ctx = H(c["ctx"]), sig = H(c["sig"]);

  Bytes bad_msg = msg.empty() ? Bytes{1} : msg;
  if (!msg.empty()) bad_msg[0] ^= 1;
  CHECK_FALSE(mldsa44::verify(kp.pk, bad_msg, sig, ctx));

  test::TestRng rng(17);
  for (int i = 0; i < 12; ++i) {
    Bytes bad_sig = sig;
    bad_sig[rng.below(static_cast<uint32_t>(bad_sig.size()))] ^=
        static_cast<uint8_t>(1u << rng.below(8));
    CHECK_FALSE(mldsa44::verify(kp.pk, msg, bad_sig, ctx));
  }

  Bytes other_ctx = ctx;
  other_ctx.push_back(0x42);
  CHECK_FALSE(mldsa44::verify(kp.pk, msg, sig, other_ctx));
}

TEST_CASE("mldsa44 randomized round trips and determinism") {
  test::TestRng rng(5);
  for (int i = 0; i < 3; ++i) {
    auto kp = mldsa44::keygen();
    REQUIRE(kp.pk.size() == mldsa44::kPkBytes);
    REQUIRE(kp.sk.size() == mldsa44::kSkBytes);
    Bytes msg = rng.bytes(1 + rng.below(200));
    Bytes sig = mldsa44::sign(kp.sk, msg);
    CHECK(sig.size() == mldsa44::kSigBytes);
    CHECK(mldsa44::verify(kp.pk, msg, sig));
    CHECK(mldsa44::sign(kp.sk, msg) == sig);  // deterministic variant
    // Cross-key rejection.
    auto other = mldsa44::keygen();
    CHECK_FALSE(mldsa44::verify(other.pk, msg, sig));
  }
}

TEST_CASE("mldsa44 input validation") {
  auto kp = mldsa44::keygen();
  Bytes msg{1, 2, 3};
  CHECK_THROWS_AS(mldsa44::sign(Bytes(7, 0), msg), mldsa44::Error);
  CHECK_THROWS_AS(mldsa44::keygen_derand(Bytes(31, 0)), mldsa44::Error);
  Bytes long_ctx(256, 0);
  CHECK_THROWS_AS(mldsa44::sign(kp.sk, msg, long_ctx), mldsa44::Error);
  CHECK_FALSE(mldsa44::verify(kp.pk, msg, Bytes(10, 0)));       // wrong length
  CHECK_FALSE(mldsa44::verify(Bytes(10, 0), msg, Bytes(mldsa44::kSigBytes, 0)));
}
