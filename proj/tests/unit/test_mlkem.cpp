// ML-KEM-512 against frozen known-answer vectors, plus API contracts.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qeaas/crypto/mlkem512.hpp"

#include "test_util.hpp"

using namespace qeaas;
using namespace qeaas::crypto;
using qeaas::test::H;
using qeaas::test::load_vector;

TEST_CASE("mlkem512 known-answer vectors") {
  auto doc = load_vector("mlkem512_kat.json");
  REQUIRE(doc["cases"].size() >= 8);
  for (const auto& c : doc["cases"]) {
    auto kp = mlkem512::keygen_derand(H(c["d"]), H(c["z"]));
    CHECK(kp.ek == H(c["ek"]));
    CHECK(kp.dk == H(c["dk"]));

    auto enc = mlkem512::encaps_derand(kp.ek, H(c["m"]));
    CHECK(enc.ct == H(c["ct"]));
    CHECK(enc.ss == H(c["ss"]));

    CHECK(mlkem512::decaps(kp.dk, enc.ct) == H(c["ss"]));
    // Implicit rejection: the tampered ciphertext yields the frozen
    // rejection secret, never an error.
    CHECK(mlkem512::decaps(kp.dk, H(c["ct_bad"])) == H(c["ss_bad"]));
  }
}

TEST_CASE("mlkem512 randomized round trips") {
  for (int i = 0; i < 8; ++i) {
    auto kp = mlkem512::keygen();
    REQUIRE(kp.ek.size() == mlkem512::kEkBytes);
    REQUIRE(kp.dk.size() == mlkem512::kDkBytes);
    auto enc = mlkem512::encaps(kp.ek);
    REQUIRE(enc.ct.size() == mlkem512::kCtBytes);
    CHECK(mlkem512::decaps(kp.dk, enc.ct) == enc.ss);
  }
}

TEST_CASE("mlkem512 tampered ciphertext changes the secret silently") {
  test::TestRng rng(3);
  auto kp = mlkem512::keygen();
  auto enc = mlkem512::encaps(kp.ek);
  for (int i = 0; i < 10; ++i) {
    Bytes bad = enc.ct;
    bad[rng.below(static_cast<uint32_t>(bad.size()))] ^= static_cast<uint8_t>(1 + rng.below(255));
    Bytes ss = mlkem512::decaps(kp.dk, bad);
    CHECK(ss.size() == mlkem512::kSsBytes);
    CHECK(ss != enc.ss);
  }
}

TEST_CASE("mlkem512 input validation") {
  auto kp = mlkem512::keygen();
  auto enc = mlkem512::encaps(kp.ek);

  CHECK_THROWS_AS(mlkem512::encaps(Bytes(10, 0)), mlkem512::Error);
  CHECK_THROWS_AS(mlkem512::decaps(kp.dk, Bytes(10, 0)), mlkem512::Error);
  CHECK_THROWS_AS(mlkem512::decaps(Bytes(10, 0), enc.ct), mlkem512::Error);

  // Non-canonical ek: force a coefficient ≥ q in the first packed slot.
  Bytes bad_ek = kp.ek;
  bad_ek[0] = 0xff;
  bad_ek[1] = 0xff;
  CHECK_THROWS_AS(mlkem512::encaps(bad_ek), mlkem512::Error);

  // dk with corrupted embedded ek-hash must be rejected.
  Bytes bad_dk = kp.dk;
  bad_dk[768 + 800] ^= 0x01;  // first byte of H(ek)
  CHECK_THROWS_AS(mlkem512::decaps(bad_dk, enc.ct), mlkem512::Error);
}
