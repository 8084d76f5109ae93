#pragma once
// ML-DSA-44 (FIPS 204): lattice signature scheme at security category 2.
//
// Self-contained implementation validated against frozen known-answer
// vectors from independent reference implementations. Signing uses the
// deterministic variant (the hedged random input fixed to all-zero bytes),
// which the handshake relies on nowhere but which makes every signature
// reproducible under test.

#include "qeaas/bytes.hpp"

#include <stdexcept>

namespace qeaas::crypto::mldsa44 {

constexpr size_t kPkBytes = 1312;
constexpr size_t kSkBytes = 2560;
constexpr size_t kSigBytes = 2420;
constexpr size_t kSeedBytes = 32;

struct Error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct KeyPair {
  Bytes pk;
  Bytes sk;
};

KeyPair keygen_derand(ByteView xi32);
KeyPair keygen();

// Context string (ctx) up to 255 bytes, per the FIPS 204 pure-signature API.
Bytes sign(ByteView sk, ByteView msg, ByteView ctx = {});
bool verify(ByteView pk, ByteView msg, ByteView sig, ByteView ctx = {});

}  // namespace qeaas::crypto::mldsa44
