#pragma once
// ML-KEM-512 (FIPS 203): lattice KEM at security category 1.
//
// Self-contained implementation (no external dependency provides it here);
// validated against frozen known-answer vectors produced by an independent
// reference implementation. Decapsulation uses implicit rejection, so it
// never reports failure for a well-formed ciphertext.

#include "qeaas/bytes.hpp"

#include <stdexcept>

namespace qeaas::crypto::mlkem512 {

constexpr size_t kEkBytes = 800;
constexpr size_t kDkBytes = 1632;
constexpr size_t kCtBytes = 768;
constexpr size_t kSsBytes = 32;
constexpr size_t kSeedBytes = 32;

struct Error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct KeyPair {
  Bytes ek;
  Bytes dk;
};

struct Encapsulation {
  Bytes ct;
  Bytes ss;
};

// Deterministic variants take explicit seeds (for known-answer tests); the
// plain variants draw seeds from OS randomness.
KeyPair keygen_derand(ByteView d32, ByteView z32);
KeyPair keygen();

// Validates ek (length + canonical coefficient encoding); throws Error.
Encapsulation encaps_derand(ByteView ek, ByteView m32);
Encapsulation encaps(ByteView ek);

// Validates dk/ct lengths and the embedded key hash; throws Error.
// Returns the 32-byte shared secret (implicitly rejecting bad ciphertexts).
Bytes decaps(ByteView dk, ByteView ct);

}  // namespace qeaas::crypto::mlkem512
