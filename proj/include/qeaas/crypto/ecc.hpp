#pragma once
// Classical asymmetric primitives (OpenSSL-backed): X25519 Diffie-Hellman and
// P-256 ECDH + ECDSA (SHA-256, DER signatures).
//
// Malformed inputs (wrong length, off-curve point, low-order X25519 result)
// throw std::invalid_argument; internal library failures throw
// std::runtime_error.

#include "qeaas/bytes.hpp"

namespace qeaas::crypto {

constexpr size_t kX25519KeyBytes = 32;
constexpr size_t kP256PointBytes = 65;  // uncompressed SEC1
constexpr size_t kP256ScalarBytes = 32;

struct KeyPairBytes {
  Bytes pub;
  Bytes priv;
};

KeyPairBytes x25519_keygen();
KeyPairBytes x25519_from_private(ByteView priv32);
// Rejects the all-zero shared secret (low-order peer point).
Bytes x25519_shared(ByteView priv32, ByteView peer_pub32);

KeyPairBytes p256_keygen();
KeyPairBytes p256_from_private(ByteView scalar32);
// Returns the 32-byte x coordinate of the shared point.
Bytes p256_ecdh(ByteView scalar32, ByteView peer_pub65);

Bytes ecdsa_p256_sign(ByteView scalar32, ByteView msg);
bool ecdsa_p256_verify(ByteView pub65, ByteView msg, ByteView sig_der);

}  // namespace qeaas::crypto
