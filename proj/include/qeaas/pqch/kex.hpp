#pragma once
// Key-exchange abstraction over the three negotiable algorithms. The client
// contributes a share in its second ClientHello; the server answers with a
// payload in ServerHello. For ML-KEM the share is the encapsulation key and
// the payload a ciphertext; for the Diffie-Hellman groups both are public
// keys. Every variant yields a 32-byte shared secret.

#include "qeaas/bytes.hpp"
#include "qeaas/pqch/wire.hpp"

#include <memory>
#include <stdexcept>

namespace qeaas::pqch {

struct KexError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

size_t kex_share_bytes(KexAlg alg);  // client share size: 800 / 32 / 65
size_t kex_reply_bytes(KexAlg alg);  // server payload size: 768 / 32 / 65

// Client half: generates the share up front, finishes when the server
// payload arrives.
class ClientKex {
 public:
  explicit ClientKex(KexAlg alg);
  const Bytes& share() const { return share_; }
  // Returns the 32-byte shared secret; throws KexError on malformed payload.
  Bytes finish(ByteView server_payload) const;

 private:
  KexAlg alg_;
  Bytes share_;
  Bytes secret_;  // dk or DH private scalar
};

struct KexResponse {
  Bytes payload;        // goes into ServerHello
  Bytes shared_secret;  // 32 bytes
};
// Server half: consumes the client share in one shot. Throws KexError on a
// malformed share (bad length, non-canonical ML-KEM key, off-curve point).
KexResponse server_kex_respond(KexAlg alg, ByteView client_share);

}  // namespace qeaas::pqch
