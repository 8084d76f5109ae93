#include "qeaas/pqch/kex.hpp"

#include "qeaas/crypto/ecc.hpp"
#include "qeaas/crypto/mlkem512.hpp"

namespace qeaas::pqch {

size_t kex_share_bytes(KexAlg alg) {
  switch (alg) {
    case KexAlg::MLKEM512: return crypto::mlkem512::kEkBytes;
    case KexAlg::X25519: return crypto::kX25519KeyBytes;
    case KexAlg::P256: return crypto::kP256PointBytes;
  }
  throw KexError("unknown key-exchange algorithm");
}

size_t kex_reply_bytes(KexAlg alg) {
  switch (alg) {
    case KexAlg::MLKEM512: return crypto::mlkem512::kCtBytes;
    case KexAlg::X25519: return crypto::kX25519KeyBytes;
    case KexAlg::P256: return crypto::kP256PointBytes;
  }
  throw KexError("unknown key-exchange algorithm");
}

ClientKex::ClientKex(KexAlg alg) : alg_(alg) {
  switch (alg_) {
    case KexAlg::MLKEM512: {
      auto kp = crypto::mlkem512::keygen();
      share_ = std::move(kp.ek);
      secret_ = std::move(kp.dk);
      break;
    }
    case KexAlg::X25519: {
      auto kp = crypto::x25519_keygen();
      share_ = std::move(kp.pub);
      secret_ = std::move(kp.priv);
      break;
    }
    case KexAlg::P256: {
      auto kp = crypto::p256_keygen();
      share_ = std::move(kp.pub);
      secret_ = std::move(kp.priv);
      break;
    }
  }
}

Bytes ClientKex::finish(ByteView server_payload) const {
  try {
    switch (alg_) {
      case KexAlg::MLKEM512: return crypto::mlkem512::decaps(secret_, server_payload);
      case KexAlg::X25519: return crypto::x25519_shared(secret_, server_payload);
      case KexAlg::P256: return crypto::p256_ecdh(secret_, server_payload);
    }
  } catch (const std::invalid_argument& e) {
    throw KexError(std::string("key exchange failed: ") + e.what());
  }
  throw KexError("unknown key-exchange algorithm");
}

KexResponse server_kex_respond(KexAlg alg, ByteView client_share) {
  try {
    switch (alg) {
      case KexAlg::MLKEM512: {
        auto enc = crypto::mlkem512::encaps(client_share);
        return {std::move(enc.ct), std::move(enc.ss)};
      }
      case KexAlg::X25519: {
        auto kp = crypto::x25519_keygen();
        return {std::move(kp.pub), crypto::x25519_shared(kp.priv, client_share)};
      }
      case KexAlg::P256: {
        auto kp = crypto::p256_keygen();
        return {std::move(kp.pub), crypto::p256_ecdh(kp.priv, client_share)};
      }
    }
  } catch (const std::invalid_argument& e) {
    throw KexError(std::string("key exchange failed: ") + e.what());
  }
  throw KexError("unknown key-exchange algorithm");
}

}  // namespace qeaas::pqch
