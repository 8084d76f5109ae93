#pragma once
// Key schedule: HKDF-SHA256 over the key-exchange shared secret, bound to the
// transcript hash taken immediately after ServerHello.
//
//   prk = HKDF-Extract(salt = "qeaas/hs", ikm = shared_secret)
//   key = HKDF-Expand(prk, label ‖ th_kex, len)
//
// with labels "c traffic"/"s traffic" (16-byte AES keys), "c iv"/"s iv"
// (12-byte base nonces) and "c finished"/"s finished" (32-byte MAC keys).

#include "qeaas/bytes.hpp"

namespace qeaas::pqch {

struct SessionKeys {
  Bytes c_key, s_key;            // 16 bytes each
  Bytes c_iv, s_iv;              // 12 bytes each
  Bytes c_finished, s_finished;  // 32 bytes each
};

SessionKeys derive_session_keys(ByteView shared_secret, ByteView transcript_hash);

}  // namespace qeaas::pqch
