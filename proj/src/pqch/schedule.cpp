#include "qeaas/pqch/schedule.hpp"

#include "qeaas/crypto/hkdf.hpp"

namespace qeaas::pqch {

namespace {

Bytes expand_label(ByteView prk, std::string_view label, ByteView transcript, size_t len) {
  Bytes info = to_bytes(label);
  info.insert(info.end(), transcript.begin(), transcript.end());
  return crypto::hkdf_expand(prk, info, len);
}

}  // namespace

SessionKeys derive_session_keys(ByteView shared_secret, ByteView transcript_hash) {
  Bytes prk = crypto::hkdf_extract(to_bytes("qeaas/hs"), shared_secret);
  SessionKeys keys;
  keys.c_key = expand_label(prk, "c traffic", transcript_hash, 16);
  keys.s_key = expand_label(prk, "s traffic", transcript_hash, 16);
  keys.c_iv = expand_label(prk, "c iv", transcript_hash, 12);
  keys.s_iv = expand_label(prk, "s iv", transcript_hash, 12);
  keys.c_finished = expand_label(prk, "c finished", transcript_hash, 32);
  keys.s_finished = expand_label(prk, "s finished", transcript_hash, 32);
  return keys;
}

}  // namespace qeaas::pqch
