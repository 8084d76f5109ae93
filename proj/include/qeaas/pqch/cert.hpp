#pragma once
// Compact certificate format for the secure channel. X.509 is deliberately
// avoided: the channel needs exactly "a public key bound to a name by an
// issuer signature", and ML-DSA keys do not round-trip through the system
// X.509 stack anyway. A certificate is a small TLV:
//
//   version(1)=1 ‖ sig_alg(1) ‖ subject_len(2 BE) ‖ subject
//   ‖ issuer_len(2 BE) ‖ issuer ‖ pubkey_len(2 BE) ‖ pubkey
//   ‖ sig_len(2 BE) ‖ issuer_signature
//
// where issuer_signature covers "qeaas/cert-v1" ‖ <all bytes before sig_len>
// under the *issuer's* key. sig_alg names the algorithm of the subject key;
// chains are [end-entity, issuer..., root], root self-signed.
//
// File format: base64 body wrapped in -----BEGIN/END QEAAS CERTIFICATE-----
// armor (multiple blocks form a chain); private keys use
// -----BEGIN/END QEAAS PRIVATE KEY----- around ver(1) ‖ alg(1) ‖ len(2) ‖ key.

#include "qeaas/bytes.hpp"
#include "qeaas/pqch/wire.hpp"

#include <string>
#include <vector>

namespace qeaas::pqch {

struct Certificate {
  uint8_t version = 1;
  SigAlg sig_alg = SigAlg::MLDSA44;
  std::string subject;
  std::string issuer;
  Bytes public_key;
  Bytes issuer_signature;

  Bytes encode() const;
  static Certificate decode(ByteView tlv);  // throws WireError
  // The byte string the issuer signs (prefix + body up to the signature).
  Bytes signed_payload() const;
  bool operator==(const Certificate&) const = default;
};

Bytes sign_with(SigAlg alg, ByteView private_key, ByteView msg);
bool verify_with(SigAlg alg, ByteView public_key, ByteView msg, ByteView sig);

// CertificateVerify signature: covers "qeaas/cert-verify" ‖ transcript_hash.
Bytes sign_transcript(SigAlg alg, ByteView private_key, ByteView transcript_hash);
bool verify_transcript(SigAlg alg, ByteView public_key, ByteView transcript_hash,
                       ByteView signature);

// Full-chain validation: subject/issuer linkage, issuer signatures, final
// certificate byte-identical to the trust anchor and self-signed.
bool verify_chain(const std::vector<Certificate>& chain, const Certificate& trust_anchor);

struct Identity {
  Certificate cert;
  Bytes private_key;
};

// Server-side key material handed to a ServerChannel.
struct KeyStore {
  std::vector<Certificate> chain;  // [server cert, issuing CA]
  SigAlg sig_alg = SigAlg::MLDSA44;
  Bytes private_key;
  Bytes cookie_secret;  // 32 bytes

  std::vector<Bytes> chain_tlvs() const;
};

Identity make_ca(SigAlg alg, const std::string& subject);
Identity issue_certificate(const Identity& ca, SigAlg alg, const std::string& subject);

struct TestPki {
  KeyStore store;
  Certificate trust_anchor;  // the CA certificate
  Identity ca;
};
// Fresh CA + server identity + random cookie secret, for tests and demos.
TestPki make_test_pki(SigAlg alg, const std::string& server_name = "qeaas-proxy");

// ---- PEM-style file armor ---------------------------------------------------

std::string cert_chain_to_pem(const std::vector<Certificate>& chain);
std::vector<Certificate> cert_chain_from_pem(const std::string& text);  // throws WireError
std::string private_key_to_pem(SigAlg alg, ByteView key);
std::pair<SigAlg, Bytes> private_key_from_pem(const std::string& text);  // throws WireError

void save_text_file(const std::string& path, const std::string& text);
std::string load_text_file(const std::string& path);  // throws std::runtime_error

}  // namespace qeaas::pqch
