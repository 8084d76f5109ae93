#include "qeaas/crypto/ecc.hpp"

#include <openssl/core_names.h>
#include <openssl/ec.h>
#include <openssl/evp.h>
#include <openssl/param_build.h>

#include <memory>
#include <stdexcept>

namespace qeaas::crypto {

namespace {

struct PkeyFree {
  void operator()(EVP_PKEY* p) const { EVP_PKEY_free(p); }
};
struct PkeyCtxFree {
  void operator()(EVP_PKEY_CTX* p) const { EVP_PKEY_CTX_free(p); }
};
struct MdCtxFree {
  void operator()(EVP_MD_CTX* p) const { EVP_MD_CTX_free(p); }
};
using PkeyPtr = std::unique_ptr<EVP_PKEY, PkeyFree>;
using PkeyCtxPtr = std::unique_ptr<EVP_PKEY_CTX, PkeyCtxFree>;
using MdCtxPtr = std::unique_ptr<EVP_MD_CTX, MdCtxFree>;

[[noreturn]] void fail(const char* what) {
  throw std::runtime_error(std::string("ecc: ") + what);
}

constexpr const char* kP256Name = "prime256v1";

// ---- X25519 -----------------------------------------------------------------

PkeyPtr x25519_priv_key(ByteView priv32) {
  if (priv32.size() != kX25519KeyBytes) throw std::invalid_argument("x25519: bad private length");
  PkeyPtr key(EVP_PKEY_new_raw_private_key(EVP_PKEY_X25519, nullptr, priv32.data(), priv32.size()));
  if (!key) fail("x25519 private import");
  return key;
}

KeyPairBytes export_x25519(EVP_PKEY* key) {
  KeyPairBytes kp;
  kp.pub.resize(kX25519KeyBytes);
  kp.priv.resize(kX25519KeyBytes);
  size_t len = kp.pub.size();
  if (EVP_PKEY_get_raw_public_key(key, kp.pub.data(), &len) != 1 || len != kX25519KeyBytes)
    fail("x25519 public export");
  len = kp.priv.size();
  if (EVP_PKEY_get_raw_private_key(key, kp.priv.data(), &len) != 1 || len != kX25519KeyBytes)
    fail("x25519 private export");
  return kp;
}

// ---- P-256 ------------------------------------------------------------------

struct BnFree {
  void operator()(BIGNUM* b) const { BN_clear_free(b); }
};
using BnPtr = std::unique_ptr<BIGNUM, BnFree>;

// Validates the encoding (uncompressed, on-curve) and returns it unchanged.
Bytes check_p256_point(ByteView pub) {
  if (pub.size() != kP256PointBytes || pub[0] != 0x04)
    throw std::invalid_argument("p256: bad point encoding");
  std::unique_ptr<EC_GROUP, decltype(&EC_GROUP_free)> group(
      EC_GROUP_new_by_curve_name(NID_X9_62_prime256v1), EC_GROUP_free);
  std::unique_ptr<EC_POINT, decltype(&EC_POINT_free)> point(EC_POINT_new(group.get()),
                                                            EC_POINT_free);
  if (!group || !point) fail("p256 alloc");
  if (EC_POINT_oct2point(group.get(), point.get(), pub.data(), pub.size(), nullptr) != 1)
    throw std::invalid_argument("p256: point not on curve");
  return Bytes(pub.begin(), pub.end());
}

PkeyPtr p256_from_parts(const Bytes& pub, const BIGNUM* priv) {
  std::unique_ptr<OSSL_PARAM_BLD, decltype(&OSSL_PARAM_BLD_free)> bld(OSSL_PARAM_BLD_new(),
                                                                      OSSL_PARAM_BLD_free);
  if (!bld || OSSL_PARAM_BLD_push_utf8_string(bld.get(), OSSL_PKEY_PARAM_GROUP_NAME, kP256Name,
                                              0) != 1 ||
      OSSL_PARAM_BLD_push_octet_string(bld.get(), OSSL_PKEY_PARAM_PUB_KEY, pub.data(),
                                       pub.size()) != 1)
    fail("p256 params");
  if (priv && OSSL_PARAM_BLD_push_BN(bld.get(), OSSL_PKEY_PARAM_PRIV_KEY, priv) != 1)
    fail("p256 params");
  std::unique_ptr<OSSL_PARAM, decltype(&OSSL_PARAM_free)> params(OSSL_PARAM_BLD_to_param(bld.get()),
                                                                 OSSL_PARAM_free);
  PkeyCtxPtr ctx(EVP_PKEY_CTX_new_from_name(nullptr, "EC", nullptr));
  if (!params || !ctx || EVP_PKEY_fromdata_init(ctx.get()) != 1) fail("p256 fromdata init");
  EVP_PKEY* raw = nullptr;
  int selection = priv ? EVP_PKEY_KEYPAIR : EVP_PKEY_PUBLIC_KEY;
  if (EVP_PKEY_fromdata(ctx.get(), &raw, selection, params.get()) != 1) fail("p256 fromdata");
  return PkeyPtr(raw);
}

// Computes scalar·G and returns the uncompressed encoding.
Bytes p256_pub_from_scalar(const BIGNUM* scalar) {
  std::unique_ptr<EC_GROUP, decltype(&EC_GROUP_free)> group(
      EC_GROUP_new_by_curve_name(NID_X9_62_prime256v1), EC_GROUP_free);
  std::unique_ptr<EC_POINT, decltype(&EC_POINT_free)> point(EC_POINT_new(group.get()),
                                                            EC_POINT_free);
  if (!group || !point || EC_POINT_mul(group.get(), point.get(), scalar, nullptr, nullptr,
                                       nullptr) != 1)
    fail("p256 scalar mult");
  Bytes out(kP256PointBytes);
  if (EC_POINT_point2oct(group.get(), point.get(), POINT_CONVERSION_UNCOMPRESSED, out.data(),
                         out.size(), nullptr) != kP256PointBytes)
    fail("p256 point export");
  return out;
}

PkeyPtr p256_keypair_from_scalar(ByteView scalar32, Bytes* pub_out) {
  if (scalar32.size() != kP256ScalarBytes) throw std::invalid_argument("p256: bad scalar length");
  BnPtr bn(BN_bin2bn(scalar32.data(), static_cast<int>(scalar32.size()), nullptr));
  if (!bn || BN_is_zero(bn.get())) throw std::invalid_argument("p256: bad scalar");
  Bytes pub = p256_pub_from_scalar(bn.get());
  if (pub_out) *pub_out = pub;
  return p256_from_parts(pub, bn.get());
}

Bytes derive_shared(EVP_PKEY* own, EVP_PKEY* peer, size_t expect) {
  PkeyCtxPtr ctx(EVP_PKEY_CTX_new(own, nullptr));
  if (!ctx || EVP_PKEY_derive_init(ctx.get()) != 1 ||
      EVP_PKEY_derive_set_peer(ctx.get(), peer) != 1)
    throw std::invalid_argument("ecdh: peer rejected");
  size_t len = 0;
  if (EVP_PKEY_derive(ctx.get(), nullptr, &len) != 1) fail("ecdh size");
  Bytes out(len);
  if (EVP_PKEY_derive(ctx.get(), out.data(), &len) != 1)
    throw std::invalid_argument("ecdh: derive failed");
  out.resize(len);
  if (out.size() != expect) fail("ecdh length");
  return out;
}

}  // namespace

KeyPairBytes x25519_keygen() {
  PkeyCtxPtr ctx(EVP_PKEY_CTX_new_id(EVP_PKEY_X25519, nullptr));
  EVP_PKEY* raw = nullptr;
  if (!ctx || EVP_PKEY_keygen_init(ctx.get()) != 1 || EVP_PKEY_keygen(ctx.get(), &raw) != 1)
    fail("x25519 keygen");
  PkeyPtr key(raw);
  return export_x25519(key.get());
}

KeyPairBytes x25519_from_private(ByteView priv32) {
  PkeyPtr key = x25519_priv_key(priv32);
  return export_x25519(key.get());
}

Bytes x25519_shared(ByteView priv32, ByteView peer_pub32) {
  if (peer_pub32.size() != kX25519KeyBytes) throw std::invalid_argument("x25519: bad public length");
  PkeyPtr own = x25519_priv_key(priv32);
  PkeyPtr peer(
      EVP_PKEY_new_raw_public_key(EVP_PKEY_X25519, nullptr, peer_pub32.data(), peer_pub32.size()));
  if (!peer) throw std::invalid_argument("x25519: bad public key");
  // OpenSSL already rejects the all-zero output; the explicit check keeps the
  // low-order-point contract independent of library behavior.
  Bytes out = derive_shared(own.get(), peer.get(), kX25519KeyBytes);
  uint8_t acc = 0;
  for (uint8_t b : out) acc |= b;
  if (acc == 0) throw std::invalid_argument("x25519: low-order peer point");
  return out;
}

KeyPairBytes p256_keygen() {
  PkeyCtxPtr ctx(EVP_PKEY_CTX_new_from_name(nullptr, "EC", nullptr));
  EVP_PKEY* raw = nullptr;
  if (!ctx || EVP_PKEY_keygen_init(ctx.get()) != 1 ||
      EVP_PKEY_CTX_set_group_name(ctx.get(), kP256Name) != 1 ||
      EVP_PKEY_keygen(ctx.get(), &raw) != 1)
    fail("p256 keygen");
  PkeyPtr key(raw);
  BIGNUM* bn = nullptr;
  if (EVP_PKEY_get_bn_param(key.get(), OSSL_PKEY_PARAM_PRIV_KEY, &bn) != 1)
    fail("p256 private export");
  BnPtr priv(bn);
  KeyPairBytes kp;
  kp.priv.resize(kP256ScalarBytes);
  if (BN_bn2binpad(priv.get(), kp.priv.data(), static_cast<int>(kp.priv.size())) < 0)
    fail("p256 private pad");
  // Recompute the public point from the scalar: the octet-string param would
  // hand back the key's default (compressed) encoding, and the wire format
  // pins the uncompressed form.
  kp.pub = p256_pub_from_scalar(priv.get());
  return kp;
}

KeyPairBytes p256_from_private(ByteView scalar32) {
  KeyPairBytes kp;
  kp.priv.assign(scalar32.begin(), scalar32.end());
  p256_keypair_from_scalar(scalar32, &kp.pub);
  return kp;
}

Bytes p256_ecdh(ByteView scalar32, ByteView peer_pub65) {
  Bytes peer_bytes = check_p256_point(peer_pub65);
  PkeyPtr own = p256_keypair_from_scalar(scalar32, nullptr);
  PkeyPtr peer = p256_from_parts(peer_bytes, nullptr);
  return derive_shared(own.get(), peer.get(), 32);
}

Bytes ecdsa_p256_sign(ByteView scalar32, ByteView msg) {
  PkeyPtr key = p256_keypair_from_scalar(scalar32, nullptr);
  MdCtxPtr ctx(EVP_MD_CTX_new());
  if (!ctx ||
      EVP_DigestSignInit(ctx.get(), nullptr, EVP_sha256(), nullptr, key.get()) != 1)
    fail("ecdsa sign init");
  size_t len = 0;
  if (EVP_DigestSign(ctx.get(), nullptr, &len, msg.data(), msg.size()) != 1) fail("ecdsa size");
  Bytes sig(len);
  if (EVP_DigestSign(ctx.get(), sig.data(), &len, msg.data(), msg.size()) != 1) fail("ecdsa sign");
  sig.resize(len);
  return sig;
}

bool ecdsa_p256_verify(ByteView pub65, ByteView msg, ByteView sig_der) {
  Bytes pub;
  try {
    pub = check_p256_point(pub65);
  } catch (const std::invalid_argument&) {
    return false;
  }
  PkeyPtr key = p256_from_parts(pub, nullptr);
  MdCtxPtr ctx(EVP_MD_CTX_new());
  if (!ctx ||
      EVP_DigestVerifyInit(ctx.get(), nullptr, EVP_sha256(), nullptr, key.get()) != 1)
    fail("ecdsa verify init");
  return EVP_DigestVerify(ctx.get(), sig_der.data(), sig_der.size(), msg.data(), msg.size()) == 1;
}

}  // namespace qeaas::crypto
