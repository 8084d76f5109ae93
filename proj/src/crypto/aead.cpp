#include "qeaas/crypto/aead.hpp"

#include <openssl/evp.h>

#include <memory>
#include <stdexcept>

namespace qeaas::crypto {

namespace {
struct CtxFree {
  void operator()(EVP_CIPHER_CTX* c) const { EVP_CIPHER_CTX_free(c); }
};
using CtxPtr = std::unique_ptr<EVP_CIPHER_CTX, CtxFree>;

void check(int ok, const char* what) {
  if (ok != 1) throw std::runtime_error(std::string("aes-gcm: ") + what);
}
}  // namespace

Bytes aes128gcm_seal(ByteView key, ByteView iv, ByteView aad, ByteView plaintext) {
  if (key.size() != kAesGcmKeyBytes || iv.size() != kAesGcmIvBytes)
    throw std::invalid_argument("aes-gcm: bad key/iv size");
  CtxPtr ctx(EVP_CIPHER_CTX_new());
  check(ctx != nullptr, "ctx");
  check(EVP_EncryptInit_ex(ctx.get(), EVP_aes_128_gcm(), nullptr, key.data(), iv.data()), "init");
  int len = 0;
  if (!aad.empty())
    check(EVP_EncryptUpdate(ctx.get(), nullptr, &len, aad.data(), static_cast<int>(aad.size())),
          "aad");
  Bytes out(plaintext.size() + kAesGcmTagBytes);
  if (!plaintext.empty())
    check(EVP_EncryptUpdate(ctx.get(), out.data(), &len, plaintext.data(),
                            static_cast<int>(plaintext.size())),
          "update");
  int fin = 0;
  check(EVP_EncryptFinal_ex(ctx.get(), out.data() + len, &fin), "final");
  check(EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, kAesGcmTagBytes,
                            out.data() + plaintext.size()),
        "tag");
  return out;
}

std::optional<Bytes> aes128gcm_open(ByteView key, ByteView iv, ByteView aad,
                                    ByteView ciphertext_and_tag) {
  if (key.size() != kAesGcmKeyBytes || iv.size() != kAesGcmIvBytes)
    throw std::invalid_argument("aes-gcm: bad key/iv size");
  if (ciphertext_and_tag.size() < kAesGcmTagBytes) return std::nullopt;
  size_t ct_len = ciphertext_and_tag.size() - kAesGcmTagBytes;
  CtxPtr ctx(EVP_CIPHER_CTX_new());
  check(ctx != nullptr, "ctx");
  check(EVP_DecryptInit_ex(ctx.get(), EVP_aes_128_gcm(), nullptr, key.data(), iv.data()), "init");
  int len = 0;
  if (!aad.empty())
    check(EVP_DecryptUpdate(ctx.get(), nullptr, &len, aad.data(), static_cast<int>(aad.size())),
          "aad");
  Bytes out(ct_len);
  if (ct_len > 0)
    check(EVP_DecryptUpdate(ctx.get(), out.data(), &len, ciphertext_and_tag.data(),
                            static_cast<int>(ct_len)),
          "update");
  Bytes tag(ciphertext_and_tag.begin() + ct_len, ciphertext_and_tag.end());
  check(EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, kAesGcmTagBytes, tag.data()), "tag");
  int fin = 0;
  if (EVP_DecryptFinal_ex(ctx.get(), out.data() + len, &fin) != 1) return std::nullopt;
  return out;
}

}  // namespace qeaas::crypto
