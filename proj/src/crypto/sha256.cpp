#include "qeaas/crypto/sha256.hpp"

#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <stdexcept>

namespace qeaas::crypto {

struct Sha256::Impl {
  EVP_MD_CTX* ctx = nullptr;
};

static void throw_ssl(const char* what) { throw std::runtime_error(std::string("openssl: ") + what); }

Sha256::Sha256() : impl_(new Impl) {
  impl_->ctx = EVP_MD_CTX_new();
  if (!impl_->ctx || EVP_DigestInit_ex(impl_->ctx, EVP_sha256(), nullptr) != 1)
    throw_ssl("sha256 init");
}

Sha256::Sha256(const Sha256& other) : impl_(new Impl) {
  impl_->ctx = EVP_MD_CTX_new();
  if (!impl_->ctx || EVP_MD_CTX_copy_ex(impl_->ctx, other.impl_->ctx) != 1)
    throw_ssl("sha256 copy");
}

Sha256& Sha256::operator=(const Sha256& other) {
  if (this != &other && EVP_MD_CTX_copy_ex(impl_->ctx, other.impl_->ctx) != 1)
    throw_ssl("sha256 copy");
  return *this;
}

Sha256::~Sha256() {
  if (impl_ && impl_->ctx) EVP_MD_CTX_free(impl_->ctx);
}

void Sha256::update(ByteView data) {
  if (EVP_DigestUpdate(impl_->ctx, data.data(), data.size()) != 1) throw_ssl("sha256 update");
}

Bytes Sha256::finish() const {
  Sha256 copy(*this);
  Bytes out(32);
  unsigned len = 0;
  if (EVP_DigestFinal_ex(copy.impl_->ctx, out.data(), &len) != 1 || len != 32)
    throw_ssl("sha256 final");
  return out;
}

Bytes sha256(ByteView msg) { return sha256({msg}); }

Bytes sha256(std::initializer_list<ByteView> parts) {
  Sha256 h;
  for (const auto& p : parts) h.update(p);
  return h.finish();
}

Bytes hmac_sha256(ByteView key, ByteView msg) { return hmac_sha256(key, {msg}); }

Bytes hmac_sha256(ByteView key, std::initializer_list<ByteView> parts) {
  Bytes msg = concat(parts);
  Bytes out(32);
  unsigned len = 0;
  if (!HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), msg.data(), msg.size(),
            out.data(), &len) ||
      len != 32)
    throw_ssl("hmac");
  return out;
}

}  // namespace qeaas::crypto
