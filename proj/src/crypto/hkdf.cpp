#include "qeaas/crypto/hkdf.hpp"

#include "qeaas/crypto/sha256.hpp"

#include <stdexcept>

namespace qeaas::crypto {

Bytes hkdf_extract(ByteView salt, ByteView ikm) { return hmac_sha256(salt, ikm); }

Bytes hkdf_expand(ByteView prk, ByteView info, size_t out_len) {
  if (out_len > 255 * 32) throw std::invalid_argument("hkdf: output too long");
  Bytes out;
  out.reserve(out_len);
  Bytes t;
  uint8_t counter = 1;
  while (out.size() < out_len) {
    t = hmac_sha256(prk, {t, info, ByteView(&counter, 1)});
    size_t take = std::min<size_t>(t.size(), out_len - out.size());
    out.insert(out.end(), t.begin(), t.begin() + take);
    counter++;
  }
  return out;
}

}  // namespace qeaas::crypto
