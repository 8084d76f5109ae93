#pragma once
// HKDF-SHA256 (RFC 5869) built on hmac_sha256.

#include "qeaas/bytes.hpp"

namespace qeaas::crypto {

Bytes hkdf_extract(ByteView salt, ByteView ikm);
Bytes hkdf_expand(ByteView prk, ByteView info, size_t out_len);

}  // namespace qeaas::crypto
