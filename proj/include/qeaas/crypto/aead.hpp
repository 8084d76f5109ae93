#pragma once
// AES-128-GCM (OpenSSL-backed) with the tag appended to the ciphertext.

#include "qeaas/bytes.hpp"

#include <optional>

namespace qeaas::crypto {

constexpr size_t kAesGcmKeyBytes = 16;
constexpr size_t kAesGcmIvBytes = 12;
constexpr size_t kAesGcmTagBytes = 16;

// Returns ciphertext ‖ 16-byte tag.
Bytes aes128gcm_seal(ByteView key, ByteView iv, ByteView aad, ByteView plaintext);

// Returns nullopt on authentication failure.
std::optional<Bytes> aes128gcm_open(ByteView key, ByteView iv, ByteView aad,
                                    ByteView ciphertext_and_tag);

}  // namespace qeaas::crypto
