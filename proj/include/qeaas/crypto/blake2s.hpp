#pragma once
// BLAKE2s-256 (RFC 7693, unkeyed) — the pool's mixing primitive.

#include "qeaas/bytes.hpp"

#include <array>

namespace qeaas::crypto {

class Blake2s {
 public:
  static constexpr size_t kDigestBytes = 32;

  Blake2s();
  void update(ByteView data);
  std::array<uint8_t, kDigestBytes> finish();

 private:
  void compress(const uint8_t* block, bool last);

  std::array<uint32_t, 8> h_;
  uint64_t total_ = 0;  // bytes fed into compress so far
  std::array<uint8_t, 64> buf_{};
  size_t buf_len_ = 0;
};

Bytes blake2s(ByteView msg);
Bytes blake2s(std::initializer_list<ByteView> parts);

}  // namespace qeaas::crypto
