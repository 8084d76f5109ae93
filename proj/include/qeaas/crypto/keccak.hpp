#pragma once
// Keccak-f[1600] sponge with the FIPS 202 instances used by ML-KEM and
// ML-DSA: SHA3-256/512 and the SHAKE128/256 XOFs (one-shot and incremental).

#include "qeaas/bytes.hpp"

#include <array>

namespace qeaas::crypto {

// Incremental sponge. Absorb any number of times, then squeeze any number of
// times; the first squeeze closes the absorb phase with the domain pad.
class Keccak {
 public:
  Keccak(size_t rate_bytes, uint8_t domain_pad);

  void absorb(ByteView data);
  void squeeze(uint8_t* out, size_t n);
  Bytes squeeze(size_t n);

  static Keccak shake128() { return Keccak(168, 0x1f); }
  static Keccak shake256() { return Keccak(136, 0x1f); }
  static Keccak sha3_256() { return Keccak(136, 0x06); }
  static Keccak sha3_512() { return Keccak(72, 0x06); }

 private:
  void permute();

  std::array<uint64_t, 25> state_{};
  size_t rate_;
  uint8_t pad_;
  size_t offset_ = 0;  // byte cursor within the rate for the current phase
  bool squeezing_ = false;
};

Bytes sha3_256(ByteView msg);
Bytes sha3_512(ByteView msg);
Bytes shake128(ByteView msg, size_t out_len);
Bytes shake256(ByteView msg, size_t out_len);

}  // namespace qeaas::crypto
