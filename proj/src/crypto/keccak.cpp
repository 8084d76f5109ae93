#include "qeaas/crypto/keccak.hpp"

namespace qeaas::crypto {

namespace {

constexpr uint64_t kRoundConstants[24] = {
    0x0000000000000001ULL, 0x0000000000008082ULL, 0x800000000000808aULL,
    0x8000000080008000ULL, 0x000000000000808bULL, 0x0000000080000001ULL,
    0x8000000080008081ULL, 0x8000000000008009ULL, 0x000000000000008aULL,
    0x0000000000000088ULL, 0x0000000080008009ULL, 0x000000008000000aULL,
    0x000000008000808bULL, 0x800000000000008bULL, 0x8000000000008089ULL,
    0x8000000000008003ULL, 0x8000000000008002ULL, 0x8000000000000080ULL,
    0x000000000000800aULL, 0x800000008000000aULL, 0x8000000080008081ULL,
    0x8000000000008080ULL, 0x0000000080000001ULL, 0x8000000080008008ULL};

constexpr int kRho[25] = {0,  1,  62, 28, 27, 36, 44, 6,  55, 20, 3,  10, 43,
                          25, 39, 41, 45, 15, 21, 8,  18, 2,  61, 56, 14};

inline uint64_t rotl(uint64_t v, int s) { return s == 0 ? v : (v << s) | (v >> (64 - s)); }

}  // namespace

Keccak::Keccak(size_t rate_bytes, uint8_t domain_pad) : rate_(rate_bytes), pad_(domain_pad) {}

void Keccak::permute() {
  auto& a = state_;
  for (int round = 0; round < 24; round++) {
    // theta
    uint64_t c[5], d[5];
    for (int x = 0; x < 5; x++)
      c[x] = a[x] ^ a[x + 5] ^ a[x + 10] ^ a[x + 15] ^ a[x + 20];
    for (int x = 0; x < 5; x++) d[x] = c[(x + 4) % 5] ^ rotl(c[(x + 1) % 5], 1);
    for (int i = 0; i < 25; i++) a[i] ^= d[i % 5];
    // rho + pi
    uint64_t b[25];
    for (int x = 0; x < 5; x++)
      for (int y = 0; y < 5; y++)
        b[y + 5 * ((2 * x + 3 * y) % 5)] = rotl(a[x + 5 * y], kRho[x + 5 * y]);
    // chi
    for (int x = 0; x < 5; x++)
      for (int y = 0; y < 5; y++)
        a[x + 5 * y] = b[x + 5 * y] ^ (~b[(x + 1) % 5 + 5 * y] & b[(x + 2) % 5 + 5 * y]);
    // iota
    a[0] ^= kRoundConstants[round];
  }
}

void Keccak::absorb(ByteView data) {
  if (squeezing_) throw std::logic_error("keccak: absorb after squeeze");
  for (uint8_t byte : data) {
    state_[offset_ / 8] ^= static_cast<uint64_t>(byte) << (8 * (offset_ % 8));
    if (++offset_ == rate_) {
      permute();
      offset_ = 0;
    }
  }
}

void Keccak::squeeze(uint8_t* out, size_t n) {
  if (!squeezing_) {
    state_[offset_ / 8] ^= static_cast<uint64_t>(pad_) << (8 * (offset_ % 8));
    state_[(rate_ - 1) / 8] ^= 0x80ULL << (8 * ((rate_ - 1) % 8));
    permute();
    offset_ = 0;
    squeezing_ = true;
  }
  for (size_t i = 0; i < n; i++) {
    if (offset_ == rate_) {
      permute();
      offset_ = 0;
    }
    out[i] = static_cast<uint8_t>(state_[offset_ / 8] >> (8 * (offset_ % 8)));
    offset_++;
  }
}

Bytes Keccak::squeeze(size_t n) {
  Bytes out(n);
  squeeze(out.data(), n);
  return out;
}

static Bytes one_shot(Keccak k, ByteView msg, size_t out_len) {
  k.absorb(msg);
  return k.squeeze(out_len);
}

Bytes sha3_256(ByteView msg) { return one_shot(Keccak::sha3_256(), msg, 32); }
Bytes sha3_512(ByteView msg) { return one_shot(Keccak::sha3_512(), msg, 64); }
Bytes shake128(ByteView msg, size_t out_len) { return one_shot(Keccak::shake128(), msg, out_len); }
Bytes shake256(ByteView msg, size_t out_len) { return one_shot(Keccak::shake256(), msg, out_len); }

}  // namespace qeaas::crypto
