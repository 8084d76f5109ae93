#include "qeaas/crypto/blake2s.hpp"

#include <cstring>

namespace qeaas::crypto {

namespace {

constexpr uint32_t kIV[8] = {0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
                             0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19};

constexpr uint8_t kSigma[10][16] = {
    {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15},
    {14, 10, 4, 8, 9, 15, 13, 6, 1, 12, 0, 2, 11, 7, 5, 3},
    {11, 8, 12, 0, 5, 2, 15, 13, 10, 14, 3, 6, 7, 1, 9, 4},
    {7, 9, 3, 1, 13, 12, 11, 14, 2, 6, 5, 10, 4, 0, 15, 8},
    {9, 0, 5, 7, 2, 4, 10, 15, 14, 1, 11, 12, 6, 8, 3, 13},
    {2, 12, 6, 10, 0, 11, 8, 3, 4, 13, 7, 5, 15, 14, 1, 9},
    {12, 5, 1, 15, 14, 13, 4, 10, 0, 7, 6, 3, 9, 2, 8, 11},
    {13, 11, 7, 14, 12, 1, 3, 9, 5, 0, 15, 4, 8, 6, 2, 10},
    {6, 15, 14, 9, 11, 3, 0, 8, 12, 2, 13, 7, 1, 4, 10, 5},
    {10, 2, 8, 4, 7, 6, 1, 5, 15, 11, 9, 14, 3, 12, 13, 0}};

inline uint32_t rotr(uint32_t v, int s) { return (v >> s) | (v << (32 - s)); }

inline void g(uint32_t* v, int a, int b, int c, int d, uint32_t x, uint32_t y) {
  v[a] = v[a] + v[b] + x;
  v[d] = rotr(v[d] ^ v[a], 16);
  v[c] = v[c] + v[d];
  v[b] = rotr(v[b] ^ v[c], 12);
  v[a] = v[a] + v[b] + y;
  v[d] = rotr(v[d] ^ v[a], 8);
  v[c] = v[c] + v[d];
  v[b] = rotr(v[b] ^ v[c], 7);
}

}  // namespace

Blake2s::Blake2s() {
  for (int i = 0; i < 8; i++) h_[i] = kIV[i];
  // Parameter block: digest_length=32, key_length=0, fanout=1, depth=1.
  h_[0] ^= 0x01010000 ^ kDigestBytes;
}

void Blake2s::compress(const uint8_t* block, bool last) {
  uint32_t m[16];
  for (int i = 0; i < 16; i++)
    std::memcpy(&m[i], block + 4 * i, 4);  // little-endian host assumed below
  uint32_t v[16];
  for (int i = 0; i < 8; i++) v[i] = h_[i];
  for (int i = 0; i < 8; i++) v[8 + i] = kIV[i];
  v[12] ^= static_cast<uint32_t>(total_);
  v[13] ^= static_cast<uint32_t>(total_ >> 32);
  if (last) v[14] = ~v[14];
  for (int round = 0; round < 10; round++) {
    const uint8_t* s = kSigma[round];
    g(v, 0, 4, 8, 12, m[s[0]], m[s[1]]);
    g(v, 1, 5, 9, 13, m[s[2]], m[s[3]]);
    g(v, 2, 6, 10, 14, m[s[4]], m[s[5]]);
    g(v, 3, 7, 11, 15, m[s[6]], m[s[7]]);
    g(v, 0, 5, 10, 15, m[s[8]], m[s[9]]);
    g(v, 1, 6, 11, 12, m[s[10]], m[s[11]]);
    g(v, 2, 7, 8, 13, m[s[12]], m[s[13]]);
    g(v, 3, 4, 9, 14, m[s[14]], m[s[15]]);
  }
  for (int i = 0; i < 8; i++) h_[i] ^= v[i] ^ v[8 + i];
}

void Blake2s::update(ByteView data) {
  size_t pos = 0;
  while (pos < data.size()) {
    if (buf_len_ == 64) {
      total_ += 64;
      compress(buf_.data(), false);
      buf_len_ = 0;
    }
    size_t take = std::min<size_t>(64 - buf_len_, data.size() - pos);
    std::memcpy(buf_.data() + buf_len_, data.data() + pos, take);
    buf_len_ += take;
    pos += take;
  }
}

std::array<uint8_t, Blake2s::kDigestBytes> Blake2s::finish() {
  total_ += buf_len_;
  std::memset(buf_.data() + buf_len_, 0, 64 - buf_len_);
  compress(buf_.data(), true);
  std::array<uint8_t, kDigestBytes> out;
  for (int i = 0; i < 8; i++) std::memcpy(out.data() + 4 * i, &h_[i], 4);
  return out;
}

Bytes blake2s(ByteView msg) { return blake2s({msg}); }

Bytes blake2s(std::initializer_list<ByteView> parts) {
  Blake2s b;
  for (const auto& p : parts) b.update(p);
  auto d = b.finish();
  return Bytes(d.begin(), d.end());
}

}  // namespace qeaas::crypto
