#include "qeaas/crypto/mlkem512.hpp"

#include "qeaas/crypto/keccak.hpp"
#include "qeaas/crypto/random.hpp"

#include <array>
#include <cstring>

namespace qeaas::crypto::mlkem512 {

namespace {

constexpr int kN = 256;
constexpr int kQ = 3329;
constexpr int kK = 2;       // module rank
constexpr int kEta1 = 3;
constexpr int kEta2 = 2;
constexpr int kDu = 10;
constexpr int kDv = 4;
constexpr int kPolyBytes = 384;  // 12-bit packing

using Poly = std::array<int16_t, kN>;
using PolyVec = std::array<Poly, kK>;

inline int16_t mod_q(int32_t a) {
  int32_t r = a % kQ;
  return static_cast<int16_t>(r < 0 ? r + kQ : r);
}

inline int16_t mul_q(int32_t a, int32_t b) { return mod_q(a * b); }

// ---- NTT tables ---------------------------------------------------------
// zetas[i] = 17^bitrev7(i) mod q; gammas[i] = 17^(2*bitrev7(i)+1) mod q.

struct Tables {
  std::array<int16_t, 128> zetas;
  std::array<int16_t, 128> gammas;
  Tables() {
    auto bitrev7 = [](int x) {
      int r = 0;
      for (int b = 0; b < 7; b++)
        if (x & (1 << b)) r |= 1 << (6 - b);
      return r;
    };
    std::array<int16_t, 256> pow17;
    pow17[0] = 1;
    for (int i = 1; i < 256; i++) pow17[i] = mul_q(pow17[i - 1], 17);
    for (int i = 0; i < 128; i++) {
      zetas[i] = pow17[bitrev7(i)];
      gammas[i] = pow17[(2 * bitrev7(i) + 1) % 256];
    }
  }
};

const Tables& tables() {
  static const Tables t;
  return t;
}

void ntt(Poly& f) {
  const auto& z = tables().zetas;
  int i = 1;
  for (int len = 128; len >= 2; len >>= 1) {
    for (int start = 0; start < kN; start += 2 * len) {
      int16_t zeta = z[i++];
      for (int j = start; j < start + len; j++) {
        int16_t t = mul_q(zeta, f[j + len]);
        f[j + len] = mod_q(f[j] - t);
        f[j] = mod_q(f[j] + t);
      }
    }
  }
}

void inv_ntt(Poly& f) {
  const auto& z = tables().zetas;
  int i = 127;
  for (int len = 2; len <= 128; len <<= 1) {
    for (int start = 0; start < kN; start += 2 * len) {
      int16_t zeta = z[i--];
      for (int j = start; j < start + len; j++) {
        int16_t t = f[j];
        f[j] = mod_q(t + f[j + len]);
        f[j + len] = mul_q(zeta, f[j + len] - t);
      }
    }
  }
  for (auto& c : f) c = mul_q(c, 3303);  // 128^-1 mod q
}

// Pointwise product in the NTT domain (pairs of coefficients per FIPS 203).
Poly ntt_mul(const Poly& a, const Poly& b) {
  const auto& g = tables().gammas;
  Poly h;
  for (int i = 0; i < 128; i++) {
    int32_t a0 = a[2 * i], a1 = a[2 * i + 1];
    int32_t b0 = b[2 * i], b1 = b[2 * i + 1];
    h[2 * i] = mod_q(static_cast<int32_t>(a0 * b0 % kQ) + static_cast<int32_t>(a1 * b1 % kQ) * g[i]);
    h[2 * i + 1] = mod_q(a0 * b1 + a1 * b0);
  }
  return h;
}

Poly poly_add(const Poly& a, const Poly& b) {
  Poly r;
  for (int i = 0; i < kN; i++) r[i] = mod_q(a[i] + b[i]);
  return r;
}

Poly poly_sub(const Poly& a, const Poly& b) {
  Poly r;
  for (int i = 0; i < kN; i++) r[i] = mod_q(a[i] - b[i]);
  return r;
}

// ---- sampling ------------------------------------------------------------

Poly sample_ntt(ByteView seed34) {
  Keccak xof = Keccak::shake128();
  xof.absorb(seed34);
  Poly f;
  int count = 0;
  uint8_t c[3];
  while (count < kN) {
    xof.squeeze(c, 3);
    int d1 = c[0] + 256 * (c[1] & 0x0f);
    int d2 = (c[1] >> 4) + 16 * c[2];
    if (d1 < kQ) f[count++] = static_cast<int16_t>(d1);
    if (d2 < kQ && count < kN) f[count++] = static_cast<int16_t>(d2);
  }
  return f;
}

template <int Eta>
Poly sample_cbd(ByteView b) {
  Poly f;
  auto bit = [&](size_t i) { return (b[i >> 3] >> (i & 7)) & 1; };
  for (int i = 0; i < kN; i++) {
    int x = 0, y = 0;
    for (int j = 0; j < Eta; j++) {
      x += bit(2 * i * Eta + j);
      y += bit(2 * i * Eta + Eta + j);
    }
    f[i] = mod_q(x - y);
  }
  return f;
}

Bytes prf(int eta, ByteView s32, uint8_t b) {
  Bytes in = concat({s32, ByteView(&b, 1)});
  return shake256(in, 64 * static_cast<size_t>(eta));
}

// ---- encodings -----------------------------------------------------------

void byte_encode12(const Poly& f, Bytes& out) {
  for (int i = 0; i < kN; i += 2) {
    uint16_t a = static_cast<uint16_t>(f[i]);
    uint16_t b = static_cast<uint16_t>(f[i + 1]);
    out.push_back(static_cast<uint8_t>(a));
    out.push_back(static_cast<uint8_t>((a >> 8) | (b << 4)));
    out.push_back(static_cast<uint8_t>(b >> 4));
  }
}

// Per FIPS 203, 12-bit decoding reduces values mod q; canonicity is enforced
// separately by the encaps input check (re-encode must reproduce the input).
Poly byte_decode12(ByteView b) {
  Poly f;
  for (int i = 0; i < kN / 2; i++) {
    uint16_t lo = static_cast<uint16_t>(b[3 * i] | ((b[3 * i + 1] & 0x0f) << 8));
    uint16_t hi = static_cast<uint16_t>((b[3 * i + 1] >> 4) | (b[3 * i + 2] << 4));
    f[2 * i] = static_cast<int16_t>(lo % kQ);
    f[2 * i + 1] = static_cast<int16_t>(hi % kQ);
  }
  return f;
}

template <int D>
void pack_bits(const Poly& f, Bytes& out) {
  uint32_t acc = 0;
  int bits = 0;
  for (int i = 0; i < kN; i++) {
    acc |= static_cast<uint32_t>(f[i]) << bits;
    bits += D;
    while (bits >= 8) {
      out.push_back(static_cast<uint8_t>(acc));
      acc >>= 8;
      bits -= 8;
    }
  }
}

template <int D>
Poly unpack_bits(ByteView in) {
  Poly f;
  uint32_t acc = 0;
  int bits = 0;
  size_t pos = 0;
  for (int i = 0; i < kN; i++) {
    while (bits < D) {
      acc |= static_cast<uint32_t>(in[pos++]) << bits;
      bits += 8;
    }
    f[i] = static_cast<int16_t>(acc & ((1u << D) - 1));
    acc >>= D;
    bits -= D;
  }
  return f;
}

template <int D>
int16_t compress(int16_t x) {
  // round(2^d / q * x) mod 2^d, round-half-up
  uint32_t v = ((static_cast<uint32_t>(x) << (D + 1)) + kQ) / (2 * kQ);
  return static_cast<int16_t>(v & ((1u << D) - 1));
}

template <int D>
int16_t decompress(int16_t y) {
  return static_cast<int16_t>((static_cast<uint32_t>(y) * kQ + (1u << (D - 1))) >> D);
}

template <int D>
Poly compress_poly(const Poly& f) {
  Poly r;
  for (int i = 0; i < kN; i++) r[i] = compress<D>(f[i]);
  return r;
}

template <int D>
Poly decompress_poly(const Poly& f) {
  Poly r;
  for (int i = 0; i < kN; i++) r[i] = decompress<D>(f[i]);
  return r;
}

// ---- K-PKE ---------------------------------------------------------------

struct Matrix {
  Poly a[kK][kK];
};

Matrix expand_a(ByteView rho32) {
  Matrix m;
  for (int i = 0; i < kK; i++)
    for (int j = 0; j < kK; j++) {
      Bytes seed(rho32.begin(), rho32.end());
      seed.push_back(static_cast<uint8_t>(j));
      seed.push_back(static_cast<uint8_t>(i));
      m.a[i][j] = sample_ntt(seed);
    }
  return m;
}

struct PkeKeyPair {
  Bytes ek;  // 768 + 32
  Bytes dk;  // 768
};

PkeKeyPair pke_keygen(ByteView d32) {
  uint8_t k_byte = kK;
  Bytes g = sha3_512(concat({d32, ByteView(&k_byte, 1)}));
  ByteView rho(g.data(), 32), sigma(g.data() + 32, 32);
  Matrix a = expand_a(rho);
  uint8_t n = 0;
  PolyVec s, e;
  for (int i = 0; i < kK; i++) s[i] = sample_cbd<kEta1>(prf(kEta1, sigma, n++));
  for (int i = 0; i < kK; i++) e[i] = sample_cbd<kEta1>(prf(kEta1, sigma, n++));
  for (auto& p : s) ntt(p);
  for (auto& p : e) ntt(p);
  PolyVec t;
  for (int i = 0; i < kK; i++) {
    t[i] = e[i];
    for (int j = 0; j < kK; j++) t[i] = poly_add(t[i], ntt_mul(a.a[i][j], s[j]));
  }
  PkeKeyPair kp;
  for (const auto& p : t) byte_encode12(p, kp.ek);
  kp.ek.insert(kp.ek.end(), rho.begin(), rho.end());
  for (const auto& p : s) byte_encode12(p, kp.dk);
  return kp;
}

Bytes pke_encrypt(ByteView ek, ByteView m32, ByteView r32) {
  PolyVec t_hat;
  for (int i = 0; i < kK; i++)
    t_hat[i] = byte_decode12(ek.subspan(static_cast<size_t>(i) * kPolyBytes, kPolyBytes));
  ByteView rho = ek.subspan(kK * kPolyBytes, 32);
  Matrix a = expand_a(rho);
  uint8_t n = 0;
  PolyVec y, e1;
  for (int i = 0; i < kK; i++) y[i] = sample_cbd<kEta1>(prf(kEta1, r32, n++));
  for (int i = 0; i < kK; i++) e1[i] = sample_cbd<kEta2>(prf(kEta2, r32, n++));
  Poly e2 = sample_cbd<kEta2>(prf(kEta2, r32, n++));
  for (auto& p : y) ntt(p);
  PolyVec u;
  for (int i = 0; i < kK; i++) {
    Poly acc{};
    for (int j = 0; j < kK; j++) acc = poly_add(acc, ntt_mul(a.a[j][i], y[j]));  // A^T
    inv_ntt(acc);
    u[i] = poly_add(acc, e1[i]);
  }
  Poly mu = decompress_poly<1>(unpack_bits<1>(m32));
  Poly v{};
  for (int i = 0; i < kK; i++) v = poly_add(v, ntt_mul(t_hat[i], y[i]));
  inv_ntt(v);
  v = poly_add(poly_add(v, e2), mu);
  Bytes c;
  c.reserve(kCtBytes);
  for (int i = 0; i < kK; i++) pack_bits<kDu>(compress_poly<kDu>(u[i]), c);
  pack_bits<kDv>(compress_poly<kDv>(v), c);
  return c;
}

Bytes pke_decrypt(ByteView dk, ByteView ct) {
  constexpr size_t u_bytes = 32 * kDu;  // 320 per polynomial
  PolyVec u;
  for (int i = 0; i < kK; i++)
    u[i] = decompress_poly<kDu>(unpack_bits<kDu>(ct.subspan(static_cast<size_t>(i) * u_bytes, u_bytes)));
  Poly v = decompress_poly<kDv>(unpack_bits<kDv>(ct.subspan(kK * u_bytes, 32 * kDv)));
  PolyVec s;
  for (int i = 0; i < kK; i++)
    s[i] = byte_decode12(dk.subspan(static_cast<size_t>(i) * kPolyBytes, kPolyBytes));
  Poly acc{};
  for (int i = 0; i < kK; i++) {
    ntt(u[i]);
    acc = poly_add(acc, ntt_mul(s[i], u[i]));
  }
  inv_ntt(acc);
  Poly w = poly_sub(v, acc);
  Bytes m;
  pack_bits<1>(compress_poly<1>(w), m);
  return m;
}

void check_seed(ByteView s, const char* what) {
  if (s.size() != kSeedBytes) throw Error(std::string("ml-kem: bad seed length for ") + what);
}

}  // namespace

KeyPair keygen_derand(ByteView d32, ByteView z32) {
  check_seed(d32, "d");
  check_seed(z32, "z");
  PkeKeyPair pke = pke_keygen(d32);
  KeyPair kp;
  kp.ek = pke.ek;
  kp.dk = concat({pke.dk, pke.ek, sha3_256(pke.ek), z32});
  return kp;
}

KeyPair keygen() {
  Bytes d = os_random(32), z = os_random(32);
  return keygen_derand(d, z);
}

Encapsulation encaps_derand(ByteView ek, ByteView m32) {
  check_seed(m32, "m");
  if (ek.size() != kEkBytes) throw Error("ml-kem: bad ek length");
  // Modulus check: every 12-bit coefficient must be canonical (< q).
  Bytes reenc;
  reenc.reserve(kK * kPolyBytes);
  for (int i = 0; i < kK; i++)
    byte_encode12(byte_decode12(ek.subspan(static_cast<size_t>(i) * kPolyBytes, kPolyBytes)), reenc);
  if (!std::equal(reenc.begin(), reenc.end(), ek.begin())) throw Error("ml-kem: ek not canonical");

  Bytes g = sha3_512(concat({m32, sha3_256(ek)}));
  Encapsulation out;
  out.ss.assign(g.begin(), g.begin() + 32);
  ByteView r(g.data() + 32, 32);
  out.ct = pke_encrypt(ek, m32, r);
  return out;
}

Encapsulation encaps(ByteView ek) { return encaps_derand(ek, os_random(32)); }

Bytes decaps(ByteView dk, ByteView ct) {
  if (dk.size() != kDkBytes) throw Error("ml-kem: bad dk length");
  if (ct.size() != kCtBytes) throw Error("ml-kem: bad ct length");
  ByteView dk_pke = dk.subspan(0, kK * kPolyBytes);
  ByteView ek = dk.subspan(kK * kPolyBytes, kEkBytes);
  ByteView h = dk.subspan(kK * kPolyBytes + kEkBytes, 32);
  ByteView z = dk.subspan(kK * kPolyBytes + kEkBytes + 32, 32);
  if (!ct_equal(sha3_256(ek), h)) throw Error("ml-kem: dk hash mismatch");

  Bytes m = pke_decrypt(dk_pke, ct);
  Bytes g = sha3_512(concat({m, h}));
  Bytes k_good(g.begin(), g.begin() + 32);
  ByteView r(g.data() + 32, 32);
  Bytes k_bad = shake256(concat({z, ct}), 32);
  Bytes ct2 = pke_encrypt(ek, m, r);

  // Constant-time-style select between K and the implicit-rejection key.
  uint8_t diff = 0;
  for (size_t i = 0; i < ct.size(); i++) diff |= ct[i] ^ ct2[i];
  uint8_t mask = static_cast<uint8_t>(-static_cast<int8_t>(diff != 0));  // 0x00 or 0xff
  Bytes ss(kSsBytes);
  for (size_t i = 0; i < kSsBytes; i++)
    ss[i] = static_cast<uint8_t>((k_good[i] & ~mask) | (k_bad[i] & mask));
  return ss;
}

}  // namespace qeaas::crypto::mlkem512
