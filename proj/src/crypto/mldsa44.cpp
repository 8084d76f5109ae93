#include "qeaas/crypto/mldsa44.hpp"

#include "qeaas/crypto/keccak.hpp"
#include "qeaas/crypto/random.hpp"

#include <array>
#include <cstring>
#include <optional>

namespace qeaas::crypto::mldsa44 {

namespace {

constexpr int32_t kQ = 8380417;
constexpr int kN = 256;
constexpr int kK = 4;  // rows
constexpr int kL = 4;  // columns
constexpr int32_t kEta = 2;
constexpr int kD = 13;
constexpr int kTau = 39;
constexpr int32_t kGamma1 = 1 << 17;
constexpr int32_t kGamma2 = (kQ - 1) / 88;  // 95232
constexpr int32_t kBeta = kTau * kEta;      // 78
constexpr int kOmega = 80;
constexpr size_t kCTildeBytes = 32;  // lambda/4
constexpr size_t kZPackedBytes = 576;   // 18 bits per coefficient
constexpr size_t kT1PackedBytes = 320;  // 10 bits
constexpr size_t kT0PackedBytes = 416;  // 13 bits
constexpr size_t kEtaPackedBytes = 96;  // 3 bits
constexpr size_t kW1PackedBytes = 192;  // 6 bits

using Poly = std::array<int32_t, kN>;
template <size_t Len>
using PolyN = std::array<Poly, Len>;

inline int32_t mod_q(int64_t a) {
  int64_t r = a % kQ;
  return static_cast<int32_t>(r < 0 ? r + kQ : r);
}

inline int32_t mul_q(int64_t a, int64_t b) { return mod_q(a * b); }

// Centered representative in (-q/2, q/2].
inline int32_t centered(int32_t a) { return a > (kQ - 1) / 2 ? a - kQ : a; }

inline int32_t abs_centered(int32_t a) {
  int32_t c = centered(a);
  return c < 0 ? -c : c;
}

struct Tables {
  std::array<int32_t, 256> zetas;
  int32_t n_inv;
  Tables() {
    auto modpow = [](int64_t base, int64_t exp) {
      int64_t r = 1, b = base % kQ;
      while (exp > 0) {
        if (exp & 1) r = r * b % kQ;
        b = b * b % kQ;
        exp >>= 1;
      }
      return static_cast<int32_t>(r);
    };
    auto bitrev8 = [](int x) {
      int r = 0;
      for (int b = 0; b < 8; b++)
        if (x & (1 << b)) r |= 1 << (7 - b);
      return r;
    };
    for (int i = 0; i < 256; i++) zetas[i] = modpow(1753, bitrev8(i));
    n_inv = modpow(kN, kQ - 2);
  }
};

const Tables& tables() {
  static const Tables t;
  return t;
}

void ntt(Poly& w) {
  const auto& z = tables().zetas;
  int k = 0;
  for (int len = 128; len >= 1; len >>= 1) {
    for (int start = 0; start < kN; start += 2 * len) {
      int32_t zeta = z[++k];
      for (int j = start; j < start + len; j++) {
        int32_t t = mul_q(zeta, w[j + len]);
        w[j + len] = mod_q(static_cast<int64_t>(w[j]) - t);
        w[j] = mod_q(static_cast<int64_t>(w[j]) + t);
      }
    }
  }
}

void inv_ntt(Poly& w) {
  const auto& z = tables().zetas;
  int k = 256;
  for (int len = 1; len < kN; len <<= 1) {
    for (int start = 0; start < kN; start += 2 * len) {
      int32_t zeta = kQ - z[--k];
      for (int j = start; j < start + len; j++) {
        int32_t t = w[j];
        w[j] = mod_q(static_cast<int64_t>(t) + w[j + len]);
        w[j + len] = mul_q(zeta, static_cast<int64_t>(t) - w[j + len]);
      }
    }
  }
  for (auto& c : w) c = mul_q(c, tables().n_inv);
}

Poly ntt_mul(const Poly& a, const Poly& b) {
  Poly r;
  for (int i = 0; i < kN; i++) r[i] = mul_q(a[i], b[i]);
  return r;
}

Poly poly_add(const Poly& a, const Poly& b) {
  Poly r;
  for (int i = 0; i < kN; i++) r[i] = mod_q(static_cast<int64_t>(a[i]) + b[i]);
  return r;
}

Poly poly_sub(const Poly& a, const Poly& b) {
  Poly r;
  for (int i = 0; i < kN; i++) r[i] = mod_q(static_cast<int64_t>(a[i]) - b[i]);
  return r;
}

int32_t poly_max_norm(const Poly& a) {
  int32_t m = 0;
  for (int32_t c : a) m = std::max(m, abs_centered(c));
  return m;
}

// ---- rounding -------------------------------------------------------------

void power2round(int32_t r, int32_t& r1, int32_t& r0) {
  int32_t rem = r & ((1 << kD) - 1);
  r0 = rem > (1 << (kD - 1)) ? rem - (1 << kD) : rem;
  r1 = (r - r0) >> kD;
}

void decompose(int32_t r, int32_t& r1, int32_t& r0) {
  constexpr int32_t alpha = 2 * kGamma2;
  r0 = r % alpha;
  if (r0 > alpha / 2) r0 -= alpha;
  if (r - r0 == kQ - 1) {
    r1 = 0;
    r0 -= 1;
  } else {
    r1 = (r - r0) / alpha;
  }
}

int32_t high_bits(int32_t r) {
  int32_t r1, r0;
  decompose(r, r1, r0);
  return r1;
}

int32_t low_bits(int32_t r) {
  int32_t r1, r0;
  decompose(r, r1, r0);
  return r0;
}

bool make_hint(int32_t z, int32_t r) {
  return high_bits(r) != high_bits(mod_q(static_cast<int64_t>(r) + z));
}

int32_t use_hint(bool h, int32_t r) {
  constexpr int32_t m = (kQ - 1) / (2 * kGamma2);  // 44
  int32_t r1, r0;
  decompose(r, r1, r0);
  if (!h) return r1;
  return r0 > 0 ? (r1 + 1) % m : (r1 - 1 + m) % m;
}

// ---- bit packing ------------------------------------------------------------

// Packs value_of(i) (non-negative, < 2^bits) for i = 0..255.
template <typename F>
void pack_bits(Bytes& out, int bits, F value_of) {
  uint64_t acc = 0;
  int have = 0;
  for (int i = 0; i < kN; i++) {
    acc |= static_cast<uint64_t>(value_of(i)) << have;
    have += bits;
    while (have >= 8) {
      out.push_back(static_cast<uint8_t>(acc));
      acc >>= 8;
      have -= 8;
    }
  }
}

// Unpacks 256 raw values of `bits` bits each.
std::array<uint32_t, kN> unpack_bits(ByteView in, int bits) {
  std::array<uint32_t, kN> out;
  uint64_t acc = 0;
  int have = 0;
  size_t pos = 0;
  for (int i = 0; i < kN; i++) {
    while (have < bits) {
      acc |= static_cast<uint64_t>(in[pos++]) << have;
      have += 8;
    }
    out[i] = static_cast<uint32_t>(acc & ((1ull << bits) - 1));
    acc >>= bits;
    have -= bits;
  }
  return out;
}

// ---- sampling ----------------------------------------------------------------

Poly rej_ntt_poly(ByteView seed34) {
  Keccak xof = Keccak::shake128();
  xof.absorb(seed34);
  Poly f;
  int count = 0;
  uint8_t b[3];
  while (count < kN) {
    xof.squeeze(b, 3);
    int32_t z = b[0] | (b[1] << 8) | ((b[2] & 0x7f) << 16);
    if (z < kQ) f[count++] = z;
  }
  return f;
}

Poly rej_bounded_poly(ByteView seed66) {
  Keccak xof = Keccak::shake256();
  xof.absorb(seed66);
  Poly f;
  int count = 0;
  uint8_t b;
  auto coeff = [](int z) -> std::optional<int32_t> {
    if (z < 15) return mod_q(kEta - (z % 5));
    return std::nullopt;
  };
  while (count < kN) {
    xof.squeeze(&b, 1);
    if (auto c = coeff(b & 0x0f)) f[count++] = *c;
    if (count < kN)
      if (auto c = coeff(b >> 4)) f[count++] = *c;
  }
  return f;
}

void expand_a(ByteView rho32, PolyN<kK * kL>& a) {
  for (int r = 0; r < kK; r++)
    for (int s = 0; s < kL; s++) {
      Bytes seed(rho32.begin(), rho32.end());
      seed.push_back(static_cast<uint8_t>(s));
      seed.push_back(static_cast<uint8_t>(r));
      a[r * kL + s] = rej_ntt_poly(seed);
    }
}

Poly expand_mask_poly(ByteView rho64, uint16_t nonce) {
  Bytes seed(rho64.begin(), rho64.end());
  seed.push_back(static_cast<uint8_t>(nonce));
  seed.push_back(static_cast<uint8_t>(nonce >> 8));
  Bytes v = shake256(seed, kZPackedBytes);
  auto raw = unpack_bits(v, 18);
  Poly y;
  for (int i = 0; i < kN; i++) y[i] = mod_q(static_cast<int64_t>(kGamma1) - raw[i]);
  return y;
}

Poly sample_in_ball(ByteView c_tilde) {
  Keccak xof = Keccak::shake256();
  xof.absorb(c_tilde);
  uint8_t signs[8];
  xof.squeeze(signs, 8);
  Poly c{};
  for (int i = kN - kTau; i < kN; i++) {
    uint8_t j;
    do {
      xof.squeeze(&j, 1);
    } while (j > i);
    c[i] = c[j];
    int bit = (signs[(i + kTau - kN) >> 3] >> ((i + kTau - kN) & 7)) & 1;
    c[j] = bit ? kQ - 1 : 1;
  }
  return c;
}

// ---- encodings -----------------------------------------------------------------

struct PublicKey {
  Bytes rho;
  PolyN<kK> t1;
};

struct SecretKey {
  Bytes rho, key, tr;
  PolyN<kL> s1;
  PolyN<kK> s2;
  PolyN<kK> t0;
};

Bytes pk_encode(ByteView rho, const PolyN<kK>& t1) {
  Bytes out(rho.begin(), rho.end());
  for (const auto& p : t1)
    pack_bits(out, 10, [&](int i) { return static_cast<uint32_t>(p[i]); });
  return out;
}

PublicKey pk_decode(ByteView pk) {
  PublicKey out;
  out.rho.assign(pk.begin(), pk.begin() + 32);
  for (int i = 0; i < kK; i++) {
    auto raw = unpack_bits(pk.subspan(32 + i * kT1PackedBytes, kT1PackedBytes), 10);
    for (int j = 0; j < kN; j++) out.t1[i][j] = static_cast<int32_t>(raw[j]);
  }
  return out;
}

template <size_t Len>
void pack_signed(Bytes& out, const PolyN<Len>& polys, int bits, int32_t bound) {
  for (const auto& p : polys)
    pack_bits(out, bits, [&](int i) { return static_cast<uint32_t>(bound - centered(p[i])); });
}

template <size_t Len>
void unpack_signed(PolyN<Len>& out, ByteView in, int bits, int32_t bound) {
  size_t per_poly = static_cast<size_t>(kN) * bits / 8;
  for (size_t i = 0; i < Len; i++) {
    auto raw = unpack_bits(in.subspan(i * per_poly, per_poly), bits);
    for (int j = 0; j < kN; j++)
      out[i][j] = mod_q(static_cast<int64_t>(bound) - raw[j]);
  }
}

Bytes sk_encode(const SecretKey& sk) {
  Bytes out = concat({sk.rho, sk.key, sk.tr});
  pack_signed(out, sk.s1, 3, kEta);
  pack_signed(out, sk.s2, 3, kEta);
  pack_signed(out, sk.t0, 13, 1 << (kD - 1));
  return out;
}

SecretKey sk_decode(ByteView sk) {
  SecretKey out;
  out.rho.assign(sk.begin(), sk.begin() + 32);
  out.key.assign(sk.begin() + 32, sk.begin() + 64);
  out.tr.assign(sk.begin() + 64, sk.begin() + 128);
  size_t off = 128;
  unpack_signed(out.s1, sk.subspan(off, kL * kEtaPackedBytes), 3, kEta);
  off += kL * kEtaPackedBytes;
  unpack_signed(out.s2, sk.subspan(off, kK * kEtaPackedBytes), 3, kEta);
  off += kK * kEtaPackedBytes;
  unpack_signed(out.t0, sk.subspan(off, kK * kT0PackedBytes), 13, 1 << (kD - 1));
  return out;
}

Bytes w1_encode(const PolyN<kK>& w1) {
  Bytes out;
  out.reserve(kK * kW1PackedBytes);
  for (const auto& p : w1)
    pack_bits(out, 6, [&](int i) { return static_cast<uint32_t>(p[i]); });
  return out;
}

Bytes hint_pack(const PolyN<kK>& h) {
  Bytes y(kOmega + kK, 0);
  int idx = 0;
  for (int i = 0; i < kK; i++) {
    for (int j = 0; j < kN; j++)
      if (h[i][j]) y[idx++] = static_cast<uint8_t>(j);
    y[kOmega + i] = static_cast<uint8_t>(idx);
  }
  return y;
}

std::optional<PolyN<kK>> hint_unpack(ByteView y) {
  PolyN<kK> h{};
  int idx = 0;
  for (int i = 0; i < kK; i++) {
    int end = y[kOmega + i];
    if (end < idx || end > kOmega) return std::nullopt;
    int first = idx;
    while (idx < end) {
      if (idx > first && y[idx - 1] >= y[idx]) return std::nullopt;
      h[i][y[idx]] = 1;
      idx++;
    }
  }
  for (int i = idx; i < kOmega; i++)
    if (y[i] != 0) return std::nullopt;
  return h;
}

Bytes sig_encode(ByteView c_tilde, const PolyN<kL>& z, const PolyN<kK>& h) {
  Bytes out(c_tilde.begin(), c_tilde.end());
  pack_signed(out, z, 18, kGamma1);
  Bytes hp = hint_pack(h);
  out.insert(out.end(), hp.begin(), hp.end());
  return out;
}

// ---- core algorithms ------------------------------------------------------------

KeyPair keygen_internal(ByteView xi32) {
  uint8_t kb = kK, lb = kL;
  Bytes seeds = shake256(concat({xi32, ByteView(&kb, 1), ByteView(&lb, 1)}), 128);
  ByteView rho(seeds.data(), 32), rho_prime(seeds.data() + 32, 64), key(seeds.data() + 96, 32);

  PolyN<kK * kL> a;
  expand_a(rho, a);
  SecretKey sk;
  for (int r = 0; r < kL; r++) {
    Bytes seed(rho_prime.begin(), rho_prime.end());
    seed.push_back(static_cast<uint8_t>(r));
    seed.push_back(static_cast<uint8_t>(r >> 8));
    sk.s1[r] = rej_bounded_poly(seed);
  }
  for (int r = 0; r < kK; r++) {
    Bytes seed(rho_prime.begin(), rho_prime.end());
    seed.push_back(static_cast<uint8_t>(kL + r));
    seed.push_back(static_cast<uint8_t>((kL + r) >> 8));
    sk.s2[r] = rej_bounded_poly(seed);
  }

  PolyN<kL> s1_hat = sk.s1;
  for (auto& p : s1_hat) ntt(p);
  PolyN<kK> t1;
  for (int i = 0; i < kK; i++) {
    Poly acc{};
    for (int j = 0; j < kL; j++) acc = poly_add(acc, ntt_mul(a[i * kL + j], s1_hat[j]));
    inv_ntt(acc);
    Poly t = poly_add(acc, sk.s2[i]);
    for (int n = 0; n < kN; n++) power2round(t[n], t1[i][n], sk.t0[i][n]);
    for (int n = 0; n < kN; n++) sk.t0[i][n] = mod_q(sk.t0[i][n]);
  }

  KeyPair kp;
  kp.pk = pk_encode(rho, t1);
  sk.rho.assign(rho.begin(), rho.end());
  sk.key.assign(key.begin(), key.end());
  sk.tr = shake256(kp.pk, 64);
  kp.sk = sk_encode(sk);
  return kp;
}

Bytes sign_internal(ByteView sk_bytes, ByteView m_prime, ByteView rnd32) {
  SecretKey sk = sk_decode(sk_bytes);
  PolyN<kK * kL> a;
  expand_a(sk.rho, a);
  Bytes mu = shake256(concat({sk.tr, m_prime}), 64);
  Bytes rho2 = shake256(concat({sk.key, rnd32, mu}), 64);

  PolyN<kL> s1_hat = sk.s1;
  PolyN<kK> s2_hat = sk.s2, t0_hat = sk.t0;
  for (auto& p : s1_hat) ntt(p);
  for (auto& p : s2_hat) ntt(p);
  for (auto& p : t0_hat) ntt(p);

  for (uint16_t kappa = 0;; kappa = static_cast<uint16_t>(kappa + kL)) {
    PolyN<kL> y, y_hat;
    for (int r = 0; r < kL; r++) y[r] = expand_mask_poly(rho2, static_cast<uint16_t>(kappa + r));
    y_hat = y;
    for (auto& p : y_hat) ntt(p);

    PolyN<kK> w, w1;
    for (int i = 0; i < kK; i++) {
      Poly acc{};
      for (int j = 0; j < kL; j++) acc = poly_add(acc, ntt_mul(a[i * kL + j], y_hat[j]));
      inv_ntt(acc);
      w[i] = acc;
      for (int n = 0; n < kN; n++) w1[i][n] = high_bits(w[i][n]);
    }
    Bytes c_tilde = shake256(concat({mu, w1_encode(w1)}), kCTildeBytes);
    Poly c = sample_in_ball(c_tilde);
    Poly c_hat = c;
    ntt(c_hat);

    PolyN<kL> z;
    bool ok = true;
    for (int j = 0; j < kL && ok; j++) {
      Poly cs1 = ntt_mul(c_hat, s1_hat[j]);
      inv_ntt(cs1);
      z[j] = poly_add(y[j], cs1);
      if (poly_max_norm(z[j]) >= kGamma1 - kBeta) ok = false;
    }
    if (!ok) continue;

    PolyN<kK> w_minus_cs2;
    for (int i = 0; i < kK && ok; i++) {
      Poly cs2 = ntt_mul(c_hat, s2_hat[i]);
      inv_ntt(cs2);
      w_minus_cs2[i] = poly_sub(w[i], cs2);
      Poly r0;
      for (int n = 0; n < kN; n++) r0[n] = low_bits(w_minus_cs2[i][n]);
      int32_t norm = 0;
      for (int n = 0; n < kN; n++) norm = std::max(norm, std::abs(r0[n]));
      if (norm >= kGamma2 - kBeta) ok = false;
    }
    if (!ok) continue;

    PolyN<kK> h{};
    int hint_count = 0;
    for (int i = 0; i < kK && ok; i++) {
      Poly ct0 = ntt_mul(c_hat, t0_hat[i]);
      inv_ntt(ct0);
      if (poly_max_norm(ct0) >= kGamma2) {
        ok = false;
        break;
      }
      for (int n = 0; n < kN; n++) {
        int32_t neg_ct0 = mod_q(-static_cast<int64_t>(ct0[n]));
        int32_t r = mod_q(static_cast<int64_t>(w_minus_cs2[i][n]) + ct0[n]);
        bool hint = make_hint(centered(neg_ct0), r);
        h[i][n] = hint ? 1 : 0;
        hint_count += hint;
      }
    }
    if (!ok || hint_count > kOmega) continue;

    return sig_encode(c_tilde, z, h);
  }
}

bool verify_internal(ByteView pk, ByteView m_prime, ByteView sig) {
  PublicKey pub = pk_decode(pk);
  ByteView c_tilde = sig.subspan(0, kCTildeBytes);
  PolyN<kL> z;
  unpack_signed(z, sig.subspan(kCTildeBytes, kL * kZPackedBytes), 18, kGamma1);
  auto hints = hint_unpack(sig.subspan(kCTildeBytes + kL * kZPackedBytes, kOmega + kK));
  if (!hints) return false;
  for (const auto& p : z)
    if (poly_max_norm(p) >= kGamma1 - kBeta) return false;

  PolyN<kK * kL> a;
  expand_a(pub.rho, a);
  Bytes tr = shake256(pk, 64);
  Bytes mu = shake256(concat({tr, m_prime}), 64);
  Poly c = sample_in_ball(c_tilde);
  Poly c_hat = c;
  ntt(c_hat);

  PolyN<kL> z_hat = z;
  for (auto& p : z_hat) ntt(p);

  PolyN<kK> w1;
  for (int i = 0; i < kK; i++) {
    Poly acc{};
    for (int j = 0; j < kL; j++) acc = poly_add(acc, ntt_mul(a[i * kL + j], z_hat[j]));
    Poly t1_scaled = pub.t1[i];
    for (auto& v : t1_scaled) v = mod_q(static_cast<int64_t>(v) << kD);
    ntt(t1_scaled);
    acc = poly_sub(acc, ntt_mul(c_hat, t1_scaled));
    inv_ntt(acc);
    for (int n = 0; n < kN; n++) w1[i][n] = use_hint((*hints)[i][n] != 0, acc[n]);
  }
  Bytes expect = shake256(concat({mu, w1_encode(w1)}), kCTildeBytes);
  return ct_equal(expect, c_tilde);
}

Bytes format_m_prime(ByteView msg, ByteView ctx) {
  if (ctx.size() > 255) throw Error("ml-dsa: context too long");
  Bytes m;
  m.push_back(0);
  m.push_back(static_cast<uint8_t>(ctx.size()));
  m.insert(m.end(), ctx.begin(), ctx.end());
  m.insert(m.end(), msg.begin(), msg.end());
  return m;
}

}  // namespace

KeyPair keygen_derand(ByteView xi32) {
  if (xi32.size() != kSeedBytes) throw Error("ml-dsa: bad seed length");
  return keygen_internal(xi32);
}

KeyPair keygen() { return keygen_derand(os_random(kSeedBytes)); }

Bytes sign(ByteView sk, ByteView msg, ByteView ctx) {
  if (sk.size() != kSkBytes) throw Error("ml-dsa: bad sk length");
  Bytes rnd(32, 0);  // deterministic variant
  return sign_internal(sk, format_m_prime(msg, ctx), rnd);
}

bool verify(ByteView pk, ByteView msg, ByteView sig, ByteView ctx) {
  if (pk.size() != kPkBytes || sig.size() != kSigBytes || ctx.size() > 255) return false;
  return verify_internal(pk, format_m_prime(msg, ctx), sig);
}

}  // namespace qeaas::crypto::mldsa44
