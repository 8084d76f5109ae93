#include "qeaas/pqch/wire.hpp"

#include <algorithm>
#include <cassert>

namespace qeaas::pqch {

namespace {

void put_u24(Bytes& out, uint32_t v) {
  out.push_back(static_cast<uint8_t>(v >> 16));
  out.push_back(static_cast<uint8_t>(v >> 8));
  out.push_back(static_cast<uint8_t>(v));
}

class Cursor {
 public:
  explicit Cursor(ByteView data) : data_(data) {}

  uint8_t u8() { return take(1)[0]; }
  uint16_t u16() {
    auto b = take(2);
    return static_cast<uint16_t>((b[0] << 8) | b[1]);
  }
  uint32_t u24() {
    auto b = take(3);
    return (static_cast<uint32_t>(b[0]) << 16) | (static_cast<uint32_t>(b[1]) << 8) | b[2];
  }
  uint64_t u48() {
    uint64_t v = 0;
    auto b = take(6);
    for (size_t i = 0; i < 6; ++i) v = (v << 8) | b[i];
    return v;
  }
  Bytes bytes(size_t n) {
    auto b = take(n);
    return Bytes(b.begin(), b.end());
  }
  size_t remaining() const { return data_.size() - pos_; }
  void expect_end(const char* what) const {
    if (remaining() != 0) throw WireError(std::string("trailing bytes after ") + what);
  }

 private:
  ByteView take(size_t n) {
    if (remaining() < n) throw WireError("truncated message");
    ByteView v = data_.subspan(pos_, n);
    pos_ += n;
    return v;
  }
  ByteView data_;
  size_t pos_ = 0;
};

bool valid_kex(uint8_t v) { return v >= 1 && v <= 3; }
bool valid_sig(uint8_t v) { return v >= 1 && v <= 2; }
bool valid_verify(uint8_t v) { return v <= 1; }
bool valid_msg_type(uint8_t v) { return v >= 1 && v <= 8; }

}  // namespace

std::string to_string(KexAlg k) {
  switch (k) {
    case KexAlg::MLKEM512: return "mlkem512";
    case KexAlg::X25519: return "x25519";
    case KexAlg::P256: return "p256";
  }
  return "?";
}

std::string to_string(SigAlg s) {
  switch (s) {
    case SigAlg::MLDSA44: return "mldsa44";
    case SigAlg::ECDSA_P256: return "ecdsa-p256";
  }
  return "?";
}

std::string to_string(VerifyMode v) {
  return v == VerifyMode::FullChain ? "full-chain" : "no-verify";
}

std::optional<KexAlg> kex_from_string(std::string_view s) {
  if (s == "mlkem512" || s == "ml-kem-512") return KexAlg::MLKEM512;
  if (s == "x25519") return KexAlg::X25519;
  if (s == "p256" || s == "secp256r1") return KexAlg::P256;
  return std::nullopt;
}

std::optional<SigAlg> sig_from_string(std::string_view s) {
  if (s == "mldsa44" || s == "ml-dsa-44") return SigAlg::MLDSA44;
  if (s == "ecdsa-p256" || s == "ecdsa") return SigAlg::ECDSA_P256;
  return std::nullopt;
}

std::optional<VerifyMode> verify_from_string(std::string_view s) {
  if (s == "no-verify" || s == "none") return VerifyMode::NoVerify;
  if (s == "full-chain" || s == "full") return VerifyMode::FullChain;
  return std::nullopt;
}

void HandshakeConfig::validate() const {
  if (mtu_bytes < 512) throw std::invalid_argument("mtu_bytes must be >= 512");
  if (mtu_bytes > 65535) throw std::invalid_argument("mtu_bytes must fit a datagram");
}

Bytes record_header(RecordType type, uint16_t epoch, uint64_t seq, size_t body_len) {
  if (seq >> 48) throw WireError("record sequence number exhausted");
  if (body_len > 65535) throw WireError("record body too large");
  Bytes h;
  h.reserve(kRecordHeaderBytes);
  h.push_back(static_cast<uint8_t>(type));
  h.push_back(static_cast<uint8_t>(epoch >> 8));
  h.push_back(static_cast<uint8_t>(epoch));
  for (int i = 5; i >= 0; --i) h.push_back(static_cast<uint8_t>(seq >> (8 * i)));
  h.push_back(static_cast<uint8_t>(body_len >> 8));
  h.push_back(static_cast<uint8_t>(body_len));
  return h;
}

Bytes encode_record(RecordType type, uint16_t epoch, uint64_t seq, ByteView body) {
  Bytes out = record_header(type, epoch, seq, body.size());
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

std::vector<Record> split_datagram(ByteView dgram) {
  std::vector<Record> records;
  Cursor c(dgram);
  if (c.remaining() == 0) throw WireError("empty datagram");
  while (c.remaining() > 0) {
    uint8_t t = c.u8();
    if (t < 0x01 || t > 0x03) throw WireError("unknown record type");
    Record r;
    r.type = static_cast<RecordType>(t);
    r.epoch = c.u16();
    r.seq = c.u48();
    uint16_t len = c.u16();
    r.body = c.bytes(len);
    records.push_back(std::move(r));
  }
  return records;
}

Bytes encode_fragment(const Fragment& frag) {
  Bytes out;
  out.reserve(kFragmentHeaderBytes + frag.bytes.size());
  out.push_back(static_cast<uint8_t>(frag.msg_type));
  put_u24(out, frag.total_length);
  put_u24(out, frag.frag_offset);
  put_u24(out, static_cast<uint32_t>(frag.bytes.size()));
  out.insert(out.end(), frag.bytes.begin(), frag.bytes.end());
  return out;
}

Fragment decode_fragment(ByteView record_body) {
  Cursor c(record_body);
  uint8_t t = c.u8();
  if (!valid_msg_type(t)) throw WireError("unknown handshake message type");
  Fragment f;
  f.msg_type = static_cast<MsgType>(t);
  f.total_length = c.u24();
  f.frag_offset = c.u24();
  uint32_t frag_len = c.u24();
  if (f.total_length > kMaxHandshakeMessageBytes) throw WireError("handshake message too large");
  if (frag_len > f.total_length || f.frag_offset > f.total_length - frag_len)
    throw WireError("fragment exceeds message bounds");
  if (frag_len == 0 && f.total_length != 0) throw WireError("empty fragment");
  f.bytes = c.bytes(frag_len);
  c.expect_end("handshake fragment");
  return f;
}

std::vector<Bytes> fragment_message(const HandshakeMessage& msg, size_t mtu, uint64_t& seq) {
  const size_t overhead = kRecordHeaderBytes + kFragmentHeaderBytes;
  if (mtu <= overhead) throw WireError("mtu too small for a handshake fragment");
  const size_t fill = mtu - overhead;
  std::vector<Bytes> records;
  size_t offset = 0;
  do {
    size_t n = std::min(fill, msg.body.size() - offset);
    Fragment f;
    f.msg_type = msg.type;
    f.total_length = static_cast<uint32_t>(msg.body.size());
    f.frag_offset = static_cast<uint32_t>(offset);
    f.bytes.assign(msg.body.begin() + static_cast<ptrdiff_t>(offset),
                   msg.body.begin() + static_cast<ptrdiff_t>(offset + n));
    records.push_back(encode_record(RecordType::Handshake, 0, seq++, encode_fragment(f)));
    offset += n;
  } while (offset < msg.body.size());
  return records;
}

std::optional<HandshakeMessage> Reassembler::feed(const Fragment& frag) {
  auto [it, inserted] = partials_.try_emplace(static_cast<uint8_t>(frag.msg_type));
  Partial& p = it->second;
  if (inserted) {
    p.buffer.resize(frag.total_length);
    p.have.assign(frag.total_length, false);
    p.missing = frag.total_length;
  } else if (p.buffer.size() != frag.total_length) {
    throw WireError("fragments disagree on message length");
  }
  for (size_t i = 0; i < frag.bytes.size(); ++i) {
    size_t pos = frag.frag_offset + i;
    if (!p.have[pos]) {
      p.have[pos] = true;
      --p.missing;
    }
    p.buffer[pos] = frag.bytes[i];
  }
  if (p.missing > 0) return std::nullopt;
  HandshakeMessage msg{frag.msg_type, std::move(p.buffer)};
  partials_.erase(it);
  return msg;
}

Bytes encode_hello(const HelloBody& h) {
  if (h.random.size() != kRandomBytes) throw WireError("hello random must be 32 bytes");
  if (h.cookie.size() > 65535 || h.kex_share.size() > 65535) throw WireError("hello field too large");
  Bytes out;
  out.reserve(kRandomBytes + 7 + h.cookie.size() + h.kex_share.size());
  out.insert(out.end(), h.random.begin(), h.random.end());
  out.push_back(static_cast<uint8_t>(h.kex));
  out.push_back(static_cast<uint8_t>(h.sig));
  out.push_back(static_cast<uint8_t>(h.verify_mode));
  put_be(out, h.cookie.size(), 2);
  out.insert(out.end(), h.cookie.begin(), h.cookie.end());
  put_be(out, h.kex_share.size(), 2);
  out.insert(out.end(), h.kex_share.begin(), h.kex_share.end());
  return out;
}

HelloBody decode_hello(ByteView body) {
  Cursor c(body);
  HelloBody h;
  h.random = c.bytes(kRandomBytes);
  uint8_t kex = c.u8(), sig = c.u8(), verify = c.u8();
  if (!valid_kex(kex)) throw WireError("unknown key-exchange algorithm");
  if (!valid_sig(sig)) throw WireError("unknown signature algorithm");
  if (!valid_verify(verify)) throw WireError("unknown verify mode");
  h.kex = static_cast<KexAlg>(kex);
  h.sig = static_cast<SigAlg>(sig);
  h.verify_mode = static_cast<VerifyMode>(verify);
  h.cookie = c.bytes(c.u16());
  h.kex_share = c.bytes(c.u16());
  c.expect_end("hello");
  return h;
}

Bytes encode_hrr_body(ByteView cookie) {
  if (cookie.size() > 65535) throw WireError("cookie too large");
  Bytes out;
  put_be(out, cookie.size(), 2);
  out.insert(out.end(), cookie.begin(), cookie.end());
  return out;
}

Bytes decode_hrr_body(ByteView body) {
  Cursor c(body);
  Bytes cookie = c.bytes(c.u16());
  c.expect_end("hello retry");
  return cookie;
}

Bytes encode_server_hello(const ServerHelloBody& h) {
  if (h.random.size() != kRandomBytes) throw WireError("server random must be 32 bytes");
  if (h.kex_payload.size() > 65535) throw WireError("kex payload too large");
  Bytes out;
  out.insert(out.end(), h.random.begin(), h.random.end());
  out.push_back(static_cast<uint8_t>(h.kex));
  put_be(out, h.kex_payload.size(), 2);
  out.insert(out.end(), h.kex_payload.begin(), h.kex_payload.end());
  return out;
}

ServerHelloBody decode_server_hello(ByteView body) {
  Cursor c(body);
  ServerHelloBody h;
  h.random = c.bytes(kRandomBytes);
  uint8_t kex = c.u8();
  if (!valid_kex(kex)) throw WireError("unknown key-exchange algorithm");
  h.kex = static_cast<KexAlg>(kex);
  h.kex_payload = c.bytes(c.u16());
  c.expect_end("server hello");
  return h;
}

Bytes encode_cert_chain_body(const std::vector<Bytes>& chain_tlvs) {
  if (chain_tlvs.empty() || chain_tlvs.size() > 255) throw WireError("certificate chain size");
  Bytes out;
  out.push_back(static_cast<uint8_t>(chain_tlvs.size()));
  for (const Bytes& cert : chain_tlvs) {
    if (cert.size() > 0xffffff) throw WireError("certificate too large");
    put_u24(out, static_cast<uint32_t>(cert.size()));
    out.insert(out.end(), cert.begin(), cert.end());
  }
  return out;
}

std::vector<Bytes> decode_cert_chain_body(ByteView body) {
  Cursor c(body);
  uint8_t count = c.u8();
  if (count == 0) throw WireError("empty certificate chain");
  std::vector<Bytes> chain;
  chain.reserve(count);
  for (uint8_t i = 0; i < count; ++i) chain.push_back(c.bytes(c.u24()));
  c.expect_end("certificate chain");
  return chain;
}

Bytes encode_cert_verify(const CertVerifyBody& cv) {
  if (cv.signature.size() > 65535) throw WireError("signature too large");
  Bytes out;
  out.push_back(static_cast<uint8_t>(cv.alg));
  put_be(out, cv.signature.size(), 2);
  out.insert(out.end(), cv.signature.begin(), cv.signature.end());
  return out;
}

CertVerifyBody decode_cert_verify(ByteView body) {
  Cursor c(body);
  uint8_t alg = c.u8();
  if (!valid_sig(alg)) throw WireError("unknown signature algorithm");
  CertVerifyBody cv;
  cv.alg = static_cast<SigAlg>(alg);
  cv.signature = c.bytes(c.u16());
  c.expect_end("certificate verify");
  return cv;
}

Bytes encode_alert(AlertCode code, std::string_view reason) {
  Bytes out;
  out.push_back(static_cast<uint8_t>(code));
  if (reason.size() > 200) reason = reason.substr(0, 200);
  out.insert(out.end(), reason.begin(), reason.end());
  return out;
}

std::pair<AlertCode, std::string> decode_alert(ByteView body) {
  if (body.empty()) throw WireError("empty alert");
  auto code = static_cast<AlertCode>(body[0]);
  return {code, std::string(body.begin() + 1, body.end())};
}

void transcript_add(crypto::Sha256& th, MsgType type, ByteView body) {
  Bytes header;
  header.push_back(static_cast<uint8_t>(type));
  put_u24(header, static_cast<uint32_t>(body.size()));
  th.update(header);
  th.update(body);
}

Bytes message_hash(MsgType type, ByteView body) {
  crypto::Sha256 h;
  transcript_add(h, type, body);
  return h.finish();
}

void transcript_add_ch1_hash(crypto::Sha256& th, ByteView ch1_hash) {
  Bytes header;
  header.push_back(0xfe);
  put_u24(header, static_cast<uint32_t>(ch1_hash.size()));
  th.update(header);
  th.update(ch1_hash);
}

void DatagramPacker::add_record(ByteView record) {
  if (record.size() > mtu_) throw WireError("record exceeds mtu");
  if (datagrams_.empty() || datagrams_.back().size() + record.size() > mtu_)
    datagrams_.emplace_back();
  datagrams_.back().insert(datagrams_.back().end(), record.begin(), record.end());
}

std::vector<Bytes> DatagramPacker::take() { return std::move(datagrams_); }

}  // namespace qeaas::pqch
