#pragma once
// Wire framing for the secure datagram channel. This is a documented custom
// TLV format (see docs/wire-format.md) that mirrors DTLS 1.3 message
// semantics — flight structure, HelloRetryRequest cookie, transcript-bound
// signatures — without being wire-compatible with RFC 9147.
//
// Datagram layout: one or more records, each
//   type(1) ‖ epoch(2 BE) ‖ seq(6 BE) ‖ length(2 BE) ‖ body(length)
// Handshake record bodies carry one message fragment:
//   msg_type(1) ‖ total_len(3 BE) ‖ frag_offset(3 BE) ‖ frag_len(3 BE) ‖ bytes

#include "qeaas/bytes.hpp"
#include "qeaas/crypto/sha256.hpp"

#include <map>
#include <optional>
#include <stdexcept>

namespace qeaas::pqch {

enum class KexAlg : uint8_t { MLKEM512 = 1, X25519 = 2, P256 = 3 };
enum class SigAlg : uint8_t { MLDSA44 = 1, ECDSA_P256 = 2 };
enum class VerifyMode : uint8_t { NoVerify = 0, FullChain = 1 };

std::string to_string(KexAlg k);
std::string to_string(SigAlg s);
std::string to_string(VerifyMode v);
std::optional<KexAlg> kex_from_string(std::string_view s);
std::optional<SigAlg> sig_from_string(std::string_view s);
std::optional<VerifyMode> verify_from_string(std::string_view s);

struct HandshakeConfig {
  KexAlg kex = KexAlg::MLKEM512;
  SigAlg sig = SigAlg::MLDSA44;
  VerifyMode verify_mode = VerifyMode::NoVerify;
  size_t mtu_bytes = 1400;
  // When set (the default), the server demands a cookie round trip for every
  // key exchange, so each configuration pays the same extra RTT.
  bool force_hrr = true;
  uint32_t retransmit_timeout_ms = 1000;
  unsigned max_retransmits = 4;

  void validate() const;  // throws std::invalid_argument (mtu >= 512)
};

enum class RecordType : uint8_t { Handshake = 0x01, AppData = 0x02, Alert = 0x03 };

enum class MsgType : uint8_t {
  ClientHello1 = 1,
  HelloRetry = 2,
  ClientHello2 = 3,
  ServerHello = 4,
  Certificate = 5,
  CertVerify = 6,
  FinishedServer = 7,
  FinishedClient = 8,
};

enum class AlertCode : uint8_t {
  CloseNotify = 0,
  UnexpectedMessage = 10,
  BadRecordMac = 20,
  HandshakeFailure = 40,
  BadCertificate = 42,
  IllegalParameter = 47,
  DecodeError = 50,
  BadSignature = 51,
  InternalError = 80,
};

constexpr size_t kRecordHeaderBytes = 11;
constexpr size_t kFragmentHeaderBytes = 10;
constexpr size_t kRandomBytes = 32;
constexpr size_t kMaxHandshakeMessageBytes = 1 << 20;

struct WireError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Record {
  RecordType type;
  uint16_t epoch;
  uint64_t seq;
  Bytes body;
};

Bytes encode_record(RecordType type, uint16_t epoch, uint64_t seq, ByteView body);
// Record header bytes only (used as AEAD additional data for app records).
Bytes record_header(RecordType type, uint16_t epoch, uint64_t seq, size_t body_len);
// Splits a datagram into records; throws WireError on malformed framing.
std::vector<Record> split_datagram(ByteView dgram);

// ---- handshake messages -----------------------------------------------------

struct Fragment {
  MsgType msg_type;
  uint32_t total_length;
  uint32_t frag_offset;
  Bytes bytes;
};

Bytes encode_fragment(const Fragment& frag);
Fragment decode_fragment(ByteView record_body);

struct HandshakeMessage {
  MsgType type;
  Bytes body;
};

// Splits a message into handshake records; every record fits an otherwise
// empty datagram of `mtu` bytes. `seq` is advanced per record.
std::vector<Bytes> fragment_message(const HandshakeMessage& msg, size_t mtu, uint64_t& seq);

// Order-insensitive, duplicate-tolerant reassembly keyed by message type.
class Reassembler {
 public:
  // Returns the completed message when the final byte arrives; throws
  // WireError on inconsistent total_length / overflowing fragments.
  std::optional<HandshakeMessage> feed(const Fragment& frag);

 private:
  struct Partial {
    Bytes buffer;
    std::vector<bool> have;
    size_t missing;
  };
  std::map<uint8_t, Partial> partials_;
};

// ---- message bodies ---------------------------------------------------------

struct HelloBody {
  Bytes random;  // 32 bytes
  KexAlg kex;
  SigAlg sig;
  VerifyMode verify_mode;
  Bytes cookie;     // empty in the first ClientHello
  Bytes kex_share;  // empty in the first ClientHello
};
Bytes encode_hello(const HelloBody& h);
HelloBody decode_hello(ByteView body);

// HelloRetry body: cookie_len(2 BE) ‖ cookie.
Bytes encode_hrr_body(ByteView cookie);
Bytes decode_hrr_body(ByteView body);  // returns the cookie

struct ServerHelloBody {
  Bytes random;
  KexAlg kex;
  Bytes kex_payload;
};
Bytes encode_server_hello(const ServerHelloBody& h);
ServerHelloBody decode_server_hello(ByteView body);

Bytes encode_cert_chain_body(const std::vector<Bytes>& chain_tlvs);
std::vector<Bytes> decode_cert_chain_body(ByteView body);

struct CertVerifyBody {
  SigAlg alg;
  Bytes signature;
};
Bytes encode_cert_verify(const CertVerifyBody& cv);
CertVerifyBody decode_cert_verify(ByteView body);

Bytes encode_alert(AlertCode code, std::string_view reason);
std::pair<AlertCode, std::string> decode_alert(ByteView body);

// ---- transcript -------------------------------------------------------------

// Handshake messages enter the transcript as msg_type(1) ‖ total_len(3) ‖ body.
void transcript_add(crypto::Sha256& th, MsgType type, ByteView body);
Bytes message_hash(MsgType type, ByteView body);
// The first ClientHello enters as a message-hash construct (0xfe ‖ len ‖ hash)
// so a stateless server can rebuild the transcript from the cookie alone.
void transcript_add_ch1_hash(crypto::Sha256& th, ByteView ch1_hash);

// ---- datagram packing -------------------------------------------------------

// Packs records into datagrams of at most mtu bytes, preserving order.
class DatagramPacker {
 public:
  explicit DatagramPacker(size_t mtu) : mtu_(mtu) {}
  void add_record(ByteView record);
  std::vector<Bytes> take();

 private:
  size_t mtu_;
  std::vector<Bytes> datagrams_;
};

}  // namespace qeaas::pqch
