#include "qeaas/pqch/channel.hpp"

#include "qeaas/crypto/random.hpp"
#include "qeaas/crypto/sha256.hpp"

#include <algorithm>

namespace qeaas::pqch {

namespace {

using Kind = ChannelError::Kind;

[[noreturn]] void fail(Kind k, const std::string& what) { throw ChannelError(k, what); }

// Pulls completed handshake messages out of the datagram stream. Malformed
// datagrams and stray records are dropped (datagram transports are lossy
// anyway); alerts abort.
class MessageSource {
 public:
  explicit MessageSource(DatagramTransport& t) : transport_(t) {}

  // Blocks up to timeout_ms for the next complete handshake message.
  std::optional<HandshakeMessage> next(int timeout_ms) {
    uint64_t deadline = steady_now_ms() + static_cast<uint64_t>(std::max(timeout_ms, 0));
    while (true) {
      if (!ready_.empty()) {
        HandshakeMessage msg = std::move(ready_.front());
        ready_.pop_front();
        return msg;
      }
      uint64_t now = steady_now_ms();
      if (now >= deadline) return std::nullopt;
      auto dgram = transport_.recv(static_cast<int>(deadline - now));
      if (!dgram) return std::nullopt;
      ingest(*dgram);
    }
  }

 private:
  void ingest(const Bytes& dgram) {
    std::vector<Record> records;
    try {
      records = split_datagram(dgram);
    } catch (const WireError&) {
      return;  // corrupt framing: drop the datagram
    }
    for (const Record& r : records) {
      if (r.type == RecordType::Alert) {
        try {
          auto [code, reason] = decode_alert(r.body);
          fail(Kind::AlertReceived, "peer alert " + std::to_string(static_cast<int>(code)) +
                                        (reason.empty() ? "" : ": " + reason));
        } catch (const WireError&) {
          fail(Kind::AlertReceived, "peer alert (malformed)");
        }
      }
      if (r.type != RecordType::Handshake) continue;  // app data during handshake: drop
      try {
        if (auto msg = reassembler_.feed(decode_fragment(r.body))) ready_.push_back(std::move(*msg));
      } catch (const WireError&) {
        // Inconsistent or malformed fragment: drop it, timeouts recover.
      }
    }
  }

  DatagramTransport& transport_;
  Reassembler reassembler_;
  std::deque<HandshakeMessage> ready_;
};

}  // namespace

ClientChannel::ClientChannel(DatagramTransport& transport, HandshakeConfig config,
                             std::optional<Certificate> trust_anchor)
    : transport_(transport), config_(config), trust_anchor_(std::move(trust_anchor)) {
  config_.validate();
  if (config_.verify_mode == VerifyMode::FullChain && !trust_anchor_)
    fail(Kind::Config, "full-chain verification requires a trust anchor");
}

const Session& ClientChannel::session() const {
  if (!session_) throw ChannelError(Kind::NotEstablished, "handshake not complete");
  return *session_;
}

void ClientChannel::send_datagrams(const std::vector<Bytes>& datagrams) {
  for (const Bytes& d : datagrams) {
    transport_.send(d);
    ++handshake_datagrams_sent_;
  }
}

void ClientChannel::connect() { run_handshake(nullptr); }

void ClientChannel::connect_with_first_request(ByteView first_payload) {
  Bytes payload(first_payload.begin(), first_payload.end());
  run_handshake(&payload);
}

void ClientChannel::run_handshake(const Bytes* first_payload) {
  if (record_layer_) fail(Kind::Config, "channel already established");

  MessageSource source(transport_);
  crypto::Sha256 th;
  const int rtx_ms = static_cast<int>(config_.retransmit_timeout_ms);

  // Collects handshake messages, retransmitting `flight` while nothing
  // arrives. Returns the next message or throws Timeout.
  auto next_message = [&](const std::vector<Bytes>& flight) -> HandshakeMessage {
    for (unsigned attempt = 0;; ++attempt) {
      if (auto msg = source.next(rtx_ms)) return std::move(*msg);
      if (attempt >= config_.max_retransmits) fail(Kind::Timeout, "handshake timed out");
      send_datagrams(flight);
    }
  };

  HelloBody hello;
  hello.random = crypto::os_random(kRandomBytes);
  hello.kex = config_.kex;
  hello.sig = config_.sig;
  hello.verify_mode = config_.verify_mode;

  Bytes cookie;
  if (config_.force_hrr) {
    // Flight 1: empty ClientHello, no key share — solicit the cookie.
    Bytes ch1_body = encode_hello(hello);
    Bytes ch1_hash = message_hash(MsgType::ClientHello1, ch1_body);
    std::vector<Bytes> ch1_flight;
    {
      DatagramPacker packer(config_.mtu_bytes);
      uint64_t seq = hs_send_seq_;
      for (const Bytes& rec : fragment_message({MsgType::ClientHello1, ch1_body},
                                               config_.mtu_bytes, seq))
        packer.add_record(rec);
      hs_send_seq_ = seq;
      ch1_flight = packer.take();
    }
    send_datagrams(ch1_flight);

    HandshakeMessage hrr = next_message(ch1_flight);
    if (hrr.type != MsgType::HelloRetry)
      fail(Kind::Decode, "expected HelloRetry, got message type " +
                             std::to_string(static_cast<int>(hrr.type)));
    try {
      cookie = decode_hrr_body(hrr.body);
    } catch (const WireError& e) {
      fail(Kind::Decode, std::string("bad HelloRetry: ") + e.what());
    }
    auto parsed = parse_cookie(cookie);
    if (!parsed) fail(Kind::CookieRejected, "cookie has wrong shape");
    // The cookie binds the ClientHello the *server* saw; if it differs from
    // ours, the first flight was modified in transit.
    if (!ct_equal(parsed->ch1_hash, ch1_hash))
      fail(Kind::CookieRejected, "cookie binds a different ClientHello");

    transcript_add_ch1_hash(th, ch1_hash);
    transcript_add(th, MsgType::HelloRetry, hrr.body);
  }

  // Flight 2: ClientHello2 with cookie (possibly empty) and key share.
  ClientKex kex(config_.kex);
  hello.cookie = cookie;
  hello.kex_share = kex.share();
  Bytes ch2_body = encode_hello(hello);
  // The server handles client hellos statelessly and does not reassemble
  // multi-fragment client messages, so the hello must fit a single record.
  if (kRecordHeaderBytes + kFragmentHeaderBytes + ch2_body.size() > config_.mtu_bytes)
    fail(Kind::Config, "mtu_bytes too small for a single-record ClientHello with " +
                           to_string(config_.kex));
  transcript_add(th, MsgType::ClientHello2, ch2_body);
  std::vector<Bytes> ch2_flight;
  {
    DatagramPacker packer(config_.mtu_bytes);
    uint64_t seq = hs_send_seq_;
    for (const Bytes& rec : fragment_message({MsgType::ClientHello2, ch2_body},
                                             config_.mtu_bytes, seq))
      packer.add_record(rec);
    hs_send_seq_ = seq;
    ch2_flight = packer.take();
  }
  send_datagrams(ch2_flight);

  // Server flight: ServerHello, Certificate, CertVerify, FinishedServer.
  // Fragments may interleave, so collect all four before processing them in
  // protocol order.
  std::map<MsgType, Bytes> flight_msgs;
  while (flight_msgs.size() < 4) {
    HandshakeMessage msg = next_message(ch2_flight);
    switch (msg.type) {
      case MsgType::ServerHello:
      case MsgType::Certificate:
      case MsgType::CertVerify:
      case MsgType::FinishedServer:
        flight_msgs.emplace(msg.type, std::move(msg.body));
        break;
      case MsgType::HelloRetry:
        // A second HelloRetry means the server refused our cookie.
        fail(Kind::CookieRejected, "server rejected the cookie");
      default:
        fail(Kind::Decode, "unexpected handshake message type " +
                               std::to_string(static_cast<int>(msg.type)));
    }
  }

  // ServerHello → shared secret → key schedule bound to th_kex.
  ServerHelloBody sh;
  try {
    sh = decode_server_hello(flight_msgs[MsgType::ServerHello]);
  } catch (const WireError& e) {
    fail(Kind::Decode, std::string("bad ServerHello: ") + e.what());
  }
  if (sh.kex != config_.kex) fail(Kind::Decode, "server answered with a different key exchange");
  Bytes shared_secret;
  try {
    shared_secret = kex.finish(sh.kex_payload);
  } catch (const KexError& e) {
    fail(Kind::KexFailure, e.what());
  }
  transcript_add(th, MsgType::ServerHello, flight_msgs[MsgType::ServerHello]);
  Bytes th_kex = th.finish();
  SessionKeys keys = derive_session_keys(shared_secret, th_kex);

  // Certificate chain.
  std::vector<Certificate> chain;
  try {
    for (const Bytes& tlv : decode_cert_chain_body(flight_msgs[MsgType::Certificate]))
      chain.push_back(Certificate::decode(tlv));
  } catch (const WireError& e) {
    fail(Kind::Decode, std::string("bad Certificate: ") + e.what());
  }
  transcript_add(th, MsgType::Certificate, flight_msgs[MsgType::Certificate]);
  Bytes th_cert = th.finish();

  // CertificateVerify: the transcript signature is checked in both verify
  // modes; chain validation only in full-chain mode.
  CertVerifyBody cv;
  try {
    cv = decode_cert_verify(flight_msgs[MsgType::CertVerify]);
  } catch (const WireError& e) {
    fail(Kind::Decode, std::string("bad CertVerify: ") + e.what());
  }
  if (cv.alg != config_.sig) fail(Kind::BadSignature, "signature algorithm mismatch");
  if (!verify_transcript(cv.alg, chain.front().public_key, th_cert, cv.signature))
    fail(Kind::BadSignature, "transcript signature does not verify");
  if (config_.verify_mode == VerifyMode::FullChain &&
      !verify_chain(chain, *trust_anchor_))
    fail(Kind::BadCertificate, "certificate chain does not validate");
  transcript_add(th, MsgType::CertVerify, flight_msgs[MsgType::CertVerify]);
  Bytes th_cv = th.finish();

  // FinishedServer.
  const Bytes& fin_s = flight_msgs[MsgType::FinishedServer];
  Bytes expected_fin_s = crypto::hmac_sha256(keys.s_finished, th_cv);
  if (!ct_equal(fin_s, expected_fin_s)) fail(Kind::BadFinishedMac, "bad server Finished MAC");
  transcript_add(th, MsgType::FinishedServer, fin_s);
  Bytes th_fins = th.finish();

  // Flight 3: FinishedClient, optionally coalesced with the first request.
  Bytes fin_c = crypto::hmac_sha256(keys.c_finished, th_fins);
  transcript_add(th, MsgType::FinishedClient, fin_c);
  record_layer_ = std::make_unique<RecordLayer>(keys, /*is_client=*/true);
  {
    DatagramPacker packer(config_.mtu_bytes);
    uint64_t seq = hs_send_seq_;
    for (const Bytes& rec : fragment_message({MsgType::FinishedClient, fin_c},
                                             config_.mtu_bytes, seq))
      packer.add_record(rec);
    hs_send_seq_ = seq;
    if (first_payload) packer.add_record(record_layer_->seal(*first_payload));
    final_flight_ = packer.take();
  }
  send_datagrams(final_flight_);

  Session s;
  s.config = config_;
  s.peer_identity = chain.front().subject;
  s.transcript_hash = th.finish();
  session_ = std::move(s);
}

void ClientChannel::send_app(ByteView payload) {
  if (!record_layer_) fail(Kind::NotEstablished, "handshake not complete");
  transport_.send(record_layer_->seal(payload));
}

std::optional<Bytes> ClientChannel::recv_app(int timeout_ms) {
  if (!record_layer_) fail(Kind::NotEstablished, "handshake not complete");
  uint64_t deadline = steady_now_ms() + static_cast<uint64_t>(std::max(timeout_ms, 0));
  while (true) {
    if (!app_rx_queue_.empty()) {
      Bytes pt = std::move(app_rx_queue_.front());
      app_rx_queue_.pop_front();
      return pt;
    }
    uint64_t now = steady_now_ms();
    if (now >= deadline) return std::nullopt;
    auto dgram = transport_.recv(static_cast<int>(deadline - now));
    if (!dgram) return std::nullopt;
    std::vector<Record> records;
    try {
      records = split_datagram(*dgram);
    } catch (const WireError&) {
      continue;
    }
    bool server_rtx = false;
    for (const Record& r : records) {
      switch (r.type) {
        case RecordType::AppData:
          if (auto pt = record_layer_->open(r)) app_rx_queue_.push_back(std::move(*pt));
          break;
        case RecordType::Handshake:
          // The server is retransmitting its flight: our final flight was lost.
          server_rtx = true;
          break;
        case RecordType::Alert: {
          std::string what = "peer alert";
          try {
            auto [code, reason] = decode_alert(r.body);
            what += " " + std::to_string(static_cast<int>(code));
            if (!reason.empty()) what += ": " + reason;
          } catch (const WireError&) {
          }
          fail(Kind::AlertReceived, what);
        }
      }
    }
    if (server_rtx)
      for (const Bytes& d : final_flight_) transport_.send(d);
  }
}

void ClientChannel::close() {
  if (record_layer_) {
    try {
      transport_.send(encode_record(RecordType::Alert, 0, 0,
                                    encode_alert(AlertCode::CloseNotify, "close_notify")));
    } catch (...) {
      // Best effort: the peer also expires the session on idle timeout.
    }
  }
  record_layer_.reset();
  session_.reset();
  final_flight_.clear();
  app_rx_queue_.clear();
  hs_send_seq_ = 0;
}

}  // namespace qeaas::pqch
