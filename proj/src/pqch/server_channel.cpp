#include "qeaas/pqch/channel.hpp"

#include "qeaas/crypto/random.hpp"
#include "qeaas/crypto/sha256.hpp"

namespace qeaas::pqch {

ServerChannel::ServerChannel(HandshakeConfig config, KeyStore key_store)
    : config_(config), key_store_(std::move(key_store)) {
  config_.validate();
  if (key_store_.sig_alg != config_.sig)
    throw ChannelError(ChannelError::Kind::Config,
                       "key store algorithm does not match configured signature algorithm");
  if (key_store_.chain.empty())
    throw ChannelError(ChannelError::Kind::Config, "key store has no certificate chain");
  if (key_store_.cookie_secret.size() < 16)
    throw ChannelError(ChannelError::Kind::Config, "cookie secret too short");
}

ServerChannel::Outbound ServerChannel::make_alert(const std::string& peer, AlertCode code,
                                                  std::string_view reason) {
  Bytes rec = encode_record(RecordType::Alert, 0, 0, encode_alert(code, reason));
  return {peer, std::move(rec)};
}

Bytes ServerChannel::hrr_datagram(ByteView cookie) {
  // Stateless: always sequence 0; the client reassembles by message type.
  uint64_t seq = 0;
  auto records = fragment_message({MsgType::HelloRetry, encode_hrr_body(cookie)},
                                  config_.mtu_bytes, seq);
  DatagramPacker packer(config_.mtu_bytes);
  for (const Bytes& r : records) packer.add_record(r);
  auto datagrams = packer.take();
  return datagrams.front();
}

std::vector<ServerChannel::Outbound> ServerChannel::handle_client_hello1(
    const std::string& peer, const Bytes& body, uint64_t now_ms) {
  try {
    (void)decode_hello(body);
  } catch (const WireError&) {
    return {};  // unparseable hello from an unauthenticated peer: ignore
  }
  Bytes ch1_hash = message_hash(MsgType::ClientHello1, body);
  Bytes cookie = mint_cookie(key_store_.cookie_secret, peer, ch1_hash, now_ms / 1000);
  // Deliberately no session state here: everything needed to continue lives
  // in the cookie.
  return {{peer, hrr_datagram(cookie)}};
}

std::vector<ServerChannel::Outbound> ServerChannel::handle_client_hello2(
    const std::string& peer, const Bytes& body, uint64_t now_ms) {
  HelloBody hello;
  try {
    hello = decode_hello(body);
  } catch (const WireError& e) {
    return {make_alert(peer, AlertCode::DecodeError, e.what())};
  }

  if (hello.cookie.empty()) {
    if (config_.force_hrr) {
      // This server insists on the cookie round trip.
      Bytes hash = message_hash(MsgType::ClientHello2, body);
      Bytes cookie = mint_cookie(key_store_.cookie_secret, peer, hash, now_ms / 1000);
      return {{peer, hrr_datagram(cookie)}};
    }
  } else if (!verify_cookie(key_store_.cookie_secret, peer, hello.cookie, now_ms / 1000)) {
    // Stale, forged, or minted for another address: demand a fresh round
    // trip. An honest client treats HelloRetry after its second hello as a
    // fatal cookie rejection.
    auto parsed = parse_cookie(hello.cookie);
    Bytes hash = parsed ? parsed->ch1_hash : Bytes(32, 0);
    Bytes cookie = mint_cookie(key_store_.cookie_secret, peer, hash, now_ms / 1000);
    return {{peer, hrr_datagram(cookie)}};
  }

  Bytes ch2_hash = message_hash(MsgType::ClientHello2, body);
  if (auto it = sessions_.find(peer); it != sessions_.end()) {
    if (it->second.ch2_hash == ch2_hash) {
      // Retransmitted ClientHello2: our flight was lost. Re-send it rather
      // than re-deriving keys (encapsulation is randomized).
      it->second.last_activity_ms = now_ms;
      std::vector<Outbound> outs;
      for (const Bytes& d : it->second.flight) outs.push_back({peer, d});
      return outs;
    }
    sessions_.erase(it);  // the client started over
  }

  if (hello.kex != config_.kex || hello.sig != config_.sig ||
      hello.verify_mode != config_.verify_mode)
    return {make_alert(peer, AlertCode::IllegalParameter,
                       "algorithm selection does not match server configuration")};

  KexResponse kex;
  try {
    kex = server_kex_respond(hello.kex, hello.kex_share);
  } catch (const KexError& e) {
    return {make_alert(peer, AlertCode::DecodeError, e.what())};
  }

  // Rebuild the transcript the client is tracking. With a cookie the first
  // hello is present only as its hash (carried by the cookie), exactly the
  // message-hash construct the client used.
  crypto::Sha256 th;
  if (!hello.cookie.empty()) {
    auto parsed = parse_cookie(hello.cookie);
    transcript_add_ch1_hash(th, parsed->ch1_hash);
    transcript_add(th, MsgType::HelloRetry, encode_hrr_body(hello.cookie));
  }
  transcript_add(th, MsgType::ClientHello2, body);

  ServerHelloBody sh;
  sh.random = crypto::os_random(kRandomBytes);
  sh.kex = hello.kex;
  sh.kex_payload = kex.payload;
  Bytes sh_body = encode_server_hello(sh);
  transcript_add(th, MsgType::ServerHello, sh_body);
  Bytes th_kex = th.finish();
  SessionKeys keys = derive_session_keys(kex.shared_secret, th_kex);

  Bytes cert_body = encode_cert_chain_body(key_store_.chain_tlvs());
  transcript_add(th, MsgType::Certificate, cert_body);
  Bytes th_cert = th.finish();

  CertVerifyBody cv;
  cv.alg = config_.sig;
  cv.signature = sign_transcript(config_.sig, key_store_.private_key, th_cert);
  Bytes cv_body = encode_cert_verify(cv);
  transcript_add(th, MsgType::CertVerify, cv_body);
  Bytes th_cv = th.finish();

  Bytes fin_s = crypto::hmac_sha256(keys.s_finished, th_cv);
  transcript_add(th, MsgType::FinishedServer, fin_s);
  Bytes th_fins = th.finish();

  // Assemble the flight: sequence 0 was the (stateless) HelloRetry.
  uint64_t seq = 1;
  DatagramPacker packer(config_.mtu_bytes);
  const std::pair<MsgType, const Bytes*> flight_messages[] = {
      {MsgType::ServerHello, &sh_body},
      {MsgType::Certificate, &cert_body},
      {MsgType::CertVerify, &cv_body},
      {MsgType::FinishedServer, &fin_s}};
  for (const auto& [type, msg_body] : flight_messages)
    for (const Bytes& rec : fragment_message({type, *msg_body}, config_.mtu_bytes, seq))
      packer.add_record(rec);
  std::vector<Bytes> flight = packer.take();

  PeerSession session;
  session.state = State::WaitFinished;
  session.ch2_hash = std::move(ch2_hash);
  session.flight = flight;
  session.keys = std::move(keys);
  session.th_finished_server = std::move(th_fins);
  session.last_activity_ms = now_ms;
  sessions_[peer] = std::move(session);

  std::vector<Outbound> outs;
  outs.reserve(flight.size());
  for (Bytes& d : flight) outs.push_back({peer, std::move(d)});
  return outs;
}

std::vector<ServerChannel::Outbound> ServerChannel::handle_finished(const std::string& peer,
                                                                    const Bytes& body,
                                                                    uint64_t now_ms) {
  auto it = sessions_.find(peer);
  if (it == sessions_.end())
    return {make_alert(peer, AlertCode::UnexpectedMessage, "Finished without a handshake")};
  PeerSession& s = it->second;
  if (s.state == State::Established) return {};  // duplicate Finished: ignore

  Bytes expected = crypto::hmac_sha256(s.keys.c_finished, s.th_finished_server);
  if (!ct_equal(body, expected)) {
    sessions_.erase(it);
    return {make_alert(peer, AlertCode::HandshakeFailure, "bad client Finished MAC")};
  }
  s.state = State::Established;
  s.record_layer = std::make_unique<RecordLayer>(s.keys, /*is_client=*/false);
  s.flight.clear();
  s.flight_rtx = 0;
  s.last_activity_ms = now_ms;
  return {};
}

std::vector<ServerChannel::Outbound> ServerChannel::on_datagram(const std::string& peer,
                                                                ByteView datagram,
                                                                uint64_t now_ms) {
  std::vector<Record> records;
  try {
    records = split_datagram(datagram);
  } catch (const WireError&) {
    return {};  // corrupt framing: drop
  }

  std::vector<Outbound> outs;
  for (const Record& r : records) {
    switch (r.type) {
      case RecordType::Alert:
        sessions_.erase(peer);
        return outs;
      case RecordType::Handshake: {
        Fragment frag;
        try {
          frag = decode_fragment(r.body);
        } catch (const WireError&) {
          continue;
        }
        // Every client→server handshake message fits one fragment.
        if (frag.frag_offset != 0 || frag.bytes.size() != frag.total_length) continue;
        std::vector<Outbound> msg_outs;
        switch (frag.msg_type) {
          case MsgType::ClientHello1:
            msg_outs = handle_client_hello1(peer, frag.bytes, now_ms);
            break;
          case MsgType::ClientHello2:
            msg_outs = handle_client_hello2(peer, frag.bytes, now_ms);
            break;
          case MsgType::FinishedClient:
            msg_outs = handle_finished(peer, frag.bytes, now_ms);
            break;
          default:
            msg_outs.push_back(make_alert(peer, AlertCode::UnexpectedMessage,
                                          "unexpected handshake message"));
            break;
        }
        for (Outbound& o : msg_outs) outs.push_back(std::move(o));
        break;
      }
      case RecordType::AppData: {
        auto it = sessions_.find(peer);
        if (it == sessions_.end() || it->second.state != State::Established) {
          outs.push_back(make_alert(peer, AlertCode::UnexpectedMessage,
                                    "application data without a session"));
          break;
        }
        if (auto pt = it->second.record_layer->open(r)) {
          app_data_.push_back({peer, std::move(*pt)});
          it->second.last_activity_ms = now_ms;
        }
        // Undecryptable or replayed records are dropped silently.
        break;
      }
    }
  }
  return outs;
}

std::vector<ServerChannel::Inbound> ServerChannel::take_app_data() {
  return std::exchange(app_data_, {});
}

std::vector<ServerChannel::Outbound> ServerChannel::on_tick(uint64_t now_ms) {
  std::vector<Outbound> outs;
  std::vector<std::string> drop;
  for (auto& [peer, s] : sessions_) {
    if (s.state == State::WaitFinished) {
      if (now_ms - s.last_activity_ms < config_.retransmit_timeout_ms) continue;
      if (s.flight_rtx >= config_.max_retransmits) {
        drop.push_back(peer);
        continue;
      }
      ++s.flight_rtx;
      s.last_activity_ms = now_ms;
      for (const Bytes& d : s.flight) outs.push_back({peer, d});
    } else if (now_ms - s.last_activity_ms >= idle_timeout_ms_) {
      drop.push_back(peer);
    }
  }
  for (const std::string& peer : drop) sessions_.erase(peer);
  return outs;
}

ServerChannel::Outbound ServerChannel::seal_app(const std::string& peer, ByteView plaintext) {
  auto it = sessions_.find(peer);
  if (it == sessions_.end() || it->second.state != State::Established)
    throw ChannelError(ChannelError::Kind::NotEstablished,
                       "no established session for " + peer);
  return {peer, it->second.record_layer->seal(plaintext)};
}

bool ServerChannel::has_established(const std::string& peer) const {
  auto it = sessions_.find(peer);
  return it != sessions_.end() && it->second.state == State::Established;
}

UdpServerDriver::UdpServerDriver(uint16_t port, HandshakeConfig config, KeyStore key_store,
                                 const std::string& bind_addr)
    : socket_(port, bind_addr), channel_(config, std::move(key_store)) {
  thread_ = std::thread([this] { pump(); });
}

UdpServerDriver::~UdpServerDriver() { stop(); }

void UdpServerDriver::set_handler(Handler handler) {
  std::lock_guard lk(m_);
  handler_ = std::move(handler);
}

void UdpServerDriver::send_app(const std::string& peer, ByteView plaintext) {
  ServerChannel::Outbound out;
  {
    std::lock_guard lk(m_);
    out = channel_.seal_app(peer, plaintext);
  }
  socket_.send_to(out.peer, out.datagram);
}

void UdpServerDriver::stop() {
  bool was_running = !stop_.exchange(true);
  if (was_running && thread_.joinable()) thread_.join();
}

void UdpServerDriver::pump() {
  while (!stop_.load()) {
    auto incoming = socket_.recv_from(20);
    uint64_t now = steady_now_ms();
    std::vector<ServerChannel::Outbound> outs;
    std::vector<ServerChannel::Inbound> app;
    Handler handler;
    {
      std::lock_guard lk(m_);
      if (incoming) outs = channel_.on_datagram(incoming->first, incoming->second, now);
      auto tick_outs = channel_.on_tick(now);
      for (auto& o : tick_outs) outs.push_back(std::move(o));
      app = channel_.take_app_data();
      handler = handler_;
    }
    for (const auto& o : outs) {
      try {
        socket_.send_to(o.peer, o.datagram);
      } catch (const TransportError&) {
        // Peer vanished; their session will idle out.
      }
    }
    if (handler)
      for (auto& in : app) handler(in.peer, std::move(in.plaintext));
  }
}

}  // namespace qeaas::pqch
