#pragma once
// Handshake state machines.
//
// ClientChannel drives a blocking handshake over a DatagramTransport:
//   flight 1: ClientHello1 (no key share)        → HelloRetry (cookie)
//   flight 2: ClientHello2 (cookie + key share)  → ServerHello, Certificate,
//                                                  CertVerify, FinishedServer
//   flight 3: FinishedClient (+ optionally the first application record,
//             coalesced into the same datagram)
//
// ServerChannel is sans-io: callers feed datagrams with a peer label and a
// clock, and collect outbound datagrams + decrypted application data. It
// keeps no state for a ClientHello1 — the HelloRetry cookie carries
// everything needed to resume when ClientHello2 arrives.

#include "qeaas/pqch/cert.hpp"
#include "qeaas/pqch/cookie.hpp"
#include "qeaas/pqch/kex.hpp"
#include "qeaas/pqch/record.hpp"
#include "qeaas/pqch/schedule.hpp"
#include "qeaas/pqch/transport.hpp"
#include "qeaas/pqch/wire.hpp"

#include <atomic>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <thread>

namespace qeaas::pqch {

struct ChannelError : std::runtime_error {
  enum class Kind {
    Config,
    Timeout,
    CookieRejected,
    KexFailure,
    BadSignature,
    BadCertificate,
    BadFinishedMac,
    Decode,
    AlertReceived,
    Transport,
    NotEstablished,
  };
  ChannelError(Kind k, const std::string& what) : std::runtime_error(what), kind(k) {}
  Kind kind;
};

struct Session {
  HandshakeConfig config;
  std::string peer_identity;  // server certificate subject
  Bytes transcript_hash;      // final transcript (after FinishedClient)
};

class ClientChannel {
 public:
  // trust_anchor must be set when config.verify_mode == FullChain.
  ClientChannel(DatagramTransport& transport, HandshakeConfig config,
                std::optional<Certificate> trust_anchor = std::nullopt);

  void connect();
  // Coalesces FinishedClient and the sealed first request into one datagram,
  // so the first application byte rides the third client flight.
  void connect_with_first_request(ByteView first_payload);

  void send_app(ByteView payload);
  // nullopt on timeout. Handles server flight retransmissions (re-sends the
  // final client flight) and skips undecryptable records.
  std::optional<Bytes> recv_app(int timeout_ms);

  // Best-effort close_notify alert; the channel returns to the unestablished
  // state. Safe to call at any time.
  void close();

  bool established() const { return record_layer_ != nullptr; }
  const Session& session() const;
  size_t handshake_datagrams_sent() const { return handshake_datagrams_sent_; }

 private:
  void run_handshake(const Bytes* first_payload);
  void send_datagrams(const std::vector<Bytes>& datagrams);

  DatagramTransport& transport_;
  HandshakeConfig config_;
  std::optional<Certificate> trust_anchor_;
  std::unique_ptr<RecordLayer> record_layer_;
  std::optional<Session> session_;
  std::vector<Bytes> final_flight_;  // FinishedClient datagram(s), re-sent on server rtx
  std::deque<Bytes> app_rx_queue_;
  uint64_t hs_send_seq_ = 0;
  size_t handshake_datagrams_sent_ = 0;
};

class ServerChannel {
 public:
  struct Outbound {
    std::string peer;
    Bytes datagram;
  };
  struct Inbound {
    std::string peer;
    Bytes plaintext;
  };

  ServerChannel(HandshakeConfig config, KeyStore key_store);

  // Processes one datagram; returns datagrams to transmit. now_ms is a
  // steady-clock reading (cookie freshness + retransmit/idle timers).
  std::vector<Outbound> on_datagram(const std::string& peer, ByteView datagram,
                                    uint64_t now_ms);
  // Drains application plaintext decrypted by on_datagram.
  std::vector<Inbound> take_app_data();
  // Drives retransmission of the server flight and session expiry.
  std::vector<Outbound> on_tick(uint64_t now_ms);

  Outbound seal_app(const std::string& peer, ByteView plaintext);
  bool has_established(const std::string& peer) const;
  size_t session_count() const { return sessions_.size(); }

 private:
  enum class State { WaitFinished, Established };
  struct PeerSession {
    State state;
    Bytes ch2_hash;             // dedupe retransmitted ClientHello2
    std::vector<Bytes> flight;  // server flight datagrams (for rtx)
    SessionKeys keys;
    Bytes th_finished_server;   // transcript hash the client MACs
    std::unique_ptr<RecordLayer> record_layer;
    uint64_t last_activity_ms = 0;
    unsigned flight_rtx = 0;
  };

  Outbound make_alert(const std::string& peer, AlertCode code, std::string_view reason);
  std::vector<Outbound> handle_client_hello1(const std::string& peer, const Bytes& body,
                                             uint64_t now_ms);
  std::vector<Outbound> handle_client_hello2(const std::string& peer, const Bytes& body,
                                             uint64_t now_ms);
  std::vector<Outbound> handle_finished(const std::string& peer, const Bytes& body,
                                        uint64_t now_ms);
  Bytes hrr_datagram(ByteView cookie);

  HandshakeConfig config_;
  KeyStore key_store_;
  std::map<std::string, PeerSession> sessions_;
  std::vector<Inbound> app_data_;
  uint64_t idle_timeout_ms_ = 120'000;
};

// Pumps a UdpSocket through a ServerChannel on a background thread. The
// handler runs on that thread; send_app may be called from any thread.
class UdpServerDriver {
 public:
  using Handler = std::function<void(const std::string& peer, Bytes plaintext)>;

  UdpServerDriver(uint16_t port, HandshakeConfig config, KeyStore key_store,
                  const std::string& bind_addr = "0.0.0.0");
  ~UdpServerDriver();
  UdpServerDriver(const UdpServerDriver&) = delete;
  UdpServerDriver& operator=(const UdpServerDriver&) = delete;

  uint16_t port() const { return socket_.port(); }
  void set_handler(Handler handler);  // call before traffic arrives
  void send_app(const std::string& peer, ByteView plaintext);
  void stop();

 private:
  void pump();

  UdpSocket socket_;
  ServerChannel channel_;
  Handler handler_;
  std::mutex m_;
  std::atomic<bool> stop_{false};
  std::thread thread_;
};

}  // namespace qeaas::pqch
