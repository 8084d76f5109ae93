#pragma once
// CoAP→HTTP forwarding proxy: plain CoAP on one UDP port, CoAP over the
// secure channel on another. GET requests carrying a Proxy-Uri option are
// fetched from the HTTP backend and mapped back:
//
//   HTTP 2xx → 2.05 Content (payload = body bytes, Content-Format 50)
//   HTTP 4xx → 4.00 Bad Request
//   HTTP 5xx → 5.02 Bad Gateway
//   HTTP 3xx → 5.02 (redirects are not followed)
//   backend unreachable / deadline → 5.04 Gateway Timeout
//
// Confirmable requests get piggybacked ACK responses (same message ID and
// token); non-confirmable get NON responses matched by token.

#include "qeaas/coap/coap.hpp"
#include "qeaas/proxy/http_client.hpp"
#include "qeaas/pqch/channel.hpp"

#include <atomic>
#include <condition_variable>
#include <deque>
#include <functional>
#include <thread>

namespace qeaas::proxy {

struct ProxyConfig {
  uint16_t coap_port = 5683;
  uint16_t coaps_port = 5684;
  int backend_timeout_ms = 2000;
  pqch::HandshakeConfig handshake;
  pqch::KeyStore key_store;
  std::string bind_addr = "0.0.0.0";
  // When set, only Proxy-Uri values with this prefix are forwarded.
  std::string backend_allow_prefix;
  size_t worker_threads = 4;
};

// Backend fetch outcome, decoupled from the real HTTP client for testing.
struct BackendResult {
  enum class Kind { Http, Timeout, Unreachable, Protocol };
  Kind kind = Kind::Http;
  int status = 0;
  std::string body;
};
using Fetcher = std::function<BackendResult(const std::string& uri)>;

// Maps one decoded CoAP request to its response. response_mid is used only
// for NON responses (ACKs echo the request's message ID).
coap::Message handle_coap(const coap::Message& request, const Fetcher& fetch,
                          const std::string& allow_prefix, uint16_t response_mid);

// Adapts the internal HTTP client to the Fetcher interface.
Fetcher make_http_fetcher(int timeout_ms);

class Proxy {
 public:
  explicit Proxy(ProxyConfig config);
  ~Proxy();
  Proxy(const Proxy&) = delete;
  Proxy& operator=(const Proxy&) = delete;

  // Binds both listeners and spawns the worker pool; throws on bind failure.
  void start();
  // Stops accepting, drains in-flight requests, joins all threads.
  void stop();

  uint16_t coap_port() const;
  uint16_t coaps_port() const;
  uint64_t requests_served() const { return requests_served_.load(); }

 private:
  struct Task {
    bool secure;
    std::string peer;
    Bytes datagram;  // raw CoAP bytes
  };

  void plain_loop();
  void worker_loop();
  void dispatch(Task task);
  void process(const Task& task);

  ProxyConfig config_;
  Fetcher fetch_;
  std::unique_ptr<pqch::UdpSocket> plain_socket_;
  std::unique_ptr<pqch::UdpServerDriver> secure_driver_;
  std::thread plain_thread_;
  std::vector<std::thread> workers_;
  std::deque<Task> queue_;
  std::mutex queue_m_;
  std::condition_variable queue_cv_;
  std::atomic<bool> accepting_{false};
  bool draining_ = false;
  std::atomic<uint16_t> non_mid_{1};
  std::atomic<uint64_t> requests_served_{0};
};

}  // namespace qeaas::proxy
