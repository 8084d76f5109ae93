#pragma once
// Datagram transports. The channel code only sees the DatagramTransport
// interface; concrete implementations are a connected UDP socket (clients),
// an unconnected UDP socket (servers, with peer addresses), and an in-memory
// pair with fault-injection hooks for tests.

#include "qeaas/bytes.hpp"

#include <condition_variable>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>

namespace qeaas::pqch {

struct TransportError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class DatagramTransport {
 public:
  virtual ~DatagramTransport() = default;
  virtual void send(ByteView datagram) = 0;
  // Blocks up to timeout_ms; nullopt on timeout.
  virtual std::optional<Bytes> recv(int timeout_ms) = 0;
};

// Client-side connected UDP socket.
class UdpClientTransport final : public DatagramTransport {
 public:
  UdpClientTransport(const std::string& host, uint16_t port);
  ~UdpClientTransport() override;
  UdpClientTransport(const UdpClientTransport&) = delete;
  UdpClientTransport& operator=(const UdpClientTransport&) = delete;

  void send(ByteView datagram) override;
  std::optional<Bytes> recv(int timeout_ms) override;

 private:
  int fd_ = -1;
};

// Server-side unconnected UDP socket; peers are "ip:port" strings.
class UdpSocket {
 public:
  // port 0 binds an ephemeral port; port() reports the actual one.
  explicit UdpSocket(uint16_t port, const std::string& bind_addr = "0.0.0.0");
  ~UdpSocket();
  UdpSocket(const UdpSocket&) = delete;
  UdpSocket& operator=(const UdpSocket&) = delete;

  uint16_t port() const { return port_; }
  void send_to(const std::string& peer, ByteView datagram);
  std::optional<std::pair<std::string, Bytes>> recv_from(int timeout_ms);

 private:
  int fd_ = -1;
  uint16_t port_ = 0;
};

// In-memory transport pair. Hooks run on the sending side and may mutate the
// datagram or drop it (return false); they are how tests tamper with,
// duplicate or redirect traffic.
class MemoryEndpoint final : public DatagramTransport {
 public:
  using Hook = std::function<bool(Bytes& datagram)>;

  void send(ByteView datagram) override;
  std::optional<Bytes> recv(int timeout_ms) override;
  void set_send_hook(Hook hook);
  // Injects a datagram into this endpoint's inbox (as if the peer sent it).
  void inject(ByteView datagram);

 private:
  friend std::pair<std::unique_ptr<MemoryEndpoint>, std::unique_ptr<MemoryEndpoint>>
  make_memory_pair();

  struct Inbox {
    std::mutex m;
    std::condition_variable cv;
    std::deque<Bytes> q;
  };
  std::shared_ptr<Inbox> inbox_ = std::make_shared<Inbox>();
  std::shared_ptr<Inbox> peer_inbox_;
  std::mutex hook_m_;
  Hook hook_;
};

std::pair<std::unique_ptr<MemoryEndpoint>, std::unique_ptr<MemoryEndpoint>> make_memory_pair();

// Steady-clock milliseconds, the time base for channel state machines.
uint64_t steady_now_ms();

}  // namespace qeaas::pqch
