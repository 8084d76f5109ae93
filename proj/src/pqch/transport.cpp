#include "qeaas/pqch/transport.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <cstring>

namespace qeaas::pqch {

namespace {

constexpr size_t kMaxDatagram = 65536;

sockaddr_in resolve_ipv4(const std::string& host, uint16_t port) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (inet_pton(AF_INET, host.c_str(), &addr.sin_addr) == 1) return addr;
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_DGRAM;
  addrinfo* res = nullptr;
  if (getaddrinfo(host.c_str(), nullptr, &hints, &res) != 0 || res == nullptr)
    throw TransportError("cannot resolve host: " + host);
  addr.sin_addr = reinterpret_cast<sockaddr_in*>(res->ai_addr)->sin_addr;
  freeaddrinfo(res);
  return addr;
}

std::string addr_to_string(const sockaddr_in& addr) {
  char buf[INET_ADDRSTRLEN] = {0};
  inet_ntop(AF_INET, &addr.sin_addr, buf, sizeof(buf));
  return std::string(buf) + ":" + std::to_string(ntohs(addr.sin_port));
}

sockaddr_in parse_peer(const std::string& peer) {
  size_t colon = peer.rfind(':');
  if (colon == std::string::npos) throw TransportError("peer must be ip:port");
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(static_cast<uint16_t>(std::stoul(peer.substr(colon + 1))));
  if (inet_pton(AF_INET, peer.substr(0, colon).c_str(), &addr.sin_addr) != 1)
    throw TransportError("bad peer address: " + peer);
  return addr;
}

bool wait_readable(int fd, int timeout_ms) {
  pollfd p{fd, POLLIN, 0};
  int rc = ::poll(&p, 1, timeout_ms);
  if (rc < 0) {
    if (errno == EINTR) return false;
    throw TransportError(std::string("poll failed: ") + std::strerror(errno));
  }
  return rc > 0 && (p.revents & POLLIN);
}

}  // namespace

UdpClientTransport::UdpClientTransport(const std::string& host, uint16_t port) {
  fd_ = ::socket(AF_INET, SOCK_DGRAM, 0);
  if (fd_ < 0) throw TransportError(std::string("socket failed: ") + std::strerror(errno));
  sockaddr_in addr = resolve_ipv4(host, port);
  if (::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    int e = errno;
    ::close(fd_);
    fd_ = -1;
    throw TransportError(std::string("connect failed: ") + std::strerror(e));
  }
}

UdpClientTransport::~UdpClientTransport() {
  if (fd_ >= 0) ::close(fd_);
}

void UdpClientTransport::send(ByteView datagram) {
  ssize_t n = ::send(fd_, datagram.data(), datagram.size(), 0);
  if (n < 0 || static_cast<size_t>(n) != datagram.size())
    throw TransportError(std::string("send failed: ") + std::strerror(errno));
}

std::optional<Bytes> UdpClientTransport::recv(int timeout_ms) {
  if (!wait_readable(fd_, timeout_ms)) return std::nullopt;
  Bytes buf(kMaxDatagram);
  ssize_t n = ::recv(fd_, buf.data(), buf.size(), 0);
  if (n < 0) {
    // A previous send to a dead port can surface as ECONNREFUSED here.
    if (errno == ECONNREFUSED || errno == EINTR) return std::nullopt;
    throw TransportError(std::string("recv failed: ") + std::strerror(errno));
  }
  buf.resize(static_cast<size_t>(n));
  return buf;
}

UdpSocket::UdpSocket(uint16_t port, const std::string& bind_addr) {
  fd_ = ::socket(AF_INET, SOCK_DGRAM, 0);
  if (fd_ < 0) throw TransportError(std::string("socket failed: ") + std::strerror(errno));
  int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr = resolve_ipv4(bind_addr, port);
  if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    int e = errno;
    ::close(fd_);
    fd_ = -1;
    throw TransportError("bind to port " + std::to_string(port) + " failed: " +
                         std::strerror(e));
  }
  sockaddr_in actual{};
  socklen_t len = sizeof(actual);
  if (::getsockname(fd_, reinterpret_cast<sockaddr*>(&actual), &len) != 0) {
    int e = errno;
    ::close(fd_);
    fd_ = -1;
    throw TransportError(std::string("getsockname failed: ") + std::strerror(e));
  }
  port_ = ntohs(actual.sin_port);
}

UdpSocket::~UdpSocket() {
  if (fd_ >= 0) ::close(fd_);
}

void UdpSocket::send_to(const std::string& peer, ByteView datagram) {
  sockaddr_in addr = parse_peer(peer);
  ssize_t n = ::sendto(fd_, datagram.data(), datagram.size(), 0,
                       reinterpret_cast<sockaddr*>(&addr), sizeof(addr));
  if (n < 0 || static_cast<size_t>(n) != datagram.size())
    throw TransportError(std::string("sendto failed: ") + std::strerror(errno));
}

std::optional<std::pair<std::string, Bytes>> UdpSocket::recv_from(int timeout_ms) {
  if (!wait_readable(fd_, timeout_ms)) return std::nullopt;
  Bytes buf(kMaxDatagram);
  sockaddr_in from{};
  socklen_t len = sizeof(from);
  ssize_t n = ::recvfrom(fd_, buf.data(), buf.size(), 0,
                         reinterpret_cast<sockaddr*>(&from), &len);
  if (n < 0) {
    if (errno == EINTR || errno == ECONNREFUSED) return std::nullopt;
    throw TransportError(std::string("recvfrom failed: ") + std::strerror(errno));
  }
  buf.resize(static_cast<size_t>(n));
  return std::make_pair(addr_to_string(from), std::move(buf));
}

void MemoryEndpoint::send(ByteView datagram) {
  Bytes copy(datagram.begin(), datagram.end());
  {
    std::lock_guard lk(hook_m_);
    if (hook_ && !hook_(copy)) return;  // dropped
  }
  if (!peer_inbox_) throw TransportError("memory endpoint has no peer");
  {
    std::lock_guard lk(peer_inbox_->m);
    peer_inbox_->q.push_back(std::move(copy));
  }
  peer_inbox_->cv.notify_one();
}

std::optional<Bytes> MemoryEndpoint::recv(int timeout_ms) {
  std::unique_lock lk(inbox_->m);
  if (!inbox_->cv.wait_for(lk, std::chrono::milliseconds(timeout_ms),
                           [&] { return !inbox_->q.empty(); }))
    return std::nullopt;
  Bytes d = std::move(inbox_->q.front());
  inbox_->q.pop_front();
  return d;
}

void MemoryEndpoint::set_send_hook(Hook hook) {
  std::lock_guard lk(hook_m_);
  hook_ = std::move(hook);
}

void MemoryEndpoint::inject(ByteView datagram) {
  {
    std::lock_guard lk(inbox_->m);
    inbox_->q.emplace_back(datagram.begin(), datagram.end());
  }
  inbox_->cv.notify_one();
}

std::pair<std::unique_ptr<MemoryEndpoint>, std::unique_ptr<MemoryEndpoint>> make_memory_pair() {
  auto a = std::make_unique<MemoryEndpoint>();
  auto b = std::make_unique<MemoryEndpoint>();
  a->peer_inbox_ = b->inbox_;
  b->peer_inbox_ = a->inbox_;
  return {std::move(a), std::move(b)};
}

uint64_t steady_now_ms() {
  return static_cast<uint64_t>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                   std::chrono::steady_clock::now().time_since_epoch())
                                   .count());
}

}  // namespace qeaas::pqch
