#include "qeaas/proxy/http_client.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstring>

namespace qeaas::proxy {

namespace {

using Kind = HttpError::Kind;

uint64_t now_ms() {
  return static_cast<uint64_t>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                   std::chrono::steady_clock::now().time_since_epoch())
                                   .count());
}

int remaining(uint64_t deadline) {
  uint64_t now = now_ms();
  if (now >= deadline) return 0;
  return static_cast<int>(std::min<uint64_t>(deadline - now, 1u << 30));
}

struct Fd {
  int fd = -1;
  ~Fd() {
    if (fd >= 0) ::close(fd);
  }
};

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

std::optional<UrlParts> parse_http_url(const std::string& url) {
  constexpr std::string_view kScheme = "http://";
  if (url.rfind(kScheme, 0) != 0) return std::nullopt;
  std::string rest = url.substr(kScheme.size());
  size_t slash = rest.find('/');
  std::string authority = slash == std::string::npos ? rest : rest.substr(0, slash);
  std::string path = slash == std::string::npos ? "/" : rest.substr(slash);
  if (authority.empty()) return std::nullopt;

  UrlParts parts;
  size_t colon = authority.rfind(':');
  if (colon == std::string::npos) {
    parts.host = authority;
  } else {
    parts.host = authority.substr(0, colon);
    std::string port_str = authority.substr(colon + 1);
    if (port_str.empty() || port_str.size() > 5) return std::nullopt;
    unsigned long port = 0;
    for (char c : port_str) {
      if (c < '0' || c > '9') return std::nullopt;
      port = port * 10 + static_cast<unsigned long>(c - '0');
    }
    if (port == 0 || port > 65535) return std::nullopt;
    parts.port = static_cast<uint16_t>(port);
  }
  if (parts.host.empty()) return std::nullopt;
  parts.path = std::move(path);
  return parts;
}

HttpResult http_get(const UrlParts& url, int timeout_ms) {
  uint64_t deadline = now_ms() + static_cast<uint64_t>(std::max(timeout_ms, 0));

  // Resolve.
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(url.port);
  if (inet_pton(AF_INET, url.host.c_str(), &addr.sin_addr) != 1) {
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    if (getaddrinfo(url.host.c_str(), nullptr, &hints, &res) != 0 || res == nullptr)
      throw HttpError(Kind::Unreachable, "cannot resolve host: " + url.host);
    addr.sin_addr = reinterpret_cast<sockaddr_in*>(res->ai_addr)->sin_addr;
    freeaddrinfo(res);
  }

  // Non-blocking connect with deadline.
  Fd sock{::socket(AF_INET, SOCK_STREAM, 0)};
  if (sock.fd < 0) throw HttpError(Kind::Unreachable, "socket failed");
  int flags = ::fcntl(sock.fd, F_GETFL, 0);
  ::fcntl(sock.fd, F_SETFL, flags | O_NONBLOCK);
  int rc = ::connect(sock.fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr));
  if (rc != 0) {
    if (errno != EINPROGRESS)
      throw HttpError(Kind::Unreachable, std::string("connect failed: ") + std::strerror(errno));
    pollfd p{sock.fd, POLLOUT, 0};
    rc = ::poll(&p, 1, remaining(deadline));
    if (rc == 0) throw HttpError(Kind::Timeout, "connect timed out");
    if (rc < 0) throw HttpError(Kind::Unreachable, "poll failed during connect");
    int err = 0;
    socklen_t len = sizeof(err);
    ::getsockopt(sock.fd, SOL_SOCKET, SO_ERROR, &err, &len);
    if (err != 0)
      throw HttpError(Kind::Unreachable, std::string("connect failed: ") + std::strerror(err));
  }

  // Send the request.
  std::string request = "GET " + url.path + " HTTP/1.1\r\nHost: " + url.host + ":" +
                        std::to_string(url.port) +
                        "\r\nConnection: close\r\nAccept: application/json\r\n\r\n";
  size_t sent = 0;
  while (sent < request.size()) {
    pollfd p{sock.fd, POLLOUT, 0};
    rc = ::poll(&p, 1, remaining(deadline));
    if (rc == 0) throw HttpError(Kind::Timeout, "send timed out");
    if (rc < 0) throw HttpError(Kind::Unreachable, "poll failed during send");
    ssize_t n = ::send(sock.fd, request.data() + sent, request.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EAGAIN || errno == EWOULDBLOCK) continue;
      throw HttpError(Kind::Unreachable, std::string("send failed: ") + std::strerror(errno));
    }
    sent += static_cast<size_t>(n);
  }

  // Read until close (Connection: close) or Content-Length satisfied.
  std::string response;
  std::optional<size_t> header_end;
  std::optional<size_t> content_length;
  char buf[8192];
  while (true) {
    if (header_end && content_length &&
        response.size() >= *header_end + *content_length)
      break;
    pollfd p{sock.fd, POLLIN, 0};
    rc = ::poll(&p, 1, remaining(deadline));
    if (rc == 0) throw HttpError(Kind::Timeout, "response timed out");
    if (rc < 0) throw HttpError(Kind::Unreachable, "poll failed during receive");
    ssize_t n = ::recv(sock.fd, buf, sizeof(buf), 0);
    if (n < 0) {
      if (errno == EAGAIN || errno == EWOULDBLOCK) continue;
      throw HttpError(Kind::Unreachable, std::string("recv failed: ") + std::strerror(errno));
    }
    if (n == 0) break;  // peer closed
    response.append(buf, static_cast<size_t>(n));
    if (response.size() > (8u << 20)) throw HttpError(Kind::Protocol, "response too large");
    if (!header_end) {
      size_t he = response.find("\r\n\r\n");
      if (he != std::string::npos) {
        header_end = he + 4;
        // Scan headers for Content-Length / unsupported Transfer-Encoding.
        std::string headers = lower(response.substr(0, he));
        if (headers.find("transfer-encoding: chunked") != std::string::npos)
          throw HttpError(Kind::Protocol, "chunked responses not supported");
        size_t cl = headers.find("content-length:");
        if (cl != std::string::npos) {
          size_t v = cl + strlen("content-length:");
          while (v < headers.size() && headers[v] == ' ') ++v;
          size_t end = headers.find("\r\n", v);
          try {
            content_length = std::stoul(headers.substr(v, end - v));
          } catch (const std::exception&) {
            throw HttpError(Kind::Protocol, "bad Content-Length");
          }
        }
      }
    }
  }

  if (!header_end) throw HttpError(Kind::Protocol, "no HTTP header terminator");
  // Status line: HTTP/1.x SP status SP reason.
  size_t line_end = response.find("\r\n");
  std::string status_line = response.substr(0, line_end);
  if (status_line.rfind("HTTP/1.", 0) != 0) throw HttpError(Kind::Protocol, "bad status line");
  size_t sp = status_line.find(' ');
  if (sp == std::string::npos || status_line.size() < sp + 4)
    throw HttpError(Kind::Protocol, "bad status line");
  int status = 0;
  for (int i = 0; i < 3; ++i) {
    char c = status_line[sp + 1 + static_cast<size_t>(i)];
    if (c < '0' || c > '9') throw HttpError(Kind::Protocol, "bad status code");
    status = status * 10 + (c - '0');
  }

  HttpResult result;
  result.status = status;
  result.body = response.substr(*header_end);
  if (content_length && result.body.size() > *content_length)
    result.body.resize(*content_length);
  if (content_length && result.body.size() < *content_length)
    throw HttpError(Kind::Protocol, "body shorter than Content-Length");
  return result;
}

}  // namespace qeaas::proxy
