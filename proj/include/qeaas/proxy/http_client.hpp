#pragma once
// Minimal internal HTTP/1.1 GET client for the proxy's backend hop: plain
// TCP, Connection: close, Content-Length or read-to-close bodies, total
// deadline over connect + send + receive. Deliberately not a general HTTP
// client — the proxy only ever issues GETs to the entropy backend.

#include <optional>
#include <stdexcept>
#include <string>

namespace qeaas::proxy {

struct UrlParts {
  std::string host;
  uint16_t port = 80;
  std::string path;  // always starts with '/'
};

// Accepts http:// URLs only (the backend hop is plain HTTP).
std::optional<UrlParts> parse_http_url(const std::string& url);

struct HttpError : std::runtime_error {
  enum class Kind {
    Timeout,      // deadline elapsed
    Unreachable,  // resolve/connect/reset failures (backend down)
    Protocol,     // response unparseable or unsupported
  };
  HttpError(Kind k, const std::string& what) : std::runtime_error(what), kind(k) {}
  Kind kind;
};

struct HttpResult {
  int status = 0;
  std::string body;
};

HttpResult http_get(const UrlParts& url, int timeout_ms);

}  // namespace qeaas::proxy
