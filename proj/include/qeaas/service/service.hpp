#pragma once
// HTTP entropy backend: GET /random_number/{num_bytes} with 1 ≤ num_bytes ≤
// 256 returns {"random_bytes": "<hex>", "num_bytes": N, "source": "<mode>"}.
// The request handling core is a pure function over (method, path) so it can
// be tested without sockets; EntropyService wraps it in an HTTP/1.1 server.

#include "qeaas/bytes.hpp"
#include "qeaas/pool/entropy_source.hpp"

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

namespace qeaas::service {

enum class ServiceMode { Direct, Mixed, Test };

std::string to_string(ServiceMode mode);
std::optional<ServiceMode> mode_from_string(std::string_view s);

struct ServiceConfig {
  ServiceMode mode = ServiceMode::Mixed;
  std::string stream_file;  // direct mode
  uint64_t seed = 0;        // test mode
  uint16_t port = 6065;
  std::string bind_addr = "0.0.0.0";
};

struct HttpResponse {
  int status = 0;
  std::string content_type;
  std::string body;
};

constexpr size_t kMinRequestBytes = 1;
constexpr size_t kMaxRequestBytes = 256;

// Core request handler. `source` provides the bytes for valid requests; the
// mode string is echoed in the JSON "source" field.
HttpResponse handle_http(const std::string& method, const std::string& path,
                         pool::EntropySource& source, ServiceMode mode);

class EntropyService {
 public:
  explicit EntropyService(ServiceConfig config);
  ~EntropyService();
  EntropyService(const EntropyService&) = delete;
  EntropyService& operator=(const EntropyService&) = delete;

  // Binds and serves on a background thread; throws std::runtime_error when
  // the port cannot be bound. With config.port == 0 an ephemeral port is
  // chosen; port() reports the actual one.
  void start();
  void stop();
  uint16_t port() const { return port_; }

  // Direct access to the handler core with this service's source (tests).
  HttpResponse handle(const std::string& method, const std::string& path);

 private:
  ServiceConfig config_;
  std::unique_ptr<pool::EntropySource> source_;
  std::mutex source_mutex_;
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::thread thread_;
  uint16_t port_ = 0;
};

}  // namespace qeaas::service
