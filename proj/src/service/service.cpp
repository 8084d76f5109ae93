#include "qeaas/service/service.hpp"

#include <charconv>
#include <chrono>

#include "httplib.h"
#include "json.hpp"

namespace qeaas::service {

namespace {

using nlohmann::json;

HttpResponse json_response(int status, json body) {
  return {status, "application/json", body.dump()};
}

HttpResponse error_response(int status, std::string_view message) {
  return json_response(status, json{{"error", message}});
}

// Parses the {num_bytes} path segment: pure decimal digits in 1..256.
std::optional<size_t> parse_num_bytes(std::string_view segment) {
  if (segment.empty() || segment.size() > 5) return std::nullopt;
  for (char c : segment)
    if (c < '0' || c > '9') return std::nullopt;
  size_t value = 0;
  auto [ptr, ec] = std::from_chars(segment.data(), segment.data() + segment.size(), value);
  if (ec != std::errc() || ptr != segment.data() + segment.size()) return std::nullopt;
  if (value < kMinRequestBytes || value > kMaxRequestBytes) return std::nullopt;
  return value;
}

}  // namespace

std::string to_string(ServiceMode mode) {
  switch (mode) {
    case ServiceMode::Direct: return "direct";
    case ServiceMode::Mixed: return "mixed";
    case ServiceMode::Test: return "test";
  }
  return "?";
}

std::optional<ServiceMode> mode_from_string(std::string_view s) {
  if (s == "direct") return ServiceMode::Direct;
  if (s == "mixed") return ServiceMode::Mixed;
  if (s == "test") return ServiceMode::Test;
  return std::nullopt;
}

HttpResponse handle_http(const std::string& method, const std::string& path,
                         pool::EntropySource& source, ServiceMode mode) {
  if (method != "GET") return error_response(405, "method not allowed");

  constexpr std::string_view kPrefix = "/random_number/";
  if (path.rfind(kPrefix, 0) != 0) {
    if (path == "/random_number") return error_response(400, "num_bytes missing");
    return error_response(404, "not found");
  }
  auto num_bytes = parse_num_bytes(std::string_view(path).substr(kPrefix.size()));
  if (!num_bytes)
    return error_response(400, "num_bytes must be an integer in [1, 256]");

  Bytes data;
  try {
    data = source.read(*num_bytes);
  } catch (const pool::SourceError& e) {
    return error_response(500, e.what());
  }
  return json_response(200, json{{"random_bytes", hex_encode(data)},
                                 {"num_bytes", *num_bytes},
                                 {"source", to_string(mode)}});
}

struct EntropyService::Impl {
  httplib::Server server;
};

EntropyService::EntropyService(ServiceConfig config)
    : config_(std::move(config)), impl_(std::make_unique<Impl>()) {
  switch (config_.mode) {
    case ServiceMode::Direct:
      source_ = std::make_unique<pool::SimulatedQrngSource>(config_.stream_file);
      break;
    case ServiceMode::Mixed:
      source_ = std::make_unique<pool::OsRandomSource>();
      break;
    case ServiceMode::Test:
      source_ = std::make_unique<pool::DeterministicTestSource>(config_.seed);
      break;
  }
}

EntropyService::~EntropyService() { stop(); }

HttpResponse EntropyService::handle(const std::string& method, const std::string& path) {
  std::lock_guard lk(source_mutex_);
  return handle_http(method, path, *source_, config_.mode);
}

void EntropyService::start() {
  auto respond = [this](const httplib::Request& req, httplib::Response& res) {
    HttpResponse r = handle(req.method, req.path);
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  };
  auto& svr = impl_->server;
  // Keep SO_REUSEADDR for fast restarts but not SO_REUSEPORT: a second
  // instance on the same port must fail instead of silently sharing it.
  svr.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
  });
  const std::string any = "/(.*)";
  svr.Get(any, respond);
  svr.Post(any, respond);
  svr.Put(any, respond);
  svr.Delete(any, respond);
  svr.Patch(any, respond);

  if (config_.port == 0) {
    int p = svr.bind_to_any_port(config_.bind_addr);
    if (p <= 0) throw std::runtime_error("cannot bind an ephemeral port");
    port_ = static_cast<uint16_t>(p);
  } else {
    if (!svr.bind_to_port(config_.bind_addr, config_.port))
      throw std::runtime_error("cannot bind port " + std::to_string(config_.port));
    port_ = config_.port;
  }
  thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
  svr.wait_until_ready();
}

void EntropyService::stop() {
  if (thread_.joinable()) {
    impl_->server.stop();
    thread_.join();
  }
}

}  // namespace qeaas::service
