#include "qeaas/proxy/proxy.hpp"

#include <chrono>
#include <cstdio>

namespace qeaas::proxy {

namespace {

coap::Message base_response(const coap::Message& request, uint16_t response_mid) {
  coap::Message resp;
  resp.token = request.token;
  if (request.type == coap::MsgType::Confirmable) {
    resp.type = coap::MsgType::Ack;  // piggybacked response
    resp.message_id = request.message_id;
  } else {
    resp.type = coap::MsgType::NonConfirmable;
    resp.message_id = response_mid;
  }
  return resp;
}

void log_request(const char* transport, coap::Code code, uint64_t latency_us) {
  auto wall = std::chrono::system_clock::now().time_since_epoch();
  double ts = std::chrono::duration<double>(wall).count();
  // One line per request: timestamp, transport, response code, latency.
  std::fprintf(stdout, "[%.3f] %s %s %lluus\n", ts, transport,
               coap::code_string(code).c_str(),
               static_cast<unsigned long long>(latency_us));
  std::fflush(stdout);
}

}  // namespace

Fetcher make_http_fetcher(int timeout_ms) {
  return [timeout_ms](const std::string& uri) -> BackendResult {
    auto parts = parse_http_url(uri);
    if (!parts) return {BackendResult::Kind::Protocol, 0, "unparseable URI"};
    try {
      HttpResult r = http_get(*parts, timeout_ms);
      return {BackendResult::Kind::Http, r.status, std::move(r.body)};
    } catch (const HttpError& e) {
      switch (e.kind) {
        case HttpError::Kind::Timeout: return {BackendResult::Kind::Timeout, 0, e.what()};
        case HttpError::Kind::Unreachable:
          return {BackendResult::Kind::Unreachable, 0, e.what()};
        case HttpError::Kind::Protocol: return {BackendResult::Kind::Protocol, 0, e.what()};
      }
      return {BackendResult::Kind::Protocol, 0, "unknown error"};
    }
  };
}

coap::Message handle_coap(const coap::Message& request, const Fetcher& fetch,
                          const std::string& allow_prefix, uint16_t response_mid) {
  coap::Message resp = base_response(request, response_mid);

  if (request.code != coap::Code::Get) {
    resp.code = coap::Code::MethodNotAllowed;
    return resp;
  }
  auto uri_opt = request.find_option(coap::kOptionProxyUri);
  if (!uri_opt || uri_opt->empty() || uri_opt->size() > coap::kMaxProxyUriBytes) {
    resp.code = coap::Code::BadRequest;
    return resp;
  }
  std::string uri = to_string(*uri_opt);
  if (!parse_http_url(uri)) {
    resp.code = coap::Code::BadRequest;
    return resp;
  }
  if (!allow_prefix.empty() && uri.rfind(allow_prefix, 0) != 0) {
    resp.code = coap::Code::BadRequest;
    return resp;
  }

  BackendResult r = fetch(uri);
  switch (r.kind) {
    case BackendResult::Kind::Http:
      if (r.status >= 200 && r.status < 300) {
        resp.code = coap::Code::Content;
        resp.add_option(coap::kOptionContentFormat, Bytes{coap::kContentFormatJson});
        resp.payload = to_bytes(r.body);
      } else if (r.status >= 400 && r.status < 500) {
        resp.code = coap::Code::BadRequest;
      } else {
        // 3xx (not followed), 5xx, and anything else.
        resp.code = coap::Code::BadGateway;
      }
      break;
    case BackendResult::Kind::Timeout:
    case BackendResult::Kind::Unreachable:
      resp.code = coap::Code::GatewayTimeout;
      break;
    case BackendResult::Kind::Protocol:
      resp.code = coap::Code::BadGateway;
      break;
  }
  return resp;
}

Proxy::Proxy(ProxyConfig config) : config_(std::move(config)) {
  if (config_.coap_port != 0 && config_.coap_port == config_.coaps_port)
    throw std::invalid_argument("plain and secure ports must differ");
  fetch_ = make_http_fetcher(config_.backend_timeout_ms);
}

Proxy::~Proxy() { stop(); }

uint16_t Proxy::coap_port() const { return plain_socket_ ? plain_socket_->port() : 0; }
uint16_t Proxy::coaps_port() const { return secure_driver_ ? secure_driver_->port() : 0; }

void Proxy::start() {
  plain_socket_ = std::make_unique<pqch::UdpSocket>(config_.coap_port, config_.bind_addr);
  secure_driver_ = std::make_unique<pqch::UdpServerDriver>(
      config_.coaps_port, config_.handshake, config_.key_store, config_.bind_addr);
  accepting_.store(true);

  secure_driver_->set_handler([this](const std::string& peer, Bytes plaintext) {
    if (!accepting_.load()) return;
    dispatch({true, peer, std::move(plaintext)});
  });
  plain_thread_ = std::thread([this] { plain_loop(); });
  workers_.reserve(config_.worker_threads);
  for (size_t i = 0; i < config_.worker_threads; ++i)
    workers_.emplace_back([this] { worker_loop(); });
}

void Proxy::stop() {
  if (!plain_thread_.joinable() && workers_.empty()) return;
  accepting_.store(false);
  if (plain_thread_.joinable()) plain_thread_.join();
  {
    std::lock_guard lk(queue_m_);
    draining_ = true;  // workers exit once the queue is empty
  }
  queue_cv_.notify_all();
  for (std::thread& w : workers_)
    if (w.joinable()) w.join();
  workers_.clear();
  if (secure_driver_) secure_driver_->stop();
}

void Proxy::dispatch(Task task) {
  {
    std::lock_guard lk(queue_m_);
    queue_.push_back(std::move(task));
  }
  queue_cv_.notify_one();
}

void Proxy::plain_loop() {
  while (accepting_.load()) {
    auto incoming = plain_socket_->recv_from(20);
    if (!incoming) continue;
    dispatch({false, incoming->first, std::move(incoming->second)});
  }
}

void Proxy::worker_loop() {
  while (true) {
    Task task;
    {
      std::unique_lock lk(queue_m_);
      queue_cv_.wait(lk, [&] { return !queue_.empty() || draining_; });
      if (queue_.empty()) return;  // draining and drained
      task = std::move(queue_.front());
      queue_.pop_front();
    }
    try {
      process(task);
    } catch (const std::exception&) {
      // Peer vanished mid-response or similar; nothing to clean up.
    }
  }
}

void Proxy::process(const Task& task) {
  auto t0 = std::chrono::steady_clock::now();
  coap::Message request;
  try {
    request = coap::decode(task.datagram);
  } catch (const coap::DecodeError&) {
    return;  // undecodable datagram: drop
  }

  // CoAP ping (empty CON) → RST; stray ACK/RST → no response.
  if (request.type == coap::MsgType::Ack || request.type == coap::MsgType::Reset) return;
  coap::Message resp;
  if (request.code == coap::Code::Empty) {
    if (request.type != coap::MsgType::Confirmable) return;
    resp.type = coap::MsgType::Reset;
    resp.message_id = request.message_id;
  } else {
    resp = handle_coap(request, fetch_, config_.backend_allow_prefix,
                       non_mid_.fetch_add(1));
  }

  Bytes wire = coap::encode(resp);
  requests_served_.fetch_add(1);
  if (task.secure) {
    secure_driver_->send_app(task.peer, wire);
  } else {
    plain_socket_->send_to(task.peer, wire);
  }
  auto us = std::chrono::duration_cast<std::chrono::microseconds>(
                std::chrono::steady_clock::now() - t0)
                .count();
  log_request(task.secure ? "coaps" : "coap", resp.code, static_cast<uint64_t>(us));
}

}  // namespace qeaas::proxy
