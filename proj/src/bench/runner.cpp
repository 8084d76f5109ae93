#include "qeaas/bench/runner.hpp"

#include "qeaas/coap/coap.hpp"
#include "qeaas/crypto/random.hpp"
#include "qeaas/pqch/transport.hpp"

#include <json.hpp>

#include <algorithm>
#include <thread>

namespace qeaas::bench {

namespace {

using nlohmann::json;

void sleep_ms(int ms) {
  if (ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(ms));
}

void call(const PhaseHook& hook, Phase p) {
  if (hook) hook(p);
}

coap::Message make_request(const ClientConfig& cfg, uint16_t mid) {
  coap::Message req;
  req.type = coap::MsgType::Confirmable;
  req.code = coap::Code::Get;
  req.message_id = mid;
  req.token = crypto::os_random(4);
  req.add_option(coap::kOptionProxyUri, std::string_view(cfg.proxy_uri));
  return req;
}

uint16_t fresh_mid() {
  Bytes r = crypto::os_random(2);
  return static_cast<uint16_t>((r[0] << 8) | r[1]);
}

// Raises Backend for any non-2.05 response, quoting the error body when the
// backend sent one.
void require_content(const coap::Message& rsp) {
  if (rsp.code == coap::Code::Content) return;
  std::string msg = "proxy returned " + coap::code_string(rsp.code);
  if (!rsp.payload.empty()) msg += ": " + qeaas::to_string(rsp.payload);
  throw FetchError(FetchError::Kind::Backend, msg);
}

// One CoAP exchange over plain UDP, with CON retransmission. The timer is
// managed by the caller.
coap::Message plain_exchange(pqch::UdpClientTransport& transport, const coap::Message& req,
                             int timeout_ms) {
  Bytes wire = coap::encode(req);
  uint64_t deadline = pqch::steady_now_ms() + static_cast<uint64_t>(std::max(timeout_ms, 1));
  uint64_t next_send = 0;
  constexpr uint64_t kRtxIntervalMs = 1000;
  while (true) {
    uint64_t now = pqch::steady_now_ms();
    if (now >= deadline)
      throw FetchError(FetchError::Kind::Transport, "timed out waiting for CoAP response");
    if (now >= next_send) {
      transport.send(wire);
      next_send = now + kRtxIntervalMs;
    }
    int wait = static_cast<int>(std::min(deadline, next_send) - now);
    auto dgram = transport.recv(wait);
    if (!dgram) continue;
    coap::Message rsp;
    try {
      rsp = coap::decode(*dgram);
    } catch (const coap::DecodeError&) {
      continue;
    }
    if (rsp.type == coap::MsgType::Reset && rsp.message_id == req.message_id)
      throw FetchError(FetchError::Kind::Backend, "proxy reset the exchange");
    if (coap::match_response(req, rsp)) return rsp;
  }
}

FetchError from_channel_error(const pqch::ChannelError& e) {
  using K = pqch::ChannelError::Kind;
  if (e.kind == K::Transport)
    return FetchError(FetchError::Kind::Transport, e.what());
  return FetchError(FetchError::Kind::Handshake, e.what());
}

// One full transport cycle: session/socket creation through the first
// matching CoAP response. Returns the response and the elapsed time.
struct Exchange {
  coap::Message response;
  uint64_t latency_us;
};

Exchange timed_first_exchange(const ClientConfig& cfg, Clock& clock, const PhaseHook& hook) {
  coap::Message req = make_request(cfg, fresh_mid());
  Exchange out;
  call(hook, Phase::TimerStart);
  uint64_t t0 = clock.now_us();
  if (cfg.secure) {
    try {
      pqch::UdpClientTransport transport(cfg.proxy_host, cfg.proxy_port);
      pqch::ClientChannel channel(transport, cfg.handshake, cfg.trust_anchor);
      channel.connect_with_first_request(coap::encode(req));
      uint64_t deadline =
          pqch::steady_now_ms() + static_cast<uint64_t>(std::max(cfg.request_timeout_ms, 1));
      while (true) {
        uint64_t now = pqch::steady_now_ms();
        if (now >= deadline)
          throw FetchError(FetchError::Kind::Transport, "timed out waiting for CoAP response");
        auto plaintext = channel.recv_app(static_cast<int>(deadline - now));
        if (!plaintext) continue;
        coap::Message rsp;
        try {
          rsp = coap::decode(*plaintext);
        } catch (const coap::DecodeError&) {
          continue;
        }
        if (coap::match_response(req, rsp)) {
          out.response = std::move(rsp);
          break;
        }
      }
      out.latency_us = tick_delta64(t0, clock.now_us());
      call(hook, Phase::TimerStop);
      channel.close();
      return out;
    } catch (const pqch::ChannelError& e) {
      throw from_channel_error(e);
    } catch (const pqch::TransportError& e) {
      throw FetchError(FetchError::Kind::Transport, e.what());
    }
  }
  try {
    pqch::UdpClientTransport transport(cfg.proxy_host, cfg.proxy_port);
    out.response = plain_exchange(transport, req, cfg.request_timeout_ms);
  } catch (const pqch::TransportError& e) {
    throw FetchError(FetchError::Kind::Transport, e.what());
  }
  out.latency_us = tick_delta64(t0, clock.now_us());
  call(hook, Phase::TimerStop);
  return out;
}

Bytes decode_backend_json(const coap::Message& rsp, std::string& source_out) {
  json doc;
  try {
    doc = json::parse(rsp.payload.begin(), rsp.payload.end());
  } catch (const json::exception& e) {
    throw FetchError(FetchError::Kind::Json, std::string("backend JSON unparseable: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("random_bytes") || !doc["random_bytes"].is_string() ||
      !doc.contains("num_bytes") || !doc["num_bytes"].is_number_unsigned())
    throw FetchError(FetchError::Kind::Json, "backend JSON missing random_bytes/num_bytes");
  source_out = doc.value("source", std::string{});
  Bytes raw;
  try {
    raw = hex_decode(doc["random_bytes"].get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw FetchError(FetchError::Kind::Hex, std::string("random_bytes not valid hex: ") + e.what());
  }
  if (raw.size() != doc["num_bytes"].get<size_t>())
    throw FetchError(FetchError::Kind::Hex, "random_bytes length disagrees with num_bytes");
  return raw;
}

BenchRow base_row(const ClientConfig& cfg, const std::string& op, size_t iteration) {
  BenchRow row;
  row.config = cfg.config_id();
  if (cfg.secure) {
    row.kex = pqch::to_string(cfg.handshake.kex);
    row.sig = pqch::to_string(cfg.handshake.sig);
    row.verify = pqch::to_string(cfg.handshake.verify_mode);
  } else {
    row.kex = row.sig = row.verify = "none";
  }
  row.transport = cfg.transport_name();
  row.op = op;
  row.size_bytes = 0;
  row.iteration = iteration;
  row.latency_us = 0;
  row.failed = false;
  return row;
}

}  // namespace

std::string ClientConfig::config_id() const {
  if (!secure) return "plain";
  return pqch::to_string(handshake.kex) + "+" + pqch::to_string(handshake.sig) + "+" +
         pqch::to_string(handshake.verify_mode);
}

void ClientConfig::validate() const {
  if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
  if (proxy_uri.empty()) throw std::invalid_argument("proxy_uri must be set");
  if (request_timeout_ms < 1) throw std::invalid_argument("request_timeout_ms must be >= 1");
  if (secure) {
    handshake.validate();
    if (handshake.verify_mode == pqch::VerifyMode::FullChain && !trust_anchor)
      throw std::invalid_argument("full-chain verification needs a trust anchor");
  }
  pool.validate();
}

FetchResult fetch_entropy(const ClientConfig& config, Clock& clock, const PhaseHook& hook) {
  config.validate();
  Exchange ex = timed_first_exchange(config, clock, hook);
  require_content(ex.response);

  FetchResult result;
  result.fetch_us = ex.latency_us;
  result.injected = decode_backend_json(ex.response, result.backend_source);

  pool::Pool pool(std::make_unique<pool::OsRandomSource>(), config.pool);
  uint64_t claimed_bits =
      static_cast<uint64_t>(result.injected.size()) * config.inject_entropy_bits_per_byte;

  call(hook, Phase::PoolInject);
  uint64_t t0 = clock.now_us();
  pool.inject(result.injected, claimed_bits);
  result.inject_us = tick_delta64(t0, clock.now_us());

  call(hook, Phase::PoolExtract);
  t0 = clock.now_us();
  result.extracted = pool.extract(32).bytes;
  result.extract_us = tick_delta64(t0, clock.now_us());
  return result;
}

std::vector<BenchRow> bench_pool(const PoolBenchOptions& options, Clock& clock) {
  if (options.iterations < 1) throw std::invalid_argument("iterations must be >= 1");
  pool::DeterministicTestSource buffers(options.seed);

  std::vector<BenchRow> rows;
  rows.reserve(options.sizes.size() * options.iterations * 2);
  for (size_t size : options.sizes) {
    if (size == 0) throw std::invalid_argument("buffer size must be >= 1");
    pool::PoolConfig pc;
    pc.threshold_bytes = 0;  // no refills inside the timed region
    pool::Pool pool(std::make_unique<pool::DeterministicTestSource>(options.seed ^ size), pc);

    for (size_t it = 0; it < options.warmup + options.iterations; ++it) {
      Bytes buf = buffers.read(size);
      uint64_t t0 = clock.now_us();
      pool.inject(buf, 8 * size);
      uint64_t inject_us = tick_delta64(t0, clock.now_us());

      t0 = clock.now_us();
      (void)pool.extract(size);
      uint64_t extract_us = tick_delta64(t0, clock.now_us());

      if (it < options.warmup) continue;
      ClientConfig local;  // rows carry "local" transport and no algorithms
      local.secure = false;
      BenchRow inj = base_row(local, "inject", it - options.warmup);
      inj.config = "pool";
      inj.transport = "local";
      inj.size_bytes = size;
      inj.latency_us = inject_us;
      rows.push_back(inj);
      BenchRow ext = inj;
      ext.op = "extract";
      ext.latency_us = extract_us;
      rows.push_back(ext);
    }
  }
  return rows;
}

std::vector<BenchRow> bench_handshake(const ClientConfig& config, Clock& clock) {
  config.validate();
  std::vector<BenchRow> rows;
  rows.reserve(config.iterations);
  size_t total = config.warmup + config.iterations;
  for (size_t it = 0; it < total; ++it) {
    bool measured = it >= config.warmup;
    BenchRow row = base_row(config, "handshake", measured ? it - config.warmup : 0);
    try {
      Exchange ex = timed_first_exchange(config, clock, {});
      require_content(ex.response);
      row.latency_us = ex.latency_us;
    } catch (const FetchError&) {
      row.failed = true;
    }
    if (measured) rows.push_back(row);
    if (it + 1 < total) sleep_ms(config.effective_delay_ms());
  }
  return rows;
}

std::vector<BenchRow> bench_rtt(const ClientConfig& config, Clock& clock) {
  config.validate();
  std::vector<BenchRow> rows;
  rows.reserve(config.iterations);

  try {
    pqch::UdpClientTransport transport(config.proxy_host, config.proxy_port);
    std::unique_ptr<pqch::ClientChannel> channel;
    if (config.secure) {
      channel =
          std::make_unique<pqch::ClientChannel>(transport, config.handshake, config.trust_anchor);
      channel->connect();
    }

    auto one_cycle = [&]() -> uint64_t {
      coap::Message req = make_request(config, fresh_mid());
      uint64_t t0 = clock.now_us();
      if (!config.secure) {
        coap::Message rsp = plain_exchange(transport, req, config.request_timeout_ms);
        require_content(rsp);
        return tick_delta64(t0, clock.now_us());
      }
      channel->send_app(coap::encode(req));
      uint64_t deadline =
          pqch::steady_now_ms() + static_cast<uint64_t>(std::max(config.request_timeout_ms, 1));
      while (true) {
        uint64_t now = pqch::steady_now_ms();
        if (now >= deadline)
          throw FetchError(FetchError::Kind::Transport, "timed out waiting for CoAP response");
        auto plaintext = channel->recv_app(static_cast<int>(deadline - now));
        if (!plaintext) continue;
        coap::Message rsp;
        try {
          rsp = coap::decode(*plaintext);
        } catch (const coap::DecodeError&) {
          continue;
        }
        if (!coap::match_response(req, rsp)) continue;
        require_content(rsp);
        return tick_delta64(t0, clock.now_us());
      }
    };

    size_t total = config.warmup + config.iterations;
    for (size_t it = 0; it < total; ++it) {
      bool measured = it >= config.warmup;
      BenchRow row = base_row(config, "rtt", measured ? it - config.warmup : 0);
      try {
        row.latency_us = one_cycle();
      } catch (const FetchError& e) {
        if (e.kind != FetchError::Kind::Transport && e.kind != FetchError::Kind::Backend) throw;
        row.failed = true;
      }
      if (measured) rows.push_back(row);
      if (it + 1 < total) sleep_ms(config.effective_delay_ms());
    }
    if (channel) channel->close();
  } catch (const pqch::ChannelError& e) {
    throw from_channel_error(e);
  } catch (const pqch::TransportError& e) {
    throw FetchError(FetchError::Kind::Transport, e.what());
  }
  return rows;
}

}  // namespace qeaas::bench
