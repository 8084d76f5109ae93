#pragma once
// Measurement drivers behind the client CLI: a single entropy fetch through
// the proxy, plus the three benchmark loops (pool operations, fresh
// handshakes, round trips on one session). Loops are single-threaded by
// design; every timed sample becomes one BenchRow (schema in csv.hpp).

#include "qeaas/bench/clock.hpp"
#include "qeaas/bench/csv.hpp"
#include "qeaas/pool/entropy_pool.hpp"
#include "qeaas/pqch/cert.hpp"
#include "qeaas/pqch/channel.hpp"

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qeaas::bench {

struct FetchError : std::runtime_error {
  // Distinct kinds map to distinct CLI exit codes.
  enum class Kind { Transport, Handshake, Backend, Json, Hex };
  FetchError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
  Kind kind;
};

// Instrumentation points; tests use these to assert that pool operations
// never run inside the transport timer window.
enum class Phase { TimerStart, TimerStop, PoolInject, PoolExtract };
using PhaseHook = std::function<void(Phase)>;

struct ClientConfig {
  std::string proxy_host = "127.0.0.1";
  uint16_t proxy_port = 5683;
  // Absolute http:// URI the proxy forwards to (the Proxy-Uri option value).
  std::string proxy_uri = "http://127.0.0.1:6065/random_number/8";
  bool secure = false;
  pqch::HandshakeConfig handshake{};
  std::optional<pqch::Certificate> trust_anchor;  // required for full-chain
  pool::PoolConfig pool{};
  unsigned inject_entropy_bits_per_byte = 8;
  size_t iterations = 100;
  size_t warmup = 5;
  // < 0 selects the default: 1000 ms on the secure transport, 100 ms plain.
  int inter_iteration_delay_ms = -1;
  int request_timeout_ms = 5000;

  int effective_delay_ms() const {
    return inter_iteration_delay_ms >= 0 ? inter_iteration_delay_ms : (secure ? 1000 : 100);
  }
  std::string transport_name() const { return secure ? "secure" : "plain"; }
  // Row label, e.g. "mlkem512+mldsa44+full-chain" or "plain".
  std::string config_id() const;
  void validate() const;  // throws std::invalid_argument
};

struct FetchResult {
  Bytes injected;   // raw bytes returned by the backend
  Bytes extracted;  // 32 bytes drawn from the local pool afterwards
  // Session creation (secure) / socket creation (plain) through the first
  // CoAP response, matching the handshake benchmark's timer placement.
  uint64_t fetch_us = 0;
  uint64_t inject_us = 0;
  uint64_t extract_us = 0;
  std::string backend_source;  // "source" field echoed by the backend
};

// One full client cycle: CoAP GET via the proxy, JSON + hex decode,
// pool.inject(bytes, len * inject_entropy_bits_per_byte), pool.extract(32).
// Throws FetchError.
FetchResult fetch_entropy(const ClientConfig& config, Clock& clock,
                          const PhaseHook& hook = {});

struct PoolBenchOptions {
  std::vector<size_t> sizes = {16, 32, 64, 128, 256};
  size_t iterations = 100;
  size_t warmup = 5;
  uint64_t seed = 1;  // deterministic-test backend seed for inject buffers
};
// Times pool.inject and pool.extract per buffer size. The pool runs with the
// refill threshold disabled so the rows isolate single-operation cost.
std::vector<BenchRow> bench_pool(const PoolBenchOptions& options, Clock& clock);

// Fresh session per iteration: the timer spans session creation through the
// first CoAP response, then the session is torn down. Failed iterations are
// recorded with failed=1 (latency 0) and the run continues.
std::vector<BenchRow> bench_handshake(const ClientConfig& config, Clock& clock);

// Establishes one session (untimed), then times request/response cycles on
// it. Lost responses become failed rows; a fatal channel error aborts with
// FetchError.
std::vector<BenchRow> bench_rtt(const ClientConfig& config, Clock& clock);

}  // namespace qeaas::bench
