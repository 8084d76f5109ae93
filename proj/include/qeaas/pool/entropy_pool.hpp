#pragma once
// Client-side entropy pool modeled on the Linux 5.17+ random subsystem:
// BLAKE2s mixing on injection, full-state hash + re-key on extraction,
// entropy-credit accounting, and threshold-driven refill from a backend
// source. The exact byte-level schedule is documented in
// docs/pool-schedule.md and is deliberately simple enough to recompute
// independently.

#include "qeaas/bytes.hpp"
#include "qeaas/pool/entropy_source.hpp"

#include <memory>
#include <mutex>

namespace qeaas::pool {

struct PoolError : std::runtime_error {
  enum class Kind { InvalidConfig, OverclaimedEntropy, BackendFailure };
  PoolError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
  Kind kind;
};

struct PoolConfig {
  size_t capacity_bytes = 512;
  // threshold_bytes = 0 disables automatic refill (used to isolate operation
  // cost in benchmarks); otherwise refill triggers when the credit drops
  // below threshold_bytes * 8 bits.
  size_t threshold_bytes = 128;
  unsigned credit_per_backend_byte = 8;       // bits credited per refill byte
  unsigned credit_per_injected_byte_cap = 8;  // cap on caller-claimed bits/byte

  void validate() const;  // throws PoolError{InvalidConfig}
};

class Pool {
 public:
  Pool(std::unique_ptr<EntropySource> backend, PoolConfig config = {});

  // Mixes caller-supplied bytes into the pool. entropy_bits must not exceed
  // 8 * data.size(); the credited amount is additionally capped by
  // credit_per_injected_byte_cap. Empty data with 0 bits is a no-op.
  void inject(ByteView data, uint64_t entropy_bits);

  struct ExtractResult {
    Bytes bytes;
    // Set when a threshold-triggered refill failed; the extracted bytes are
    // still valid output.
    bool refill_failed = false;
  };
  ExtractResult extract(size_t n);

  uint64_t entropy_available() const;  // current credit in bits

  // Explicit refill: reads capacity_bytes from the backend and mixes them in
  // via the injection path, crediting credit_per_backend_byte bits per byte.
  void refill();

  const PoolConfig& config() const { return config_; }
  EntropySource& backend() { return *backend_; }

 private:
  void mix(ByteView data);            // chain_key <- B2S(chain_key ‖ tag ‖ data)
  void refill_locked();               // caller holds mutex_
  void credit_add(uint64_t bits);

  PoolConfig config_;
  std::unique_ptr<EntropySource> backend_;
  Bytes chain_key_;          // 32 bytes, never emitted
  uint64_t credit_bits_ = 0;
  uint64_t extract_counter_ = 0;
  mutable std::mutex mutex_;
};

}  // namespace qeaas::pool
