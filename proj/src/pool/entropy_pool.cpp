#include "qeaas/pool/entropy_pool.hpp"

#include "qeaas/crypto/blake2s.hpp"

namespace qeaas::pool {

namespace {
const Bytes kTagInit = to_bytes("qeaas/init");
const Bytes kTagInject = to_bytes("qeaas/inject");
const Bytes kTagExtract = to_bytes("qeaas/extract");
const Bytes kTagRekey = to_bytes("qeaas/rekey");
}  // namespace

void PoolConfig::validate() const {
  if (capacity_bytes == 0)
    throw PoolError(PoolError::Kind::InvalidConfig, "pool: capacity must be positive");
  if (threshold_bytes > capacity_bytes)
    throw PoolError(PoolError::Kind::InvalidConfig, "pool: threshold exceeds capacity");
  if (credit_per_backend_byte > 8 || credit_per_injected_byte_cap > 8)
    throw PoolError(PoolError::Kind::InvalidConfig, "pool: credit caps are 0..8 bits per byte");
}

Pool::Pool(std::unique_ptr<EntropySource> backend, PoolConfig config)
    : config_(config), backend_(std::move(backend)) {
  config_.validate();
  Bytes seed;
  try {
    seed = backend_->read(config_.capacity_bytes);
  } catch (const SourceError& e) {
    throw PoolError(PoolError::Kind::BackendFailure, e.what());
  }
  chain_key_ = crypto::blake2s({kTagInit, seed});
  credit_add(static_cast<uint64_t>(config_.capacity_bytes) * config_.credit_per_backend_byte);
}

void Pool::credit_add(uint64_t bits) {
  credit_bits_ = std::min<uint64_t>(credit_bits_ + bits,
                                    static_cast<uint64_t>(config_.capacity_bytes) * 8);
}

void Pool::mix(ByteView data) { chain_key_ = crypto::blake2s({chain_key_, kTagInject, data}); }

void Pool::inject(ByteView data, uint64_t entropy_bits) {
  if (entropy_bits > 8 * static_cast<uint64_t>(data.size()))
    throw PoolError(PoolError::Kind::OverclaimedEntropy,
                    "pool: entropy_bits exceeds 8 bits per injected byte");
  if (data.empty() && entropy_bits == 0) return;
  std::lock_guard lock(mutex_);
  mix(data);
  credit_add(std::min<uint64_t>(
      entropy_bits, static_cast<uint64_t>(data.size()) * config_.credit_per_injected_byte_cap));
}

void Pool::refill_locked() {
  Bytes data;
  try {
    data = backend_->read(config_.capacity_bytes);
  } catch (const SourceError& e) {
    throw PoolError(PoolError::Kind::BackendFailure, e.what());
  }
  mix(data);
  credit_add(std::min<uint64_t>(
      static_cast<uint64_t>(config_.capacity_bytes) * config_.credit_per_backend_byte,
      static_cast<uint64_t>(config_.capacity_bytes) * config_.credit_per_injected_byte_cap));
}

void Pool::refill() {
  std::lock_guard lock(mutex_);
  refill_locked();
}

Pool::ExtractResult Pool::extract(size_t n) {
  ExtractResult result;
  if (n == 0) return result;
  std::lock_guard lock(mutex_);

  // T = B2S(chain ‖ tag ‖ counter_le64); O_i = B2S(T ‖ i_le32); re-key.
  Bytes t_input = chain_key_;
  t_input.insert(t_input.end(), kTagExtract.begin(), kTagExtract.end());
  put_le64(t_input, extract_counter_);
  Bytes t = crypto::blake2s(t_input);

  result.bytes.reserve(n);
  for (uint32_t block = 0; result.bytes.size() < n; block++) {
    Bytes block_input = t;
    put_le32(block_input, block);
    Bytes out = crypto::blake2s(block_input);
    size_t take = std::min<size_t>(out.size(), n - result.bytes.size());
    result.bytes.insert(result.bytes.end(), out.begin(), out.begin() + take);
  }

  chain_key_ = crypto::blake2s({chain_key_, kTagRekey, t});
  extract_counter_++;
  uint64_t debit = std::min<uint64_t>(credit_bits_, 8 * static_cast<uint64_t>(n));
  credit_bits_ -= debit;

  if (config_.threshold_bytes > 0 &&
      credit_bits_ < static_cast<uint64_t>(config_.threshold_bytes) * 8) {
    try {
      refill_locked();
    } catch (const PoolError&) {
      result.refill_failed = true;  // output is still valid; surfaced as a warning
    }
  }
  return result;
}

uint64_t Pool::entropy_available() const {
  std::lock_guard lock(mutex_);
  return credit_bits_;
}

}  // namespace qeaas::pool
