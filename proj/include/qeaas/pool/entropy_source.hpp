#pragma once
// Backend entropy sources feeding the pool and the entropy service:
//   os-random          — operating-system randomness
//   simulated-qrng     — a finite byte-stream file standing in for QRNG
//                        hardware; sequential consumption, exhaustion is an
//                        error
//   deterministic-test — seeded XOF stream for reproducible tests; records
//                        the size of every read so tests can observe refills

#include "qeaas/bytes.hpp"

#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace qeaas::pool {

enum class SourceKind { OsRandom, SimulatedQrng, DeterministicTest };

struct SourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class EntropySource {
 public:
  virtual ~EntropySource() = default;
  virtual SourceKind kind() const = 0;
  // Returns exactly n bytes or throws SourceError.
  virtual Bytes read(size_t n) = 0;
};

class OsRandomSource final : public EntropySource {
 public:
  SourceKind kind() const override { return SourceKind::OsRandom; }
  Bytes read(size_t n) override;
};

class SimulatedQrngSource final : public EntropySource {
 public:
  // Loads the whole stream file up front; throws SourceError if unreadable.
  explicit SimulatedQrngSource(const std::string& stream_file);
  explicit SimulatedQrngSource(Bytes stream);
  SourceKind kind() const override { return SourceKind::SimulatedQrng; }
  Bytes read(size_t n) override;  // SourceError once the stream is exhausted
  size_t remaining() const;

 private:
  Bytes stream_;
  size_t offset_ = 0;
  mutable std::mutex mutex_;
};

// Byte stream = SHAKE128 over the 8-byte little-endian seed; equal seeds
// yield identical streams (see docs/pool-schedule.md for the exact layout).
class DeterministicTestSource final : public EntropySource {
 public:
  explicit DeterministicTestSource(uint64_t seed);
  SourceKind kind() const override { return SourceKind::DeterministicTest; }
  Bytes read(size_t n) override;
  const std::vector<size_t>& read_log() const { return read_log_; }
  // Simulates a backend outage: subsequent reads throw until cleared.
  void set_failing(bool failing) { failing_ = failing; }

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
  std::vector<size_t> read_log_;
  bool failing_ = false;
};

std::unique_ptr<EntropySource> make_source(SourceKind kind, uint64_t seed = 0,
                                           const std::string& stream_file = {});

}  // namespace qeaas::pool
