#include "qeaas/pool/entropy_source.hpp"

#include "qeaas/crypto/keccak.hpp"
#include "qeaas/crypto/random.hpp"

#include <fstream>

namespace qeaas::pool {

Bytes OsRandomSource::read(size_t n) { return crypto::os_random(n); }

SimulatedQrngSource::SimulatedQrngSource(const std::string& stream_file) {
  std::ifstream in(stream_file, std::ios::binary);
  if (!in) throw SourceError("simulated-qrng: cannot open stream file " + stream_file);
  stream_.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

SimulatedQrngSource::SimulatedQrngSource(Bytes stream) : stream_(std::move(stream)) {}

Bytes SimulatedQrngSource::read(size_t n) {
  std::lock_guard lock(mutex_);
  if (offset_ + n > stream_.size()) throw SourceError("simulated-qrng: stream exhausted");
  Bytes out(stream_.begin() + offset_, stream_.begin() + offset_ + n);
  offset_ += n;
  return out;
}

size_t SimulatedQrngSource::remaining() const {
  std::lock_guard lock(mutex_);
  return stream_.size() - offset_;
}

struct DeterministicTestSource::Impl {
  crypto::Keccak xof = crypto::Keccak::shake128();
};

DeterministicTestSource::DeterministicTestSource(uint64_t seed) : impl_(new Impl) {
  Bytes seed_bytes;
  put_le64(seed_bytes, seed);
  impl_->xof.absorb(seed_bytes);
}

Bytes DeterministicTestSource::read(size_t n) {
  if (failing_) throw SourceError("deterministic-test: simulated backend failure");
  read_log_.push_back(n);
  return impl_->xof.squeeze(n);
}

std::unique_ptr<EntropySource> make_source(SourceKind kind, uint64_t seed,
                                           const std::string& stream_file) {
  switch (kind) {
    case SourceKind::OsRandom:
      return std::make_unique<OsRandomSource>();
    case SourceKind::SimulatedQrng:
      return std::make_unique<SimulatedQrngSource>(stream_file);
    case SourceKind::DeterministicTest:
      return std::make_unique<DeterministicTestSource>(seed);
  }
  throw SourceError("unknown source kind");
}

}  // namespace qeaas::pool
