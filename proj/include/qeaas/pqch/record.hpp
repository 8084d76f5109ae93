#pragma once
// Protected record layer (epoch 1). Application records are AES-128-GCM
// sealed with per-direction keys; the nonce is the direction IV XORed with
// the 48-bit record sequence (left-padded), and the 11-byte record header is
// bound as additional data. A 64-entry sliding window rejects replays.

#include "qeaas/pqch/schedule.hpp"
#include "qeaas/pqch/wire.hpp"

#include <optional>

namespace qeaas::pqch {

constexpr size_t kReplayWindowBytes = 64;

class ReplayWindow {
 public:
  // True when seq is fresh (and marks it seen); false for replays and for
  // records older than the window.
  bool check_and_update(uint64_t seq);

 private:
  uint64_t max_seq_ = 0;
  uint64_t bitmap_ = 0;
  bool any_ = false;
};

class RecordLayer {
 public:
  RecordLayer(SessionKeys keys, bool is_client);

  // Seals one application record (header ‖ ciphertext ‖ tag), ready to embed
  // in a datagram. Throws WireError when the 48-bit sequence space runs out.
  Bytes seal(ByteView plaintext);

  // Opens a received epoch-1 record; nullopt on authentication failure or
  // replay. Accepts the parsed record from split_datagram.
  std::optional<Bytes> open(const Record& record);

  uint64_t next_send_seq() const { return send_seq_; }

 private:
  SessionKeys keys_;
  bool is_client_;
  uint64_t send_seq_ = 0;
  ReplayWindow replay_;
};

// Exposed for tests: nonce = iv XOR (0^6 ‖ seq_be6).
Bytes record_nonce(ByteView iv, uint64_t seq);

}  // namespace qeaas::pqch
