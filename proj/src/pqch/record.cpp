#include "qeaas/pqch/record.hpp"

#include "qeaas/crypto/aead.hpp"

namespace qeaas::pqch {

bool ReplayWindow::check_and_update(uint64_t seq) {
  if (!any_) {
    any_ = true;
    max_seq_ = seq;
    bitmap_ = 1;
    return true;
  }
  if (seq > max_seq_) {
    uint64_t shift = seq - max_seq_;
    bitmap_ = shift >= 64 ? 0 : bitmap_ << shift;
    bitmap_ |= 1;
    max_seq_ = seq;
    return true;
  }
  uint64_t offset = max_seq_ - seq;
  if (offset >= 64) return false;  // older than the window
  uint64_t bit = uint64_t{1} << offset;
  if (bitmap_ & bit) return false;  // replay
  bitmap_ |= bit;
  return true;
}

Bytes record_nonce(ByteView iv, uint64_t seq) {
  Bytes nonce(iv.begin(), iv.end());
  for (int i = 0; i < 6; ++i)
    nonce[nonce.size() - 1 - static_cast<size_t>(i)] ^= static_cast<uint8_t>(seq >> (8 * i));
  return nonce;
}

RecordLayer::RecordLayer(SessionKeys keys, bool is_client)
    : keys_(std::move(keys)), is_client_(is_client) {}

Bytes RecordLayer::seal(ByteView plaintext) {
  const Bytes& key = is_client_ ? keys_.c_key : keys_.s_key;
  const Bytes& iv = is_client_ ? keys_.c_iv : keys_.s_iv;
  size_t body_len = plaintext.size() + crypto::kAesGcmTagBytes;
  Bytes header = record_header(RecordType::AppData, 1, send_seq_, body_len);
  Bytes ct = crypto::aes128gcm_seal(key, record_nonce(iv, send_seq_), header, plaintext);
  ++send_seq_;
  header.insert(header.end(), ct.begin(), ct.end());
  return header;
}

std::optional<Bytes> RecordLayer::open(const Record& record) {
  if (record.type != RecordType::AppData || record.epoch != 1) return std::nullopt;
  if (record.body.size() < crypto::kAesGcmTagBytes) return std::nullopt;
  const Bytes& key = is_client_ ? keys_.s_key : keys_.c_key;
  const Bytes& iv = is_client_ ? keys_.s_iv : keys_.c_iv;
  Bytes header = record_header(record.type, record.epoch, record.seq, record.body.size());
  auto pt = crypto::aes128gcm_open(key, record_nonce(iv, record.seq), header, record.body);
  if (!pt) return std::nullopt;
  if (!replay_.check_and_update(record.seq)) return std::nullopt;
  return pt;
}

}  // namespace qeaas::pqch
