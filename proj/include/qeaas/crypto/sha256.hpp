#pragma once
// SHA-256 / HMAC-SHA256 (OpenSSL-backed). The incremental Sha256 supports
// cheap state snapshots, which the handshake uses for running transcript
// hashes at several points.

#include "qeaas/bytes.hpp"

#include <memory>

namespace qeaas::crypto {

class Sha256 {
 public:
  Sha256();
  Sha256(const Sha256& other);             // snapshot copy
  Sha256& operator=(const Sha256& other);
  ~Sha256();

  void update(ByteView data);
  Bytes finish() const;  // finalizes a copy; the object stays usable

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

Bytes sha256(ByteView msg);
Bytes sha256(std::initializer_list<ByteView> parts);
Bytes hmac_sha256(ByteView key, ByteView msg);
Bytes hmac_sha256(ByteView key, std::initializer_list<ByteView> parts);

}  // namespace qeaas::crypto
