#include "qeaas/crypto/random.hpp"

#include <openssl/rand.h>

#include <stdexcept>

namespace qeaas::crypto {

Bytes os_random(size_t n) {
  Bytes out(n);
  if (n > 0 && RAND_bytes(out.data(), static_cast<int>(n)) != 1)
    throw std::runtime_error("os_random: RAND_bytes failed");
  return out;
}

}  // namespace qeaas::crypto
