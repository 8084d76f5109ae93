#pragma once
// Operating-system randomness (OpenSSL RAND_bytes).

#include "qeaas/bytes.hpp"

namespace qeaas::crypto {

Bytes os_random(size_t n);

}  // namespace qeaas::crypto
