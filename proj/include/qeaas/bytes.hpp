#pragma once
// Byte-buffer helpers shared by every module: hex/base64 codecs, fixed-width
// big/little-endian integer packing and constant-time comparison.

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qeaas {

using Bytes = std::vector<uint8_t>;
using ByteView = std::span<const uint8_t>;

inline Bytes to_bytes(std::string_view s) { return Bytes(s.begin(), s.end()); }
inline std::string to_string(ByteView b) { return std::string(b.begin(), b.end()); }

Bytes concat(std::initializer_list<ByteView> parts);

std::string hex_encode(ByteView data);
// Throws std::invalid_argument on odd length or non-hex characters.
Bytes hex_decode(std::string_view hex);

std::string base64_encode(ByteView data);
// Ignores ASCII whitespace; throws std::invalid_argument on other bad input.
Bytes base64_decode(std::string_view text);

// Appends `width` big-endian bytes of `value`.
void put_be(Bytes& out, uint64_t value, size_t width);
// Reads `width` big-endian bytes starting at `offset` (bounds-checked).
uint64_t get_be(ByteView data, size_t offset, size_t width);

void put_le32(Bytes& out, uint32_t value);
void put_le64(Bytes& out, uint64_t value);

// Constant-time equality for MACs and KEM re-encryption checks.
bool ct_equal(ByteView a, ByteView b);

}  // namespace qeaas
