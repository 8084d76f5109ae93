#pragma once
// Minimal RFC 7252 CoAP message codec: the subset needed for
// GET-with-Proxy-Uri exchanges (CON/NON/ACK/RST, piggybacked responses,
// options 11/12/35). The wire format is bit-exact RFC 7252 §3.

#include "qeaas/bytes.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>

namespace qeaas::coap {

enum class MsgType : uint8_t { Confirmable = 0, NonConfirmable = 1, Ack = 2, Reset = 3 };

// Code = class.detail packed as (class << 5) | detail.
enum class Code : uint8_t {
  Empty = 0x00,
  Get = 0x01,                 // 0.01
  Content = 0x45,             // 2.05
  BadRequest = 0x80,          // 4.00
  NotFound = 0x84,            // 4.04
  MethodNotAllowed = 0x85,    // 4.05
  BadGateway = 0xa2,          // 5.02
  GatewayTimeout = 0xa4,      // 5.04
};

constexpr uint8_t code_class(Code c) { return static_cast<uint8_t>(c) >> 5; }
constexpr uint8_t code_detail(Code c) { return static_cast<uint8_t>(c) & 0x1f; }
std::string code_string(Code c);  // "2.05" style

constexpr uint16_t kOptionUriPath = 11;
constexpr uint16_t kOptionContentFormat = 12;
constexpr uint16_t kOptionProxyUri = 35;
constexpr uint16_t kContentFormatJson = 50;  // application/json
constexpr size_t kMaxProxyUriBytes = 1024;

struct Option {
  uint16_t number;
  Bytes value;
  bool operator==(const Option&) const = default;
};

struct DecodeError : std::runtime_error {
  enum class Kind {
    TooShort,
    BadVersion,
    BadTokenLength,
    TruncatedToken,
    TruncatedOption,
    ReservedOptionNibble,
    OptionNumberOverflow,
    EmptyPayload,  // 0xff marker followed by nothing
  };
  DecodeError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
  Kind kind;
};

struct EncodeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Message {
  uint8_t version = 1;
  MsgType type = MsgType::Confirmable;
  Code code = Code::Empty;
  uint16_t message_id = 0;
  Bytes token;                  // 0..8 bytes
  std::vector<Option> options;  // sorted by number on encode
  Bytes payload;

  void add_option(uint16_t number, ByteView value);
  void add_option(uint16_t number, std::string_view value);
  std::optional<Bytes> find_option(uint16_t number) const;

  bool operator==(const Message&) const = default;
};

// Throws EncodeError on token > 8 bytes (options are sorted internally, so
// insertion order never produces a decreasing-delta error).
Bytes encode(const Message& msg);

// Throws DecodeError; never crashes on arbitrary input.
Message decode(ByteView wire);

// Token-based matching per RFC 7252 §5.3.2: a piggybacked ACK must also echo
// the request's message ID; a separate response (CON/NON) matches on token
// alone.
bool match_response(const Message& request, const Message& candidate);

}  // namespace qeaas::coap
