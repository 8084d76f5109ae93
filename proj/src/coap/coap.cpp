#include "qeaas/coap/coap.hpp"

#include <algorithm>

namespace qeaas::coap {

std::string code_string(Code c) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "%u.%02u", code_class(c), code_detail(c));
  return buf;
}

void Message::add_option(uint16_t number, ByteView value) {
  options.push_back(Option{number, Bytes(value.begin(), value.end())});
}

void Message::add_option(uint16_t number, std::string_view value) {
  add_option(number, ByteView(reinterpret_cast<const uint8_t*>(value.data()), value.size()));
}

std::optional<Bytes> Message::find_option(uint16_t number) const {
  for (const auto& opt : options)
    if (opt.number == number) return opt.value;
  return std::nullopt;
}

namespace {

// Encodes one option delta/length value into (nibble, extension bytes).
void encode_ext(Bytes& out, size_t nibble_pos, bool high_nibble, uint32_t value) {
  uint8_t nibble;
  if (value < 13) {
    nibble = static_cast<uint8_t>(value);
  } else if (value < 269) {
    nibble = 13;
  } else {
    nibble = 14;
  }
  out[nibble_pos] |= high_nibble ? static_cast<uint8_t>(nibble << 4) : nibble;
  if (nibble == 13) out.push_back(static_cast<uint8_t>(value - 13));
  if (nibble == 14) put_be(out, value - 269, 2);
}

}  // namespace

Bytes encode(const Message& msg) {
  if (msg.token.size() > 8) throw EncodeError("coap: token longer than 8 bytes");
  if (msg.version != 1) throw EncodeError("coap: version must be 1");

  Bytes out;
  out.push_back(static_cast<uint8_t>(msg.version << 6 | static_cast<uint8_t>(msg.type) << 4 |
                                     msg.token.size()));
  out.push_back(static_cast<uint8_t>(msg.code));
  put_be(out, msg.message_id, 2);
  out.insert(out.end(), msg.token.begin(), msg.token.end());

  std::vector<Option> opts = msg.options;
  std::stable_sort(opts.begin(), opts.end(),
                   [](const Option& a, const Option& b) { return a.number < b.number; });
  uint16_t previous = 0;
  for (const auto& opt : opts) {
    if (opt.value.size() > 65535 - 269) throw EncodeError("coap: option value too long");
    size_t nibble_pos = out.size();
    out.push_back(0);
    encode_ext(out, nibble_pos, true, static_cast<uint32_t>(opt.number - previous));
    encode_ext(out, nibble_pos, false, static_cast<uint32_t>(opt.value.size()));
    out.insert(out.end(), opt.value.begin(), opt.value.end());
    previous = opt.number;
  }

  if (!msg.payload.empty()) {
    out.push_back(0xff);
    out.insert(out.end(), msg.payload.begin(), msg.payload.end());
  }
  return out;
}

namespace {

uint32_t decode_ext(ByteView wire, size_t& pos, uint8_t nibble, const char* what) {
  if (nibble < 13) return nibble;
  if (nibble == 13) {
    if (pos >= wire.size())
      throw DecodeError(DecodeError::Kind::TruncatedOption,
                        std::string("coap: truncated option ") + what);
    return wire[pos++] + 13u;
  }
  if (nibble == 14) {
    if (pos + 2 > wire.size())
      throw DecodeError(DecodeError::Kind::TruncatedOption,
                        std::string("coap: truncated option ") + what);
    uint32_t v = static_cast<uint32_t>(get_be(wire, pos, 2)) + 269u;
    pos += 2;
    return v;
  }
  throw DecodeError(DecodeError::Kind::ReservedOptionNibble,
                    std::string("coap: reserved nibble 15 in option ") + what);
}

}  // namespace

Message decode(ByteView wire) {
  if (wire.size() < 4) throw DecodeError(DecodeError::Kind::TooShort, "coap: shorter than header");
  Message msg;
  msg.version = wire[0] >> 6;
  if (msg.version != 1) throw DecodeError(DecodeError::Kind::BadVersion, "coap: version != 1");
  msg.type = static_cast<MsgType>((wire[0] >> 4) & 0x03);
  uint8_t tkl = wire[0] & 0x0f;
  if (tkl > 8) throw DecodeError(DecodeError::Kind::BadTokenLength, "coap: TKL > 8");
  msg.code = static_cast<Code>(wire[1]);
  msg.message_id = static_cast<uint16_t>(get_be(wire, 2, 2));

  size_t pos = 4;
  if (pos + tkl > wire.size())
    throw DecodeError(DecodeError::Kind::TruncatedToken, "coap: truncated token");
  msg.token.assign(wire.begin() + pos, wire.begin() + pos + tkl);
  pos += tkl;

  uint16_t number = 0;
  while (pos < wire.size()) {
    uint8_t byte = wire[pos++];
    if (byte == 0xff) {
      if (pos >= wire.size())
        throw DecodeError(DecodeError::Kind::EmptyPayload, "coap: payload marker without payload");
      msg.payload.assign(wire.begin() + pos, wire.end());
      return msg;
    }
    uint8_t delta_nibble = byte >> 4;
    uint8_t len_nibble = byte & 0x0f;
    uint32_t delta = decode_ext(wire, pos, delta_nibble, "delta");
    uint32_t length = decode_ext(wire, pos, len_nibble, "length");
    if (pos + length > wire.size())
      throw DecodeError(DecodeError::Kind::TruncatedOption, "coap: truncated option value");
    if (delta > 65535u - number)
      throw DecodeError(DecodeError::Kind::OptionNumberOverflow, "coap: option number overflow");
    number = static_cast<uint16_t>(number + delta);
    msg.options.push_back(
        Option{number, Bytes(wire.begin() + pos, wire.begin() + pos + length)});
    pos += length;
  }
  return msg;
}

bool match_response(const Message& request, const Message& candidate) {
  if (candidate.token != request.token) return false;
  if (candidate.type == MsgType::Ack) return candidate.message_id == request.message_id;
  return true;
}

}  // namespace qeaas::coap
