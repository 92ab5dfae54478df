#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "banzkp/bytes.hpp"
#include <optional>

#include "banzkp/params.hpp"

namespace banzkp {

// Wire message tags.
enum class MsgTag : uint8_t {
  M1 = 0x01,
  M2 = 0x02,
  M3 = 0x03,
  M4 = 0x04,
  M5 = 0x05,
  RouteFlood = 0x06,
};

struct M1 {  // node -> sink: E(K[ID_N || V^p])
  uint8_t sender_id = 0;
  Bytes ct;
  bool operator==(const M1&) const = default;
};

struct M2 {  // sink -> node: E(K[ID_0 || V^q || RI]), E(K_CS[(V^p)^q])
  Bytes ct_a;
  CommitmentEnvelope ct_commit;
  bool operator==(const M2&) const = default;
};

struct M3 {  // node -> sink: E(K[ID_N || interval_{RI,200}((V^q)^p)])
  uint8_t sender_id = 0;
  Bytes ct;
  bool operator==(const M3&) const = default;
};

struct M4 {  // sink -> node: K_CS in plaintext
  Bytes kcs;
  bool operator==(const M4&) const = default;
};

struct M5 {  // node -> sink: E(K[ID_N || DATA])
  uint8_t sender_id = 0;
  Bytes ct;
  bool operator==(const M5&) const = default;
};

struct RouteFlood {
  uint8_t origin = 0;
  uint8_t hop_count = 0;
  bool operator==(const RouteFlood&) const = default;
};

using Message = std::variant<M1, M2, M3, M4, M5, RouteFlood>;

MsgTag tag_of(const Message& m);

/// Frame layout: tag (1) | sender id (1, M1/M3/M5 only) | payload length
/// (2, big-endian) | payload.
Bytes encode(const Message& m);

struct DecodeError {
  size_t offset = 0;
  std::string reason;
};

struct DecodeResult {
  std::optional<Message> message;
  DecodeError error;  // meaningful when !message

  bool ok() const { return message.has_value(); }
};

/// Strict decode: the buffer must hold exactly one well-formed frame whose
/// fixed-size fields match the widths in `params`.
DecodeResult decode(const Bytes& frame, const ProtocolParams& params);

}  // namespace banzkp
