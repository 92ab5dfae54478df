#include "banzkp/message.hpp"

#include "banzkp/crypto.hpp"

namespace banzkp {
namespace {

bool has_sender(MsgTag t) {
  return t == MsgTag::M1 || t == MsgTag::M3 || t == MsgTag::M5;
}

DecodeResult fail(size_t offset, std::string reason) {
  return DecodeResult{std::nullopt, DecodeError{offset, std::move(reason)}};
}

}  // namespace

MsgTag tag_of(const Message& m) {
  return std::visit(
      [](const auto& v) -> MsgTag {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, M1>) return MsgTag::M1;
        else if constexpr (std::is_same_v<T, M2>) return MsgTag::M2;
        else if constexpr (std::is_same_v<T, M3>) return MsgTag::M3;
        else if constexpr (std::is_same_v<T, M4>) return MsgTag::M4;
        else if constexpr (std::is_same_v<T, M5>) return MsgTag::M5;
        else return MsgTag::RouteFlood;
      },
      m);
}

Bytes encode(const Message& m) {
  Bytes out;
  MsgTag t = tag_of(m);
  out.push_back(static_cast<uint8_t>(t));
  Bytes payload;
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, M1>) {
          out.push_back(v.sender_id);
          payload = v.ct;
        } else if constexpr (std::is_same_v<T, M2>) {
          payload = v.ct_a;
          append(payload, v.ct_commit.ciphertext);
        } else if constexpr (std::is_same_v<T, M3>) {
          out.push_back(v.sender_id);
          payload = v.ct;
        } else if constexpr (std::is_same_v<T, M4>) {
          payload = v.kcs;
        } else if constexpr (std::is_same_v<T, M5>) {
          out.push_back(v.sender_id);
          payload = v.ct;
        } else {
          payload = Bytes{v.origin, v.hop_count};
        }
      },
      m);
  put_u16be(out, static_cast<uint16_t>(payload.size()));
  append(out, payload);
  return out;
}

DecodeResult decode(const Bytes& frame, const ProtocolParams& params) {
  const size_t wb = static_cast<size_t>(params.modulus_bytes());
  const size_t ib = static_cast<size_t>(params.interval_bytes());
  const size_t kb = static_cast<size_t>(params.kcs_bytes());
  const size_t tagb = kCipherTagBytes;

  if (frame.empty()) return fail(0, "empty frame");
  uint8_t raw = frame[0];
  if (raw < 0x01 || raw > 0x06) return fail(0, "unknown tag");
  MsgTag t = static_cast<MsgTag>(raw);

  size_t off = 1;
  uint8_t sender = 0;
  if (has_sender(t)) {
    if (frame.size() < off + 1) return fail(off, "truncated sender id");
    sender = frame[off++];
  }
  if (frame.size() < off + 2) return fail(off, "truncated length");
  uint16_t len = get_u16be(frame.data() + off);
  off += 2;
  if (frame.size() != off + len) return fail(off, "length mismatch");
  Bytes payload(frame.begin() + static_cast<long>(off), frame.end());

  switch (t) {
    case MsgTag::M1:
      if (payload.size() != 1 + wb + tagb) return fail(off, "bad M1 payload size");
      return DecodeResult{M1{sender, std::move(payload)}, {}};
    case MsgTag::M2: {
      const size_t a_len = 1 + wb + 2 + tagb;
      const size_t c_len = wb + tagb;
      if (payload.size() != a_len + c_len) return fail(off, "bad M2 payload size");
      M2 m;
      m.ct_a.assign(payload.begin(), payload.begin() + static_cast<long>(a_len));
      m.ct_commit.ciphertext.assign(payload.begin() + static_cast<long>(a_len),
                                    payload.end());
      m.ct_commit.width = params.modulus_bits;
      return DecodeResult{std::move(m), {}};
    }
    case MsgTag::M3:
      if (payload.size() != 1 + ib + tagb) return fail(off, "bad M3 payload size");
      return DecodeResult{M3{sender, std::move(payload)}, {}};
    case MsgTag::M4:
      if (payload.size() != kb) return fail(off, "bad M4 payload size");
      return DecodeResult{M4{std::move(payload)}, {}};
    case MsgTag::M5:
      if (payload.size() < 1 + tagb) return fail(off, "bad M5 payload size");
      return DecodeResult{M5{sender, std::move(payload)}, {}};
    case MsgTag::RouteFlood:
      if (payload.size() != 2) return fail(off, "bad RouteFlood payload size");
      return DecodeResult{RouteFlood{payload[0], payload[1]}, {}};
  }
  return fail(0, "unreachable");
}

}  // namespace banzkp
