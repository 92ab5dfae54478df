#pragma once

#include <cstdint>
#include <optional>

#include "banzkp/bigint.hpp"
#include "banzkp/bytes.hpp"
#include "banzkp/params.hpp"

namespace banzkp {

/// base^exponent mod params.modulus. Requires 0 <= base < modulus and
/// exponent >= 1; throws std::invalid_argument otherwise.
BigInt modexp(const BigInt& base, const BigInt& exponent,
              const ProtocolParams& params);

/// `length` bits of the fixed-width MSB-first encoding of `value`,
/// starting at bit index `start`, packed MSB-first into ceil(length/8)
/// bytes with zero pad bits. Throws std::invalid_argument when
/// start + length > width.
Bytes extract_interval(const BigInt& value, int width, int start, int length);

/// Binds a ciphertext to one position in one session of one conversation.
/// Equal contexts on both sides are required for open() to succeed.
struct CipherContext {
  uint8_t msg_tag = 0;
  uint8_t node_id = 0;
  Bytes session;   // session-binding material, may be empty
  uint16_t seq = 0;

  Bytes encode() const;
};

inline constexpr size_t kCipherTagBytes = 8;

/// Authenticated symmetric cipher: keyed keystream XOR plus a keyed
/// 64-bit tag over (context || ciphertext). Ciphertext length is
/// plaintext length + kCipherTagBytes.
Bytes seal(const Bytes& key, const Bytes& plaintext, const CipherContext& ctx);

/// Returns the plaintext, or nullopt when the tag does not verify
/// (wrong key, wrong context, or tampered ciphertext).
std::optional<Bytes> open(const Bytes& key, const Bytes& ciphertext,
                          const CipherContext& ctx);

}  // namespace banzkp
