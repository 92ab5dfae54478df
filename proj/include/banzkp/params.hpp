#pragma once

#include <cstdint>

#include "banzkp/bigint.hpp"
#include "banzkp/bytes.hpp"

namespace banzkp {

/// Public group parameters shared by every party.
struct ProtocolParams {
  BigInt modulus;      // public odd full-width modulus
  int modulus_bits;    // W, >= 1096, multiple of 8
  int exponent_bits = 160;
  int interval_bits = 200;
  int kcs_bits = 200;

  int modulus_bytes() const { return modulus_bits / 8; }
  int interval_bytes() const { return (interval_bits + 7) / 8; }
  int kcs_bytes() const { return kcs_bits / 8; }

  /// Throws std::invalid_argument if any invariant is violated.
  void validate() const;
};

/// Deterministic full-width odd modulus of the requested width, derived
/// from a fixed internal seed. Same width always yields the same modulus.
ProtocolParams make_params(int modulus_bits = 2048);

/// Per-node secret shared with the sink; 2 <= v < modulus.
struct SharedSecret {
  BigInt v;
};

/// Symmetric session key K_{x,y}.
struct SessionKey {
  Bytes key;  // fixed length, default 16 bytes
  uint32_t key_id = 0;
};

inline constexpr int kSessionKeyBytes = 16;

/// Per-session commitment key K_CS; exactly kcs_bits/8 bytes.
struct CommitKey {
  Bytes key;
};

/// E(K_CS[(V^p)^q]) as stored by the node, unopened, until M4 arrives.
struct CommitmentEnvelope {
  Bytes ciphertext;  // modulus_bytes() + cipher tag bytes
  int width = 0;     // W

  bool operator==(const CommitmentEnvelope&) const = default;
};

}  // namespace banzkp
