#pragma once

#include <cstdint>
#include <random>

#include "banzkp/bigint.hpp"
#include "banzkp/bytes.hpp"
#include "banzkp/params.hpp"

namespace banzkp {

/// Seeded deterministic randomness source. All protocol and simulator
/// randomness flows through an explicit Rng handle; equal seeds give
/// identical draw sequences.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  uint64_t next_u64() { return gen_(); }

  /// Uniform in [0, bound) by rejection; bound > 0.
  uint64_t below(uint64_t bound);

  /// Uniform in [lo, hi] inclusive.
  uint64_t range(uint64_t lo, uint64_t hi) { return lo + below(hi - lo + 1); }

  /// Bernoulli with probability p in [0,1].
  bool chance(double p);

  Bytes bytes(size_t n);

  /// Uniform big integer in [0, 2^bits).
  BigInt bits(int bits);

  /// Fresh seed for a derived stream.
  uint64_t fork_seed() { return gen_(); }

  /// Exponent uniform in [2, 2^exponent_bits).
  BigInt draw_exponent(const ProtocolParams& params);

  /// Interval start uniform in [0, W - interval_bits].
  int draw_ri(const ProtocolParams& params);

  CommitKey draw_commit_key(const ProtocolParams& params);

 private:
  std::mt19937_64 gen_;
};

}  // namespace banzkp
