#include "banzkp/rng.hpp"

namespace banzkp {

uint64_t Rng::below(uint64_t bound) {
  // Rejection sampling; implementation-defined std distributions are
  // avoided so streams are reproducible across standard libraries.
  const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  uint64_t x;
  do {
    x = gen_();
  } while (x >= limit);
  return x % bound;
}

bool Rng::chance(double p) {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return (gen_() >> 11) * 0x1.0p-53 < p;
}

Bytes Rng::bytes(size_t n) {
  Bytes out(n);
  size_t i = 0;
  while (i < n) {
    uint64_t w = gen_();
    for (int k = 0; k < 8 && i < n; ++k, ++i) {
      out[i] = static_cast<uint8_t>(w >> (56 - 8 * k));
    }
  }
  return out;
}

BigInt Rng::bits(int bits) {
  BigInt v = 0;
  int produced = 0;
  while (produced < bits) {
    v <<= 64;
    v += BigInt(static_cast<unsigned long>(gen_()));
    produced += 64;
  }
  v &= (BigInt(1) << bits) - 1;
  return v;
}

BigInt Rng::draw_exponent(const ProtocolParams& params) {
  BigInt e;
  do {
    e = bits(params.exponent_bits);
  } while (e < 2);
  return e;
}

int Rng::draw_ri(const ProtocolParams& params) {
  return static_cast<int>(
      below(static_cast<uint64_t>(params.modulus_bits - params.interval_bits) + 1));
}

CommitKey Rng::draw_commit_key(const ProtocolParams& params) {
  return CommitKey{bytes(static_cast<size_t>(params.kcs_bytes()))};
}

}  // namespace banzkp
