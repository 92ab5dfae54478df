#pragma once

#include <gmpxx.h>

#include <cstdint>

#include "banzkp/bytes.hpp"

namespace banzkp {

using BigInt = mpz_class;

/// Fixed-width big-endian encoding of `v` into exactly `width_bits/8` bytes.
/// `width_bits` must be a multiple of 8 and v < 2^width_bits.
Bytes to_fixed_bytes(const BigInt& v, int width_bits);

/// Inverse of to_fixed_bytes.
BigInt from_bytes(const Bytes& b);

/// Truncates v to its low 64 bits.
uint64_t low_u64(const BigInt& v);

/// Square-and-multiply modular-multiplication count for exponent e:
/// (bitlen(e) - 1) squarings plus (popcount(e) - 1) multiplies.
uint64_t modmul_estimate(const BigInt& exponent);

}  // namespace banzkp
