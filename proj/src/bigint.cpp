#include "banzkp/bigint.hpp"

#include <algorithm>
#include <stdexcept>

#include "banzkp/bytes.hpp"

namespace banzkp {

bool contains(const Bytes& haystack, const Bytes& needle) {
  if (needle.empty() || needle.size() > haystack.size()) return false;
  return std::search(haystack.begin(), haystack.end(), needle.begin(),
                     needle.end()) != haystack.end();
}

Bytes to_fixed_bytes(const BigInt& v, int width_bits) {
  if (width_bits % 8 != 0) throw std::invalid_argument("width not byte-aligned");
  if (sgn(v) < 0) throw std::invalid_argument("negative value");
  if (mpz_sizeinbase(v.get_mpz_t(), 2) > static_cast<size_t>(width_bits) && v != 0)
    throw std::invalid_argument("value wider than encoding");
  const size_t n = static_cast<size_t>(width_bits) / 8;
  Bytes out(n, 0);
  if (v != 0) {
    const size_t need = (mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8;
    size_t count = 0;
    mpz_export(out.data() + (n - need), &count, 1, 1, 1, 0, v.get_mpz_t());
  }
  return out;
}

BigInt from_bytes(const Bytes& b) {
  BigInt v;
  if (!b.empty()) mpz_import(v.get_mpz_t(), b.size(), 1, 1, 1, 0, b.data());
  return v;
}

uint64_t low_u64(const BigInt& v) {
  BigInt m = v & BigInt("18446744073709551615");
  uint64_t lo = mpz_get_ui(m.get_mpz_t());
  // mpz_get_ui returns the low word; on 64-bit limbs this is the full value.
  return lo;
}

uint64_t modmul_estimate(const BigInt& exponent) {
  if (exponent <= 1) return 0;
  size_t bits = mpz_sizeinbase(exponent.get_mpz_t(), 2);
  size_t ones = mpz_popcount(exponent.get_mpz_t());
  return static_cast<uint64_t>(bits - 1 + ones - 1);
}

}  // namespace banzkp
