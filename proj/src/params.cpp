#include "banzkp/params.hpp"

#include <random>
#include <stdexcept>

namespace banzkp {

void ProtocolParams::validate() const {
  if (modulus_bits < 1096) throw std::invalid_argument("modulus width < 1096");
  if (modulus_bits % 8 != 0) throw std::invalid_argument("modulus width not byte-aligned");
  if (interval_bits > modulus_bits) throw std::invalid_argument("interval wider than modulus");
  if (exponent_bits < 2) throw std::invalid_argument("exponent width < 2");
  if (kcs_bits % 8 != 0) throw std::invalid_argument("kcs width not byte-aligned");
  if (mpz_even_p(modulus.get_mpz_t())) throw std::invalid_argument("modulus must be odd");
  BigInt floor = BigInt(1) << (modulus_bits - 1);
  if (modulus <= floor) throw std::invalid_argument("modulus not full-width");
}

ProtocolParams make_params(int modulus_bits) {
  ProtocolParams p;
  p.modulus_bits = modulus_bits;
  // Fixed derivation seed: the modulus is a public shared constant, not a
  // secret, so it only has to be full-width, odd, and reproducible.
  std::mt19937_64 gen(0x42414e5a4b50ull);  // "BANZKP"
  BigInt m = 0;
  for (int produced = 0; produced < modulus_bits; produced += 64) {
    m <<= 64;
    m += BigInt(static_cast<unsigned long>(gen()));
  }
  m &= (BigInt(1) << modulus_bits) - 1;
  mpz_setbit(m.get_mpz_t(), modulus_bits - 1);  // full-width
  mpz_setbit(m.get_mpz_t(), 0);                 // odd
  p.modulus = m;
  p.validate();
  return p;
}

}  // namespace banzkp
