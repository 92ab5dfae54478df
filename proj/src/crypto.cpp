#include "banzkp/crypto.hpp"

#include <stdexcept>

namespace banzkp {
namespace {

uint64_t mix64(uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ull;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebull;
  x ^= x >> 31;
  return x;
}

// Keyed absorb/squeeze construction over 64-bit mixing. Not production
// cryptography (an explicit non-goal); it satisfies the authenticated
// contract: roundtrip, wrong-key rejection, tamper rejection,
// deterministic under key + context.
class Keyed {
 public:
  explicit Keyed(uint8_t domain) {
    absorb_word(0x42414e5a4b50ull ^ domain);
  }

  void absorb(const Bytes& b) {
    uint64_t w = 0;
    int have = 0;
    for (uint8_t c : b) {
      w = (w << 8) | c;
      if (++have == 8) {
        absorb_word(w);
        w = 0;
        have = 0;
      }
    }
    if (have > 0) absorb_word(w << (8 * (8 - have)));
    absorb_word(0x80ull ^ b.size());  // length-delimit each field
  }

  uint64_t squeeze(uint64_t i) const {
    uint64_t a = mix64(s1_ ^ (i * 0x9e3779b97f4a7c15ull));
    return mix64(s0_ + a + s3_) ^ mix64(s2_ + i + 1);
  }

 private:
  void absorb_word(uint64_t w) {
    s0_ = mix64(s0_ ^ w);
    s1_ = mix64(s1_ + s0_);
    s2_ = mix64(s2_ ^ s1_);
    s3_ = mix64(s3_ + s2_);
  }

  uint64_t s0_ = 0x6a09e667f3bcc908ull;
  uint64_t s1_ = 0xbb67ae8584caa73bull;
  uint64_t s2_ = 0x3c6ef372fe94f82bull;
  uint64_t s3_ = 0xa54ff53a5f1d36f1ull;
};

void xor_keystream(Bytes& data, const Bytes& key, const Bytes& ctx) {
  Keyed k(0x01);
  k.absorb(key);
  k.absorb(ctx);
  for (size_t i = 0; i < data.size(); ++i) {
    uint64_t block = k.squeeze(i / 8);
    data[i] ^= static_cast<uint8_t>(block >> (56 - 8 * (i % 8)));
  }
}

Bytes auth_tag(const Bytes& key, const Bytes& ctx, const Bytes& ct) {
  Keyed k(0x02);
  k.absorb(key);
  k.absorb(ctx);
  k.absorb(ct);
  uint64_t t = k.squeeze(0);
  Bytes tag(kCipherTagBytes);
  for (size_t i = 0; i < kCipherTagBytes; ++i)
    tag[i] = static_cast<uint8_t>(t >> (56 - 8 * i));
  return tag;
}

}  // namespace

BigInt modexp(const BigInt& base, const BigInt& exponent,
              const ProtocolParams& params) {
  if (sgn(base) < 0 || base >= params.modulus)
    throw std::invalid_argument("modexp: base out of range");
  if (exponent < 1) throw std::invalid_argument("modexp: exponent < 1");
  BigInt r;
  mpz_powm(r.get_mpz_t(), base.get_mpz_t(), exponent.get_mpz_t(),
           params.modulus.get_mpz_t());
  return r;
}

Bytes extract_interval(const BigInt& value, int width, int start, int length) {
  if (start < 0 || length < 0 || start + length > width)
    throw std::invalid_argument("extract_interval: window outside width");
  Bytes enc = to_fixed_bytes(value, width);
  Bytes out((static_cast<size_t>(length) + 7) / 8, 0);
  for (int i = 0; i < length; ++i) {
    int src = start + i;
    int bit = (enc[src / 8] >> (7 - src % 8)) & 1;
    if (bit) out[i / 8] |= static_cast<uint8_t>(1 << (7 - i % 8));
  }
  return out;
}

Bytes CipherContext::encode() const {
  Bytes out{msg_tag, node_id};
  put_u16be(out, seq);
  append(out, session);
  out.push_back(static_cast<uint8_t>(session.size()));
  return out;
}

Bytes seal(const Bytes& key, const Bytes& plaintext, const CipherContext& ctx) {
  if (key.empty()) throw std::invalid_argument("seal: empty key");
  Bytes ctx_bytes = ctx.encode();
  Bytes ct = plaintext;
  xor_keystream(ct, key, ctx_bytes);
  append(ct, auth_tag(key, ctx_bytes, ct));
  return ct;
}

std::optional<Bytes> open(const Bytes& key, const Bytes& ciphertext,
                          const CipherContext& ctx) {
  if (key.empty()) throw std::invalid_argument("open: empty key");
  if (ciphertext.size() < kCipherTagBytes) return std::nullopt;
  Bytes ctx_bytes = ctx.encode();
  Bytes body(ciphertext.begin(), ciphertext.end() - kCipherTagBytes);
  Bytes tag(ciphertext.end() - kCipherTagBytes, ciphertext.end());
  if (auth_tag(key, ctx_bytes, body) != tag) return std::nullopt;
  xor_keystream(body, key, ctx_bytes);
  return body;
}

}  // namespace banzkp
