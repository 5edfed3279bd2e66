#pragma once

#include <cstdint>
#include <vector>

namespace srldpc {

using symbol_t = std::uint16_t;

// Default irreducible polynomial of degree p (bitmask, MSB = x^p term).
// p = 8 uses x^8 + x^4 + x^3 + x + 1 (0x11b).
std::uint32_t default_poly(int p);

// GF(2^p) arithmetic, 2 <= p <= 12, via log/antilog tables built from a
// multiplicative generator of the unit group.  Field elements are the
// integers 0..2^p-1 interpreted as polynomial bitmasks.
class GfField {
 public:
  // Validates the modulus by trial division; a reducible polynomial is
  // rejected with an error naming a nontrivial factor.
  GfField(int p, std::uint32_t poly);
  explicit GfField(int p) : GfField(p, default_poly(p)) {}

  int p() const { return p_; }
  std::uint32_t q() const { return q_; }
  std::uint32_t poly() const { return poly_; }
  symbol_t generator() const { return gen_; }

  symbol_t add(symbol_t a, symbol_t b) const { return a ^ b; }

  symbol_t mul(symbol_t a, symbol_t b) const {
    if (a == 0 || b == 0) return 0;
    unsigned s = log_[a] + log_[b];
    if (s >= q_ - 1) s -= q_ - 1;
    return exp_[s];
  }

  symbol_t inv(symbol_t a) const;             // throws on a = 0
  symbol_t div(symbol_t a, symbol_t b) const { return mul(a, inv(b)); }

  symbol_t pow_generator(unsigned e) const { return exp_[e % (q_ - 1)]; }
  unsigned log(symbol_t a) const;             // throws on a = 0

  // Bijection between field symbols and section indices 0..q-1.  Fixed to the
  // identity on bit patterns so that phi(0) = 0 and phi(1) = 1.
  std::uint32_t phi(symbol_t a) const { return a; }
  symbol_t phi_inv(std::uint32_t i) const;    // throws when i >= q

 private:
  int p_ = 0;
  std::uint32_t q_ = 0;
  std::uint32_t poly_ = 0;
  symbol_t gen_ = 0;
  std::vector<symbol_t> exp_;   // exp_[i] = g^i, exp_[q-1] wraps to 1
  std::vector<symbol_t> log_;   // log_[g^i] = i; entry 0 is unused
};

}  // namespace srldpc
