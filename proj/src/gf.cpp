#include "srldpc/gf.hpp"

#include <bit>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace srldpc {

namespace {

std::string hex(std::uint32_t v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "0x%x", v);
  return buf;
}

int poly_degree(std::uint32_t a) {
  return a == 0 ? -1 : std::bit_width(a) - 1;
}

// Remainder of binary-polynomial division a mod b.
std::uint32_t poly_mod(std::uint32_t a, std::uint32_t b) {
  int db = poly_degree(b);
  int da = poly_degree(a);
  while (da >= db) {
    a ^= b << (da - db);
    da = poly_degree(a);
  }
  return a;
}

// Carry-less multiply followed by reduction mod poly.  Only used during table
// construction; runtime products go through the log/antilog tables.
std::uint32_t clmul_mod(std::uint32_t a, std::uint32_t b, std::uint32_t poly) {
  std::uint64_t acc = 0;
  for (int i = 0; i <= poly_degree(b); ++i)
    if ((b >> i) & 1) acc ^= static_cast<std::uint64_t>(a) << i;
  int dp = poly_degree(poly);
  for (int i = 63; i >= dp; --i)
    if ((acc >> i) & 1) acc ^= static_cast<std::uint64_t>(poly) << (i - dp);
  return static_cast<std::uint32_t>(acc);
}

unsigned order_of(std::uint32_t g, std::uint32_t poly) {
  std::uint32_t x = g;
  unsigned ord = 1;
  while (x != 1) {
    x = clmul_mod(x, g, poly);
    ++ord;
  }
  return ord;
}

}  // namespace

std::uint32_t default_poly(int p) {
  switch (p) {
    case 2: return 0x7;      // x^2+x+1
    case 3: return 0xb;      // x^3+x+1
    case 4: return 0x13;     // x^4+x+1
    case 5: return 0x25;     // x^5+x^2+1
    case 6: return 0x43;     // x^6+x+1
    case 7: return 0x89;     // x^7+x^3+1
    case 8: return 0x11b;    // x^8+x^4+x^3+x+1
    case 9: return 0x211;    // x^9+x^4+1
    case 10: return 0x409;   // x^10+x^3+1
    case 11: return 0x805;   // x^11+x^2+1
    case 12: return 0x1053;  // x^12+x^6+x^4+x+1
    default:
      throw std::invalid_argument("no default polynomial for p = " +
                                  std::to_string(p));
  }
}

GfField::GfField(int p, std::uint32_t poly) : p_(p), poly_(poly) {
  if (p < 2 || p > 12)
    throw std::invalid_argument("field degree p must be in [2, 12], got " +
                                std::to_string(p));
  if (poly_degree(poly) != p)
    throw std::invalid_argument("modulus " + hex(poly) +
                                " must have degree exactly " +
                                std::to_string(p));
  // Trial division: any factorization has a factor of degree <= p/2, and the
  // smallest divisor found this way is itself irreducible.
  for (std::uint32_t d = 2; poly_degree(d) <= p / 2; ++d) {
    if (poly_mod(poly, d) == 0)
      throw std::invalid_argument("modulus " + hex(poly) +
                                  " is reducible: divisible by " + hex(d));
  }
  q_ = 1u << p;

  // The polynomial x need not generate the unit group (it does not for
  // 0x11b), so search for a generator.
  std::uint32_t g = 2;
  while (order_of(g, poly) != q_ - 1) ++g;
  gen_ = static_cast<symbol_t>(g);

  exp_.assign(q_, 0);
  log_.assign(q_, 0);
  std::uint32_t x = 1;
  for (std::uint32_t i = 0; i + 1 < q_; ++i) {
    exp_[i] = static_cast<symbol_t>(x);
    log_[x] = static_cast<symbol_t>(i);
    x = clmul_mod(x, g, poly);
  }
  exp_[q_ - 1] = 1;
}

symbol_t GfField::inv(symbol_t a) const {
  if (a == 0) throw std::domain_error("inverse of 0 is undefined");
  return exp_[(q_ - 1 - log_[a]) % (q_ - 1)];
}

unsigned GfField::log(symbol_t a) const {
  if (a == 0) throw std::domain_error("log of 0 is undefined");
  return log_[a];
}

symbol_t GfField::phi_inv(std::uint32_t i) const {
  if (i >= q_)
    throw std::domain_error("section index " + std::to_string(i) +
                            " out of range for q = " + std::to_string(q_));
  return static_cast<symbol_t>(i);
}

}  // namespace srldpc
