#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "srldpc/gf.hpp"

namespace srldpc {

// Packs bits (one per byte, 0/1) into field symbols, p bits per symbol,
// big-endian within each symbol: the first bit is the MSB.
inline std::vector<symbol_t> bits_to_symbols(std::span<const std::uint8_t> bits,
                                             const GfField& field) {
  const int p = field.p();
  if (bits.size() % p != 0)
    throw std::invalid_argument("bit count " + std::to_string(bits.size()) +
                                " is not a multiple of p = " + std::to_string(p));
  std::vector<symbol_t> out(bits.size() / p);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint32_t v = 0;
    for (int b = 0; b < p; ++b) v = (v << 1) | (bits[i * p + b] & 1);
    out[i] = static_cast<symbol_t>(v);
  }
  return out;
}

inline std::vector<std::uint8_t> symbols_to_bits(std::span<const symbol_t> syms,
                                                 const GfField& field) {
  const int p = field.p();
  std::vector<std::uint8_t> out(syms.size() * p);
  for (std::size_t i = 0; i < syms.size(); ++i) {
    if (syms[i] >= field.q())
      throw std::invalid_argument("symbol out of range for q = " +
                                  std::to_string(field.q()));
    for (int b = 0; b < p; ++b)
      out[i * p + b] = (syms[i] >> (p - 1 - b)) & 1;
  }
  return out;
}

// Common amplitude for uniform power allocation: each of the L sections
// carries energy P/L.
inline double amplitude(double power, int L) {
  if (!(power > 0.0) || L < 1)
    throw std::invalid_argument("amplitude requires power > 0 and L >= 1");
  return std::sqrt(power / L);
}

// Sparse-regression expansion: section l of `out` (a block of q entries) is
// d[l] at index phi(v[l]) and zero elsewhere.  Amplitudes are per-section to
// keep non-uniform power allocations possible.
inline void symbols_to_indicator(std::span<const symbol_t> v, const GfField& field,
                                 std::span<const double> d, std::span<double> out) {
  const std::size_t q = field.q();
  if (d.size() != v.size() || out.size() != v.size() * q)
    throw std::invalid_argument("symbols_to_indicator: size mismatch");
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t l = 0; l < v.size(); ++l) {
    if (v[l] >= q)
      throw std::invalid_argument("symbol out of range for q = " + std::to_string(q));
    out[l * q + field.phi(v[l])] = d[l];
  }
}

// Per-section argmax back to symbols; ties resolve to the lowest index.
inline std::vector<symbol_t> hard_decision(std::span<const double> s,
                                           const GfField& field) {
  const std::size_t q = field.q();
  if (s.size() % q != 0)
    throw std::invalid_argument("hard_decision: length not a multiple of q");
  std::vector<symbol_t> out(s.size() / q);
  for (std::size_t l = 0; l < out.size(); ++l) {
    const double* sec = s.data() + l * q;
    std::size_t best = 0;
    for (std::size_t g = 1; g < q; ++g)
      if (sec[g] > sec[best]) best = g;
    out[l] = field.phi_inv(static_cast<std::uint32_t>(best));
  }
  return out;
}

}  // namespace srldpc
