#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "srldpc/gf.hpp"
#include "srldpc/rng.hpp"

namespace testutil {

// Independent GF(2^p) product: carry-less multiply, then reduce by the
// modulus.  Deliberately table-free so it can vouch for the table path.
inline srldpc::symbol_t slow_mul(srldpc::symbol_t a, srldpc::symbol_t b, int p,
                                 std::uint32_t poly) {
  std::uint32_t acc = 0;
  for (int i = 0; i < p; ++i)
    if ((b >> i) & 1) acc ^= static_cast<std::uint32_t>(a) << i;
  for (int i = 2 * p - 2; i >= p; --i)
    if ((acc >> i) & 1) acc ^= poly << (i - p);
  return static_cast<srldpc::symbol_t>(acc);
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline std::vector<double> random_belief(srldpc::Rng& rng, int q) {
  std::vector<double> v(q);
  double s = 0.0;
  for (double& x : v) {
    x = 0.01 + rng.uniform();
    s += x;
  }
  for (double& x : v) x /= s;
  return v;
}

}  // namespace testutil
