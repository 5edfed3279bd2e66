#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace srldpc {

// SplitMix64 step; used only to derive well-mixed seeds for substreams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derives an independent stream seed from a master seed plus up to three
// labels (e.g. trial index, purpose tag, user index).  Reproducible and
// order-independent: the result depends only on the tuple, never on how many
// other streams were drawn before it.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t s = master;
  s = splitmix64(s) ^ (a + 0x632be59bd9b4e019ULL);
  s = splitmix64(s) ^ (b + 0x9e3779b97f4a7c15ULL);
  s = splitmix64(s) ^ (c + 0xd6e8feb86659fd93ULL);
  return splitmix64(s);
}

// Deterministic generator with explicit uniform/normal draws.  The normal
// variate uses the Marsaglia polar method rather than std::normal_distribution
// so that sequences are identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n).
  std::uint32_t below(std::uint32_t n) {
    return static_cast<std::uint32_t>(gen_() % n);
  }

  // Standard normal.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    have_spare_ = true;
    return u * f;
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace srldpc
