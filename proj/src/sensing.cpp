#include "srldpc/sensing.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "srldpc/rng.hpp"

namespace srldpc {

void fwht(std::span<double> v) {
  const std::size_t n = v.size();
  if (n == 0 || (n & (n - 1)) != 0)
    throw std::invalid_argument("fwht length must be a power of two, got " +
                                std::to_string(n));
  double* a = v.data();
  for (std::size_t h = 1; h < n; h <<= 1) {
    for (std::size_t i = 0; i < n; i += h << 1) {
      double* lo = a + i;
      double* hi = a + i + h;
#pragma omp simd
      for (std::size_t j = 0; j < h; ++j) {
        double x = lo[j];
        double y = hi[j];
        lo[j] = x + y;
        hi[j] = x - y;
      }
    }
  }
}

namespace {

void check_dims(int n, int N) {
  if (n < 1 || N < 1)
    throw std::invalid_argument("operator dimensions must be positive, got n = " +
                                std::to_string(n) + ", N = " + std::to_string(N));
}

}  // namespace

SensingOperator SensingOperator::gaussian(int n, int N, std::uint64_t seed) {
  check_dims(n, N);
  if (static_cast<long long>(n) * N > 1'000'000'000LL)
    throw std::invalid_argument(
        "dense gaussian operator of size " + std::to_string(n) + " x " +
        std::to_string(N) + " exceeds the 1e9-entry resource guard");
  SensingOperator op;
  op.kind_ = OperatorKind::gaussian;
  op.n_ = n;
  op.N_ = N;
  op.seed_ = seed;
  op.dense_.resize(static_cast<std::size_t>(n) * N);
  Rng rng(seed);
  const double s = 1.0 / std::sqrt(static_cast<double>(n));
  for (double& e : op.dense_) e = s * rng.normal();
  return op;
}

SensingOperator SensingOperator::hadamard(int n, int N, std::uint64_t seed) {
  check_dims(n, N);
  const std::uint32_t need = static_cast<std::uint32_t>(std::max(n + 1, N));
  const std::uint32_t m = std::bit_ceil(need);
  SensingOperator op;
  op.kind_ = OperatorKind::hadamard;
  op.n_ = n;
  op.N_ = N;
  op.m_ = static_cast<int>(m);
  op.seed_ = seed;
  op.scale_ = 1.0 / std::sqrt(static_cast<double>(n));

  Rng rng(seed);
  // n distinct rows out of 1..m-1 (row 0 of H_m is all-ones and is skipped),
  // via a partial Fisher-Yates shuffle.  Rows are sorted afterwards: the row
  // order carries no information and sorted gathers are cache-friendlier.
  std::vector<std::int32_t> pool(m - 1);
  std::iota(pool.begin(), pool.end(), 1);
  op.row_index_.resize(n);
  for (int i = 0; i < n; ++i) {
    std::uint32_t j = i + rng.below(static_cast<std::uint32_t>(pool.size() - i));
    std::swap(pool[i], pool[j]);
    op.row_index_[i] = pool[i];
  }
  std::sort(op.row_index_.begin(), op.row_index_.end());

  op.col_sign_.resize(N);
  for (int j = 0; j < N; ++j)
    op.col_sign_[j] = (rng.next_u64() & 1) ? 1 : -1;
  return op;
}

void SensingOperator::forward(std::span<const double> s, std::span<double> out,
                              std::vector<double>& scratch) const {
  if (static_cast<int>(s.size()) != N_ || static_cast<int>(out.size()) != n_)
    throw std::invalid_argument("forward: size mismatch");
  if (kind_ == OperatorKind::gaussian) {
    for (int i = 0; i < n_; ++i) {
      const double* row = dense_.data() + static_cast<std::size_t>(i) * N_;
      double acc = 0.0;
#pragma omp simd reduction(+ : acc)
      for (int j = 0; j < N_; ++j) acc += row[j] * s[j];
      out[i] = acc;
    }
    return;
  }
  scratch.assign(m_, 0.0);
  for (int j = 0; j < N_; ++j) scratch[j] = col_sign_[j] * s[j];
  fwht(scratch);
  for (int i = 0; i < n_; ++i) out[i] = scale_ * scratch[row_index_[i]];
}

void SensingOperator::adjoint(std::span<const double> z, std::span<double> out,
                              std::vector<double>& scratch) const {
  if (static_cast<int>(z.size()) != n_ || static_cast<int>(out.size()) != N_)
    throw std::invalid_argument("adjoint: size mismatch");
  if (kind_ == OperatorKind::gaussian) {
    std::fill(out.begin(), out.end(), 0.0);
    for (int i = 0; i < n_; ++i) {
      const double* row = dense_.data() + static_cast<std::size_t>(i) * N_;
      const double zi = z[i];
#pragma omp simd
      for (int j = 0; j < N_; ++j) out[j] += zi * row[j];
    }
    return;
  }
  scratch.assign(m_, 0.0);
  for (int i = 0; i < n_; ++i) scratch[row_index_[i]] = scale_ * z[i];
  fwht(scratch);
  for (int j = 0; j < N_; ++j) out[j] = col_sign_[j] * scratch[j];
}

SensingOperator gaussian_operator(int n, int N, std::uint64_t seed) {
  return SensingOperator::gaussian(n, N, seed);
}

SensingOperator hadamard_operator(int n, int N, std::uint64_t seed) {
  return SensingOperator::hadamard(n, N, seed);
}

}  // namespace srldpc
