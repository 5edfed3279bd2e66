#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace srldpc {

// In-place Walsh-Hadamard transform, unnormalized butterflies; applying it
// twice multiplies by the length.  Length must be a power of two.
void fwht(std::span<double> v);

enum class OperatorKind { gaussian, hadamard };

// Per-user sensing map R^N -> R^n together with its exact adjoint.
//
//   gaussian: dense i.i.d. N(0, 1/n) entries (validation operator).
//   hadamard: n distinct rows of the order-m Walsh-Hadamard matrix
//             (m = least power of two >= max(n+1, N), row 0 excluded),
//             random +-1 column signs, scaled by 1/sqrt(n).  Forward and
//             adjoint run in O(m log m) via the transform.
class SensingOperator {
 public:
  static SensingOperator gaussian(int n, int N, std::uint64_t seed);
  static SensingOperator hadamard(int n, int N, std::uint64_t seed);

  OperatorKind kind() const { return kind_; }
  int rows() const { return n_; }
  int cols() const { return N_; }
  int transform_order() const { return m_; }  // 0 for gaussian
  std::uint64_t seed() const { return seed_; }

  // out = A s   (|s| = N, |out| = n).  scratch is resized as needed; passing
  // a distinct scratch per thread makes concurrent calls safe.
  void forward(std::span<const double> s, std::span<double> out,
               std::vector<double>& scratch) const;
  // out = A^T z (|z| = n, |out| = N).
  void adjoint(std::span<const double> z, std::span<double> out,
               std::vector<double>& scratch) const;

 private:
  SensingOperator() = default;

  OperatorKind kind_ = OperatorKind::gaussian;
  int n_ = 0, N_ = 0, m_ = 0;
  std::uint64_t seed_ = 0;
  double scale_ = 0.0;                    // hadamard: 1/sqrt(n)
  std::vector<double> dense_;             // gaussian: n x N row-major
  std::vector<std::int32_t> row_index_;   // hadamard: selected rows of H_m
  std::vector<std::int8_t> col_sign_;     // hadamard: per-column +-1
};

SensingOperator gaussian_operator(int n, int N, std::uint64_t seed);
SensingOperator hadamard_operator(int n, int N, std::uint64_t seed);

}  // namespace srldpc
