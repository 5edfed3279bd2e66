// Timing harness: fast transform scaling, the OpenMP joint decoder vs the
// dense serial reference on a common toy, and thread scaling at full size.
// Run manually; numbers depend on the machine.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "srldpc/amp.hpp"
#include "srldpc/nbldpc.hpp"
#include "srldpc/rng.hpp"
#include "srldpc/sensing.hpp"
#include "srldpc/sparc.hpp"

using namespace srldpc;

namespace {

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

template <typename F>
double time_min_ms(int reps, F&& body) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const double t0 = now_ms();
    body();
    best = std::min(best, now_ms() - t0);
  }
  return best;
}

void bench_fwht() {
  std::printf("fast transform, one in-place pass\n");
  std::printf("%10s %12s %14s\n", "order", "time (us)", "per doubling");
  Rng rng(1);
  double prev = 0.0;
  for (int k = 13; k <= 17; ++k) {
    const std::size_t m = std::size_t{1} << k;
    std::vector<double> v(m);
    for (double& x : v) x = rng.normal();
    const int inner = 64;
    const double ms = time_min_ms(5, [&] {
      for (int i = 0; i < inner; ++i) fwht(v);
    });
    const double us = 1000.0 * ms / inner;
    std::printf("%10zu %12.2f %14s\n", m, us,
                prev > 0.0 ? (std::to_string(us / prev).substr(0, 5) + "x").c_str()
                           : "-");
    prev = us;
  }
  std::printf("\n");
}

struct ToySystem {
  GfField field{3};
  NbLdpcCode code;
  std::vector<double> d;
  std::vector<SensingOperator> ops;
  std::vector<double> y;
  int n, qL;

  ToySystem(int K, int L, int n_)
      : code(assign_weights(peg_construct(L, 2, 2, 1), field, 5)), n(n_),
        qL(8 * L) {
    const double P = 2.0 * 3 * (L - 2) * std::pow(10.0, 0.3);
    d.assign(L, std::sqrt(P / L));
    Rng rng(2);
    y.assign(n, 0.0);
    std::vector<double> svec(qL), x(n), scratch;
    for (int k = 0; k < K; ++k) {
      std::vector<symbol_t> msg(L - 2);
      for (auto& s : msg) s = static_cast<symbol_t>(rng.below(8));
      ops.push_back(hadamard_operator(n, qL, 10 + k));
      symbols_to_indicator(code.encode(msg), field, d, svec);
      ops.back().forward(svec, x, scratch);
      for (int i = 0; i < n; ++i) y[i] += x[i];
    }
    for (int i = 0; i < n; ++i) y[i] += rng.normal();
  }

  std::vector<const SensingOperator*> op_ptrs() const {
    std::vector<const SensingOperator*> v;
    for (const auto& o : ops) v.push_back(&o);
    return v;
  }
  std::vector<const NbLdpcCode*> code_ptrs() const {
    return std::vector<const NbLdpcCode*>(ops.size(), &code);
  }
};

void bench_joint_vs_stacked() {
  std::printf("joint decoder (fast operators) vs dense stacked reference\n");
  std::printf("%4s %6s %6s %16s %16s\n", "K", "L", "n", "joint (ms/iter)",
              "stacked (ms/iter)");
  DecoderParams prm;
  prm.early_stop = false;
  prm.warn_girth = false;
  for (int K : {1, 2, 4}) {
    ToySystem sys(K, 16, 128);
    JointDecoder fast(sys.op_ptrs(), sys.code_ptrs(), sys.d, prm);
    StackedReferenceDecoder ref(sys.op_ptrs(), sys.code_ptrs(), sys.d, prm);
    const int iters = 50;
    const double tf = time_min_ms(3, [&] {
      fast.reset(sys.y);
      for (int t = 0; t < iters; ++t) fast.step();
    });
    const double tr = time_min_ms(3, [&] {
      ref.reset(sys.y);
      for (int t = 0; t < iters; ++t) ref.step();
    });
    std::printf("%4d %6d %6d %16.3f %16.3f\n", K, 16, 128, tf / iters,
                tr / iters);
  }
  std::printf("\n");
}

void bench_full_size() {
  std::printf("full-size joint decode: K=2, GF(256), L=76, n=1460\n");
  const NbLdpcCode code =
      assign_weights(peg_construct(76, 3, 2, 1), GfField(8), 11);
  const int qL = 256 * 76, n = 1460;
  const double P = 2.0 * 584 * std::pow(10.0, 0.3);
  const std::vector<double> d(76, std::sqrt(P / 76));
  Rng rng(3);
  std::vector<double> y(n, 0.0), svec(qL), x(n), scratch;
  std::vector<SensingOperator> ops;
  for (int k = 0; k < 2; ++k) {
    std::vector<symbol_t> msg(73);
    for (auto& s : msg) s = static_cast<symbol_t>(rng.below(256));
    ops.push_back(hadamard_operator(n, qL, 20 + k));
    symbols_to_indicator(code.encode(msg), code.field, d, svec);
    ops.back().forward(svec, x, scratch);
    for (int i = 0; i < n; ++i) y[i] += x[i];
  }
  for (int i = 0; i < n; ++i) y[i] += rng.normal();

  DecoderParams prm;
  prm.early_stop = false;
  prm.warn_girth = false;
  std::vector<int> threads{1};
#ifdef _OPENMP
  if (omp_get_max_threads() > 1) threads.push_back(omp_get_max_threads());
#endif
  for (int nt : threads) {
#ifdef _OPENMP
    omp_set_num_threads(nt);
#endif
    JointDecoder dec({&ops[0], &ops[1]}, {&code, &code}, d, prm);
    const int iters = 25;
    const double ms = time_min_ms(3, [&] {
      dec.reset(y);
      for (int t = 0; t < iters; ++t) dec.step();
    });
    std::printf("  %d thread%s: %.2f ms per iteration (%.1f ms per decode of "
                "%d iterations)\n",
                nt, nt == 1 ? "" : "s", ms / iters, ms, iters);
  }
  std::printf("\n");
}

}  // namespace

int main() {
  bench_fwht();
  bench_joint_vs_stacked();
  bench_full_size();
  return 0;
}
