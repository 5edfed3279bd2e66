#include "selftest.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "srldpc/amp.hpp"
#include "srldpc/gf.hpp"
#include "srldpc/nbldpc.hpp"
#include "srldpc/rng.hpp"
#include "srldpc/sensing.hpp"
#include "srldpc/sim.hpp"
#include "srldpc/sparc.hpp"

using namespace srldpc;

namespace {

int failures = 0;

void check(bool ok, const std::string& name, const std::string& detail = "") {
  if (ok) {
    std::printf("passed: %s\n", name.c_str());
  } else {
    ++failures;
    std::printf("FAILED: %s%s%s\n", name.c_str(), detail.empty() ? "" : " - ",
                detail.c_str());
  }
}

// Independent product: carry-less multiply reduced by the field modulus.
symbol_t slow_mul(symbol_t a, symbol_t b, int p, std::uint32_t poly) {
  std::uint32_t acc = 0, x = a;
  for (int i = 0; i < p; ++i) {
    if ((b >> i) & 1) acc ^= x << i;
  }
  for (int i = 2 * p - 2; i >= p; --i)
    if ((acc >> i) & 1) acc ^= poly << (i - p);
  return static_cast<symbol_t>(acc);
}

void field_checks() {
  GfField f(8);
  Rng rng(7);
  bool ok = true;
  for (int t = 0; t < 1000 && ok; ++t) {
    const symbol_t a = static_cast<symbol_t>(rng.below(256));
    const symbol_t b = static_cast<symbol_t>(rng.below(256));
    ok = f.mul(a, b) == slow_mul(a, b, 8, f.poly());
  }
  check(ok, "gf256 products match carry-less reference");

  GfField f4(2);
  std::vector<symbol_t> cyc;
  for (unsigned e = 0; e < 3; ++e) cyc.push_back(f4.pow_generator(e));
  check(cyc[0] == 1 && cyc[1] != 0 && cyc[2] != 0 && cyc[1] != cyc[2] &&
            f4.mul(cyc[2], f4.generator()) == 1,
        "gf4 generator cycles through the nonzero elements");

  bool threw = false;
  try {
    GfField bad(8, 0x100);  // x^8, divisible by x
  } catch (const std::exception&) {
    threw = true;
  }
  check(threw, "reducible modulus is rejected");
}

void transform_checks() {
  Rng rng(11);
  std::vector<double> v(1024), w;
  for (double& x : v) x = rng.normal();
  w = v;
  fwht(w);
  fwht(w);
  double maxdiff = 0;
  for (std::size_t i = 0; i < v.size(); ++i)
    maxdiff = std::max(maxdiff, std::abs(w[i] / 1024.0 - v[i]));
  check(maxdiff < 1e-12, "fwht applied twice scales by the length");

  std::vector<double> a(16), b(16);
  for (double& x : a) x = rng.uniform();
  for (double& x : b) x = rng.uniform();
  const std::vector<double> c = fq_convolve(a, b);
  double err = 0;
  for (int g = 0; g < 16; ++g) {
    double direct = 0;
    for (int h = 0; h < 16; ++h) direct += a[h] * b[g ^ h];
    err = std::max(err, std::abs(direct - c[g]));
  }
  check(err < 1e-12, "fq_convolve matches the quadratic sum");

  GfField f(8);
  std::vector<double> u(256);
  for (double& x : u) x = rng.uniform();
  const symbol_t wts = 0x53;
  std::vector<double> r1 = rotate(rotate(u, wts, f), f.inv(wts), f);
  err = 0;
  for (int g = 0; g < 256; ++g) err = std::max(err, std::abs(r1[g] - u[g]));
  check(err == 0.0, "rotate by w then w^-1 is the identity");
}

void operator_checks() {
  std::vector<double> scratch;
  for (int kind = 0; kind < 2; ++kind) {
    const int n = kind ? 64 : 32;
    const int N = kind ? 128 : 64;
    SensingOperator op = kind ? hadamard_operator(n, N, 5)
                              : gaussian_operator(n, N, 5);
    Rng rng(13 + kind);
    std::vector<double> s(N), z(n), As(n), Atz(N);
    for (double& x : s) x = rng.normal();
    for (double& x : z) x = rng.normal();
    op.forward(s, As, scratch);
    op.adjoint(z, Atz, scratch);
    double lhs = 0, rhs = 0;
    for (int i = 0; i < n; ++i) lhs += As[i] * z[i];
    for (int j = 0; j < N; ++j) rhs += s[j] * Atz[j];
    check(std::abs(lhs - rhs) <= 1e-9 * std::abs(lhs) + 1e-12,
          std::string(kind ? "hadamard" : "gaussian") +
              " forward/adjoint satisfy <As, z> = <s, A^T z>");
  }
}

void codec_checks() {
  GfField f(8);
  Rng rng(3);
  std::vector<std::uint8_t> bits(584);
  for (auto& b : bits) b = rng.next_u64() & 1;
  const std::vector<symbol_t> syms = bits_to_symbols(bits, f);
  const std::vector<std::uint8_t> back = symbols_to_bits(syms, f);
  check(back == bits, "bit/symbol packing round trips");

  const TannerGraph g = peg_construct(76, 3, 2, 1);
  const NbLdpcCode code = assign_weights(g, f, 99);
  bool deg_ok = true;
  for (const auto& c : code.checks)
    deg_ok = deg_ok && (c.size() == 50 || c.size() == 51);
  check(deg_ok && code.girth >= 4, "constructed (76, 73) code has balanced checks");

  std::vector<symbol_t> info(73);
  for (auto& s : info) s = static_cast<symbol_t>(rng.below(256));
  const std::vector<symbol_t> cw = code.encode(info);
  const std::vector<symbol_t> syn = code.syndrome(cw);
  bool zero = true;
  for (symbol_t s : syn) zero = zero && s == 0;
  check(zero, "encoded words satisfy every check");

  const std::string text = to_nbal(code);
  check(to_nbal(parse_nbal(text)) == text, "nbal text form round trips");

  std::vector<double> d(code.L, 2.5);
  std::vector<double> svec(static_cast<std::size_t>(code.L) * 256);
  symbols_to_indicator(cw, f, d, svec);
  check(hard_decision(svec, f) == cw, "indicator/hard-decision round trips");
}

void decoder_checks() {
  // GF(32) with M = 3: the q^-M odds of a wrong word satisfying every check
  // (and fooling early stopping) are negligible, so exact recovery is testable.
  GfField f(5);
  const TannerGraph g = peg_construct(8, 3, 2, 1);
  const NbLdpcCode code = assign_weights(g, f, 5);
  const int q = 32, L = 8, qL = q * L;
  Rng rng(17);
  std::vector<symbol_t> info(5);
  for (auto& s : info) s = static_cast<symbol_t>(rng.below(32));
  const std::vector<symbol_t> cw = code.encode(info);

  std::vector<std::vector<double>> alpha(L, std::vector<double>(q, 1e-12));
  for (int l = 0; l < L; ++l) alpha[l][cw[l]] = 1.0;
  const auto post = bp_estimate(code, alpha, 2);
  bool fixed = true;
  for (int l = 0; l < L; ++l)
    for (int gsym = 0; gsym < q; ++gsym) {
      const double want = gsym == cw[l] ? 1.0 : 0.0;
      fixed = fixed && std::abs(post[l][gsym] - want) < 1e-6;
    }
  check(fixed, "codeword point mass is a bp fixed point");

  const int n = 128;
  const double d0 = 4.0;
  std::vector<double> dvec(L, d0), svec(qL), y(n), scratch;
  const SensingOperator op1 = hadamard_operator(n, qL, 21);
  const SensingOperator op2 = hadamard_operator(n, qL, 22);
  std::vector<symbol_t> info2(5);
  for (auto& s : info2) s = static_cast<symbol_t>(rng.below(32));
  const std::vector<symbol_t> cw2 = code.encode(info2);

  symbols_to_indicator(cw, f, dvec, svec);
  op1.forward(svec, y, scratch);
  std::vector<double> x2(n);
  symbols_to_indicator(cw2, f, dvec, svec);
  op2.forward(svec, x2, scratch);
  for (int i = 0; i < n; ++i) y[i] += x2[i];

  DecoderParams dp;
  dp.warn_girth = false;
  const DecodeResult res =
      decode(y, {&op1, &op2}, {&code, &code}, dvec, dp);
  check(res.converged && res.users[0].symbols == cw &&
            res.users[1].symbols == cw2,
        "noiseless two-user mixture decodes exactly");
}

void harness_checks() {
  SimConfig cfg;
  cfg.k_users = 2;
  cfg.p = 5;
  cfg.L = 8;
  cfg.M = 3;
  cfg.B = 25;
  cfg.n = 128;
  cfg.dv = 2;
  cfg.max_trials = 24;
  cfg.min_bit_errors = 1'000'000;
  cfg.record_timing = false;
  cfg.ebn0_grid_db = {6.0};
  validate_config(cfg);
  const NbLdpcCode code = build_code(cfg);
  const PointResult a = run_point(cfg, code, 6.0, cfg.n);
  const PointResult b = run_point(cfg, code, 6.0, cfg.n);
  check(a.trials == b.trials && a.bit_errors == b.bit_errors &&
            a.symbol_errors == b.symbol_errors,
        "repeated runs with one seed give identical counts");

  const PointResult c = run_point(cfg, code, 6.0, cfg.n, 0.0);
  check(c.bit_errors == 0 && c.symbol_errors == 0,
        "noiseless channel decodes without errors");
}

}  // namespace

int run_selftest() {
  failures = 0;
  field_checks();
  transform_checks();
  operator_checks();
  codec_checks();
  decoder_checks();
  harness_checks();
  if (failures == 0)
    std::printf("all selftests passed\n");
  else
    std::printf("%d selftest(s) FAILED\n", failures);
  return failures;
}
