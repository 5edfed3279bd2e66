#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "srldpc/nbldpc.hpp"

using namespace srldpc;
using testutil::max_abs_diff;
using testutil::random_belief;

namespace {

// Flooding BP assembled from the public single-message kernels; used as an
// oracle for the flat fast path.
std::vector<std::vector<double>> naive_bp(const NbLdpcCode& code,
                                          const std::vector<std::vector<double>>& alpha,
                                          int rounds) {
  const int M = code.M, L = code.L;
  // v2c[p][slot], c2v[p][slot]
  std::vector<std::vector<std::vector<double>>> v2c(M), c2v(M);
  for (int p = 0; p < M; ++p) {
    v2c[p].resize(code.checks[p].size());
    c2v[p].resize(code.checks[p].size());
    for (std::size_t j = 0; j < code.checks[p].size(); ++j)
      v2c[p][j] = var_to_check(alpha[code.checks[p][j].var], {});
  }
  for (int round = 0; round < rounds; ++round) {
    for (int p = 0; p < M; ++p)
      for (std::size_t j = 0; j < code.checks[p].size(); ++j)
        c2v[p][j] = check_to_var(code, p, code.checks[p][j].var, v2c[p]);
    if (round + 1 == rounds) break;
    for (int p = 0; p < M; ++p)
      for (std::size_t j = 0; j < code.checks[p].size(); ++j) {
        const int v = code.checks[p][j].var;
        std::vector<std::vector<double>> others;
        for (int c : code.var_checks[v]) {
          if (c == p) continue;
          for (std::size_t i = 0; i < code.checks[c].size(); ++i)
            if (code.checks[c][i].var == v) others.push_back(c2v[c][i]);
        }
        v2c[p][j] = var_to_check(alpha[v], others);
      }
  }
  std::vector<std::vector<double>> out(L);
  for (int v = 0; v < L; ++v) {
    std::vector<std::vector<double>> inc;
    for (int c : code.var_checks[v])
      for (std::size_t i = 0; i < code.checks[c].size(); ++i)
        if (code.checks[c][i].var == v) inc.push_back(c2v[c][i]);
    out[v] = var_to_check(alpha[v], inc);
  }
  return out;
}

TannerGraph manual_graph(int L, int M, std::vector<std::vector<int>> rows) {
  TannerGraph g;
  g.L = L;
  g.M = M;
  g.check_vars = std::move(rows);
  return g;
}

}  // namespace

TEST_CASE("peg construction is deterministic and regular") {
  const TannerGraph a = peg_construct(76, 3, 2, 1);
  const TannerGraph b = peg_construct(76, 3, 2, 99);  // seed is inert
  CHECK(a.check_vars == b.check_vars);
  std::vector<int> var_deg(76, 0);
  int edges = 0;
  for (const auto& c : a.check_vars) {
    edges += static_cast<int>(c.size());
    for (int v : c) ++var_deg[v];
  }
  CHECK(edges == 152);
  for (int d : var_deg) CHECK(d == 2);
  // checks stay balanced: 152 edges over 3 checks
  for (const auto& c : a.check_vars)
    CHECK(std::abs(static_cast<int>(c.size()) - 51) <= 1);
  CHECK(a.girth >= 4);
}

TEST_CASE("peg avoids short cycles when the graph is sparse enough") {
  // 4 variables of degree 2 over 4 checks can be laid out with girth >= 6;
  // a greedy farthest-first construction must not close a 4-cycle.
  const TannerGraph g = peg_construct(4, 4, 2, 1);
  CHECK((g.girth == 0 || g.girth >= 6));
}

TEST_CASE("peg validates its dimensions") {
  CHECK_THROWS_AS(peg_construct(4, 2, 3, 1), std::invalid_argument);  // dv > M
  CHECK_THROWS_AS(peg_construct(2, 4, 1, 1), std::invalid_argument);  // M > L
  CHECK_THROWS_AS(peg_construct(4, 2, 0, 1), std::invalid_argument);
}

TEST_CASE("known girth values") {
  // both variables attached to both checks: a 4-cycle
  const TannerGraph square = manual_graph(2, 2, {{0, 1}, {0, 1}});
  GfField f(2);
  const NbLdpcCode code = make_code(square, f, {{1, 2}, {1, 3}});
  CHECK(code.girth == 4);
  // single check over two variables: a tree
  const TannerGraph tree = manual_graph(2, 1, {{0, 1}});
  const NbLdpcCode tcode = make_code(tree, f, {{1, 2}});
  CHECK(tcode.girth == 0);
}

TEST_CASE("edge weights are uniform over the nonzero elements") {
  GfField f(4);  // q = 16
  const TannerGraph g = peg_construct(600, 5, 2, 1);
  std::vector<int> hist(16, 0);
  int total = 0;
  // pool several seeds for a healthy sample
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const NbLdpcCode code = assign_weights(g, f, seed);
    for (const auto& check : code.checks)
      for (const auto& e : check) {
        ++hist[e.weight];
        ++total;
      }
  }
  CHECK(hist[0] == 0);
  const double expect = total / 15.0;
  double chi2 = 0.0;
  for (int w = 1; w < 16; ++w)
    chi2 += (hist[w] - expect) * (hist[w] - expect) / expect;
  // 14 degrees of freedom: mean 14, sd ~5.3; 45 is far beyond any plausible
  // fluctuation for a healthy generator
  CHECK(chi2 < 45.0);
}

TEST_CASE("make_code validation") {
  GfField f(2);
  const TannerGraph dup = manual_graph(2, 1, {{0, 0}});
  CHECK_THROWS_AS(make_code(dup, f, {{1, 2}}), std::invalid_argument);
  const TannerGraph g = manual_graph(2, 1, {{0, 1}});
  CHECK_THROWS_AS(make_code(g, f, {{0, 1}}), std::invalid_argument);  // zero weight
  CHECK_THROWS_AS(make_code(g, f, {{1}}), std::invalid_argument);     // count
  const TannerGraph oob = manual_graph(2, 1, {{0, 5}});
  CHECK_THROWS_AS(make_code(oob, f, {{1, 2}}), std::invalid_argument);
}

TEST_CASE("rank-deficient weight draws are rejected") {
  GfField f(2);
  const TannerGraph g = manual_graph(2, 2, {{0, 1}, {0, 1}});
  // second row is 2 * first row over GF(4)
  try {
    make_code(g, f, {{1, 1}, {2, 2}});
    FAIL("expected rank failure");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("rank") != std::string::npos);
  }
}

TEST_CASE("encoder matches the closed form for one check") {
  GfField f(8);
  const TannerGraph g = manual_graph(2, 1, {{0, 1}});
  const symbol_t w0 = 0x35, w1 = 0xa7;
  const NbLdpcCode code = make_code(g, f, {{w0, w1}});
  CHECK(code.info_positions == std::vector<int>{0});
  CHECK(code.parity_positions == std::vector<int>{1});
  for (int a = 0; a < 256; ++a) {
    const std::vector<symbol_t> cw = code.encode({{static_cast<symbol_t>(a)}});
    CHECK(cw[0] == a);
    CHECK(cw[1] == f.mul(f.inv(w1), f.mul(w0, static_cast<symbol_t>(a))));
  }
}

TEST_CASE("parity positions prefer the rightmost columns") {
  GfField f(8);
  const TannerGraph g = peg_construct(76, 3, 2, 1);
  const NbLdpcCode code = assign_weights(g, f, 7);
  CHECK(code.parity_positions.size() == 3);
  CHECK(code.info_positions.size() == 73);
  // info and parity positions partition 0..L-1
  std::vector<char> hit(76, 0);
  for (int p : code.parity_positions) hit[p] = 1;
  for (int p : code.info_positions) {
    CHECK(hit[p] == 0);
    hit[p] = 1;
  }
  for (char h : hit) CHECK(h == 1);
  // with rightmost-pivot elimination the parity symbols live near the tail
  for (int p : code.parity_positions) CHECK(p >= 70);
}

TEST_CASE("random messages encode to valid codewords") {
  GfField f(8);
  const NbLdpcCode code = assign_weights(peg_construct(76, 3, 2, 1), f, 7);
  Rng rng(13);
  for (int t = 0; t < 100; ++t) {
    std::vector<symbol_t> info(73);
    for (auto& s : info) s = static_cast<symbol_t>(rng.below(256));
    std::vector<symbol_t> cw = code.encode(info);
    for (symbol_t s : code.syndrome(cw)) CHECK(s == 0);
    // perturbing any single symbol breaks at least one check
    const int pos = rng.below(76);
    cw[pos] = static_cast<symbol_t>(cw[pos] ^ (1 + rng.below(255)));
    bool any = false;
    for (symbol_t s : code.syndrome(cw)) any = any || s != 0;
    CHECK(any);
  }
}

TEST_CASE("encode validates its input") {
  GfField f(2);
  const NbLdpcCode code = make_code(manual_graph(2, 1, {{0, 1}}), f, {{1, 2}});
  CHECK_THROWS_AS(code.encode(std::vector<symbol_t>{1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(code.encode(std::vector<symbol_t>{9}), std::invalid_argument);
  CHECK_THROWS_AS(code.syndrome(std::vector<symbol_t>{1}), std::invalid_argument);
}

TEST_CASE("nbal text round trips byte for byte") {
  GfField f(8);
  const NbLdpcCode code = assign_weights(peg_construct(40, 4, 2, 1), f, 3);
  const std::string text = to_nbal(code);
  const NbLdpcCode back = parse_nbal(text);
  CHECK(to_nbal(back) == text);
  CHECK(back.L == code.L);
  CHECK(back.M == code.M);
  CHECK(back.girth == code.girth);
  CHECK(back.parity_positions == code.parity_positions);

  const std::string path = "/tmp/srldpc_test_code.nbal";
  save_nbal(code, path);
  const NbLdpcCode loaded = load_nbal(path);
  CHECK(to_nbal(loaded) == text);
  std::remove(path.c_str());
}

TEST_CASE("nbal rejects malformed input") {
  CHECK_THROWS(parse_nbal(""));
  CHECK_THROWS(parse_nbal("16 4\n"));                    // short header
  CHECK_THROWS(parse_nbal("15 4 1\n0:1 1:1 2:1 3:1\n")); // q not a power of two
  CHECK_THROWS(parse_nbal("16 4 2\n0:1 1:1\n"));         // missing check line
  CHECK_THROWS(parse_nbal("16 2 1\n0:1 x:2\n"));         // bad token
  CHECK_THROWS(parse_nbal("16 2 1\n0:1 1:zz\n"));        // bad weight
  CHECK_THROWS(parse_nbal("16 2 1\n0:1 1:2\njunk\n"));   // trailing content
  CHECK_THROWS(parse_nbal("16 2 1\n0:1 5:2\n"));         // var out of range
  CHECK_THROWS(load_nbal("/nonexistent/file.nbal"));
}

TEST_CASE("fq_convolve identities and oracle") {
  GfField f(4);
  const int q = 16;
  std::vector<double> delta0(q, 0.0);
  delta0[0] = 1.0;
  Rng rng(31);
  const std::vector<double> u = random_belief(rng, q);
  CHECK(max_abs_diff(fq_convolve(u, delta0), u) < 1e-14);

  // point masses add their symbols
  for (int a : {3, 7}) {
    for (int b : {5, 12}) {
      std::vector<double> da(q, 0.0), db(q, 0.0);
      da[a] = 1.0;
      db[b] = 1.0;
      const std::vector<double> c = fq_convolve(da, db);
      for (int g = 0; g < q; ++g)
        CHECK(std::abs(c[g] - (g == (a ^ b) ? 1.0 : 0.0)) < 1e-13);
    }
  }

  for (int t = 0; t < 25; ++t) {
    const std::vector<double> a = random_belief(rng, q);
    const std::vector<double> b = random_belief(rng, q);
    const std::vector<double> c = fq_convolve(a, b);
    double suma = 0, sumb = 0, sumc = 0;
    for (int g = 0; g < q; ++g) {
      double direct = 0.0;
      for (int h = 0; h < q; ++h) direct += a[h] * b[g ^ h];
      CHECK(std::abs(direct - c[g]) <= 1e-12);
      suma += a[g];
      sumb += b[g];
      sumc += c[g];
    }
    CHECK(sumc == doctest::Approx(suma * sumb).epsilon(1e-9));
  }
}

TEST_CASE("fq_convolve validates lengths") {
  std::vector<double> a(16, 0.0), b(8, 0.0), c(6, 0.0);
  CHECK_THROWS_AS(fq_convolve(a, b), std::invalid_argument);
  CHECK_THROWS_AS(fq_convolve(c, c), std::invalid_argument);
}

TEST_CASE("rotate permutes by field multiplication") {
  GfField f(2);
  std::vector<double> u{0.1, 0.2, 0.3, 0.4};
  CHECK(rotate(u, 1, f) == u);
  // w = 2 over GF(4): 0->0, 1->2, 2->3, 3->1
  const std::vector<double> r = rotate(u, 2, f);
  CHECK(r == std::vector<double>{0.1, 0.4, 0.2, 0.3});
  CHECK_THROWS_AS(rotate(u, 0, f), std::invalid_argument);

  GfField f8(8);
  Rng rng(17);
  const std::vector<double> big = random_belief(rng, 256);
  for (symbol_t w : {symbol_t{0x02}, symbol_t{0x53}, symbol_t{0xff}}) {
    const std::vector<double> round = rotate(rotate(big, w, f8), f8.inv(w), f8);
    CHECK(max_abs_diff(round, big) == 0.0);
    // multiset of values is preserved
    std::vector<double> a = big, b = rotate(big, w, f8);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    CHECK(a == b);
  }
}

TEST_CASE("check_to_var point-mass case matches the constraint") {
  GfField f(4);
  const symbol_t wl = 7, wj = 11;
  const NbLdpcCode code = make_code(manual_graph(2, 1, {{0, 1}}), f, {{wl, wj}});
  for (int a = 0; a < 16; ++a) {
    std::vector<std::vector<double>> incoming(2);
    incoming[1].assign(16, 0.0);
    incoming[1][a] = 1.0;  // neighbor var 1 says "I am a"
    const std::vector<double> msg = check_to_var(code, 0, 0, incoming);
    // constraint wl*v0 + wj*v1 = 0 forces v0 = wl^-1 wj a
    const symbol_t want = f.mul(f.inv(wl), f.mul(wj, static_cast<symbol_t>(a)));
    for (int g = 0; g < 16; ++g)
      CHECK(msg[g] == doctest::Approx(g == want ? 1.0 : 0.0).epsilon(1e-12));
  }
}

TEST_CASE("check_to_var degree-3 matches exhaustive enumeration") {
  GfField f(2);
  const NbLdpcCode code =
      make_code(manual_graph(3, 1, {{0, 1, 2}}), f, {{3, 2, 1}});
  Rng rng(77);
  std::vector<std::vector<double>> incoming{
      random_belief(rng, 4), random_belief(rng, 4), random_belief(rng, 4)};
  for (int target = 0; target < 3; ++target) {
    const std::vector<double> msg = check_to_var(code, 0, target, incoming);
    std::vector<double> want(4, 0.0);
    const auto& nb = code.checks[0];
    for (int a = 0; a < 4; ++a)       // candidate value of the target
      for (int x = 0; x < 4; ++x)     // values of the two other neighbors
        for (int y = 0; y < 4; ++y) {
          double prob = 1.0;
          symbol_t sum = 0;
          int vals[3];
          for (int j = 0, c = 0; j < 3; ++j) {
            if (j == target) {
              vals[j] = a;
            } else {
              vals[j] = c == 0 ? x : y;
              prob *= incoming[j][vals[j]];
              ++c;
            }
          }
          for (int j = 0; j < 3; ++j)
            sum = f.add(sum, f.mul(nb[j].weight, static_cast<symbol_t>(vals[j])));
          if (sum == 0) want[a] += prob;
        }
    double ws = 0.0;
    for (double x : want) ws += x;
    for (double& x : want) x /= ws;
    CHECK(max_abs_diff(msg, want) <= 1e-12);
  }
}

TEST_CASE("check_to_var uniform inputs stay uniform") {
  GfField f(4);
  const NbLdpcCode code =
      make_code(manual_graph(3, 1, {{0, 1, 2}}), f, {{1, 5, 9}});
  std::vector<std::vector<double>> incoming(3, std::vector<double>(16, 1.0 / 16));
  const std::vector<double> msg = check_to_var(code, 0, 1, incoming);
  for (double x : msg) CHECK(x == doctest::Approx(1.0 / 16).epsilon(1e-12));
}

TEST_CASE("check_to_var validates the message set") {
  GfField f(2);
  const NbLdpcCode code = make_code(manual_graph(2, 1, {{0, 1}}), f, {{1, 2}});
  std::vector<std::vector<double>> short_set(1, std::vector<double>(4, 0.25));
  CHECK_THROWS_AS(check_to_var(code, 0, 0, short_set), std::invalid_argument);
  std::vector<std::vector<double>> bad_len(2, std::vector<double>(3, 0.25));
  CHECK_THROWS_AS(check_to_var(code, 0, 0, bad_len), std::invalid_argument);
  std::vector<std::vector<double>> ok(2, std::vector<double>(4, 0.25));
  CHECK_THROWS_AS(check_to_var(code, 0, 7, ok), std::invalid_argument);
  CHECK_THROWS_AS(check_to_var(code, 5, 0, ok), std::invalid_argument);
}

TEST_CASE("var_to_check combines prior and messages") {
  Rng rng(3);
  const std::vector<double> alpha = random_belief(rng, 8);
  CHECK(max_abs_diff(var_to_check(alpha, {}), alpha) < 1e-15);
  std::vector<std::vector<double>> uni(3, std::vector<double>(8, 0.125));
  CHECK(max_abs_diff(var_to_check(alpha, uni), alpha) < 1e-12);
  // conflicting point masses fall back to uniform
  std::vector<double> da(8, 0.0), db(8, 0.0);
  da[2] = 1.0;
  db[5] = 1.0;
  const std::vector<double> out = var_to_check(da, {{db}});
  for (double x : out) CHECK(x == doctest::Approx(0.125).epsilon(1e-9));
}

TEST_CASE("bp with zero rounds returns the normalized priors") {
  GfField f(2);
  const NbLdpcCode code = make_code(manual_graph(2, 1, {{0, 1}}), f, {{1, 2}});
  std::vector<std::vector<double>> alpha{{2.0, 1.0, 1.0, 0.0}, {1.0, 1.0, 1.0, 1.0}};
  const auto out = bp_estimate(code, alpha, 0);
  CHECK(out[0][0] == doctest::Approx(0.5));
  CHECK(out[0][3] == doctest::Approx(0.0));
  CHECK(out[1][2] == doctest::Approx(0.25));
}

TEST_CASE("a codeword point mass is a bp fixed point") {
  GfField f(8);
  const NbLdpcCode code = assign_weights(peg_construct(20, 3, 2, 1), f, 11);
  Rng rng(5);
  std::vector<symbol_t> info(17);
  for (auto& s : info) s = static_cast<symbol_t>(rng.below(256));
  const std::vector<symbol_t> cw = code.encode(info);
  std::vector<std::vector<double>> alpha(20, std::vector<double>(256, 0.0));
  for (int l = 0; l < 20; ++l) alpha[l][cw[l]] = 1.0;
  for (int rounds : {1, 2, 3}) {
    const auto out = bp_estimate(code, alpha, rounds);
    for (int l = 0; l < 20; ++l)
      for (int g = 0; g < 256; ++g)
        CHECK(out[l][g] == doctest::Approx(g == cw[l] ? 1.0 : 0.0).epsilon(1e-9));
  }
}

TEST_CASE("one bp round on a single-check code gives exact marginals") {
  GfField f(2);
  const symbol_t w0 = 2, w1 = 3;
  const NbLdpcCode code = make_code(manual_graph(2, 1, {{0, 1}}), f, {{w0, w1}});
  Rng rng(23);
  std::vector<std::vector<double>> alpha{random_belief(rng, 4), random_belief(rng, 4)};
  const auto out = bp_estimate(code, alpha, 1);
  // exact joint: P(v0 = a, v1 = b) with w0 a + w1 b = 0
  std::vector<double> m0(4, 0.0), m1(4, 0.0);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      if (f.add(f.mul(w0, static_cast<symbol_t>(a)),
                f.mul(w1, static_cast<symbol_t>(b))) != 0)
        continue;
      const double pr = alpha[0][a] * alpha[1][b];
      m0[a] += pr;
      m1[b] += pr;
    }
  double s0 = 0, s1 = 0;
  for (int g = 0; g < 4; ++g) {
    s0 += m0[g];
    s1 += m1[g];
  }
  for (int g = 0; g < 4; ++g) {
    CHECK(out[0][g] == doctest::Approx(m0[g] / s0).epsilon(1e-12));
    CHECK(out[1][g] == doctest::Approx(m1[g] / s1).epsilon(1e-12));
  }
}

TEST_CASE("flat bp matches the kernel-by-kernel reference") {
  GfField f(4);
  const NbLdpcCode code = assign_weights(peg_construct(8, 3, 2, 1), f, 19);
  Rng rng(29);
  std::vector<std::vector<double>> alpha;
  for (int l = 0; l < 8; ++l) alpha.push_back(random_belief(rng, 16));
  for (int rounds : {1, 2, 3}) {
    const auto fast = bp_estimate(code, alpha, rounds);
    const auto slow = naive_bp(code, alpha, rounds);
    for (int l = 0; l < 8; ++l)
      CHECK(max_abs_diff(fast[l], slow[l]) <= 1e-12);
  }
}

TEST_CASE("bp outputs are normalized distributions") {
  GfField f(4);
  const NbLdpcCode code = assign_weights(peg_construct(12, 4, 2, 1), f, 3);
  Rng rng(41);
  std::vector<std::vector<double>> alpha;
  for (int l = 0; l < 12; ++l) alpha.push_back(random_belief(rng, 16));
  const auto out = bp_estimate(code, alpha, 2);
  for (const auto& row : out) {
    double s = 0.0;
    for (double x : row) {
      CHECK(x >= 0.0);
      s += x;
    }
    CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
  }
}
