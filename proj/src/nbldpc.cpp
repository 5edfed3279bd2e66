#include "srldpc/nbldpc.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <fstream>
#include <limits>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "srldpc/rng.hpp"
#include "srldpc/sensing.hpp"

namespace srldpc {

namespace {

constexpr double kBeliefFloor = 1e-300;

void normalize_row(double* x, int q) {
  double s = 0.0;
  for (int g = 0; g < q; ++g) {
    x[g] = std::max(x[g], kBeliefFloor);  // also clears fp negatives
    s += x[g];
  }
  const double inv = 1.0 / s;
  for (int g = 0; g < q; ++g) x[g] *= inv;
}

// Distance from variable v to every check in the partial graph; INT_MAX for
// unreachable checks.
std::vector<int> check_distances(int v, const std::vector<std::vector<int>>& check_vars,
                                 const std::vector<std::vector<int>>& var_checks) {
  const int M = static_cast<int>(check_vars.size());
  const int L = static_cast<int>(var_checks.size());
  std::vector<int> dc(M, std::numeric_limits<int>::max());
  std::vector<int> dvr(L, std::numeric_limits<int>::max());
  dvr[v] = 0;
  std::queue<std::pair<int, bool>> fifo;  // (node, is_check)
  fifo.push({v, false});
  while (!fifo.empty()) {
    auto [node, is_check] = fifo.front();
    fifo.pop();
    if (is_check) {
      for (int u : check_vars[node])
        if (dvr[u] == std::numeric_limits<int>::max()) {
          dvr[u] = dc[node] + 1;
          fifo.push({u, false});
        }
    } else {
      for (int c : var_checks[node])
        if (dc[c] == std::numeric_limits<int>::max()) {
          dc[c] = dvr[node] + 1;
          fifo.push({c, true});
        }
    }
  }
  return dc;
}

// Shortest cycle length, or 0 for a forest: for each edge (p, v), the
// shortest alternative v -> p path avoiding that edge closes a cycle of that
// length + 1.
int compute_girth(const std::vector<std::vector<int>>& check_vars,
                  const std::vector<std::vector<int>>& var_checks) {
  const int M = static_cast<int>(check_vars.size());
  const int L = static_cast<int>(var_checks.size());
  int best = std::numeric_limits<int>::max();
  for (int p = 0; p < M; ++p) {
    for (int v0 : check_vars[p]) {
      std::vector<int> dc(M, -1), dvr(L, -1);
      dvr[v0] = 0;
      std::queue<std::pair<int, bool>> fifo;
      fifo.push({v0, false});
      while (!fifo.empty() && dc[p] < 0) {
        auto [node, is_check] = fifo.front();
        fifo.pop();
        if (is_check) {
          for (int u : check_vars[node])
            if (dvr[u] < 0 && !(node == p && u == v0)) {
              dvr[u] = dc[node] + 1;
              fifo.push({u, false});
            }
        } else {
          for (int c : var_checks[node])
            if (dc[c] < 0 && !(c == p && node == v0)) {
              dc[c] = dvr[node] + 1;
              fifo.push({c, true});
            }
        }
      }
      if (dc[p] > 0) best = std::min(best, dc[p] + 1);
    }
  }
  return best == std::numeric_limits<int>::max() ? 0 : best;
}

}  // namespace

TannerGraph peg_construct(int L, int M, int dv, std::uint64_t /*seed*/) {
  if (L < 1 || M < 1 || M > L)
    throw std::invalid_argument("peg_construct requires 1 <= M <= L, got L = " +
                                std::to_string(L) + ", M = " + std::to_string(M));
  if (dv < 1 || dv > M)
    throw std::invalid_argument("variable degree dv = " + std::to_string(dv) +
                                " is infeasible; need 1 <= dv <= M = " +
                                std::to_string(M));
  TannerGraph g;
  g.L = L;
  g.M = M;
  g.check_vars.resize(M);
  std::vector<std::vector<int>> var_checks(L);

  for (int v = 0; v < L; ++v) {
    for (int t = 0; t < dv; ++t) {
      std::vector<int> dist = check_distances(v, g.check_vars, var_checks);
      int best = -1;
      for (int c = 0; c < M; ++c) {
        if (dist[c] == 1) continue;  // already adjacent
        if (best < 0) {
          best = c;
          continue;
        }
        // farthest first, then lowest degree, then lowest index
        if (dist[c] > dist[best] ||
            (dist[c] == dist[best] &&
             g.check_vars[c].size() < g.check_vars[best].size()))
          best = c;
      }
      g.check_vars[best].push_back(v);
      var_checks[v].push_back(best);
    }
  }
  g.girth = compute_girth(g.check_vars, var_checks);
  return g;
}

NbLdpcCode make_code(const TannerGraph& graph, const GfField& field,
                     const std::vector<std::vector<symbol_t>>& weights) {
  const int L = graph.L, M = graph.M;
  const std::uint32_t q = field.q();
  if (L < 1 || M < 1 || M > L)
    throw std::invalid_argument("code requires 1 <= M <= L");
  if (static_cast<int>(graph.check_vars.size()) != M ||
      static_cast<int>(weights.size()) != M)
    throw std::invalid_argument("graph/weight row count mismatch");

  NbLdpcCode code{field};
  code.L = L;
  code.M = M;
  code.checks.resize(M);
  code.var_checks.resize(L);
  code.var_edges.resize(L);
  code.check_offset.assign(M + 1, 0);

  std::vector<std::vector<char>> seen(M, std::vector<char>(L, 0));
  for (int p = 0; p < M; ++p) {
    const auto& vars = graph.check_vars[p];
    if (weights[p].size() != vars.size())
      throw std::invalid_argument("weight count mismatch at check " +
                                  std::to_string(p));
    for (std::size_t j = 0; j < vars.size(); ++j) {
      const int v = vars[j];
      const symbol_t w = weights[p][j];
      if (v < 0 || v >= L)
        throw std::invalid_argument("variable index " + std::to_string(v) +
                                    " out of range at check " + std::to_string(p));
      if (w == 0 || w >= q)
        throw std::invalid_argument("edge weight must be a nonzero field element");
      if (seen[p][v])
        throw std::invalid_argument("duplicate edge (" + std::to_string(p) + ", " +
                                    std::to_string(v) + ")");
      seen[p][v] = 1;
      const int e = static_cast<int>(code.edge_var.size());
      code.checks[p].push_back({v, w});
      code.var_checks[v].push_back(p);
      code.var_edges[v].push_back(e);
      code.edge_var.push_back(v);
      code.edge_weight.push_back(w);
    }
    code.check_offset[p + 1] = static_cast<int>(code.edge_var.size());
  }

  code.edge_perm.resize(code.edge_var.size());
  for (std::size_t e = 0; e < code.edge_var.size(); ++e) {
    auto& perm = code.edge_perm[e];
    perm.resize(q);
    for (std::uint32_t g = 0; g < q; ++g)
      perm[g] = static_cast<symbol_t>(
          field.phi(field.mul(code.edge_weight[e], static_cast<symbol_t>(g))));
  }

  code.girth = graph.girth != 0
                   ? graph.girth
                   : compute_girth(graph.check_vars, code.var_checks);

  // Systematic encoder: reduced row echelon form over GF(q), preferring the
  // rightmost columns as pivots so the leading L - M positions stay
  // information symbols whenever possible.
  std::vector<std::vector<symbol_t>> H(M, std::vector<symbol_t>(L, 0));
  for (int p = 0; p < M; ++p)
    for (const auto& e : code.checks[p]) H[p][e.var] = e.weight;

  std::vector<char> row_used(M, 0);
  std::vector<std::pair<int, int>> pivots;  // (col, row), built right to left
  for (int col = L - 1; col >= 0 && static_cast<int>(pivots.size()) < M; --col) {
    int r = -1;
    for (int i = 0; i < M; ++i)
      if (!row_used[i] && H[i][col] != 0) {
        r = i;
        break;
      }
    if (r < 0) continue;
    const symbol_t inv = field.inv(H[r][col]);
    for (int j = 0; j < L; ++j) H[r][j] = field.mul(H[r][j], inv);
    for (int i = 0; i < M; ++i) {
      if (i == r || H[i][col] == 0) continue;
      const symbol_t c = H[i][col];
      for (int j = 0; j < L; ++j)
        H[i][j] = field.add(H[i][j], field.mul(c, H[r][j]));
    }
    row_used[r] = 1;
    pivots.emplace_back(col, r);
  }
  if (static_cast<int>(pivots.size()) < M)
    throw std::runtime_error(
        "parity-check matrix is rank deficient over GF(q); reseed the edge "
        "weights or regenerate the graph");

  std::sort(pivots.begin(), pivots.end());
  std::vector<int> slot_of(L, -1);
  std::vector<char> is_parity(L, 0);
  for (const auto& [col, row] : pivots) is_parity[col] = 1;
  for (int j = 0; j < L; ++j)
    if (!is_parity[j]) {
      slot_of[j] = static_cast<int>(code.info_positions.size());
      code.info_positions.push_back(j);
    }
  code.encoder_rows.resize(M);
  for (int i = 0; i < M; ++i) {
    const auto& [col, row] = pivots[i];
    code.parity_positions.push_back(col);
    for (int j : code.info_positions)
      if (H[row][j] != 0) code.encoder_rows[i].emplace_back(slot_of[j], H[row][j]);
  }
  return code;
}

NbLdpcCode assign_weights(const TannerGraph& graph, const GfField& field,
                          std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<symbol_t>> weights(graph.check_vars.size());
  for (std::size_t p = 0; p < graph.check_vars.size(); ++p) {
    weights[p].resize(graph.check_vars[p].size());
    for (auto& w : weights[p])
      w = static_cast<symbol_t>(1 + rng.below(field.q() - 1));
  }
  return make_code(graph, field, weights);
}

std::vector<symbol_t> NbLdpcCode::encode(std::span<const symbol_t> info) const {
  if (static_cast<int>(info.size()) != L - M)
    throw std::invalid_argument("encode expects " + std::to_string(L - M) +
                                " information symbols, got " +
                                std::to_string(info.size()));
  for (symbol_t s : info)
    if (s >= field.q())
      throw std::invalid_argument("information symbol out of range");
  std::vector<symbol_t> cw(L, 0);
  for (std::size_t i = 0; i < info.size(); ++i) cw[info_positions[i]] = info[i];
  for (int i = 0; i < M; ++i) {
    symbol_t acc = 0;
    for (const auto& [slot, coeff] : encoder_rows[i])
      acc = field.add(acc, field.mul(coeff, info[slot]));
    cw[parity_positions[i]] = acc;
  }
  return cw;
}

std::vector<symbol_t> NbLdpcCode::syndrome(std::span<const symbol_t> cw) const {
  if (static_cast<int>(cw.size()) != L)
    throw std::invalid_argument("syndrome expects a length-" + std::to_string(L) +
                                " word");
  std::vector<symbol_t> syn(M, 0);
  for (int p = 0; p < M; ++p)
    for (const auto& e : checks[p])
      syn[p] = field.add(syn[p], field.mul(e.weight, cw[e.var]));
  return syn;
}

// ---- nbal text form -------------------------------------------------------

std::string to_nbal(const NbLdpcCode& code) {
  std::string out = std::to_string(code.field.q()) + " " + std::to_string(code.L) +
                    " " + std::to_string(code.M) + "\n";
  char buf[32];
  for (int p = 0; p < code.M; ++p) {
    bool first = true;
    for (const auto& e : code.checks[p]) {
      std::snprintf(buf, sizeof buf, "%s%d:%x", first ? "" : " ", e.var,
                    static_cast<unsigned>(e.weight));
      out += buf;
      first = false;
    }
    out += "\n";
  }
  return out;
}

NbLdpcCode parse_nbal(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("nbal: empty input");
  std::istringstream head(line);
  long q = 0, L = 0, M = 0;
  if (!(head >> q >> L >> M))
    throw std::runtime_error("nbal: malformed header, expected \"q L M\"");
  std::string extra;
  if (head >> extra) throw std::runtime_error("nbal: trailing tokens in header");
  if (q < 4 || (q & (q - 1)) != 0)
    throw std::runtime_error("nbal: q must be a power of two >= 4, got " +
                             std::to_string(q));
  int p = std::bit_width(static_cast<unsigned long>(q)) - 1;
  GfField field(p);

  TannerGraph graph;
  graph.L = static_cast<int>(L);
  graph.M = static_cast<int>(M);
  graph.check_vars.resize(M);
  std::vector<std::vector<symbol_t>> weights(M);
  for (long i = 0; i < M; ++i) {
    if (!std::getline(in, line))
      throw std::runtime_error("nbal: expected " + std::to_string(M) +
                               " check lines, got " + std::to_string(i));
    std::istringstream row(line);
    std::string tok;
    while (row >> tok) {
      const std::size_t colon = tok.find(':');
      if (colon == std::string::npos)
        throw std::runtime_error("nbal: bad edge token \"" + tok + "\"");
      std::size_t used = 0;
      int var = std::stoi(tok.substr(0, colon), &used);
      if (used != colon) throw std::runtime_error("nbal: bad variable in \"" + tok + "\"");
      unsigned long w = std::stoul(tok.substr(colon + 1), &used, 16);
      if (used != tok.size() - colon - 1)
        throw std::runtime_error("nbal: bad weight in \"" + tok + "\"");
      if (var < 0 || var >= graph.L)
        throw std::runtime_error("nbal: variable index out of range in \"" +
                                 tok + "\"");
      graph.check_vars[i].push_back(var);
      weights[i].push_back(static_cast<symbol_t>(w));
    }
  }
  while (std::getline(in, line))
    if (line.find_first_not_of(" \t\r") != std::string::npos)
      throw std::runtime_error("nbal: unexpected content after check lines");
  std::vector<std::vector<int>> var_checks(graph.L);
  for (int i = 0; i < graph.M; ++i)
    for (int v : graph.check_vars[i])
      if (v >= 0 && v < graph.L) var_checks[v].push_back(i);
  graph.girth = compute_girth(graph.check_vars, var_checks);
  return make_code(graph, field, weights);
}

void save_nbal(const NbLdpcCode& code, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << to_nbal(code);
  if (!f) throw std::runtime_error("write failed: " + path);
}

NbLdpcCode load_nbal(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_nbal(ss.str());
}

// ---- belief-vector kernels -------------------------------------------------

std::vector<double> fq_convolve(std::span<const double> u,
                                std::span<const double> v) {
  const std::size_t q = u.size();
  if (v.size() != q)
    throw std::invalid_argument("fq_convolve: length mismatch");
  if (q == 0 || (q & (q - 1)) != 0)
    throw std::invalid_argument("fq_convolve: length must be a power of two");
  std::vector<double> a(u.begin(), u.end());
  std::vector<double> b(v.begin(), v.end());
  fwht(a);
  fwht(b);
  const double inv = 1.0 / static_cast<double>(q);
  for (std::size_t g = 0; g < q; ++g) a[g] *= b[g] * inv;
  fwht(a);
  return a;
}

std::vector<double> rotate(std::span<const double> u, symbol_t w,
                           const GfField& field) {
  if (u.size() != field.q())
    throw std::invalid_argument("rotate: belief length must equal q");
  if (w == 0) throw std::invalid_argument("rotate: weight must be nonzero");
  std::vector<double> out(u.size());
  for (std::uint32_t g = 0; g < field.q(); ++g)
    out[field.phi(field.mul(w, static_cast<symbol_t>(g)))] = u[field.phi(static_cast<symbol_t>(g))];
  return out;
}

std::vector<double> check_to_var(const NbLdpcCode& code, int check, int target_var,
                                 const std::vector<std::vector<double>>& incoming) {
  const std::uint32_t q = code.field.q();
  if (check < 0 || check >= code.M)
    throw std::invalid_argument("check index out of range");
  const auto& nbrs = code.checks[check];
  if (incoming.size() != nbrs.size())
    throw std::invalid_argument("expected one incoming message per neighbor of the check");
  int target_slot = -1;
  for (std::size_t j = 0; j < nbrs.size(); ++j)
    if (nbrs[j].var == target_var) target_slot = static_cast<int>(j);
  if (target_slot < 0)
    throw std::invalid_argument("variable " + std::to_string(target_var) +
                                " is not a neighbor of check " + std::to_string(check));
  std::vector<double> acc(q, 0.0);
  acc[0] = 1.0;  // distribution of an empty sum
  for (std::size_t j = 0; j < nbrs.size(); ++j) {
    if (static_cast<int>(j) == target_slot) continue;
    if (incoming[j].size() != q)
      throw std::invalid_argument("missing or malformed message from variable " +
                                  std::to_string(nbrs[j].var));
    acc = fq_convolve(acc, rotate(incoming[j], nbrs[j].weight, code.field));
  }
  // acc is the distribution of the sum of the other weighted neighbors; the
  // constraint fixes w_t * v_t equal to that sum (char 2: minus is plus).
  std::vector<double> out(q);
  const auto& perm = code.edge_perm[code.check_offset[check] + target_slot];
  for (std::uint32_t a = 0; a < q; ++a) out[a] = acc[perm[a]];
  normalize_row(out.data(), static_cast<int>(q));
  return out;
}

std::vector<double> var_to_check(std::span<const double> alpha,
                                 const std::vector<std::vector<double>>& incoming) {
  std::vector<double> out(alpha.begin(), alpha.end());
  for (const auto& msg : incoming) {
    if (msg.size() != out.size())
      throw std::invalid_argument("var_to_check: message length mismatch");
    for (std::size_t g = 0; g < out.size(); ++g) out[g] *= msg[g];
  }
  normalize_row(out.data(), static_cast<int>(out.size()));
  return out;
}

void bp_estimate_flat(const NbLdpcCode& code, const double* alpha, int rounds,
                      double* out, BpScratch& ws) {
  if (rounds < 0) throw std::invalid_argument("bp rounds must be >= 0");
  const int q = static_cast<int>(code.field.q());
  const int L = code.L, M = code.M, E = code.num_edges();

  if (rounds == 0 || E == 0) {
    std::copy(alpha, alpha + static_cast<std::size_t>(L) * q, out);
    for (int v = 0; v < L; ++v) normalize_row(out + static_cast<std::size_t>(v) * q, q);
    return;
  }

  int maxdeg = 0;
  for (int p = 0; p < M; ++p)
    maxdeg = std::max(maxdeg, code.check_offset[p + 1] - code.check_offset[p]);

  ws.v2c.resize(static_cast<std::size_t>(E) * q);
  ws.c2v.resize(static_cast<std::size_t>(E) * q);
  ws.twht.resize(static_cast<std::size_t>(maxdeg) * q);
  ws.pre.resize(static_cast<std::size_t>(maxdeg + 1) * q);
  ws.suf.resize(static_cast<std::size_t>(maxdeg + 1) * q);
  ws.buf.resize(q);

  for (int e = 0; e < E; ++e)
    std::copy(alpha + static_cast<std::size_t>(code.edge_var[e]) * q,
              alpha + static_cast<std::size_t>(code.edge_var[e] + 1) * q,
              ws.v2c.begin() + static_cast<std::size_t>(e) * q);

  double* tmp = ws.buf.data();
  const double invq = 1.0 / static_cast<double>(q);

  for (int round = 0; round < rounds; ++round) {
    for (int p = 0; p < M; ++p) {
      const int off = code.check_offset[p];
      const int deg = code.check_offset[p + 1] - off;
      if (deg == 0) continue;
      for (int j = 0; j < deg; ++j) {
        const double* mu = ws.v2c.data() + static_cast<std::size_t>(off + j) * q;
        const symbol_t* perm = code.edge_perm[off + j].data();
        double* t = ws.twht.data() + static_cast<std::size_t>(j) * q;
        for (int g = 0; g < q; ++g) t[perm[g]] = mu[g];
        fwht(std::span<double>(t, q));
      }
      double* pre = ws.pre.data();
      double* suf = ws.suf.data();
      std::fill(pre, pre + q, 1.0);
      std::fill(suf + static_cast<std::size_t>(deg) * q,
                suf + static_cast<std::size_t>(deg + 1) * q, 1.0);
      for (int j = 0; j < deg; ++j) {
        const double* t = ws.twht.data() + static_cast<std::size_t>(j) * q;
        const double* a = pre + static_cast<std::size_t>(j) * q;
        double* b = pre + static_cast<std::size_t>(j + 1) * q;
#pragma omp simd
        for (int g = 0; g < q; ++g) b[g] = a[g] * t[g];
      }
      for (int j = deg - 1; j >= 0; --j) {
        const double* t = ws.twht.data() + static_cast<std::size_t>(j) * q;
        const double* a = suf + static_cast<std::size_t>(j + 1) * q;
        double* b = suf + static_cast<std::size_t>(j) * q;
#pragma omp simd
        for (int g = 0; g < q; ++g) b[g] = a[g] * t[g];
      }
      for (int j = 0; j < deg; ++j) {
        const double* a = pre + static_cast<std::size_t>(j) * q;
        const double* b = suf + static_cast<std::size_t>(j + 1) * q;
#pragma omp simd
        for (int g = 0; g < q; ++g) tmp[g] = a[g] * b[g];
        fwht(std::span<double>(tmp, q));
        double* dst = ws.c2v.data() + static_cast<std::size_t>(off + j) * q;
        const symbol_t* perm = code.edge_perm[off + j].data();
        for (int g = 0; g < q; ++g) dst[g] = tmp[perm[g]] * invq;
        normalize_row(dst, q);
      }
    }
    if (round + 1 == rounds) break;  // the last variable pass feeds nothing
    for (int v = 0; v < L; ++v) {
      const auto& ev = code.var_edges[v];
      for (std::size_t i = 0; i < ev.size(); ++i) {
        double* dst = ws.v2c.data() + static_cast<std::size_t>(ev[i]) * q;
        std::copy(alpha + static_cast<std::size_t>(v) * q,
                  alpha + static_cast<std::size_t>(v + 1) * q, dst);
        for (std::size_t k = 0; k < ev.size(); ++k) {
          if (k == i) continue;
          const double* m = ws.c2v.data() + static_cast<std::size_t>(ev[k]) * q;
#pragma omp simd
          for (int g = 0; g < q; ++g) dst[g] *= m[g];
        }
        normalize_row(dst, q);
      }
    }
  }

  for (int v = 0; v < L; ++v) {
    double* dst = out + static_cast<std::size_t>(v) * q;
    std::copy(alpha + static_cast<std::size_t>(v) * q,
              alpha + static_cast<std::size_t>(v + 1) * q, dst);
    for (int e : code.var_edges[v]) {
      const double* m = ws.c2v.data() + static_cast<std::size_t>(e) * q;
#pragma omp simd
      for (int g = 0; g < q; ++g) dst[g] *= m[g];
    }
    normalize_row(dst, q);
  }
}

std::vector<std::vector<double>> bp_estimate(
    const NbLdpcCode& code, const std::vector<std::vector<double>>& alpha,
    int rounds) {
  const int q = static_cast<int>(code.field.q());
  if (static_cast<int>(alpha.size()) != code.L)
    throw std::invalid_argument("bp_estimate: expected one prior per section");
  std::vector<double> flat(static_cast<std::size_t>(code.L) * q);
  for (int v = 0; v < code.L; ++v) {
    if (alpha[v].size() != static_cast<std::size_t>(q))
      throw std::invalid_argument("bp_estimate: prior length must equal q");
    std::copy(alpha[v].begin(), alpha[v].end(),
              flat.begin() + static_cast<std::size_t>(v) * q);
    normalize_row(flat.data() + static_cast<std::size_t>(v) * q, q);
  }
  std::vector<double> out_flat(flat.size());
  BpScratch ws;
  bp_estimate_flat(code, flat.data(), rounds, out_flat.data(), ws);
  std::vector<std::vector<double>> out(code.L, std::vector<double>(q));
  for (int v = 0; v < code.L; ++v)
    std::copy(out_flat.begin() + static_cast<std::size_t>(v) * q,
              out_flat.begin() + static_cast<std::size_t>(v + 1) * q,
              out[v].begin());
  return out;
}

}  // namespace srldpc
