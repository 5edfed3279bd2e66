#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "srldpc/gf.hpp"

namespace srldpc {

// Bipartite check/variable graph.  check_vars keeps per-check neighbor lists
// in insertion order.
struct TannerGraph {
  int L = 0;  // variables (code symbols)
  int M = 0;  // checks
  std::vector<std::vector<int>> check_vars;
  int girth = 0;  // length of the shortest cycle; 0 when the graph is a forest
};

// Progressive edge growth with regular variable degree dv.  Each new edge
// attaches to a check at maximal graph distance from the variable; ties break
// to the lowest current check degree, then the lowest check index, so the
// construction is fully deterministic.  `seed` is accepted for interface
// stability but does not influence the graph.
TannerGraph peg_construct(int L, int M, int dv, std::uint64_t seed);

// Weighted code over GF(q): every edge carries a nonzero field weight, and a
// codeword v satisfies sum_l w(p,l) v_l = 0 for every check p.
struct NbLdpcCode {
  GfField field;
  int L = 0, M = 0;
  int girth = 0;

  struct Edge {
    int var;
    symbol_t weight;
  };
  std::vector<std::vector<Edge>> checks;      // per check, graph order
  std::vector<std::vector<int>> var_checks;   // per variable: incident checks

  std::vector<int> info_positions;    // ascending, size L - M
  std::vector<int> parity_positions;  // ascending, size M
  // parity value at parity_positions[i] = sum of coeff * info[slot] over
  // encoder_rows[i], slots indexing into info_positions.
  std::vector<std::vector<std::pair<int, symbol_t>>> encoder_rows;

  // Flattened edge views used by the message-passing kernels.
  std::vector<int> check_offset;        // size M+1, CSR over edges
  std::vector<int> edge_var;            // per edge
  std::vector<symbol_t> edge_weight;    // per edge
  std::vector<std::vector<int>> var_edges;  // per variable: incident edge ids
  // Per-edge permutation tables: edge_perm[e][g] = phi(weight_e * g).
  std::vector<std::vector<symbol_t>> edge_perm;

  int num_edges() const { return static_cast<int>(edge_var.size()); }
  double rate() const { return static_cast<double>(L - M) / L; }

  std::vector<symbol_t> encode(std::span<const symbol_t> info) const;
  std::vector<symbol_t> syndrome(std::span<const symbol_t> cw) const;
};

// Assembles a code from a graph and explicit per-edge weights (aligned with
// graph.check_vars).  Throws when the weighted parity-check matrix is rank
// deficient over GF(q).
NbLdpcCode make_code(const TannerGraph& graph, const GfField& field,
                     const std::vector<std::vector<symbol_t>>& weights);

// Draws every edge weight uniformly from the nonzero field elements.
NbLdpcCode assign_weights(const TannerGraph& graph, const GfField& field,
                          std::uint64_t seed);

// Text form: first line "q L M", then one line per check listing
// "var:weight" pairs with lowercase hex weights.  Loading uses the default
// modulus for the stated q; save(load(x)) is byte-identical for files in
// this canonical form.
std::string to_nbal(const NbLdpcCode& code);
NbLdpcCode parse_nbal(const std::string& text);
void save_nbal(const NbLdpcCode& code, const std::string& path);
NbLdpcCode load_nbal(const std::string& path);

// ---- belief-vector kernels ----------------------------------------------
// Beliefs are length-q vectors of nonnegative reals indexed by phi(symbol).

// Distribution of the sum of two independent field elements:
// out[g] = sum_h u[h] * v[g ^ h], computed via the Walsh-Hadamard transform.
std::vector<double> fq_convolve(std::span<const double> u,
                                std::span<const double> v);

// Distribution of w * X when X ~ u: out[phi(w g)] = u[phi(g)].  w must be
// nonzero.
std::vector<double> rotate(std::span<const double> u, symbol_t w,
                           const GfField& field);

// Check-to-variable message for one check and one target neighbor.  incoming
// is aligned with code.checks[check]; the entry at the target's slot is
// ignored.  Output is normalized.
std::vector<double> check_to_var(const NbLdpcCode& code, int check, int target_var,
                                 const std::vector<std::vector<double>>& incoming);

// Variable-to-check message: prior alpha times the product of incoming
// check messages (the target check's message excluded by the caller).
std::vector<double> var_to_check(std::span<const double> alpha,
                                 const std::vector<std::vector<double>>& incoming);

// Scratch shared by repeated bp_estimate_flat / denoiser calls from one
// thread.
struct BpScratch {
  std::vector<double> v2c, c2v;      // per-edge messages, q each
  std::vector<double> twht;          // per-check transformed inputs
  std::vector<double> pre, suf;      // transform-domain prefix/suffix products
  std::vector<double> buf;           // one length-q temporary
  std::vector<double> alpha, belief; // L*q buffers for the denoiser
};

// `rounds` sweeps of flooding belief propagation from fresh per-section
// priors alpha (flat L*q, rows normalized); writes normalized per-section
// posteriors to out (flat L*q).  rounds = 0 copies the priors.
void bp_estimate_flat(const NbLdpcCode& code, const double* alpha, int rounds,
                      double* out, BpScratch& ws);

// Convenience wrapper over bp_estimate_flat.
std::vector<std::vector<double>> bp_estimate(
    const NbLdpcCode& code, const std::vector<std::vector<double>>& alpha,
    int rounds);

}  // namespace srldpc
