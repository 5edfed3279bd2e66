#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "srldpc/nbldpc.hpp"
#include "srldpc/sensing.hpp"

namespace srldpc {

struct DecoderParams {
  int t_max = 16;          // AMP iteration budget
  int bp_rounds = 1;       // message-passing sweeps inside each denoiser call
  bool early_stop = true;  // stop once every user's word satisfies its checks
  double tau_floor = 1e-6;
  double damping = 0.0;    // 0 disables state damping
  bool warn_girth = true;  // stderr warning when bp_rounds >= code girth
};

// Scalar noise-level estimate from the current residual: RMS entry magnitude,
// floored away from zero.
double estimate_tau(std::span<const double> z, double tau_floor);

// Per-section posterior over the q section positions given the effective
// observation r_section ~ d * e_position + tau * noise:
//   alpha[g] proportional to exp(d * r_section[g] / tau^2),
// computed with max subtraction and normalized.
void posterior_alpha(std::span<const double> r_section, double tau, double d,
                     std::span<double> alpha_out);

// One denoiser application for one user: sectionwise posteriors from r, then
// bp_rounds sweeps on the user's code, then the scaled posterior mean.
// Writes s_next (length L*q) and returns the denoiser divergence
//   (1/tau^2) * sum_l d_l^2 * (1 - ||belief_l||^2),
// the trace of the Jacobian d s_next / d r in expectation form.
double denoise_user(std::span<const double> r, const NbLdpcCode& code, double tau,
                    std::span<const double> d, int bp_rounds,
                    std::span<double> s_next, BpScratch& ws);

// One user's contribution to the residual: A s minus the Onsager reaction
// (div_prev / n) * z_prev.
void user_contribution(const SensingOperator& op, std::span<const double> s,
                       std::span<const double> z_prev, double div_prev,
                       std::span<double> out, std::vector<double>& scratch);

struct UserDecision {
  std::vector<symbol_t> symbols;  // hard codeword estimate, length L
  bool checks_ok = false;
};

struct DecodeResult {
  std::vector<UserDecision> users;
  int iterations = 0;
  bool converged = false;  // every user's hard decision satisfied its checks
};

// Optional per-iteration record for diagnostics.
struct DecodeTrace {
  std::vector<double> tau;
  // section_errors[t][k]: hard-decision section mismatches vs the truth
  std::vector<std::vector<int>> section_errors;
};

// Joint AMP decoder over K users sharing one channel observation.  Users keep
// separate operators, states and denoisers; they couple only through the
// shared residual.  The per-user work inside one iteration is independent and
// runs under OpenMP; results do not depend on the thread count.
class JointDecoder {
 public:
  JointDecoder(std::vector<const SensingOperator*> ops,
               std::vector<const NbLdpcCode*> codes,
               std::vector<double> d, DecoderParams params);

  void reset(std::span<const double> y);
  void step();

  int iteration() const { return iter_; }
  double tau() const { return tau_; }
  std::span<const double> residual() const { return z_; }
  std::span<const double> effective_observation(int k) const;
  std::span<const double> state(int k) const;
  double divergence(int k) const { return div_[k]; }
  std::vector<symbol_t> hard_symbols(int k) const;
  bool all_checks_ok() const;

  DecodeResult run(std::span<const double> y,
                   const std::vector<std::vector<symbol_t>>* truth = nullptr,
                   DecodeTrace* trace = nullptr);

  int users() const { return K_; }
  int section_space() const { return qL_; }

 private:
  std::vector<const SensingOperator*> ops_;
  std::vector<const NbLdpcCode*> codes_;
  std::vector<double> d_;
  DecoderParams params_;
  int K_ = 0, n_ = 0, qL_ = 0;
  int iter_ = 0;
  double tau_ = 0.0;
  std::vector<double> y_, z_;
  std::vector<double> s_, r_, yhat_;  // K * qL / K * qL / K * n, row per user
  std::vector<double> div_;
  std::vector<double> s_prev_;        // allocated only when damping > 0
  struct Work {
    BpScratch bp;
    std::vector<double> op;
  };
  std::vector<Work> work_;
};

// Reference decoder operating on the stacked system: the K sensing maps are
// densified into one n x (K L q) matrix and the update runs serially on the
// concatenated state.  Kept as a test oracle for JointDecoder; cost grows
// with the dense matrix, so use toy dimensions.
class StackedReferenceDecoder {
 public:
  StackedReferenceDecoder(std::vector<const SensingOperator*> ops,
                          std::vector<const NbLdpcCode*> codes,
                          std::vector<double> d, DecoderParams params);

  void reset(std::span<const double> y);
  void step();

  int iteration() const { return iter_; }
  double tau() const { return tau_; }
  std::span<const double> residual() const { return z_; }
  std::span<const double> state() const { return s_; }                // K*qL
  std::span<const double> effective_observation() const { return r_; }  // K*qL

 private:
  std::vector<const NbLdpcCode*> codes_;
  std::vector<double> d_;
  DecoderParams params_;
  int K_ = 0, n_ = 0, qL_ = 0, cols_ = 0;
  int iter_ = 0;
  double tau_ = 0.0, div_ = 0.0;
  std::vector<double> phi_;  // n x cols, row-major
  std::vector<double> y_, z_, s_, r_;
  BpScratch ws_;
};

// Convenience wrapper: reset + run on a freshly constructed JointDecoder.
DecodeResult decode(std::span<const double> y,
                    const std::vector<const SensingOperator*>& ops,
                    const std::vector<const NbLdpcCode*>& codes,
                    std::vector<double> d, const DecoderParams& params,
                    const std::vector<std::vector<symbol_t>>* truth = nullptr,
                    DecodeTrace* trace = nullptr);

}  // namespace srldpc
