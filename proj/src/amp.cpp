#include "srldpc/amp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "srldpc/sparc.hpp"

namespace srldpc {

double estimate_tau(std::span<const double> z, double tau_floor) {
  if (z.empty()) throw std::invalid_argument("estimate_tau: empty residual");
  double ss = 0.0;
  for (double x : z) ss += x * x;
  return std::max(std::sqrt(ss / static_cast<double>(z.size())), tau_floor);
}

void posterior_alpha(std::span<const double> r_section, double tau, double d,
                     std::span<double> alpha_out) {
  const std::size_t q = r_section.size();
  if (alpha_out.size() != q)
    throw std::invalid_argument("posterior_alpha: output size mismatch");
  if (!(tau > 0.0)) throw std::invalid_argument("posterior_alpha: tau must be positive");
  const double c = d / (tau * tau);
  double m = r_section[0];
  for (std::size_t g = 1; g < q; ++g) m = std::max(m, r_section[g]);
  double sum = 0.0;
  for (std::size_t g = 0; g < q; ++g) {
    const double e = std::exp(c * (r_section[g] - m));
    alpha_out[g] = e;
    sum += e;
  }
  const double inv = 1.0 / sum;
  for (std::size_t g = 0; g < q; ++g) alpha_out[g] *= inv;
}

double denoise_user(std::span<const double> r, const NbLdpcCode& code, double tau,
                    std::span<const double> d, int bp_rounds,
                    std::span<double> s_next, BpScratch& ws) {
  const int q = static_cast<int>(code.field.q());
  const int L = code.L;
  const std::size_t total = static_cast<std::size_t>(L) * q;
  if (r.size() != total || s_next.size() != total ||
      d.size() != static_cast<std::size_t>(L))
    throw std::invalid_argument("denoise_user: size mismatch");

  ws.alpha.resize(total);
  ws.belief.resize(total);
  for (int l = 0; l < L; ++l)
    posterior_alpha(r.subspan(static_cast<std::size_t>(l) * q, q), tau, d[l],
                    std::span<double>(ws.alpha.data() + static_cast<std::size_t>(l) * q, q));

  bp_estimate_flat(code, ws.alpha.data(), bp_rounds, ws.belief.data(), ws);

  double div = 0.0;
  for (int l = 0; l < L; ++l) {
    const double* b = ws.belief.data() + static_cast<std::size_t>(l) * q;
    double* s = s_next.data() + static_cast<std::size_t>(l) * q;
    double nn = 0.0;
#pragma omp simd reduction(+ : nn)
    for (int g = 0; g < q; ++g) {
      s[g] = d[l] * b[g];
      nn += b[g] * b[g];
    }
    div += d[l] * d[l] * (1.0 - nn);
  }
  return div / (tau * tau);
}

void user_contribution(const SensingOperator& op, std::span<const double> s,
                       std::span<const double> z_prev, double div_prev,
                       std::span<double> out, std::vector<double>& scratch) {
  if (static_cast<int>(out.size()) != op.rows() ||
      z_prev.size() != out.size())
    throw std::invalid_argument("user_contribution: size mismatch");
  op.forward(s, out, scratch);
  const double c = div_prev / static_cast<double>(op.rows());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= c * z_prev[i];
}

// ---- JointDecoder ----------------------------------------------------------

JointDecoder::JointDecoder(std::vector<const SensingOperator*> ops,
                           std::vector<const NbLdpcCode*> codes,
                           std::vector<double> d, DecoderParams params)
    : ops_(std::move(ops)), codes_(std::move(codes)), d_(std::move(d)),
      params_(params) {
  if (ops_.empty() || ops_.size() != codes_.size())
    throw std::invalid_argument("need one operator and one code per user");
  K_ = static_cast<int>(ops_.size());
  n_ = ops_[0]->rows();
  const int L = codes_[0]->L;
  const int q = static_cast<int>(codes_[0]->field.q());
  qL_ = L * q;
  if (static_cast<int>(d_.size()) != L)
    throw std::invalid_argument("need one amplitude per section");
  for (int k = 0; k < K_; ++k) {
    if (ops_[k]->rows() != n_ || ops_[k]->cols() != qL_ ||
        codes_[k]->L != L || codes_[k]->field.q() != static_cast<std::uint32_t>(q))
      throw std::invalid_argument("user " + std::to_string(k) +
                                  " has mismatched dimensions");
  }
  z_.resize(n_);
  s_.assign(static_cast<std::size_t>(K_) * qL_, 0.0);
  r_.assign(static_cast<std::size_t>(K_) * qL_, 0.0);
  yhat_.assign(static_cast<std::size_t>(K_) * n_, 0.0);
  div_.assign(K_, 0.0);
  work_.resize(K_);

  if (params_.warn_girth) {
    for (int k = 0; k < K_; ++k) {
      const int girth = codes_[k]->girth;
      if (girth > 0 && params_.bp_rounds >= girth) {
        std::fprintf(stderr,
                     "warning: bp_rounds = %d >= girth = %d for user %d; "
                     "messages will recirculate\n",
                     params_.bp_rounds, girth, k);
        break;
      }
    }
  }
}

void JointDecoder::reset(std::span<const double> y) {
  if (static_cast<int>(y.size()) != n_)
    throw std::invalid_argument("observation length must be n");
  y_.assign(y.begin(), y.end());
  z_ = y_;
  std::fill(s_.begin(), s_.end(), 0.0);
  std::fill(r_.begin(), r_.end(), 0.0);
  std::fill(div_.begin(), div_.end(), 0.0);
  tau_ = estimate_tau(z_, params_.tau_floor);
  iter_ = 0;
}

void JointDecoder::step() {
  if (y_.empty()) throw std::logic_error("step() before reset()");
  const bool damped = params_.damping > 0.0;
  if (damped && s_prev_.empty()) s_prev_.resize(s_.size());
  if (damped) s_prev_ = s_;

#pragma omp parallel for schedule(static)
  for (int k = 0; k < K_; ++k) {
    user_contribution(*ops_[k],
                      std::span<const double>(s_.data() + static_cast<std::size_t>(k) * qL_, qL_),
                      z_, div_[k],
                      std::span<double>(yhat_.data() + static_cast<std::size_t>(k) * n_, n_),
                      work_[k].op);
  }

  // Residual and tau are accumulated serially in user order so results do not
  // depend on the OpenMP schedule.
  for (int i = 0; i < n_; ++i) z_[i] = y_[i];
  for (int k = 0; k < K_; ++k) {
    const double* yk = yhat_.data() + static_cast<std::size_t>(k) * n_;
    for (int i = 0; i < n_; ++i) z_[i] -= yk[i];
  }
  tau_ = estimate_tau(z_, params_.tau_floor);

#pragma omp parallel for schedule(static)
  for (int k = 0; k < K_; ++k) {
    double* rk = r_.data() + static_cast<std::size_t>(k) * qL_;
    double* sk = s_.data() + static_cast<std::size_t>(k) * qL_;
    ops_[k]->adjoint(z_, std::span<double>(rk, qL_), work_[k].op);
    for (int j = 0; j < qL_; ++j) rk[j] += sk[j];
    div_[k] = denoise_user(std::span<const double>(rk, qL_), *codes_[k], tau_, d_,
                           params_.bp_rounds, std::span<double>(sk, qL_),
                           work_[k].bp);
  }

  if (damped) {
    const double g = params_.damping;
    for (std::size_t j = 0; j < s_.size(); ++j)
      s_[j] = (1.0 - g) * s_[j] + g * s_prev_[j];
    for (int k = 0; k < K_; ++k) div_[k] *= (1.0 - g);
  }
  ++iter_;
}

std::span<const double> JointDecoder::effective_observation(int k) const {
  return {r_.data() + static_cast<std::size_t>(k) * qL_, static_cast<std::size_t>(qL_)};
}

std::span<const double> JointDecoder::state(int k) const {
  return {s_.data() + static_cast<std::size_t>(k) * qL_, static_cast<std::size_t>(qL_)};
}

std::vector<symbol_t> JointDecoder::hard_symbols(int k) const {
  return hard_decision(state(k), codes_[k]->field);
}

bool JointDecoder::all_checks_ok() const {
  for (int k = 0; k < K_; ++k) {
    const std::vector<symbol_t> w = hard_symbols(k);
    const std::vector<symbol_t> syn = codes_[k]->syndrome(w);
    for (symbol_t s : syn)
      if (s != 0) return false;
  }
  return true;
}

DecodeResult JointDecoder::run(std::span<const double> y,
                               const std::vector<std::vector<symbol_t>>* truth,
                               DecodeTrace* trace) {
  reset(y);
  DecodeResult res;
  res.converged = false;
  for (int t = 0; t < params_.t_max; ++t) {
    step();
    if (trace) {
      trace->tau.push_back(tau_);
      if (truth) {
        std::vector<int> errs(K_, 0);
        for (int k = 0; k < K_; ++k) {
          const std::vector<symbol_t> w = hard_symbols(k);
          for (std::size_t l = 0; l < w.size(); ++l)
            if (w[l] != (*truth)[k][l]) ++errs[k];
        }
        trace->section_errors.push_back(std::move(errs));
      }
    }
    if (params_.early_stop && all_checks_ok()) {
      res.converged = true;
      break;
    }
  }
  res.iterations = iter_;
  if (!params_.early_stop) res.converged = all_checks_ok();
  res.users.resize(K_);
  for (int k = 0; k < K_; ++k) {
    res.users[k].symbols = hard_symbols(k);
    const std::vector<symbol_t> syn = codes_[k]->syndrome(res.users[k].symbols);
    res.users[k].checks_ok =
        std::all_of(syn.begin(), syn.end(), [](symbol_t s) { return s == 0; });
  }
  return res;
}

// ---- StackedReferenceDecoder ------------------------------------------------

StackedReferenceDecoder::StackedReferenceDecoder(
    std::vector<const SensingOperator*> ops,
    std::vector<const NbLdpcCode*> codes, std::vector<double> d,
    DecoderParams params)
    : codes_(std::move(codes)), d_(std::move(d)), params_(params) {
  if (ops.empty() || ops.size() != codes_.size())
    throw std::invalid_argument("need one operator and one code per user");
  K_ = static_cast<int>(ops.size());
  n_ = ops[0]->rows();
  qL_ = ops[0]->cols();
  cols_ = K_ * qL_;
  if (static_cast<long long>(n_) * cols_ > 200'000'000LL)
    throw std::invalid_argument("stacked reference is dense; use toy dimensions");

  // Densify the stacked map column by column through the fast operators.
  phi_.assign(static_cast<std::size_t>(n_) * cols_, 0.0);
  std::vector<double> e(qL_, 0.0), col(n_), scratch;
  for (int k = 0; k < K_; ++k) {
    for (int j = 0; j < qL_; ++j) {
      e[j] = 1.0;
      ops[k]->forward(e, col, scratch);
      e[j] = 0.0;
      for (int i = 0; i < n_; ++i)
        phi_[static_cast<std::size_t>(i) * cols_ + static_cast<std::size_t>(k) * qL_ + j] = col[i];
    }
  }
  z_.resize(n_);
  s_.assign(cols_, 0.0);
  r_.assign(cols_, 0.0);
}

void StackedReferenceDecoder::reset(std::span<const double> y) {
  if (static_cast<int>(y.size()) != n_)
    throw std::invalid_argument("observation length must be n");
  y_.assign(y.begin(), y.end());
  z_ = y_;
  std::fill(s_.begin(), s_.end(), 0.0);
  std::fill(r_.begin(), r_.end(), 0.0);
  div_ = 0.0;
  tau_ = estimate_tau(z_, params_.tau_floor);
  iter_ = 0;
}

void StackedReferenceDecoder::step() {
  if (y_.empty()) throw std::logic_error("step() before reset()");
  // z = y - Phi s + (div / n) z_prev, all in one serial pass
  std::vector<double> z_next(n_);
  const double c = div_ / static_cast<double>(n_);
  for (int i = 0; i < n_; ++i) {
    const double* row = phi_.data() + static_cast<std::size_t>(i) * cols_;
    double acc = 0.0;
    for (int j = 0; j < cols_; ++j) acc += row[j] * s_[j];
    z_next[i] = y_[i] - acc + c * z_[i];
  }
  z_ = std::move(z_next);
  tau_ = estimate_tau(z_, params_.tau_floor);

  // r = Phi^T z + s
  for (int j = 0; j < cols_; ++j) r_[j] = s_[j];
  for (int i = 0; i < n_; ++i) {
    const double* row = phi_.data() + static_cast<std::size_t>(i) * cols_;
    const double zi = z_[i];
    for (int j = 0; j < cols_; ++j) r_[j] += zi * row[j];
  }

  // Blockwise denoiser; the stacked divergence is the sum over users.
  div_ = 0.0;
  for (int k = 0; k < K_; ++k) {
    div_ += denoise_user(
        std::span<const double>(r_.data() + static_cast<std::size_t>(k) * qL_, qL_),
        *codes_[k], tau_, d_, params_.bp_rounds,
        std::span<double>(s_.data() + static_cast<std::size_t>(k) * qL_, qL_), ws_);
  }
  ++iter_;
}

DecodeResult decode(std::span<const double> y,
                    const std::vector<const SensingOperator*>& ops,
                    const std::vector<const NbLdpcCode*>& codes,
                    std::vector<double> d, const DecoderParams& params,
                    const std::vector<std::vector<symbol_t>>* truth,
                    DecodeTrace* trace) {
  JointDecoder dec(ops, codes, std::move(d), params);
  return dec.run(y, truth, trace);
}

}  // namespace srldpc
