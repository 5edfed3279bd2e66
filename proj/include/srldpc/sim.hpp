#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "srldpc/amp.hpp"
#include "srldpc/nbldpc.hpp"
#include "srldpc/rng.hpp"

namespace srldpc {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat key=value configuration; keys match the field names below.  '#'
// starts a comment.  Unknown keys are rejected.
struct SimConfig {
  int k_users = 2;
  int B = 584;        // information bits per user
  int p = 8;          // bits per code symbol (q = 2^p)
  int L = 76;         // code symbols per user
  int M = 3;          // parity checks per user
  int n = 1460;       // channel uses (ebn0 sweep mode)
  int dv = 2;         // variable degree of the generated code
  std::vector<double> ebn0_grid_db{2.0, 2.25, 2.5, 2.75, 3.0};
  std::string sweep_mode = "ebn0";  // "ebn0" (grid at fixed n) or "rsum"
  std::vector<double> rsum_grid;    // rsum mode: grid of sum rates at fixed Eb/N0
  long min_bit_errors = 200;
  long max_trials = 10000;
  std::uint64_t seed = 1;
  std::string operator_kind = "hadamard";  // or "gaussian"
  int t_max = 16;
  int bp_rounds = 1;
  bool early_stop = true;
  double tau_floor = 1e-6;
  double damping = 0.0;
  bool fixed_dictionary = false;  // freeze sensing operators across trials
  int workers = 0;                // 0 = library default thread count
  bool record_timing = true;      // false writes wall_time_ms as 0
  std::string code_file;          // optional nbal path; empty generates a code
  std::string out;                // CSV path; empty = stdout
};

SimConfig parse_config_text(const std::string& text);
SimConfig load_config(const std::string& path);
// Applies one "key=value" override on top of a parsed config.
void apply_override(SimConfig& cfg, const std::string& kv);
void validate_config(const SimConfig& cfg);

// Total transmit energy per user block for a target Eb/N0 (dB) at noise
// standard deviation sigma, with N0 = 2 sigma^2:
//   P = 2 sigma^2 * B * 10^(ebn0_db / 10).
double ebn0_to_power(double ebn0_db, int info_bits, double sigma);

// Loads cfg.code_file or generates the (L, M, dv) code from cfg.seed.
NbLdpcCode build_code(const SimConfig& cfg);

struct PointResult {
  double ebn0_db = 0.0;
  int n = 0;
  double r_sum = 0.0;
  long trials = 0;
  long bits_total = 0;
  long bit_errors = 0;
  long symbols_total = 0;
  long symbol_errors = 0;
  long frames_total = 0;  // one frame per (trial, user)
  long frame_errors = 0;
  double amp_iters_avg = 0.0;
  double wall_ms = 0.0;

  double ber() const {
    return bits_total ? static_cast<double>(bit_errors) / bits_total : 0.0;
  }
  double ser() const {
    return symbols_total ? static_cast<double>(symbol_errors) / symbols_total : 0.0;
  }
  double fer() const {
    return frames_total ? static_cast<double>(frame_errors) / frames_total : 0.0;
  }
  // 95% normal-approximation interval for the BER, clipped to [0, 1].
  double ber_ci_lo() const;
  double ber_ci_hi() const;
};

// Monte Carlo at one operating point: trials run in fixed-size batches until
// min_bit_errors or max_trials is reached.  Which trials execute, and every
// recorded statistic, depend only on the config and seed, not on the worker
// count.  noise_scale scales the channel noise draw (test hook; 0 gives a
// noiseless channel at the same transmit power).
PointResult run_point(const SimConfig& cfg, const NbLdpcCode& code,
                      double ebn0_db, int n, double noise_scale = 1.0);

std::string csv_header();
std::string csv_row(const SimConfig& cfg, const NbLdpcCode& code,
                    const PointResult& pr);

// Full sweep per cfg.sweep_mode; writes the CSV to `os`.
void run_sweep(const SimConfig& cfg, std::ostream& os);

}  // namespace srldpc
