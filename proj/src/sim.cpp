#include "srldpc/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "srldpc/sparc.hpp"

namespace srldpc {

namespace {

// Stream purposes for derive_seed(seed, trial, purpose, user).
constexpr std::uint64_t kStreamMessage = 1;
constexpr std::uint64_t kStreamOperator = 2;
constexpr std::uint64_t kStreamNoise = 3;
constexpr std::uint64_t kStreamFixedOperator = 4;  // used with trial = 0
constexpr std::uint64_t kStreamCodeWeights = 5;

constexpr long kTrialBatch = 64;

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

long parse_long(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long r = 0;
  try {
    r = std::stol(v, &used);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': cannot parse integer '" + v + "'");
  }
  if (used != v.size())
    throw ConfigError("config key '" + key + "': cannot parse integer '" + v + "'");
  return r;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  unsigned long long r = 0;
  try {
    r = std::stoull(v, &used);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': cannot parse integer '" + v + "'");
  }
  if (used != v.size())
    throw ConfigError("config key '" + key + "': cannot parse integer '" + v + "'");
  return r;
}

double parse_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double r = 0;
  try {
    r = std::stod(v, &used);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': cannot parse number '" + v + "'");
  }
  if (used != v.size())
    throw ConfigError("config key '" + key + "': cannot parse number '" + v + "'");
  return r;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("config key '" + key + "': expected true/false, got '" + v + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::string item;
  std::istringstream ss(v);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty())
      throw ConfigError("config key '" + key + "': empty list element");
    out.push_back(parse_double(key, item));
  }
  if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
  return out;
}

void set_field(SimConfig& c, const std::string& key, const std::string& v) {
  if (key == "k_users") c.k_users = static_cast<int>(parse_long(key, v));
  else if (key == "B") c.B = static_cast<int>(parse_long(key, v));
  else if (key == "p") c.p = static_cast<int>(parse_long(key, v));
  else if (key == "L") c.L = static_cast<int>(parse_long(key, v));
  else if (key == "M") c.M = static_cast<int>(parse_long(key, v));
  else if (key == "n") c.n = static_cast<int>(parse_long(key, v));
  else if (key == "dv") c.dv = static_cast<int>(parse_long(key, v));
  else if (key == "ebn0_grid_db") c.ebn0_grid_db = parse_list(key, v);
  else if (key == "sweep_mode") c.sweep_mode = v;
  else if (key == "rsum_grid") c.rsum_grid = parse_list(key, v);
  else if (key == "min_bit_errors") c.min_bit_errors = parse_long(key, v);
  else if (key == "max_trials") c.max_trials = parse_long(key, v);
  else if (key == "seed") c.seed = parse_u64(key, v);
  else if (key == "operator_kind") c.operator_kind = v;
  else if (key == "t_max") c.t_max = static_cast<int>(parse_long(key, v));
  else if (key == "bp_rounds") c.bp_rounds = static_cast<int>(parse_long(key, v));
  else if (key == "early_stop") c.early_stop = parse_bool(key, v);
  else if (key == "tau_floor") c.tau_floor = parse_double(key, v);
  else if (key == "damping") c.damping = parse_double(key, v);
  else if (key == "fixed_dictionary") c.fixed_dictionary = parse_bool(key, v);
  else if (key == "workers") c.workers = static_cast<int>(parse_long(key, v));
  else if (key == "record_timing") c.record_timing = parse_bool(key, v);
  else if (key == "code_file") c.code_file = v;
  else if (key == "out") c.out = v;
  else throw ConfigError("unknown config key '" + key + "'");
}

struct TrialStat {
  long bit_errors = 0;
  long symbol_errors = 0;
  long frame_errors = 0;
  long iters = 0;
};

TrialStat run_trial(const SimConfig& cfg, const NbLdpcCode& code,
                    const std::vector<double>& d, int n, double noise_scale,
                    std::uint64_t trial) {
  const GfField& field = code.field;
  const int K = cfg.k_users;
  const int L = code.L;
  const int q = static_cast<int>(field.q());
  const int qL = q * L;
  const bool gaussian = cfg.operator_kind == "gaussian";

  std::vector<std::vector<std::uint8_t>> info_bits(K);
  std::vector<std::vector<symbol_t>> sent(K);
  std::vector<SensingOperator> ops;
  ops.reserve(K);
  std::vector<double> y(n, 0.0), svec(qL), x(n), scratch;

  for (int k = 0; k < K; ++k) {
    Rng mrng(derive_seed(cfg.seed, trial, kStreamMessage, k));
    info_bits[k].resize(cfg.B);
    for (auto& b : info_bits[k]) b = static_cast<std::uint8_t>(mrng.next_u64() & 1);
    const std::vector<symbol_t> info = bits_to_symbols(info_bits[k], field);
    sent[k] = code.encode(info);
    symbols_to_indicator(sent[k], field, d, svec);

    const std::uint64_t oseed =
        cfg.fixed_dictionary ? derive_seed(cfg.seed, 0, kStreamFixedOperator, k)
                             : derive_seed(cfg.seed, trial, kStreamOperator, k);
    ops.push_back(gaussian ? gaussian_operator(n, qL, oseed)
                           : hadamard_operator(n, qL, oseed));
    ops.back().forward(svec, x, scratch);
    for (int i = 0; i < n; ++i) y[i] += x[i];
  }

  Rng nrng(derive_seed(cfg.seed, trial, kStreamNoise, 0));
  if (noise_scale != 0.0)
    for (int i = 0; i < n; ++i) y[i] += noise_scale * nrng.normal();

  DecoderParams dp;
  dp.t_max = cfg.t_max;
  dp.bp_rounds = cfg.bp_rounds;
  dp.early_stop = cfg.early_stop;
  dp.tau_floor = cfg.tau_floor;
  dp.damping = cfg.damping;
  dp.warn_girth = false;  // the sweep warns once up front

  std::vector<const SensingOperator*> opp(K);
  std::vector<const NbLdpcCode*> cpp(K);
  for (int k = 0; k < K; ++k) {
    opp[k] = &ops[k];
    cpp[k] = &code;
  }
  const DecodeResult res = decode(y, opp, cpp, d, dp);

  TrialStat st;
  st.iters = res.iterations;
  for (int k = 0; k < K; ++k) {
    const std::vector<symbol_t>& est = res.users[k].symbols;
    for (int l = 0; l < L; ++l)
      if (est[l] != sent[k][l]) ++st.symbol_errors;
    std::vector<symbol_t> est_info(code.info_positions.size());
    for (std::size_t i = 0; i < est_info.size(); ++i)
      est_info[i] = est[code.info_positions[i]];
    const std::vector<std::uint8_t> est_bits = symbols_to_bits(est_info, field);
    long be = 0;
    for (int b = 0; b < cfg.B; ++b)
      if (est_bits[b] != info_bits[k][b]) ++be;
    st.bit_errors += be;
    if (be > 0) ++st.frame_errors;
  }
  return st;
}

}  // namespace

SimConfig parse_config_text(const std::string& text) {
  SimConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key=value, got '" + line + "'");
    set_field(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

SimConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

void apply_override(SimConfig& cfg, const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos)
    throw ConfigError("override must be key=value, got '" + kv + "'");
  set_field(cfg, trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
}

void validate_config(const SimConfig& c) {
  if (c.k_users < 1) throw ConfigError("k_users must be >= 1");
  if (c.p < 2 || c.p > 12) throw ConfigError("p must be in [2, 12]");
  if (c.M < 1 || c.M >= c.L) throw ConfigError("need 1 <= M < L");
  if (c.dv < 1 || c.dv > c.M) throw ConfigError("need 1 <= dv <= M");
  if (c.B != c.p * (c.L - c.M))
    throw ConfigError("B = " + std::to_string(c.B) + " must equal p*(L-M) = " +
                      std::to_string(c.p * (c.L - c.M)));
  if (c.n < 1) throw ConfigError("n must be >= 1");
  if (c.sweep_mode == "ebn0") {
    if (c.ebn0_grid_db.empty()) throw ConfigError("ebn0_grid_db must be nonempty");
  } else if (c.sweep_mode == "rsum") {
    if (c.rsum_grid.empty()) throw ConfigError("rsum_grid must be nonempty");
    if (c.ebn0_grid_db.size() != 1)
      throw ConfigError("rsum mode needs exactly one ebn0_grid_db entry");
    for (double r : c.rsum_grid)
      if (!(r > 0.0)) throw ConfigError("rsum_grid entries must be positive");
  } else {
    throw ConfigError("sweep_mode must be 'ebn0' or 'rsum', got '" + c.sweep_mode + "'");
  }
  if (c.operator_kind != "hadamard" && c.operator_kind != "gaussian")
    throw ConfigError("operator_kind must be 'hadamard' or 'gaussian'");
  if (c.min_bit_errors < 0) throw ConfigError("min_bit_errors must be >= 0");
  if (c.max_trials < 1) throw ConfigError("max_trials must be >= 1");
  if (c.t_max < 1) throw ConfigError("t_max must be >= 1");
  if (c.bp_rounds < 0) throw ConfigError("bp_rounds must be >= 0");
  if (!(c.tau_floor > 0.0)) throw ConfigError("tau_floor must be positive");
  if (c.damping < 0.0 || c.damping >= 1.0)
    throw ConfigError("damping must be in [0, 1)");
  if (c.workers < 0) throw ConfigError("workers must be >= 0");
}

double ebn0_to_power(double ebn0_db, int info_bits, double sigma) {
  if (info_bits < 1) throw std::invalid_argument("info_bits must be >= 1");
  return 2.0 * sigma * sigma * info_bits * std::pow(10.0, ebn0_db / 10.0);
}

NbLdpcCode build_code(const SimConfig& cfg) {
  if (!cfg.code_file.empty()) {
    NbLdpcCode code = load_nbal(cfg.code_file);
    if (code.field.p() != cfg.p || code.L != cfg.L || code.M != cfg.M)
      throw ConfigError("code file " + cfg.code_file +
                        " does not match the configured (p, L, M)");
    return code;
  }
  const TannerGraph graph = peg_construct(cfg.L, cfg.M, cfg.dv, cfg.seed);
  return assign_weights(graph, GfField(cfg.p),
                        derive_seed(cfg.seed, 0, kStreamCodeWeights, 0));
}

double PointResult::ber_ci_lo() const {
  if (!bits_total) return 0.0;
  const double b = ber();
  const double h = 1.96 * std::sqrt(std::max(b * (1.0 - b), 0.0) / bits_total);
  return std::max(0.0, b - h);
}

double PointResult::ber_ci_hi() const {
  if (!bits_total) return 0.0;
  const double b = ber();
  const double h = 1.96 * std::sqrt(std::max(b * (1.0 - b), 0.0) / bits_total);
  return std::min(1.0, b + h);
}

PointResult run_point(const SimConfig& cfg, const NbLdpcCode& code,
                      double ebn0_db, int n, double noise_scale) {
  const double sigma = 1.0;
  const double power = ebn0_to_power(ebn0_db, cfg.B, sigma);
  const std::vector<double> d(code.L, amplitude(power, code.L));

#ifdef _OPENMP
  const int workers = cfg.workers > 0 ? cfg.workers : omp_get_max_threads();
#endif

  PointResult pr;
  pr.ebn0_db = ebn0_db;
  pr.n = n;
  pr.r_sum = static_cast<double>(cfg.k_users) * cfg.B / n;

  const auto t0 = std::chrono::steady_clock::now();
  long done = 0;
  std::vector<TrialStat> batch(kTrialBatch);
  while (done < cfg.max_trials && pr.bit_errors < cfg.min_bit_errors) {
    const long count = std::min(kTrialBatch, cfg.max_trials - done);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(workers)
#endif
    for (long b = 0; b < count; ++b)
      batch[b] = run_trial(cfg, code, d, n, noise_scale * sigma,
                           static_cast<std::uint64_t>(done + b));
    for (long b = 0; b < count; ++b) {  // ordered merge keeps results exact
      pr.bit_errors += batch[b].bit_errors;
      pr.symbol_errors += batch[b].symbol_errors;
      pr.frame_errors += batch[b].frame_errors;
      pr.amp_iters_avg += batch[b].iters;
    }
    done += count;
  }
  const auto t1 = std::chrono::steady_clock::now();

  pr.trials = done;
  pr.bits_total = done * cfg.k_users * cfg.B;
  pr.symbols_total = done * cfg.k_users * code.L;
  pr.frames_total = done * cfg.k_users;
  pr.amp_iters_avg = done ? pr.amp_iters_avg / done : 0.0;
  pr.wall_ms = cfg.record_timing
                   ? std::chrono::duration<double, std::milli>(t1 - t0).count()
                   : 0.0;
  return pr;
}

std::string csv_header() {
  return "ebn0_db,k_users,B,n,q,L,M,dv,r_sum,trials,bits_total,bit_errors,ber,"
         "ber_ci_lo,ber_ci_hi,ser,fer,avg_amp_iters,seed,wall_time_ms";
}

std::string csv_row(const SimConfig& cfg, const NbLdpcCode& code,
                    const PointResult& pr) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "%.6g,%d,%d,%d,%u,%d,%d,%d,%.6g,%ld,%ld,%ld,%.10g,%.10g,%.10g,"
                "%.10g,%.10g,%.6g,%llu,%.3f",
                pr.ebn0_db, cfg.k_users, cfg.B, pr.n, code.field.q(), code.L,
                code.M, cfg.dv, pr.r_sum, pr.trials, pr.bits_total,
                pr.bit_errors, pr.ber(), pr.ber_ci_lo(), pr.ber_ci_hi(),
                pr.ser(), pr.fer(), pr.amp_iters_avg,
                static_cast<unsigned long long>(cfg.seed), pr.wall_ms);
  return buf;
}

void run_sweep(const SimConfig& cfg, std::ostream& os) {
  validate_config(cfg);
  const NbLdpcCode code = build_code(cfg);
  if (code.girth > 0 && cfg.bp_rounds >= code.girth)
    std::fprintf(stderr,
                 "warning: bp_rounds = %d >= girth = %d; messages will "
                 "recirculate\n",
                 cfg.bp_rounds, code.girth);

  os << csv_header() << "\n";
  if (cfg.sweep_mode == "ebn0") {
    for (double db : cfg.ebn0_grid_db) {
      const PointResult pr = run_point(cfg, code, db, cfg.n);
      os << csv_row(cfg, code, pr) << "\n";
      os.flush();
    }
  } else {
    const double db = cfg.ebn0_grid_db[0];
    for (double r : cfg.rsum_grid) {
      const double need = static_cast<double>(cfg.k_users) * cfg.B / r;
      long nn = static_cast<long>(std::ceil(need - 1e-9));
      if (nn % 2 != 0) ++nn;
      const PointResult pr = run_point(cfg, code, db, static_cast<int>(nn));
      os << csv_row(cfg, code, pr) << "\n";
      os.flush();
    }
  }
}

}  // namespace srldpc
