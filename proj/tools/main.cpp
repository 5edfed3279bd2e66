#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "selftest.hpp"
#include "srldpc/nbldpc.hpp"
#include "srldpc/rng.hpp"
#include "srldpc/sim.hpp"

namespace {

int cmd_simulate(const std::string& config_path,
                 const std::vector<std::string>& overrides, int workers,
                 bool fixed_dictionary, const std::string& out_path) {
  srldpc::SimConfig cfg = srldpc::load_config(config_path);
  for (const std::string& kv : overrides) srldpc::apply_override(cfg, kv);
  if (workers >= 0) cfg.workers = workers;
  if (fixed_dictionary) cfg.fixed_dictionary = true;
  if (!out_path.empty()) cfg.out = out_path;
  srldpc::validate_config(cfg);

  if (cfg.out.empty()) {
    srldpc::run_sweep(cfg, std::cout);
    return 0;
  }
  std::ofstream f(cfg.out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file " + cfg.out);
  srldpc::run_sweep(cfg, f);
  f.flush();
  if (!f) throw std::runtime_error("write failed: " + cfg.out);
  return 0;
}

int cmd_make_code(int L, int M, int dv, int q, std::uint64_t seed,
                  const std::string& out) {
  if (q < 4 || (q & (q - 1)) != 0)
    throw srldpc::ConfigError("q must be a power of two >= 4");
  int p = 0;
  while ((1 << p) < q) ++p;
  const srldpc::TannerGraph graph = srldpc::peg_construct(L, M, dv, seed);
  const srldpc::NbLdpcCode code = srldpc::assign_weights(
      graph, srldpc::GfField(p), srldpc::derive_seed(seed, 0, 5, 0));
  srldpc::save_nbal(code, out);
  std::fprintf(stderr, "wrote %s: q=%d L=%d M=%d dv=%d girth=%d rate=%.4f\n",
               out.c_str(), q, L, M, dv, code.girth, code.rate());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-user sparse-regression LDPC channel simulator"};
  app.require_subcommand(1);

  auto* sim = app.add_subcommand("simulate", "run a Monte Carlo sweep, write a CSV");
  std::string config_path, out_path;
  std::vector<std::string> overrides;
  int workers = -1;
  bool fixed_dictionary = false;
  sim->add_option("--config", config_path, "config file with key=value lines")
      ->required();
  sim->add_option("--override", overrides,
                  "key=value applied after the config file (repeatable)");
  sim->add_option("--workers", workers, "threads for concurrent trials");
  sim->add_flag("--fixed-dictionary", fixed_dictionary,
                "freeze the sensing operators across trials");
  sim->add_option("--out", out_path, "output CSV path (overrides the config)");

  auto* mk = app.add_subcommand("make-code", "generate a weighted LDPC code file");
  int L = 76, M = 3, dv = 2, q = 256;
  std::uint64_t seed = 1;
  std::string code_out;
  mk->add_option("--L", L, "code length in symbols")->required();
  mk->add_option("--M", M, "number of checks")->required();
  mk->add_option("--dv", dv, "variable degree")->required();
  mk->add_option("--q", q, "field size (power of two)")->required();
  mk->add_option("--seed", seed, "weight seed");
  mk->add_option("--out", code_out, "output path")->required();

  auto* st = app.add_subcommand("selftest", "run built-in diagnostics");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;  // bad flags and missing options are configuration errors
  }

  try {
    if (sim->parsed())
      return cmd_simulate(config_path, overrides, workers, fixed_dictionary,
                          out_path);
    if (mk->parsed()) return cmd_make_code(L, M, dv, q, seed, code_out);
    if (st->parsed()) return run_selftest() == 0 ? 0 : 2;
  } catch (const srldpc::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
