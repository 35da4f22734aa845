#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pinning/run.hpp"

namespace {

struct Common {
  std::string config_path;
  std::string out_override;
  int threads_override = 0;
  long long seed_override = -1;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("config", c.config_path, "run configuration file")->required();
  cmd->add_option("--out", c.out_override, "output directory (overrides config and env)");
  cmd->add_option("--threads", c.threads_override, "worker pool width");
  cmd->add_option("--seed", c.seed_override, "master seed override");
}

int dispatch(const Common& c, pinning::RunResult (*fn)(const pinning::RunConfig&)) {
  pinning::RunConfig cfg;
  try {
    cfg = pinning::load_config(c.config_path);
    if (!c.out_override.empty()) cfg.out_dir = c.out_override;
    if (c.threads_override > 0) cfg.threads = static_cast<unsigned>(c.threads_override);
    if (c.seed_override >= 0) cfg.seed = static_cast<uint64_t>(c.seed_override);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return pinning::kExitConfig;
  }
  try {
    const pinning::RunResult res = fn(cfg);
    for (const auto& f : res.files) std::cout << "wrote " << f << "\n";
    std::cout << res.summary << "\n";
    return res.exit_code;
  } catch (const pinning::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return pinning::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "compute error: " << e.what() << "\n";
    return pinning::kExitNumeric;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pinning: correlated-disorder pinning model toolkit"};
  app.require_subcommand(1);

  Common c_curve, c_rel, c_quen, c_samp, c_val;
  auto* curve = app.add_subcommand("annealed-curve",
                                   "critical curve, eigenvalues, small-beta asymptote");
  add_common(curve, c_curve);
  auto* rel = app.add_subcommand("relevance", "fractional-moment certificates and beta0");
  add_common(rel, c_rel);
  auto* quen = app.add_subcommand("quenched", "Monte Carlo free energy and rho criterion");
  add_common(quen, c_quen);
  auto* samp = app.add_subcommand("sample", "Markov renewal path sampling and statistics");
  add_common(samp, c_samp);
  auto* val = app.add_subcommand("validate", "run the invariant suite against a model");
  add_common(val, c_val);

  CLI11_PARSE(app, argc, argv);

  if (curve->parsed()) return dispatch(c_curve, pinning::run_annealed_curve);
  if (rel->parsed()) return dispatch(c_rel, pinning::run_relevance);
  if (quen->parsed()) return dispatch(c_quen, pinning::run_quenched);
  if (samp->parsed()) return dispatch(c_samp, pinning::run_sample);
  if (val->parsed()) return dispatch(c_val, pinning::run_validate);
  return pinning::kExitConfig;
}
