#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "pinning/model.hpp"

namespace pinning {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat key=value run description; model keys are typed, everything else is
// command-specific and read through the accessors. The canonical text (keys
// sorted, values normalized) is hashed to name result files, and a manifest
// with the same content is written next to every output: identical manifests
// mean identical outputs.
struct RunConfig {
  double alpha = 0.0;
  int q = 0;
  std::vector<double> ma_coeffs;
  int n_cut = 0;
  uint64_t seed = 0;

  std::string out_dir;
  unsigned threads = 1;
  std::map<std::string, std::string> extras;

  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::vector<double> get_grid(const std::string& key) const;  // "a,b,c" or "lo:hi:step"
  bool has(const std::string& key) const { return extras.count(key) > 0; }

  std::string canonical_text() const;
  std::string hash16() const;
};

RunConfig load_config(const std::string& path);
RunConfig parse_config_text(const std::string& text);

ModelSpec model_from_config(const RunConfig& cfg);

std::vector<double> parse_grid(const std::string& text);

// Writes <out_dir>/manifest_<hash>.txt; returns its path.
std::string write_manifest(const RunConfig& cfg, const std::string& tool_version);

constexpr const char* kToolVersion = "0.1.0";

// Exit codes shared by the CLI and the command runners.
constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitInvariant = 4;

struct RunResult {
  int exit_code = kExitOk;
  std::vector<std::string> files;  // everything written, manifest included
  std::string summary;             // human-readable tail for the log
};

RunResult run_annealed_curve(const RunConfig& cfg);
RunResult run_relevance(const RunConfig& cfg);
RunResult run_quenched(const RunConfig& cfg);
RunResult run_sample(const RunConfig& cfg);
RunResult run_validate(const RunConfig& cfg);

}  // namespace pinning
