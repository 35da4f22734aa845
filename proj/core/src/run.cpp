#include "pinning/run.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pinning/annealed.hpp"
#include "pinning/quenched.hpp"
#include "pinning/sampler.hpp"
#include "pinning/spectral.hpp"
#include "pinning/util.hpp"

namespace pinning {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (tok.empty()) continue;
    std::size_t pos = 0;
    const double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw ConfigError("bad number in list: " + tok);
    out.push_back(v);
  }
  return out;
}

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
  if (text.find(':') == std::string::npos) return parse_list(text);
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ':')) parts.push_back(std::stod(trim(tok)));
  if (parts.size() != 3) throw ConfigError("grid must be lo:hi:step or a comma list");
  const double lo = parts[0], hi = parts[1], step = parts[2];
  if (!(step > 0.0)) throw ConfigError("grid step must be positive");
  std::vector<double> out;
  for (double v = lo; v <= hi + 0.5 * step; v += step) out.push_back(v);
  return out;
}

double RunConfig::get_double(const std::string& key, double fallback) const {
  auto it = extras.find(key);
  if (it == extras.end()) return fallback;
  return std::stod(it->second);
}

int RunConfig::get_int(const std::string& key, int fallback) const {
  auto it = extras.find(key);
  if (it == extras.end()) return fallback;
  return std::stoi(it->second);
}

std::vector<double> RunConfig::get_grid(const std::string& key) const {
  auto it = extras.find(key);
  if (it == extras.end()) throw ConfigError("missing required key: " + key);
  return parse_grid(it->second);
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  std::map<std::string, std::string> kv;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key = value: " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty()) throw ConfigError("empty key or value: " + line);
    if (kv.count(key)) throw ConfigError("duplicate key: " + key);
    kv[key] = val;
  }
  for (const char* req : {"alpha", "q", "ma_coeffs", "n_cut"})
    if (!kv.count(req)) throw ConfigError(std::string("missing required key: ") + req);
  try {
    cfg.alpha = std::stod(kv["alpha"]);
    cfg.q = std::stoi(kv["q"]);
    cfg.ma_coeffs = parse_list(kv["ma_coeffs"]);
    cfg.n_cut = std::stoi(kv["n_cut"]);
    cfg.seed = kv.count("seed") ? std::stoull(kv["seed"]) : 0;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("bad model value: ") + e.what());
  }
  for (const char* own : {"alpha", "q", "ma_coeffs", "n_cut", "seed"}) kv.erase(own);
  if (kv.count("out")) {
    cfg.out_dir = kv["out"];
    kv.erase("out");
  }
  if (kv.count("threads")) {
    cfg.threads = static_cast<unsigned>(std::stoi(kv["threads"]));
    kv.erase("threads");
  }
  cfg.extras = std::move(kv);
  if (cfg.out_dir.empty()) {
    const char* root = std::getenv("PINNING_OUT_ROOT");
    cfg.out_dir = root ? root : "runs";
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

ModelSpec model_from_config(const RunConfig& cfg) {
  try {
    return build_model(cfg.alpha, cfg.q, cfg.ma_coeffs, cfg.n_cut);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid model: ") + e.what());
  }
}

std::string RunConfig::canonical_text() const {
  std::ostringstream os;
  os << "alpha=" << format_g17(alpha) << "\n";
  os << "ma_coeffs=";
  for (std::size_t i = 0; i < ma_coeffs.size(); ++i) {
    if (i) os << ",";
    os << format_g17(ma_coeffs[i]);
  }
  os << "\nn_cut=" << n_cut << "\nq=" << q << "\nseed=" << seed << "\n";
  for (const auto& [k, v] : extras) os << k << "=" << v << "\n";
  return os.str();
}

std::string RunConfig::hash16() const { return hex16(fnv1a64(canonical_text())); }

namespace {

std::string out_path(const RunConfig& cfg, const std::string& stem, const std::string& ext) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  return (fs::path(cfg.out_dir) / (stem + "_" + cfg.hash16() + ext)).string();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

}  // namespace

std::string write_manifest(const RunConfig& cfg, const std::string& tool_version) {
  std::ostringstream os;
  os << "# run manifest\n";
  os << cfg.canonical_text();
  os << "hash=" << cfg.hash16() << "\n";
  os << "version=" << tool_version << "\n";
  const std::string path = out_path(cfg, "manifest", ".txt");
  write_file(path, os.str());
  return path;
}

RunResult run_annealed_curve(const RunConfig& cfg) {
  RunResult res;
  const ModelSpec spec = model_from_config(cfg);
  const StateSpace ss = build_state_space(spec);
  res.files.push_back(write_manifest(cfg, kToolVersion));

  const auto betas = cfg.get_grid("beta_grid");
  const auto curve = annealed_critical_curve(spec, ss, betas);

  std::ostringstream csv;
  csv << "beta,lambda,h_c_a,dLambda_dgamma_at_1,beta0_flag\n";
  for (const auto& p : curve)
    csv << format_g17(p.beta) << "," << format_g17(p.lambda) << "," << format_g17(p.h_c_a)
        << "," << format_g17(p.d_gamma_at_1) << "," << (p.beta0_bracket ? 1 : 0) << "\n";
  const std::string curve_path = out_path(cfg, "curve", ".csv");
  write_file(curve_path, csv.str());
  res.files.push_back(curve_path);

  // small-beta slope against the renewal-mass form of the leading asymptote
  const double beta_small = cfg.get_double("beta_small", 1e-3);
  const auto u = renewal_mass(spec, spec.q);
  double slope = 1.0;
  for (int n = 1; n <= spec.q; ++n) slope += 2.0 * spec.rho[n] * u[n];
  const SpectralData sd = perron_frobenius(build_annealed_operator(spec, ss, beta_small));
  const double h_small = -0.5 * beta_small * beta_small - std::log(sd.eigenvalue);
  const double ratio = h_small / (-0.5 * beta_small * beta_small * slope);
  std::ostringstream rep;
  rep << "spec=" << cfg.hash16() << "\n";
  rep << "beta_small=" << format_g17(beta_small) << "\n";
  rep << "predicted_slope=" << format_g17(slope) << "\n";
  rep << "h_c_a=" << format_g17(h_small) << "\n";
  rep << "ratio=" << format_g17(ratio) << "\n";
  rep << "within_1e-3=" << (std::fabs(ratio - 1.0) <= 1e-3 ? "yes" : "no") << "\n";
  const std::string rep_path = out_path(cfg, "asymptote", ".txt");
  write_file(rep_path, rep.str());
  res.files.push_back(rep_path);

  if (cfg.has("fn_horizons")) {
    const double h = cfg.get_double("annealed_h", 0.0);
    const double beta = cfg.get_double("annealed_beta", betas.empty() ? 0.0 : betas.back());
    const auto grid = cfg.get_grid("fn_horizons");
    std::vector<int> horizons(grid.begin(), grid.end());
    const int n_max = *std::max_element(horizons.begin(), horizons.end());
    const auto z = annealed_log_partition(spec, ss, beta, h, n_max);
    std::ostringstream fn;
    fn << "N,beta,h,logZ,F_N\n";
    for (int n : horizons)
      fn << n << "," << format_g17(beta) << "," << format_g17(h) << ","
         << format_g17(z[n]) << "," << format_g17(z[n] / n) << "\n";
    const std::string fn_path = out_path(cfg, "fn", ".csv");
    write_file(fn_path, fn.str());
    res.files.push_back(fn_path);
  }

  if (cfg.has("exponent_deltas")) {
    const double beta = cfg.get_double("annealed_beta", 1.0);
    const auto deltas = cfg.get_grid("exponent_deltas");
    const ExponentFit fit = fit_annealed_exponent(spec, ss, beta, deltas);
    std::ostringstream ex;
    ex << "spec=" << cfg.hash16() << "\n";
    ex << "beta=" << format_g17(beta) << "\n";
    ex << "slope=" << format_g17(fit.slope) << "\n";
    ex << "intercept=" << format_g17(fit.intercept) << "\n";
    ex << "slope_se=" << format_g17(fit.slope_se) << "\n";
    ex << "r2=" << format_g17(fit.r2) << "\n";
    const std::string ex_path = out_path(cfg, "exponent", ".txt");
    write_file(ex_path, ex.str());
    res.files.push_back(ex_path);
  }

  res.summary = "curve points: " + std::to_string(curve.size()) +
                ", asymptote ratio " + format_g17(ratio);
  return res;
}

RunResult run_relevance(const RunConfig& cfg) {
  RunResult res;
  const ModelSpec spec = model_from_config(cfg);
  const StateSpace ss = build_state_space(spec);
  res.files.push_back(write_manifest(cfg, kToolVersion));

  const auto betas = cfg.get_grid("beta_grid");
  const auto gammas = cfg.get_grid("gamma_grid");
  const auto certs = relevance_grid(spec, ss, betas, gammas, cfg.threads);

  std::ostringstream out;
  for (const auto& c : certs)
    out << "spec=" << cfg.hash16() << " beta=" << format_g17(c.beta)
        << " gamma=" << format_g17(c.gamma) << " Lambda=" << format_g17(c.value)
        << " margin=" << format_g17(c.margin) << " verdict=" << verdict_name(c.verdict)
        << "\n";
  const std::string cert_path = out_path(cfg, "certificates", ".txt");
  write_file(cert_path, out.str());
  res.files.push_back(cert_path);

  std::ostringstream sum;
  for (std::size_t i = 0; i < betas.size(); ++i) {
    bool any = false;
    for (std::size_t j = 0; j < gammas.size(); ++j)
      any = any || certs[i * gammas.size() + j].verdict == Verdict::Relevant;
    sum << "beta=" << format_g17(betas[i]) << " verdict="
        << (any ? "relevant" : "inconclusive") << "\n";
  }
  std::string beta0_line = "beta0=not-computed\n";
  if (cfg.has("beta0_lo") && cfg.has("beta0_hi")) {
    try {
      const double b0 = find_beta0(spec, ss, cfg.get_double("beta0_lo", 0.0),
                                   cfg.get_double("beta0_hi", 0.0));
      beta0_line = "beta0=" + format_g17(b0) + "\n";
    } catch (const std::invalid_argument&) {
      beta0_line = "beta0=no-sign-change\n";
    }
  }
  sum << beta0_line;
  const std::string sum_path = out_path(cfg, "relevance_summary", ".txt");
  write_file(sum_path, sum.str());
  res.files.push_back(sum_path);
  res.summary = beta0_line.substr(0, beta0_line.size() - 1);
  return res;
}

RunResult run_quenched(const RunConfig& cfg) {
  RunResult res;
  const ModelSpec spec = model_from_config(cfg);
  const StateSpace ss = build_state_space(spec);
  res.files.push_back(write_manifest(cfg, kToolVersion));

  const auto betas = cfg.get_grid("beta_grid");
  const auto deltas = cfg.get_grid("delta_grid");
  const int N = cfg.get_int("horizon", 1024);
  const int M = cfg.get_int("replicas", 50);
  const double gamma = cfg.get_double("gamma", 0.95);

  const std::string fe_path = out_path(cfg, "free_energy", ".csv");
  const std::string rho_path = out_path(cfg, "rho", ".txt");
  std::ofstream fe(fe_path, std::ios::binary);
  std::ofstream rho_out(rho_path, std::ios::binary);
  fe << "beta,h,f_hat,stderr,f_annealed,annealed_bound_ok\n";

  for (double beta : betas) {
    const SpectralData sd = perron_frobenius(build_annealed_operator(spec, ss, beta));
    const double h_c = -0.5 * beta * beta - std::log(sd.eigenvalue);
    for (double delta : deltas) {
      const double h = h_c + delta;
      const auto fhat = quenched_free_energy(spec, beta, h, N, M, cfg.seed, cfg.threads);
      const double fa = annealed_free_energy_exact(spec, ss, beta, h);
      fe << format_g17(beta) << "," << format_g17(h) << "," << format_g17(fhat.value) << ","
         << format_g17(fhat.stderr_) << "," << format_g17(fa) << ","
         << (fhat.value <= fa + 3.0 * fhat.stderr_ ? 1 : 0) << "\n";
      fe.flush();  // partial results survive long runs
    }
    const auto scan = relevance_gap_scan(spec, ss, {beta}, deltas, gamma, M, cfg.seed,
                                         cfg.threads);
    for (const auto& row : scan) {
      rho_out << "spec=" << cfg.hash16() << " seed=" << cfg.seed
              << " beta=" << format_g17(row.beta) << " h=" << format_g17(row.h)
              << " gamma=" << format_g17(row.gamma) << " k=" << row.criterion.k
              << " r_max=" << row.criterion.r_max << " rho=" << format_g17(row.criterion.rho)
              << " rho_ucb=" << format_g17(row.criterion.upper)
              << " tail_bound=" << format_g17(row.criterion.tail_bound)
              << " verdict=" << rho_verdict_name(row.criterion.verdict)
              << " note=heuristic-mc-evidence\n";
      rho_out.flush();
    }
  }
  res.files.push_back(fe_path);
  res.files.push_back(rho_path);
  res.summary = "quenched grid written";
  return res;
}

RunResult run_sample(const RunConfig& cfg) {
  RunResult res;
  const ModelSpec spec = model_from_config(cfg);
  const StateSpace ss = build_state_space(spec);
  res.files.push_back(write_manifest(cfg, kToolVersion));

  const double beta = cfg.get_double("beta", 0.0);
  const int64_t horizon = cfg.get_int("horizon", 10000);
  const int n_paths = cfg.get_int("n_paths", 100);
  const int dump_paths = cfg.get_int("dump_paths", 1);
  const double lambda = cfg.get_double("lambda", 1.0);
  const int steps = cfg.get_int("steps", 64);

  const SpectralData sd = perron_frobenius(build_annealed_operator(spec, ss, beta));
  const PathSampler sampler(spec, ss, sd, beta);

  std::ostringstream dump;
  std::vector<double> fractions(n_paths);
  std::vector<double> transforms(n_paths);
  for (int i = 0; i < n_paths; ++i) {
    RngStream rng(cfg.seed, static_cast<uint64_t>(i));
    const RenewalPath path = sampler.sample(horizon, rng);
    fractions[i] = contact_fraction(path);
    if (i < dump_paths) {
      dump << "# path " << i << "\n";
      for (std::size_t k = 1; k <= path.gaps.size(); ++k) {
        // state of the window ending at gap k; -1 while the window is short
        int64_t state = -1;
        if (k >= static_cast<std::size_t>(ss.q) && k - ss.q < path.states.size())
          state = path.states[k - ss.q];
        dump << k << " " << path.gaps[k - 1] << " " << state << "\n";
      }
    }
    RngStream rng2(cfg.seed ^ 0x5afe5afeULL, static_cast<uint64_t>(i));
    const RenewalPath sp = sampler.sample_steps(steps, rng2);
    const int64_t tau_q = sp.points[ss.q - 1];
    transforms[i] = std::exp(-lambda / steps *
                             static_cast<double>(sp.points[ss.q + steps - 1] - tau_q));
  }
  const std::string paths_path = out_path(cfg, "paths", ".txt");
  write_file(paths_path, dump.str());
  res.files.push_back(paths_path);

  const MeanSd cf = mean_sd(fractions);
  const MeanSd tr = mean_sd(transforms);
  const LaplaceMatrix phi = laplace_matrix(spec, ss, sd, beta, lambda / steps);
  const double exact = laplace_transform_steps(spec, ss, phi, steps);

  std::ostringstream stats;
  stats << "stat,estimate,stderr,n_paths\n";
  stats << "contact_fraction," << format_g17(cf.mean) << "," << format_g17(cf.stderr_) << ","
        << n_paths << "\n";
  if (spec.alpha > 1.0)
    stats << "inverse_mean_gap," << format_g17(1.0 / mean_gap_modulated(spec, ss, sd))
          << ",0," << n_paths << "\n";
  stats << "laplace_empirical," << format_g17(tr.mean) << "," << format_g17(tr.stderr_)
        << "," << n_paths << "\n";
  stats << "laplace_matrix," << format_g17(exact) << ",0," << n_paths << "\n";
  const std::string stats_path = out_path(cfg, "stats", ".csv");
  write_file(stats_path, stats.str());
  res.files.push_back(stats_path);
  res.summary = "sampled " + std::to_string(n_paths) + " paths";
  return res;
}

namespace {

struct Checker {
  std::vector<std::string> failures;
  std::ostringstream log;
  void check(bool ok, const std::string& name) {
    log << (ok ? "PASS " : "FAIL ") << name << "\n";
    if (!ok) failures.push_back(name);
  }
};

}  // namespace

RunResult run_validate(const RunConfig& cfg) {
  RunResult res;
  const ModelSpec spec = model_from_config(cfg);
  const StateSpace ss = build_state_space(spec);
  Checker c;

  {
    double head = 0.0;
    for (int n = 1; n <= spec.n_cut; ++n) head += spec.k_table[n];
    c.check(std::fabs(head + spec.kernel_tail(spec.n_cut) - 1.0) <= 1e-10,
            "kernel normalization");
    double a2 = 0.0;
    for (double a : spec.ma_coeffs) a2 += a * a;
    c.check(std::fabs(a2 - 1.0) <= 1e-12, "unit disorder variance");
  }
  {
    bool ok = true;
    std::vector<int> succ_count(ss.size, 0), pred_count(ss.size, 0);
    for (std::size_t x = 0; x < ss.size; ++x)
      for (int e = 0; e < ss.base; ++e) {
        succ_count[x]++;
        pred_count[ss.successor(x, e)]++;
      }
    for (std::size_t x = 0; x < ss.size; ++x)
      ok = ok && succ_count[x] == ss.base && pred_count[x] == ss.base;
    c.check(ok, "successor/predecessor counts");
  }
  {
    RngStream rng(cfg.seed, 777);
    bool ok = true;
    for (int trial = 0; trial < 1000; ++trial) {
      std::vector<int64_t> gaps(spec.q);
      std::vector<int> codes(spec.q);
      for (int i = 0; i < spec.q; ++i) {
        gaps[i] = 1 + static_cast<int64_t>(rng.uniform01() * (3 * spec.q));
        codes[i] = lump(gaps[i], spec.q);
      }
      ok = ok && g_value_gaps(gaps, spec.rho) == ss.g_values[ss.index_of(codes)];
    }
    c.check(ok, "G lifting on integer gap vectors");
  }
  {
    const SpectralData sd0 = perron_frobenius(build_annealed_operator(spec, ss, 0.0));
    c.check(std::fabs(sd0.eigenvalue - 1.0) <= 1e-10, "lambda(0) = 1");
    for (double beta : {0.3, 0.9}) {
      const SpectralData sd = perron_frobenius(build_annealed_operator(spec, ss, beta));
      const auto frac = build_fractional_operator(spec, ss, beta, 1.0, sd.eigenvalue);
      c.check(std::fabs(perron_frobenius(frac).eigenvalue - 1.0) <= 1e-10,
              "Lambda(beta,1) = 1 at beta=" + format_g17(beta));
      const auto qt = normalized_kernel(spec, ss, beta, sd);
      double worst = 0.0;
      for (double s : qt.row_sums()) worst = std::max(worst, std::fabs(s - 1.0));
      c.check(worst <= 1e-12, "normalized kernel row sums at beta=" + format_g17(beta));
      std::vector<double> piq;
      qt.apply_left(sd.pi, piq);
      double l1 = 0.0;
      for (std::size_t i = 0; i < ss.size; ++i) l1 += std::fabs(piq[i] - sd.pi[i]);
      c.check(l1 <= 1e-10, "pi stationarity at beta=" + format_g17(beta));
      const auto d = relevance_derivative(spec, ss, beta, sd);
      c.check(std::fabs(d.direct - d.entropy_form) <= 1e-9,
              "derivative forms agree at beta=" + format_g17(beta));
      c.check(d.relative_entropy >= -1e-12,
              "relative entropy nonnegative at beta=" + format_g17(beta));
    }
  }
  if (spec.q <= 2) {
    // exact DP against direct enumeration over renewal subsets
    const int N = 10;
    const double beta = 0.7, h = -0.2;
    const auto z = annealed_log_partition(spec, ss, beta, h, N);
    double brute = 0.0;
    for (unsigned mask = 0; mask < (1u << (N - 1)); ++mask) {
      std::vector<int> sites;
      for (int i = 1; i < N; ++i)
        if (mask & (1u << (i - 1))) sites.push_back(i);
      sites.push_back(N);
      double logw = 0.0;
      int prev = 0;
      for (int s : sites) {
        logw += spec.log_kernel(s - prev);
        prev = s;
      }
      double var = static_cast<double>(sites.size());
      for (std::size_t a = 0; a < sites.size(); ++a)
        for (std::size_t b = a + 1; b < sites.size(); ++b)
          var += 2.0 * spec.rho_at(sites[b] - sites[a]);
      brute += std::exp(logw + h * sites.size() + 0.5 * beta * beta * var);
    }
    c.check(std::fabs(z[N] - std::log(brute)) <= 1e-9 * std::fabs(std::log(brute)) + 1e-12,
            "annealed DP matches enumeration at N=10");
  }
  {
    RngStream rng(cfg.seed, 3);
    const int N = 128;
    const auto omega = disorder_sample(spec, N, rng);
    const auto tr = restricted_partitions(spec, 0.8, -0.3, omega, N);
    bool ok = true;
    for (int n = spec.q + 1; n <= N; n += 17) {
      LogAccumulator acc;
      for (int l = 0; l <= n - spec.q - 1; ++l) {
        if (tr.tilde.log_values[l] == kNegInf) continue;
        std::vector<double> shifted(n - l + 1, 0.0);
        for (int i = 1; i <= n - l; ++i) shifted[i] = omega[l + i];
        const auto hat_l = restricted_partitions(spec, 0.8, -0.3, shifted, n - l);
        acc.add_log(tr.tilde.log_values[l] + hat_l.hat.log_values[n - l]);
      }
      const double lhs = tr.tilde.log_values[n];
      const double rhs = acc.log_sum();
      ok = ok && (lhs == kNegInf ? rhs == kNegInf
                                 : std::fabs(lhs - rhs) <= 1e-10 * std::fabs(lhs) + 1e-12);
    }
    c.check(ok, "block decomposition of the tilde partition");
  }
  {
    const SpectralData sd = perron_frobenius(build_annealed_operator(spec, ss, 0.5));
    const PathSampler sampler(spec, ss, sd, 0.5);
    RngStream rng(cfg.seed, 11);
    const RenewalPath p = sampler.sample(2000, rng);
    bool ok = true;
    for (std::size_t i = 0; i < p.states.size(); ++i) {
      std::vector<int> codes(ss.q);
      for (int k = 0; k < ss.q; ++k) codes[k] = lump(p.gaps[i + k], ss.q);
      ok = ok && static_cast<std::size_t>(p.states[i]) == ss.index_of(codes);
    }
    c.check(ok, "sampled states regenerate from gaps");
    RngStream rng_a(cfg.seed, 12), rng_b(cfg.seed, 12);
    const RenewalPath pa = sampler.sample(4000, rng_a);
    const RenewalPath pb = sampler.sample(4000, rng_b);
    c.check(pa.gaps == pb.gaps, "path sampling is seed-deterministic");
  }

  res.files.push_back(write_manifest(cfg, kToolVersion));
  const std::string report_path = out_path(cfg, "validate", ".txt");
  write_file(report_path, c.log.str());
  res.files.push_back(report_path);
  res.summary = c.failures.empty()
                    ? "all invariants hold"
                    : "violations: " + std::to_string(c.failures.size());
  res.exit_code = c.failures.empty() ? kExitOk : kExitInvariant;
  return res;
}

}  // namespace pinning
