#include "pinning/quenched.hpp"

#include <cmath>
#include <stdexcept>

#include "pinning/annealed.hpp"
#include "pinning/tails.hpp"
#include "pinning/util.hpp"

namespace pinning {

namespace {

void check_inputs(const ModelSpec& spec, const std::vector<double>& omega, int N) {
  if (N < 0) throw std::invalid_argument("N must be nonnegative");
  if (N > spec.n_cut) throw std::invalid_argument("N exceeds n_cut");
  if (omega.size() < static_cast<std::size_t>(N + 1))
    throw std::invalid_argument("disorder must cover sites 1..N");
}

}  // namespace

PartitionTrace quenched_partition(const ModelSpec& spec, double beta, double h,
                                  const std::vector<double>& omega, int N) {
  check_inputs(spec, omega, N);
  PartitionTrace tr;
  tr.kind = TraceKind::Full;
  tr.beta = beta;
  tr.h = h;
  tr.N = N;
  auto& z = tr.log_values;
  z.assign(N + 1, kNegInf);
  z[0] = 0.0;
  for (int n = 1; n <= N; ++n) {
    LogAccumulator acc;
    for (int m = 0; m < n; ++m) {
      if (z[m] != kNegInf) acc.add_log(z[m] + spec.log_kernel(n - m));
    }
    z[n] = acc.log_sum() + beta * omega[n] + h;
  }
  return tr;
}

RestrictedTraces restricted_partitions(const ModelSpec& spec, double beta, double h,
                                       const std::vector<double>& omega, int N) {
  check_inputs(spec, omega, N);
  RestrictedTraces out;
  for (auto* t : {&out.hat, &out.check, &out.tilde}) {
    t->beta = beta;
    t->h = h;
    t->N = N;
    t->log_values.assign(N + 1, kNegInf);
    t->log_values[0] = 0.0;
  }
  out.hat.kind = TraceKind::Hat;
  out.check.kind = TraceKind::Check;
  out.tilde.kind = TraceKind::Tilde;

  const auto full = quenched_partition(spec, beta, h, omega, N).log_values;

  auto& chk = out.check.log_values;
  for (int n = 1; n <= N; ++n) {
    LogAccumulator acc;
    for (int m = std::max(0, n - spec.q); m < n; ++m) {
      if (chk[m] != kNegInf) acc.add_log(chk[m] + spec.log_kernel(n - m));
    }
    chk[n] = acc.log_sum() + beta * omega[n] + h;
  }

  for (int n = spec.q + 1; n <= N; ++n) {
    LogAccumulator hat_acc, tilde_acc;
    for (int m = 0; m <= n - spec.q - 1; ++m) {
      const double logk = spec.log_kernel(n - m);
      if (chk[m] != kNegInf) hat_acc.add_log(chk[m] + logk);
      if (full[m] != kNegInf) tilde_acc.add_log(full[m] + logk);
    }
    out.hat.log_values[n] = hat_acc.log_sum() + beta * omega[n] + h;
    out.tilde.log_values[n] = tilde_acc.log_sum() + beta * omega[n] + h;
  }
  return out;
}

namespace {

// mean and stderr of exp(values) across replicas, computed against the row
// maximum; flags degenerate rows (all replicas identical) via `spread`
struct ScaledMean {
  double log_mean = kNegInf;
  double rel_se = 0.0;
  double spread = 0.0;
};

ScaledMean scaled_mean(const std::vector<double>& log_vals) {
  ScaledMean out;
  double mx = kNegInf;
  for (double v : log_vals) mx = std::max(mx, v);
  if (mx == kNegInf) return out;  // estimate is exactly 0
  const std::size_t m = log_vals.size();
  double s = 0.0, s2 = 0.0;
  double mn = std::numeric_limits<double>::infinity();
  for (double v : log_vals) {
    const double x = std::exp(v - mx);
    s += x;
    s2 += x * x;
    mn = std::min(mn, x);
  }
  const double mean = s / m;
  out.log_mean = mx + std::log(mean);
  out.spread = 1.0 - mn;  // 0 iff all replicas equal
  if (m > 1) {
    const double var = std::max(0.0, (s2 - m * mean * mean) / (m - 1));
    out.rel_se = std::sqrt(var / m) / mean;
  }
  return out;
}

}  // namespace

FractionalEstimate fractional_moments(const ModelSpec& spec, double beta, double h,
                                      double gamma, int N, int M, uint64_t master_seed,
                                      unsigned threads) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("gamma must lie in (0,1)");
  if (M < 2) throw std::invalid_argument("need at least 2 replicas");

  FractionalEstimate est;
  est.gamma = gamma;
  est.beta = beta;
  est.h = h;
  est.N = N;
  est.replicas = M;
  est.master_seed = master_seed;

  std::vector<std::vector<double>> hat_rows(M), tilde_rows(M);
  parallel_for(M, threads, [&](std::size_t i) {
    RngStream rng(master_seed, i);
    const auto omega = disorder_sample(spec, N, rng);
    auto tr = restricted_partitions(spec, beta, h, omega, N);
    auto& hr = hat_rows[i];
    auto& tr2 = tilde_rows[i];
    hr.resize(N + 1);
    tr2.resize(N + 1);
    for (int n = 0; n <= N; ++n) {
      const double zh = tr.hat.log_values[n];
      const double zt = tr.tilde.log_values[n];
      hr[n] = (zh == kNegInf) ? kNegInf : gamma * zh;
      tr2[n] = (zt == kNegInf) ? kNegInf : gamma * zt;
    }
  });

  est.log_khat.assign(N + 1, kNegInf);
  est.khat_rel_se.assign(N + 1, 0.0);
  est.log_a.assign(N + 1, kNegInf);
  est.a_rel_se.assign(N + 1, 0.0);
  std::vector<double> col(M);
  for (int n = 0; n <= N; ++n) {
    for (int i = 0; i < M; ++i) col[i] = hat_rows[i][n];
    ScaledMean sm = scaled_mean(col);
    if (n > spec.q && sm.log_mean != kNegInf && sm.spread == 0.0)
      throw std::runtime_error("fractional_moments: replicas are identical (seed misuse?)");
    est.log_khat[n] = sm.log_mean;
    est.khat_rel_se[n] = sm.rel_se;
    for (int i = 0; i < M; ++i) col[i] = tilde_rows[i][n];
    sm = scaled_mean(col);
    est.log_a[n] = sm.log_mean;
    est.a_rel_se[n] = sm.rel_se;
  }
  return est;
}

RhoCriterion rho_criterion(const FractionalEstimate& est, int k, int r_max) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (r_max < 2 * k) throw std::invalid_argument("r_max must be at least 2k");
  if (r_max > est.N) throw std::invalid_argument("r_max exceeds the estimated horizon");

  RhoCriterion out;
  out.k = k;
  out.r_max = r_max;

  auto khat = [&](int j) {
    return est.log_khat[j] == kNegInf ? 0.0 : std::exp(est.log_khat[j]);
  };
  auto a_of = [&](int l) { return est.log_a[l] == kNegInf ? 0.0 : std::exp(est.log_a[l]); };

  double rho = 0.0;
  for (int r = k; r <= r_max; ++r)
    for (int l = 0; l < k; ++l) rho += khat(r - l) * a_of(l);
  out.rho = rho;

  // full-correlation error propagation: sum of |coefficient| * stderr
  double se = 0.0;
  for (int j = 1; j <= r_max; ++j) {
    double w = 0.0;
    for (int l = 0; l < k; ++l) {
      const int r = j + l;
      if (r >= k && r <= r_max) w += a_of(l);
    }
    se += w * khat(j) * est.khat_rel_se[j];
  }
  for (int l = 0; l < k; ++l) {
    double u = 0.0;
    for (int r = k; r <= r_max; ++r) u += khat(r - l);
    se += u * a_of(l) * est.a_rel_se[l];
  }
  out.stderr_ = se;

  // tail of the r-sum from a pessimistic power-law fit of khat on the top decade
  std::vector<double> lx, ly, lse;
  for (int n = std::max(2, est.N / 10); n <= est.N; ++n) {
    if (est.log_khat[n] != kNegInf) {
      lx.push_back(std::log(static_cast<double>(n)));
      ly.push_back(est.log_khat[n]);
      lse.push_back(est.khat_rel_se[n]);
    }
  }
  double tail = std::numeric_limits<double>::infinity();
  if (lx.size() >= 8) {
    const LineFit lf = fit_line(lx, ly);
    const double slope_up = lf.slope + 2.0 * lf.slope_se;  // shallow edge
    out.tail_slope = lf.slope;
    if (-slope_up > 1.01) {
      double b_up = kNegInf;
      for (std::size_t i = 0; i < lx.size(); ++i)
        b_up = std::max(b_up, ly[i] + 2.0 * lse[i] - slope_up * lx[i]);
      tail = 0.0;
      for (int l = 0; l < k; ++l)
        tail += a_of(l) * (1.0 + 2.0 * est.a_rel_se[l]) * std::exp(b_up) *
                power_tail(-slope_up, static_cast<double>(r_max - l));
    }
  }
  out.tail_bound = tail;
  out.upper = out.rho + 2.0 * out.stderr_ + out.tail_bound;
  out.verdict =
      (out.upper <= 1.0) ? RhoVerdict::CertifiedSmall : RhoVerdict::Inconclusive;
  return out;
}

FreeEnergyEstimate quenched_free_energy(const ModelSpec& spec, double beta, double h, int N,
                                        int M, uint64_t master_seed, unsigned threads) {
  if (M < 2) throw std::invalid_argument("need at least 2 replicas");
  std::vector<double> f(M), fh(M);
  parallel_for(M, threads, [&](std::size_t i) {
    RngStream rng(master_seed, i);
    const auto omega = disorder_sample(spec, N, rng);
    const auto z = quenched_partition(spec, beta, h, omega, N).log_values;
    f[i] = z[N] / N;
    fh[i] = z[N / 2] / (N / 2);
  });
  const MeanSd ms = mean_sd(f);
  const MeanSd mh = mean_sd(fh);
  FreeEnergyEstimate out;
  out.value = ms.mean;
  out.stderr_ = ms.stderr_;
  out.drift = ms.mean - mh.mean;
  out.N = N;
  out.replicas = M;
  return out;
}

std::vector<GapScanRow> relevance_gap_scan(const ModelSpec& spec, const StateSpace& ss,
                                           const std::vector<double>& betas,
                                           const std::vector<double>& deltas, double gamma,
                                           int M, uint64_t master_seed, unsigned threads) {
  std::vector<GapScanRow> rows;
  for (double beta : betas) {
    const SpectralData sd = perron_frobenius(build_annealed_operator(spec, ss, beta));
    const double h_c = -0.5 * beta * beta - std::log(sd.eigenvalue);
    for (double delta : deltas) {
      if (!(delta > 0.0)) throw std::invalid_argument("delta grid must be positive");
      const double h = h_c + delta;
      int k;
      if (spec.alpha > 1.0) {
        k = std::max(1, static_cast<int>(std::ceil(1.0 / delta)));
      } else if (spec.alpha > 0.5) {
        const double f = annealed_free_energy_exact(spec, ss, beta, h);
        k = std::max(1, static_cast<int>(std::ceil(1.0 / std::max(f, 1e-8))));
      } else {
        k = std::max(1, static_cast<int>(std::ceil(1.0 / delta)));
      }
      const int r_max = std::min(4 * k + 64, spec.n_cut);
      if (r_max < 2 * k) continue;  // scale out of reach for this table
      const FractionalEstimate est =
          fractional_moments(spec, beta, h, gamma, r_max, M, master_seed, threads);
      GapScanRow row;
      row.beta = beta;
      row.delta = delta;
      row.h = h;
      row.gamma = gamma;
      row.criterion = rho_criterion(est, k, r_max);
      rows.push_back(row);
    }
  }
  return rows;
}

std::string rho_verdict_name(RhoVerdict v) {
  return v == RhoVerdict::CertifiedSmall ? "certified-small" : "inconclusive";
}

}  // namespace pinning
