#include "pinning/annealed.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pinning/tails.hpp"
#include "pinning/util.hpp"

namespace pinning {

namespace {

// DP over words of the last q lumped gaps, newest first; an entry is star
// when the gap is long or when the matching partner site carries no energy
// (sites at or before the origin). With that encoding the correlation energy
// picked up by an arrival with resulting word u is exactly beta^2 G(u), with
// no boundary correction, and the very first arrival lands on the all-star
// word.
//
// Returns the table C[n * size + u] = log annealed weight of paths pinned at
// n with word u. `short_gaps_only` restricts every gap to <= q.
std::vector<double> word_dp(const ModelSpec& spec, const StateSpace& ss, double beta,
                            double h, int N, bool short_gaps_only,
                            const std::vector<double>* site_shift) {
  if (N < 0) throw std::invalid_argument("horizon must be nonnegative");
  if (N > spec.n_cut)
    throw std::invalid_argument("horizon exceeds n_cut; rebuild the model with a larger table");
  const std::size_t size = ss.size;
  if (static_cast<std::size_t>(N + 1) > (std::size_t(1) << 27) / size)
    throw std::invalid_argument("horizon * state count exceeds the DP budget");

  const double b2 = beta * beta;
  std::vector<double> c(static_cast<std::size_t>(N + 1) * size, kNegInf);
  const std::size_t all_star = ss.all_star();

  for (int n = 1; n <= N; ++n) {
    const double base_w =
        h + 0.5 * b2 + (site_shift ? beta * (*site_shift)[n] : 0.0);
    for (std::size_t y = 0; y < size; ++y) {
      const int first = ss.first_symbol(y);
      LogAccumulator acc;
      if (first != ss.star()) {
        // fixed short gap t = first+1, sources one step back
        const int t = first + 1;
        if (n - t >= 1) {
          const double logk = spec.log_kernel(t);
          for (int e = 0; e < ss.base; ++e) {
            const double src = c[static_cast<std::size_t>(n - t) * size + ss.successor(y, e)];
            if (src != kNegInf) acc.add_log(src + logk);
          }
        }
      } else {
        if (!short_gaps_only) {
          for (int g = spec.q + 1; g <= n - 1; ++g) {
            const double logk = spec.log_kernel(g);
            for (int e = 0; e < ss.base; ++e) {
              const double src =
                  c[static_cast<std::size_t>(n - g) * size + ss.successor(y, e)];
              if (src != kNegInf) acc.add_log(src + logk);
            }
          }
        }
      }
      if (y == all_star && (!short_gaps_only || n <= spec.q)) {
        acc.add_log(spec.log_kernel(n));  // first arrival, gap n from the origin
      }
      const double s = acc.log_sum();
      if (s != kNegInf)
        c[static_cast<std::size_t>(n) * size + y] = s + base_w + b2 * ss.g_values[y];
    }
  }
  return c;
}

std::vector<double> table_trace(const std::vector<double>& c, std::size_t size, int N) {
  std::vector<double> z(N + 1, kNegInf);
  z[0] = 0.0;
  for (int n = 1; n <= N; ++n) {
    LogAccumulator acc;
    for (std::size_t y = 0; y < size; ++y) acc.add_log(c[static_cast<std::size_t>(n) * size + y]);
    z[n] = acc.log_sum();
  }
  return z;
}

// final long jump onto n from any block counted by `inner`; the arrival picks
// up no correlation energy because the gap exceeds q
std::vector<double> long_jump_trace(const ModelSpec& spec, double beta, double h, int N,
                                    const std::vector<double>& inner,
                                    const std::vector<double>* site_shift) {
  const double b2 = beta * beta;
  std::vector<double> z(N + 1, kNegInf);
  z[0] = 0.0;
  for (int n = spec.q + 1; n <= N; ++n) {
    LogAccumulator acc;
    acc.add_log(spec.log_kernel(n));
    for (int m = 1; m <= n - spec.q - 1; ++m) {
      if (inner[m] != kNegInf) acc.add_log(inner[m] + spec.log_kernel(n - m));
    }
    const double base_w = h + 0.5 * b2 + (site_shift ? beta * (*site_shift)[n] : 0.0);
    z[n] = acc.log_sum() + base_w;
  }
  return z;
}

}  // namespace

std::vector<double> annealed_log_partition(const ModelSpec& spec, const StateSpace& ss,
                                           double beta, double h, int N,
                                           Restriction restriction,
                                           const std::vector<double>* site_shift) {
  if (site_shift && site_shift->size() < static_cast<std::size_t>(N + 1))
    throw std::invalid_argument("site_shift must cover sites 1..N");
  switch (restriction) {
    case Restriction::Full:
      return table_trace(word_dp(spec, ss, beta, h, N, false, site_shift), ss.size, N);
    case Restriction::Check:
      return table_trace(word_dp(spec, ss, beta, h, N, true, site_shift), ss.size, N);
    case Restriction::Hat: {
      const auto check =
          table_trace(word_dp(spec, ss, beta, h, N, true, site_shift), ss.size, N);
      return long_jump_trace(spec, beta, h, N, check, site_shift);
    }
    case Restriction::Tilde: {
      const auto full =
          table_trace(word_dp(spec, ss, beta, h, N, false, site_shift), ss.size, N);
      return long_jump_trace(spec, beta, h, N, full, site_shift);
    }
  }
  throw std::logic_error("unknown restriction");
}

std::vector<double> tilt_site_means(const ModelSpec& spec, double lambda_tilt, int N) {
  std::vector<double> m(N + 1, 0.0);
  for (int i = 1; i <= N; ++i) {
    double w = 1.0;  // rho_0
    for (int k = 1; k <= spec.q; ++k) {
      if (i - k >= 1) w += spec.rho[k];
      if (i + k <= N) w += spec.rho[k];
    }
    m[i] = -lambda_tilt * w;
  }
  return m;
}

double tilted_annealed_log_partition(const ModelSpec& spec, const StateSpace& ss, double beta,
                                     double h, double lambda_tilt, int N) {
  if (lambda_tilt < 0.0) throw std::invalid_argument("tilt must be nonnegative");
  const auto shift = tilt_site_means(spec, lambda_tilt, N);
  return annealed_log_partition(spec, ss, beta, h, N, Restriction::Tilde, &shift)[N];
}

double annealed_free_energy_exact(const ModelSpec& spec, const StateSpace& ss, double beta,
                                  double h, double f_tol) {
  const double b2 = beta * beta;
  const double s = 1.0 + spec.alpha;

  auto log_pf = [&](double f) {
    TransferOperator op;
    op.kind = OperatorKind::Annealed;
    op.beta = beta;
    op.space = &ss;
    op.weights.resize(ss.size * ss.base);
    std::vector<double> kf(ss.base);
    for (int t = 1; t <= spec.q; ++t) kf[t - 1] = spec.k_table[t] * std::exp(-f * t);
    kf[ss.star()] = spec.tail_const * discounted_power_tail(s, spec.q, f);
    for (std::size_t x = 0; x < ss.size; ++x)
      for (int e = 0; e < ss.base; ++e) {
        const std::size_t y = ss.successor(x, e);
        op.weights[x * ss.base + e] =
            std::exp(h + 0.5 * b2 + b2 * ss.g_values[y]) * kf[e];
      }
    return std::log(perron_frobenius(op).eigenvalue);
  };

  if (log_pf(0.0) <= 0.0) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (log_pf(hi) > 0.0) {
    hi *= 2.0;
    if (hi > 1e6) throw std::runtime_error("free-energy root escaped its bracket");
  }
  while (hi - lo > f_tol * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    (log_pf(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

FreeEnergyCurve annealed_free_energy(const ModelSpec& spec, const StateSpace& ss, double beta,
                                     const std::vector<double>& h_grid, int N) {
  FreeEnergyCurve curve;
  curve.h_grid = h_grid;
  curve.N = N;
  curve.f_values.resize(h_grid.size());
  curve.f_half.resize(h_grid.size());
  for (std::size_t i = 0; i < h_grid.size(); ++i) {
    const auto z = annealed_log_partition(spec, ss, beta, h_grid[i], N);
    curve.f_values[i] = z[N] / N;
    curve.f_half[i] = z[N / 2] / (N / 2);
  }
  for (std::size_t i = 1; i < h_grid.size(); ++i)
    if (curve.f_values[i] + 1e-12 < curve.f_values[i - 1]) curve.monotone_in_h = false;
  return curve;
}

std::vector<double> annealed_fn_sequence(const ModelSpec& spec, const StateSpace& ss,
                                         double beta, double h,
                                         const std::vector<int>& n_list) {
  const int N = *std::max_element(n_list.begin(), n_list.end());
  const auto z = annealed_log_partition(spec, ss, beta, h, N);
  std::vector<double> out(n_list.size());
  for (std::size_t i = 0; i < n_list.size(); ++i) out[i] = z[n_list[i]] / n_list[i];
  return out;
}

ExponentFit fit_annealed_exponent(const ModelSpec& spec, const StateSpace& ss, double beta,
                                  const std::vector<double>& deltas) {
  const SpectralData sd = perron_frobenius(build_annealed_operator(spec, ss, beta));
  const double h_c = -0.5 * beta * beta - std::log(sd.eigenvalue);
  std::vector<double> lx, ly;
  for (double d : deltas) {
    const double f = annealed_free_energy_exact(spec, ss, beta, h_c + d);
    if (f > 0.0) {
      lx.push_back(std::log(d));
      ly.push_back(std::log(f));
    }
  }
  if (lx.size() < 2) throw std::runtime_error("exponent fit needs at least two positive points");
  const LineFit lf = fit_line(lx, ly);
  return {lf.slope, lf.intercept, lf.slope_se, lf.r2};
}

}  // namespace pinning
