#include "pinning/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pinning/tails.hpp"
#include "pinning/util.hpp"

namespace pinning {

namespace {

constexpr int64_t kGapCap = int64_t(1) << 62;

// smallest n > n_lo with tail(n) <= target, tail(n) = tail_const * power_tail(s, n)
int64_t invert_power_tail(double s, double tail_const, int64_t n_lo, double target) {
  if (target <= 0.0) return kGapCap;
  auto tail = [&](int64_t n) { return tail_const * power_tail(s, static_cast<double>(n)); };
  int64_t lo = n_lo;  // tail(lo) > target by construction
  int64_t hi = n_lo + 1;
  while (tail(hi) > target) {
    lo = hi;
    if (hi >= kGapCap / 2) return kGapCap;
    hi *= 2;
  }
  while (hi - lo > 1) {
    const int64_t mid = lo + (hi - lo) / 2;
    (tail(mid) > target ? lo : hi) = mid;
  }
  return hi;
}

}  // namespace

PathSampler::PathSampler(const ModelSpec& spec, const StateSpace& ss, const SpectralData& sd,
                         double beta)
    : spec_(spec), ss_(ss), qtilde_(normalized_kernel(spec, ss, beta, sd)) {
  row_cdf_.resize(ss.size * ss.base);
  for (std::size_t x = 0; x < ss.size; ++x) {
    double acc = 0.0;
    for (int e = 0; e < ss.base; ++e) {
      acc += qtilde_.weight(x, e);
      row_cdf_[x * ss.base + e] = acc;
    }
  }
  full_cdf_.assign(spec.n_cut + 1, 0.0);
  for (int n = 1; n <= spec.n_cut; ++n) full_cdf_[n] = full_cdf_[n - 1] + spec.k_table[n];
  star_cdf_.assign(spec.n_cut + 1, 0.0);
  for (int n = spec.q + 1; n <= spec.n_cut; ++n)
    star_cdf_[n] = star_cdf_[n - 1] + spec.k_table[n] / spec.k_star;
}

int PathSampler::draw_slot(std::size_t state, RngStream& rng) const {
  const double u = rng.uniform01();
  const double* cdf = &row_cdf_[state * ss_.base];
  for (int e = 0; e < ss_.base - 1; ++e)
    if (u <= cdf[e]) return e;
  return ss_.base - 1;
}

int64_t PathSampler::draw_full_gap(RngStream& rng) const {
  const double u = rng.uniform01();
  if (u <= full_cdf_[spec_.n_cut]) {
    const auto it = std::lower_bound(full_cdf_.begin() + 1, full_cdf_.end(), u);
    return it - full_cdf_.begin();
  }
  return invert_power_tail(1.0 + spec_.alpha, spec_.tail_const, spec_.n_cut, 1.0 - u);
}

int64_t PathSampler::draw_star_gap(RngStream& rng) const {
  const double u = rng.uniform01();
  if (u <= star_cdf_[spec_.n_cut]) {
    const auto it =
        std::lower_bound(star_cdf_.begin() + spec_.q + 1, star_cdf_.end(), u);
    return it - star_cdf_.begin();
  }
  // remaining conditional mass sits on the analytic tail beyond n_cut
  return invert_power_tail(1.0 + spec_.alpha, spec_.tail_const, spec_.n_cut,
                           (1.0 - u) * spec_.k_star);
}

void PathSampler::append_gap(RenewalPath& path, int64_t gap) const {
  path.gaps.push_back(gap);
  path.points.push_back((path.points.empty() ? 0 : path.points.back()) + gap);
  const std::size_t n = path.gaps.size();
  if (n >= static_cast<std::size_t>(ss_.q)) {
    if (n == static_cast<std::size_t>(ss_.q)) {
      std::vector<int> codes(ss_.q);
      for (int i = 0; i < ss_.q; ++i) codes[i] = lump(path.gaps[i], ss_.q);
      path.states.push_back(static_cast<int32_t>(ss_.index_of(codes)));
    } else {
      path.states.push_back(static_cast<int32_t>(
          ss_.successor(path.states.back(), lump(gap, ss_.q))));
    }
  }
}

RenewalPath PathSampler::sample(int64_t horizon, RngStream& rng) const {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  RenewalPath path;
  path.horizon = horizon;
  for (int i = 0; i < ss_.q; ++i) {
    append_gap(path, draw_full_gap(rng));
    if (path.points.back() >= horizon) return path;
  }
  while (path.points.back() < horizon) {
    const int e = draw_slot(path.states.back(), rng);
    append_gap(path, e == ss_.star() ? draw_star_gap(rng) : int64_t(e + 1));
  }
  return path;
}

RenewalPath PathSampler::sample_steps(int n_steps, RngStream& rng) const {
  RenewalPath path;
  path.horizon = 0;
  for (int i = 0; i < ss_.q; ++i) append_gap(path, draw_full_gap(rng));
  for (int s = 0; s < n_steps; ++s) {
    const int e = draw_slot(path.states.back(), rng);
    append_gap(path, e == ss_.star() ? draw_star_gap(rng) : int64_t(e + 1));
  }
  return path;
}

double contact_fraction(const RenewalPath& path) {
  if (path.horizon < 1) throw std::invalid_argument("path has no horizon");
  std::size_t count = 0;
  for (int64_t p : path.points)
    if (p <= path.horizon) ++count;
  return static_cast<double>(count) / static_cast<double>(path.horizon);
}

double mean_gap_modulated(const ModelSpec& spec, const StateSpace& ss,
                          const SpectralData& sd) {
  if (spec.alpha <= 1.0) return std::numeric_limits<double>::infinity();
  const double m_star =
      spec.tail_const * power_tail(spec.alpha, spec.q) / spec.k_star;
  double m = 0.0;
  for (std::size_t x = 0; x < ss.size; ++x) {
    const int e = ss.last_symbol(x);
    m += sd.pi[x] * (e == ss.star() ? m_star : e + 1);
  }
  return m;
}

std::vector<double> LaplaceMatrix::row_sums() const {
  const auto& ss = *space;
  std::vector<double> r(ss.size, 0.0);
  for (std::size_t x = 0; x < ss.size; ++x)
    for (int e = 0; e < ss.base; ++e) r[x] += weights[x * ss.base + e];
  return r;
}

LaplaceMatrix laplace_matrix(const ModelSpec& spec, const StateSpace& ss,
                             const SpectralData& sd, double beta, double lambda) {
  if (lambda < 0.0) throw std::invalid_argument("lambda must be nonnegative");
  const TransferOperator qt = normalized_kernel(spec, ss, beta, sd);
  LaplaceMatrix phi;
  phi.lambda = lambda;
  phi.space = &ss;
  phi.weights.resize(ss.size * ss.base);
  std::vector<double> phi_sym(ss.base);
  for (int t = 1; t <= spec.q; ++t) phi_sym[t - 1] = std::exp(-lambda * t);
  double star_acc = 0.0;
  for (int n = spec.q + 1; n <= spec.n_cut; ++n)
    star_acc += std::exp(-lambda * n) * spec.k_table[n];
  star_acc += spec.tail_const * discounted_power_tail(1.0 + spec.alpha, spec.n_cut, lambda);
  phi_sym[ss.star()] = star_acc / spec.k_star;
  for (std::size_t x = 0; x < ss.size; ++x)
    for (int e = 0; e < ss.base; ++e)
      phi.weights[x * ss.base + e] = phi_sym[e] * qt.weight(x, e);
  return phi;
}

double laplace_transform_steps(const ModelSpec& spec, const StateSpace& ss,
                               const LaplaceMatrix& phi, int n_steps) {
  std::vector<double> v(ss.size, 1.0), w(ss.size);
  for (int s = 0; s < n_steps; ++s) {
    for (std::size_t x = 0; x < ss.size; ++x) {
      double acc = 0.0;
      for (int e = 0; e < ss.base; ++e)
        acc += phi.weights[x * ss.base + e] * v[ss.successor(x, e)];
      w[x] = acc;
    }
    v.swap(w);
  }
  // mu0: product of per-symbol masses of the i.i.d. first window
  std::vector<double> mass(ss.base);
  for (int t = 1; t <= spec.q; ++t) mass[t - 1] = spec.k_table[t];
  mass[ss.star()] = spec.k_star;
  double out = 0.0;
  for (std::size_t x = 0; x < ss.size; ++x) {
    double mu = 1.0;
    for (int c : ss.codes_of(x)) mu *= mass[c];
    out += mu * v[x];
  }
  return out;
}

SubRenewal sub_renewal_extract(const RenewalPath& path, const StateSpace& ss,
                               std::size_t state) {
  SubRenewal out;
  // point tau_n (n >= q+1) is tagged by the window starting at gap n-q,
  // i.e. states[n-q-1]
  int64_t prev = -1;
  for (std::size_t i = 0; i + 1 < path.states.size(); ++i) {
    if (static_cast<std::size_t>(path.states[i]) != state) continue;
    const std::size_t n = i + ss.q + 1;  // 1-based point index
    const int64_t point = path.points[n - 1];
    ++out.visits;
    if (prev >= 0) out.gaps.push_back(point - prev);
    prev = point;
  }
  return out;
}

double log_pinned_count_mgf(const ModelSpec& spec, const StateSpace& ss,
                            const SpectralData& sd, double beta, double c, int j) {
  if (j < 1) throw std::invalid_argument("j must be >= 1");
  if (j > spec.n_cut) throw std::invalid_argument("j exceeds n_cut");
  const TransferOperator qt = normalized_kernel(spec, ss, beta, sd);
  LogAccumulator answer;  // mass that has escaped beyond j (no further factors)

  // delayed phase: m < q gaps placed, partial word p (base^m), current point t
  std::vector<std::vector<double>> cur(1, std::vector<double>(j + 1, kNegInf));
  cur[0][0] = 0.0;
  for (int m = 0; m < ss.q; ++m) {
    std::size_t pw = 1;
    for (int i = 0; i < m; ++i) pw *= ss.base;
    std::vector<std::vector<double>> nxt(pw * ss.base,
                                         std::vector<double>(j + 1, kNegInf));
    for (std::size_t p = 0; p < pw; ++p) {
      for (int t = 0; t <= j; ++t) {
        const double w = cur[p][t];
        if (w == kNegInf) continue;
        for (int g = 1; g + t <= j; ++g) {
          const std::size_t p2 = p * ss.base + lump(g, ss.q);
          auto& slot = nxt[p2][t + g];
          const double add = w + spec.log_kernel(g) + c;
          LogAccumulator acc;
          acc.add_log(slot);
          acc.add_log(add);
          slot = acc.log_sum();
        }
        answer.add_log(w + std::log(spec.kernel_tail(j - t)));  // jumps past j
      }
    }
    cur.swap(nxt);
  }

  // modulated phase over full words, processed in time order
  // cur[x][t] now holds mass pinned at t with word x
  for (int t = 0; t <= j; ++t) {
    for (std::size_t x = 0; x < ss.size; ++x) {
      const double w = cur[x][t];
      if (w == kNegInf) continue;
      for (int e = 0; e < ss.base; ++e) {
        const double lq = std::log(qt.weight(x, e));
        const std::size_t y = ss.successor(x, e);
        if (e != ss.star()) {
          const int g = e + 1;
          if (t + g <= j) {
            auto& slot = cur[y][t + g];
            LogAccumulator acc;
            acc.add_log(slot);
            acc.add_log(w + lq + c);
            slot = acc.log_sum();
          } else {
            answer.add_log(w + lq);
          }
        } else {
          for (int g = spec.q + 1; g + t <= j; ++g) {
            auto& slot = cur[y][t + g];
            LogAccumulator acc;
            acc.add_log(slot);
            acc.add_log(w + lq + spec.log_kernel(g) - std::log(spec.k_star) + c);
            slot = acc.log_sum();
          }
          const int64_t floor_gap = std::max<int64_t>(spec.q, j - t);
          answer.add_log(w + lq +
                         std::log(spec.kernel_tail(floor_gap) / spec.k_star));
        }
      }
    }
  }
  return answer.log_sum();
}

}  // namespace pinning
