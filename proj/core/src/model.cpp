#include "pinning/model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "pinning/tails.hpp"
#include "pinning/util.hpp"

namespace pinning {

double ModelSpec::kernel(int64_t n) const {
  if (n < 1) return 0.0;
  if (n <= n_cut) return k_table[static_cast<std::size_t>(n)];
  return tail_const * std::pow(static_cast<double>(n), -(1.0 + alpha));
}

double ModelSpec::log_kernel(int64_t n) const {
  return std::log(tail_const) - (1.0 + alpha) * std::log(static_cast<double>(n));
}

double ModelSpec::kernel_tail(int64_t n) const {
  return tail_const * power_tail(1.0 + alpha, static_cast<double>(n));
}

double ModelSpec::rho_at(int64_t lag) const {
  if (lag < 0) lag = -lag;
  if (lag > q) return 0.0;
  return rho[static_cast<std::size_t>(lag)];
}

double ModelSpec::rho_bar() const {
  double s = 1.0;
  for (int k = 1; k <= q; ++k) s += 2.0 * rho[k];
  return s;
}

double ModelSpec::mean_gap() const {
  if (alpha <= 1.0) return std::numeric_limits<double>::infinity();
  double m = 0.0;
  for (int n = 1; n <= n_cut; ++n) m += n * k_table[n];
  return m + tail_const * power_tail(alpha, n_cut);
}

std::string ModelSpec::canonical_text() const {
  std::ostringstream os;
  os << "alpha=" << format_g17(alpha) << "\nq=" << q << "\nma_coeffs=";
  for (std::size_t i = 0; i < ma_coeffs.size(); ++i) {
    if (i) os << ",";
    os << format_g17(ma_coeffs[i]);
  }
  os << "\nn_cut=" << n_cut << "\n";
  return os.str();
}

std::string ModelSpec::content_hash() const { return hex16(fnv1a64(canonical_text())); }

ModelSpec build_model(double alpha, int q, std::vector<double> ma_coeffs, int n_cut) {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (q < 1) throw std::invalid_argument("q must be >= 1");
  if (ma_coeffs.size() != static_cast<std::size_t>(q + 1))
    throw std::invalid_argument("ma_coeffs must have q+1 entries");
  double norm2 = 0.0;
  for (double a : ma_coeffs) norm2 += a * a;
  if (norm2 <= 0.0) throw std::invalid_argument("ma_coeffs must not be all zero");
  if (n_cut < 10 * q || n_cut < 64)
    throw std::invalid_argument("n_cut too small: need n_cut >= max(10q, 64)");

  ModelSpec spec;
  spec.alpha = alpha;
  spec.q = q;
  spec.n_cut = n_cut;
  const double inv = 1.0 / std::sqrt(norm2);
  spec.ma_coeffs = std::move(ma_coeffs);
  for (double& a : spec.ma_coeffs) a *= inv;

  spec.rho.assign(q + 1, 0.0);
  spec.rho[0] = 1.0;
  for (int k = 1; k <= q; ++k) {
    double r = 0.0;
    for (int i = 0; i + k <= q; ++i) r += spec.ma_coeffs[i] * spec.ma_coeffs[i + k];
    spec.rho[k] = r;
  }

  const double s = 1.0 + alpha;
  const double total = zeta_sum(s);
  spec.tail_const = 1.0 / total;
  spec.k_table.assign(n_cut + 1, 0.0);
  for (int n = 1; n <= n_cut; ++n)
    spec.k_table[n] = spec.tail_const * std::pow(static_cast<double>(n), -s);

  double head = 0.0;
  for (int n = 1; n <= q; ++n) head += spec.k_table[n];
  spec.k_star = 1.0 - head;

  // the analytic tail has to sit inside its integral bracket and close the sum to 1
  const double tail = spec.tail_const * power_tail(s, n_cut);
  const TailBracket br = power_tail_bracket(s, n_cut);
  if (!(tail >= spec.tail_const * br.lo && tail <= spec.tail_const * br.hi))
    throw std::runtime_error("kernel tail escaped its integral bracket");
  double partial = 0.0;
  for (int n = 1; n <= n_cut; ++n) partial += spec.k_table[n];
  if (std::fabs(partial + tail - 1.0) > 1e-10)
    throw std::runtime_error("kernel normalization failed");

  return spec;
}

double kernel_entropy(const ModelSpec& spec) {
  const double s = 1.0 + spec.alpha;
  const double c = spec.tail_const;
  double acc = 0.0;
  for (int n = 1; n <= spec.n_cut; ++n) acc += spec.k_table[n] * spec.log_kernel(n);
  // sum_{n>M} c n^-s (log c - s log n)
  const double zt = power_tail(s, spec.n_cut);
  const double zl = power_tail_log(s, spec.n_cut);
  acc += c * (std::log(c) * zt - s * zl);
  return -acc;
}

double star_kernel_entropy(const ModelSpec& spec) {
  const double s = 1.0 + spec.alpha;
  const double c = spec.tail_const;
  double acc = 0.0;  // sum_{n>q} K log K
  for (int n = spec.q + 1; n <= spec.n_cut; ++n) acc += spec.k_table[n] * spec.log_kernel(n);
  const double zt = power_tail(s, spec.n_cut);
  const double zl = power_tail_log(s, spec.n_cut);
  acc += c * (std::log(c) * zt - s * zl);
  // h(K_q) = -sum (K/Kstar) log(K/Kstar) = -(acc - Kstar log Kstar)/Kstar
  return -(acc / spec.k_star - std::log(spec.k_star));
}

double star_power_sum(const ModelSpec& spec, double gamma) {
  const double lo = 1.0 / (1.0 + spec.alpha);
  if (!(gamma > lo + 1e-4) || !(gamma <= 1.0))
    throw std::invalid_argument("gamma must lie in (1/(1+alpha) + 1e-4, 1]");
  const double sg = gamma * (1.0 + spec.alpha);
  const double cg = std::pow(spec.tail_const, gamma);
  double acc = 0.0;
  for (int n = spec.q + 1; n <= spec.n_cut; ++n)
    acc += cg * std::pow(static_cast<double>(n), -sg);
  return acc + cg * power_tail(sg, spec.n_cut);
}

std::size_t StateSpace::index_of(const std::vector<int>& codes) const {
  std::size_t idx = 0;
  for (int c : codes) idx = idx * base + static_cast<std::size_t>(c);
  return idx;
}

std::vector<int> StateSpace::codes_of(std::size_t idx) const {
  std::vector<int> codes(q);
  for (int i = q - 1; i >= 0; --i) {
    codes[i] = static_cast<int>(idx % base);
    idx /= base;
  }
  return codes;
}

int StateSpace::first_symbol(std::size_t idx) const {
  std::size_t p = 1;
  for (int i = 1; i < q; ++i) p *= base;
  return static_cast<int>(idx / p);
}

int lump(int64_t gap, int q) { return gap <= q ? static_cast<int>(gap - 1) : q; }

double g_value(const std::vector<int>& codes, const std::vector<double>& rho) {
  const int q = static_cast<int>(rho.size()) - 1;
  double g = 0.0;
  int64_t prefix = 0;
  for (int c : codes) {
    if (c >= q) break;  // star: this and all later prefixes are out of range
    prefix += c + 1;
    if (prefix > q) break;
    g += rho[static_cast<std::size_t>(prefix)];
  }
  return g;
}

double g_value_gaps(const std::vector<int64_t>& gaps, const std::vector<double>& rho) {
  const int64_t q = static_cast<int64_t>(rho.size()) - 1;
  double g = 0.0;
  int64_t prefix = 0;
  for (int64_t t : gaps) {
    if (t > q) break;
    prefix += t;
    if (prefix > q) break;
    g += rho[static_cast<std::size_t>(prefix)];
  }
  return g;
}

StateSpace build_state_space(const ModelSpec& spec, std::size_t state_budget) {
  StateSpace ss;
  ss.q = spec.q;
  ss.base = spec.q + 1;
  std::size_t size = 1;
  for (int i = 0; i < spec.q; ++i) {
    if (size > state_budget / static_cast<std::size_t>(ss.base))
      throw std::runtime_error(
          "state space (q+1)^q exceeds the configured budget; use a smaller q");
    size *= static_cast<std::size_t>(ss.base);
  }
  ss.size = size;

  ss.successors.resize(size * ss.base);
  ss.predecessors.resize(size * ss.base);
  ss.g_values.resize(size);

  std::size_t high = size / static_cast<std::size_t>(ss.base);  // base^{q-1}
  for (std::size_t x = 0; x < size; ++x) {
    const std::size_t shifted = (x % high) * static_cast<std::size_t>(ss.base);
    for (int e = 0; e < ss.base; ++e) {
      ss.successors[x * ss.base + e] = static_cast<int32_t>(shifted + e);
      ss.predecessors[x * ss.base + e] =
          static_cast<int32_t>(static_cast<std::size_t>(e) * high + x / ss.base);
    }
    ss.g_values[x] = g_value(ss.codes_of(x), spec.rho);
  }
  return ss;
}

std::vector<double> renewal_mass(const ModelSpec& spec, int N) {
  if (N > spec.n_cut) throw std::invalid_argument("renewal_mass: N exceeds n_cut");
  std::vector<double> u(N + 1, 0.0);
  u[0] = 1.0;
  for (int n = 1; n <= N; ++n) {
    double acc = 0.0;
    for (int k = 1; k <= n; ++k) acc += spec.k_table[k] * u[n - k];
    u[n] = acc;
  }
  return u;
}

std::vector<double> disorder_sample(const ModelSpec& spec, int N, RngStream& rng) {
  if (N < 1) throw std::invalid_argument("disorder_sample: N must be >= 1");
  const int q = spec.q;
  // innovation eps_t lives at eps[t + q - 1], t = 1-q .. N; the q pre-samples
  // make omega stationary from site 1 on
  std::vector<double> eps(N + q);
  for (int i = 0; i < N + q; ++i) eps[i] = rng.gaussian();
  std::vector<double> omega(N + 1, 0.0);
  for (int n = 1; n <= N; ++n) {
    double w = 0.0;
    for (int i = 0; i <= q; ++i) w += spec.ma_coeffs[i] * eps[n - i + q - 1];
    omega[n] = w;
  }
  return omega;
}

double disorder_sum_variance(const ModelSpec& spec, int64_t N) {
  double v = static_cast<double>(N);
  for (int k = 1; k <= spec.q; ++k) {
    const int64_t pairs = N - k;
    if (pairs > 0) v += 2.0 * static_cast<double>(pairs) * spec.rho[k];
  }
  return v;
}

double disorder_variance_sup(const ModelSpec& spec) {
  double sup = 0.0;
  for (int64_t n = 1; n <= 2 * spec.q + 2; ++n)
    sup = std::max(sup, disorder_sum_variance(spec, n) / static_cast<double>(n));
  double k_weighted = 0.0;
  for (int k = 1; k <= spec.q; ++k) k_weighted += k * spec.rho[k];
  if (k_weighted > 0.0) sup = std::max(sup, spec.rho_bar());  // approached from below
  return sup;
}

}  // namespace pinning
