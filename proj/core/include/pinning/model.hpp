#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pinning/rng.hpp"

namespace pinning {

// Heavy-tailed interarrival kernel K(n) = tail_const * n^{-(1+alpha)}
// (recurrent: sums to 1), together with the moving-average description of
// the disorder field omega_n = sum_i a_i eps_{n-i}. Correlations rho_k
// vanish beyond lag q by construction. Immutable after build_model.
struct ModelSpec {
  double alpha = 0.0;             // tail exponent
  int q = 0;                      // correlation range
  std::vector<double> ma_coeffs;  // a_0..a_q, normalized so sum a_i^2 = 1
  std::vector<double> rho;        // rho[k] for k = 0..q, rho[0] = 1
  int n_cut = 0;                  // tabulation horizon
  std::vector<double> k_table;    // k_table[n] = K(n), n = 1..n_cut; [0] unused
  double k_star = 0.0;            // K(star) = sum_{n>q} K(n)
  double tail_const = 0.0;        // normalization constant of K

  double kernel(int64_t n) const;      // K(n), analytic beyond n_cut
  double log_kernel(int64_t n) const;  // log K(n), exact power form
  double kernel_tail(int64_t n) const; // sum_{m>n} K(m)
  double rho_at(int64_t lag) const;    // rho_0 = 1; 0 beyond q
  double rho_bar() const;              // 1 + 2 sum_k rho_k
  double mean_gap() const;             // sum n K(n); +inf when alpha <= 1

  std::string canonical_text() const;  // key=value serialization (no seed)
  std::string content_hash() const;    // hex FNV-1a of canonical_text
};

ModelSpec build_model(double alpha, int q, std::vector<double> ma_coeffs, int n_cut);

// Entropy of the kernel, h(K) = -sum_n K(n) log K(n) (tabulated + analytic tail).
double kernel_entropy(const ModelSpec& spec);

// Entropy of the conditional over-the-range kernel K_q(n) = K(n)/K(star), n > q.
double star_kernel_entropy(const ModelSpec& spec);

// sum_{n>q} K(n)^gamma; requires gamma*(1+alpha) > 1 with a safety margin.
double star_power_sum(const ModelSpec& spec, double gamma);

// Lumped gap symbols: codes 0..q-1 stand for gaps 1..q, code q is the star
// symbol (gap > q). States are words of q symbols; index order is
// lexicographic with star greatest, fixed so serialized vectors stay portable.
struct StateSpace {
  int q = 0;
  int base = 0;                       // q+1 symbols
  std::size_t size = 0;               // (q+1)^q words
  std::vector<int32_t> successors;    // [x*base + e] = index of (x_2..x_q, e)
  std::vector<int32_t> predecessors;  // [x*base + e] = index of (e, x_1..x_{q-1})
  std::vector<double> g_values;       // G per word

  int star() const { return q; }
  std::size_t index_of(const std::vector<int>& codes) const;
  std::vector<int> codes_of(std::size_t idx) const;
  int last_symbol(std::size_t idx) const { return static_cast<int>(idx % base); }
  int first_symbol(std::size_t idx) const;
  std::size_t successor(std::size_t x, int e) const { return successors[x * base + e]; }
  std::size_t predecessor(std::size_t x, int e) const { return predecessors[x * base + e]; }
  std::size_t all_star() const { return size - 1; }
};

constexpr std::size_t kDefaultStateBudget = 1u << 21;

StateSpace build_state_space(const ModelSpec& spec,
                             std::size_t state_budget = kDefaultStateBudget);

// G over a word of symbol codes: sum of rho over prefix sums of the gaps,
// where a prefix that contains star (or exceeds q) contributes nothing.
double g_value(const std::vector<int>& codes, const std::vector<double>& rho);

// Same on raw integer gaps; lumping leaves the value unchanged.
double g_value_gaps(const std::vector<int64_t>& gaps, const std::vector<double>& rho);

int lump(int64_t gap, int q);  // symbol code of a gap

// u[n] = P(n in tau) for the bare renewal, u[0] = 1.
std::vector<double> renewal_mass(const ModelSpec& spec, int N);

// omega_1..omega_N at [1..N] ([0] = 0); the MA window is warmed up with q
// extra innovations so the output is stationary from the first site.
std::vector<double> disorder_sample(const ModelSpec& spec, int N, RngStream& rng);

// Var(omega_1 + ... + omega_N), exact: N + 2 sum_k (N-k)^+ rho_k.
double disorder_sum_variance(const ModelSpec& spec, int64_t N);

// sup_{N>=1} v_N / N.
double disorder_variance_sup(const ModelSpec& spec);

}  // namespace pinning
