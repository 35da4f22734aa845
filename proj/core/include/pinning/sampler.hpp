#pragma once

#include <cstdint>
#include <vector>

#include "pinning/model.hpp"
#include "pinning/spectral.hpp"

namespace pinning {

// A sampled trajectory of the annealed-critical path measure. The first q
// gaps are i.i.d. K; afterwards the lumped-window chain drives the gap law.
// states[i] is the lumped word (T_{i+1}, ..., T_{i+q}); the walk stops at the
// first renewal point >= horizon (kept, overshoot and all).
struct RenewalPath {
  int64_t horizon = 0;
  std::vector<int64_t> gaps;     // T_1, T_2, ...
  std::vector<int64_t> points;   // tau_k = T_1 + ... + T_k
  std::vector<int32_t> states;   // gaps.size() - q + 1 entries once long enough
};

// Precomputes row distributions of the normalized kernel and the inverse-CDF
// tables for gap draws (tabulated up to n_cut, exact power-tail inversion
// beyond; the constant-L convention makes the tail inversion exact).
class PathSampler {
 public:
  PathSampler(const ModelSpec& spec, const StateSpace& ss, const SpectralData& sd,
              double beta);

  RenewalPath sample(int64_t horizon, RngStream& rng) const;

  // exactly q + n_steps gaps, no horizon stop; used for transform checks
  RenewalPath sample_steps(int n_steps, RngStream& rng) const;

  int64_t draw_full_gap(RngStream& rng) const;  // gap ~ K
  int64_t draw_star_gap(RngStream& rng) const;  // gap ~ K(.)/K(star) on (q, inf)

  const TransferOperator& kernel() const { return qtilde_; }

 private:
  int draw_slot(std::size_t state, RngStream& rng) const;
  void append_gap(RenewalPath& path, int64_t gap) const;

  const ModelSpec& spec_;
  const StateSpace& ss_;
  TransferOperator qtilde_;
  std::vector<double> row_cdf_;    // per state, q+1 slots
  std::vector<double> full_cdf_;   // CDF of K over 1..n_cut
  std::vector<double> star_cdf_;   // CDF of K(.)/K(star) over q+1..n_cut
};

double contact_fraction(const RenewalPath& path);

// pi-weighted mean gap of the stationary modulated chain; infinite when
// alpha <= 1.
double mean_gap_modulated(const ModelSpec& spec, const StateSpace& ss,
                          const SpectralData& sd);

// Phi(lambda)(x,y) = phi_{y_q}(lambda) * Qtilde(x,y), the one-step Laplace
// transform of the modulated gap; powers of it give the transform of
// tau_{q+n} - tau_q.
struct LaplaceMatrix {
  double lambda = 0.0;
  const StateSpace* space = nullptr;
  std::vector<double> weights;  // [x*base + e]
  std::vector<double> row_sums() const;
};

LaplaceMatrix laplace_matrix(const ModelSpec& spec, const StateSpace& ss,
                             const SpectralData& sd, double beta, double lambda);

// E e^{-lambda (tau_{q+n} - tau_q)} = mu0 Phi(lambda)^n 1 with mu0 the
// i.i.d.-K law of the first lumped word.
double laplace_transform_steps(const ModelSpec& spec, const StateSpace& ss,
                               const LaplaceMatrix& phi, int n_steps);

// Sub-renewal process tau^(x): points tau_n, n >= q+1, whose preceding
// window (T_{n-q}, ..., T_{n-1}) lumps to x. Returns its interarrival gaps;
// `visits` counts the extracted points (fewer than 2 means no gaps).
struct SubRenewal {
  std::size_t visits = 0;
  std::vector<int64_t> gaps;
};
SubRenewal sub_renewal_extract(const RenewalPath& path, const StateSpace& ss,
                               std::size_t state);

// log E_beta exp(c |tau cut {1..j}|), exact transfer computation under the
// path measure (delayed first q gaps handled explicitly).
double log_pinned_count_mgf(const ModelSpec& spec, const StateSpace& ss,
                            const SpectralData& sd, double beta, double c, int j);

}  // namespace pinning
