#pragma once

#include <vector>

#include "pinning/model.hpp"
#include "pinning/spectral.hpp"

namespace pinning {

// Path events the partition function can be restricted to. A "long" gap is a
// gap strictly larger than q; blocks of short gaps decouple across long gaps
// because correlations have range q.
enum class Restriction {
  Full,   // pinned endpoint, otherwise free
  Check,  // all gaps <= q
  Hat,    // all gaps <= q except the final one, which is > q
  Tilde,  // final gap > q, earlier gaps free
};

// log E Z_n for n = 0..N under the given restriction (log-domain, -inf where
// the event is empty). Disorder is averaged exactly: every pair of contact
// sites within distance q contributes its correlation, with no boundary
// slack, which is what the small-N enumeration oracle checks against.
// Optional site_shift adds beta * site_shift[n] to the energy of a contact
// at n (used by the exponentially tilted average).
std::vector<double> annealed_log_partition(const ModelSpec& spec, const StateSpace& ss,
                                           double beta, double h, int N,
                                           Restriction restriction = Restriction::Full,
                                           const std::vector<double>* site_shift = nullptr);

// log E_{N,lambda} Z~_N: disorder mean is shifted to m_i = -lambda * sum of
// covariances of site i against sites 1..N; the tilted average of the
// final-gap-long partition function is an exact DP.
double tilted_annealed_log_partition(const ModelSpec& spec, const StateSpace& ss, double beta,
                                     double h, double lambda_tilt, int N);

// Per-site tilted means m_1..m_N at [1..N].
std::vector<double> tilt_site_means(const ModelSpec& spec, double lambda_tilt, int N);

// Infinite-volume annealed free energy: unique f >= 0 at which the dominant
// eigenvalue of the e^{-f n}-discounted transfer operator passes 1.
double annealed_free_energy_exact(const ModelSpec& spec, const StateSpace& ss, double beta,
                                  double h, double f_tol = 1e-12);

struct FreeEnergyCurve {
  std::vector<double> h_grid;
  std::vector<double> f_values;   // (1/N) log Z at horizon N
  std::vector<double> f_half;     // same at N/2, drift diagnostic
  int N = 0;
  bool monotone_in_h = true;
};

FreeEnergyCurve annealed_free_energy(const ModelSpec& spec, const StateSpace& ss, double beta,
                                     const std::vector<double>& h_grid, int N);

// (1/N) log Z^a_N along a list of horizons at fixed (beta, h).
std::vector<double> annealed_fn_sequence(const ModelSpec& spec, const StateSpace& ss,
                                         double beta, double h,
                                         const std::vector<int>& n_list);

struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  double r2 = 0.0;
};

// log-log slope of the exact free energy against Delta = h - h_c^a(beta).
ExponentFit fit_annealed_exponent(const ModelSpec& spec, const StateSpace& ss, double beta,
                                  const std::vector<double>& deltas);

}  // namespace pinning
