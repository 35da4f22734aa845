#pragma once

#include <cstdint>

namespace pinning {

// Sums of the form sum_{n>N} n^{-s} (and the log-weighted variant) appear in
// kernel normalization, fractional power sums, entropies and heavy-tail
// inversion. They are evaluated by Euler-Maclaurin after summing explicitly
// up to a safe evaluation point; the result is accurate to ~1e-15 relative
// for s in (1, 60].

// sum_{n > N} n^{-s}, requires s > 1.
double power_tail(double s, double N);

// sum_{n > N} n^{-s} * log(n), requires s > 1.
double power_tail_log(double s, double N);

// Integral bracket [int_{N+1}^inf x^-s dx, int_N^inf x^-s dx] that must
// contain power_tail(s, N). Used as a containment check on the series.
struct TailBracket {
  double lo;
  double hi;
};
TailBracket power_tail_bracket(double s, double N);

// sum_{n >= 1} n^{-s} via partial sum + tail.
double zeta_sum(double s);

// sum_{n > N} n^{-s} e^{-f n} for f >= 0; adaptive direct summation with an
// analytic remainder bound folded in at the midpoint. Used by the discounted
// transfer sums; exact (power_tail) when f == 0.
double discounted_power_tail(double s, double N, double f);

}  // namespace pinning
