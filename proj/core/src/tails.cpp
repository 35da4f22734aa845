#include "pinning/tails.hpp"

#include <cmath>
#include <stdexcept>

namespace pinning {

namespace {

constexpr double kEvalFloor = 64.0;  // Euler-Maclaurin evaluation point

// Euler-Maclaurin for f(x) = x^-s at integer point M:
//   sum_{n>M} n^-s = M^{1-s}/(s-1) - M^-s/2
//                    + B2/2! s M^{-s-1} + B4/4! s(s+1)(s+2) M^{-s-3} + ...
// with B2/2! = 1/12, B4/4! = -1/720, B6/6! = 1/30240.
double em_tail(double s, double M) {
  const double ms = std::pow(M, -s);
  const double p3 = s * (s + 1.0) * (s + 2.0);
  const double p5 = p3 * (s + 3.0) * (s + 4.0);
  double t = std::pow(M, 1.0 - s) / (s - 1.0);
  t -= 0.5 * ms;
  t += (1.0 / 12.0) * s * ms / M;
  t -= (1.0 / 720.0) * p3 * ms / (M * M * M);
  t += (1.0 / 30240.0) * p5 * ms / (M * M * M * M * M);
  return t;
}

// -d/ds of em_tail, i.e. Euler-Maclaurin for x^-s log x.
double em_tail_log(double s, double M) {
  const double lm = std::log(M);
  const double ms = std::pow(M, -s);
  const double p3 = s * (s + 1.0) * (s + 2.0);
  const double dp3 = 3.0 * s * s + 6.0 * s + 2.0;
  const double p5 = p3 * (s + 3.0) * (s + 4.0);
  const double dp5 = 5.0 * s * s * s * s + 40.0 * s * s * s + 105.0 * s * s + 100.0 * s + 24.0;
  const double m1s = std::pow(M, 1.0 - s);
  double t = m1s * lm / (s - 1.0) + m1s / ((s - 1.0) * (s - 1.0));
  t -= 0.5 * lm * ms;
  t += (1.0 / 12.0) * ms / M * (s * lm - 1.0);
  t -= (1.0 / 720.0) * ms / (M * M * M) * (p3 * lm - dp3);
  t += (1.0 / 30240.0) * ms / (M * M * M * M * M) * (p5 * lm - dp5);
  return t;
}

void check_s(double s) {
  if (!(s > 1.0)) throw std::invalid_argument("power tail requires exponent s > 1");
}

}  // namespace

double power_tail(double s, double N) {
  check_s(s);
  if (N >= kEvalFloor) return em_tail(s, N);
  double acc = 0.0;
  for (double n = std::floor(N) + 1.0; n <= kEvalFloor; n += 1.0) acc += std::pow(n, -s);
  return acc + em_tail(s, kEvalFloor);
}

double power_tail_log(double s, double N) {
  check_s(s);
  if (N >= kEvalFloor) return em_tail_log(s, N);
  double acc = 0.0;
  for (double n = std::floor(N) + 1.0; n <= kEvalFloor; n += 1.0)
    acc += std::pow(n, -s) * std::log(n);
  return acc + em_tail_log(s, kEvalFloor);
}

TailBracket power_tail_bracket(double s, double N) {
  check_s(s);
  return {std::pow(N + 1.0, 1.0 - s) / (s - 1.0), std::pow(N, 1.0 - s) / (s - 1.0)};
}

double zeta_sum(double s) {
  check_s(s);
  double acc = 0.0;
  for (double n = 1.0; n <= kEvalFloor; n += 1.0) acc += std::pow(n, -s);
  return acc + em_tail(s, kEvalFloor);
}

double discounted_power_tail(double s, double N, double f) {
  check_s(s);
  if (f < 0.0) throw std::invalid_argument("discount must be nonnegative");
  if (f == 0.0) return power_tail(s, N);
  double acc = 0.0;
  double n = std::floor(N) + 1.0;
  // terms decay at least geometrically once e^{-f} bites; stop when the
  // analytic remainder bound is negligible against the accumulated sum
  const double cap = n + std::min(60.0 / f, 5.0e7);
  for (; n <= cap; n += 1.0) {
    const double term = std::pow(n, -s) * std::exp(-f * n);
    acc += term;
    if (term < 1e-18 * (acc + 1e-300) && n > N + 8.0) return acc;
  }
  // remainder <= e^{-f n} * power_tail(s, n); add half as midpoint estimate
  return acc + 0.5 * std::exp(-f * n) * power_tail(s, n);
}

}  // namespace pinning
