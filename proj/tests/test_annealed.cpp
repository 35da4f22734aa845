#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pinning/annealed.hpp"
#include "pinning/model.hpp"
#include "pinning/rng.hpp"
#include "pinning/spectral.hpp"
#include "pinning/util.hpp"
#include "test_helpers.hpp"

using namespace pinning;
using testutil::Filter;

namespace {

Restriction to_restriction(Filter f) {
  switch (f) {
    case Filter::Full: return Restriction::Full;
    case Filter::Check: return Restriction::Check;
    case Filter::Hat: return Restriction::Hat;
    case Filter::Tilde: return Restriction::Tilde;
  }
  return Restriction::Full;
}

bool log_close(double a, double b, double rel = 1e-9) {
  if (a == kNegInf || b == kNegInf) return a == b;
  return std::fabs(a - b) <= rel * std::max(1.0, std::fabs(a));
}

}  // namespace

TEST_CASE("exhaustive enumeration, all restrictions, random parameters") {
  RngStream rng(404, 0);
  const std::vector<ModelSpec> models = {testutil::model_q1(1.5), testutil::model_q2(0.8)};
  for (const auto& spec : models) {
    const StateSpace ss = build_state_space(spec);
    for (int draw = 0; draw < 10; ++draw) {
      const double beta = 2.0 * rng.uniform01();
      const double h = 1.0 - 2.0 * rng.uniform01();
      const int N = 8 + static_cast<int>(rng.uniform01() * 4.999);  // 8..12
      for (Filter f : {Filter::Full, Filter::Check, Filter::Hat, Filter::Tilde}) {
        const auto z = annealed_log_partition(spec, ss, beta, h, N, to_restriction(f));
        for (int n = 1; n <= N; ++n) {
          const double brute = testutil::brute_annealed(spec, beta, h, n, f);
          CAPTURE(beta);
          CAPTURE(h);
          CAPTURE(n);
          CAPTURE(static_cast<int>(f));
          CHECK(log_close(z[n], brute));
        }
      }
    }
  }
}

TEST_CASE("disorder-free reduction equals the scalar renewal recursion") {
  const ModelSpec spec = testutil::model_q2(1.1);
  const StateSpace ss = build_state_space(spec);
  const double h = -0.4;
  const int N = 256;
  const auto z = annealed_log_partition(spec, ss, 0.0, h, N);
  // beta = 0: Z_n = sum_m Z_m K(n-m) e^h
  std::vector<double> zs(N + 1, kNegInf);
  zs[0] = 0.0;
  for (int n = 1; n <= N; ++n) {
    LogAccumulator acc;
    for (int m = 0; m < n; ++m) acc.add_log(zs[m] + spec.log_kernel(n - m));
    zs[n] = acc.log_sum() + h;
  }
  for (int n = 1; n <= N; ++n) CHECK(log_close(z[n], zs[n], 1e-11));
}

TEST_CASE("deep delocalized limit: single-jump path dominates") {
  const ModelSpec spec = testutil::model_q1(1.5);
  const StateSpace ss = build_state_space(spec);
  const double beta = 0.7;
  const int N = 64;
  const double h = -40.0;
  const auto z = annealed_log_partition(spec, ss, beta, h, N);
  const double single = spec.log_kernel(N) + h + 0.5 * beta * beta;
  CHECK(z[N] == doctest::Approx(single).epsilon(1e-10));
}

TEST_CASE("annealed DP horizon checks") {
  const ModelSpec spec = testutil::model_q1(1.5, 1.0, 256);
  const StateSpace ss = build_state_space(spec);
  CHECK_THROWS_AS(annealed_log_partition(spec, ss, 0.5, 0.0, 512), std::invalid_argument);
}

TEST_CASE("free energy curve: convexity and monotonicity in h") {
  const ModelSpec spec = testutil::model_q2(0.8);
  const StateSpace ss = build_state_space(spec);
  std::vector<double> h_grid;
  for (int i = 0; i <= 10; ++i) h_grid.push_back(-0.5 + 0.1 * i);
  const FreeEnergyCurve curve = annealed_free_energy(spec, ss, 0.8, h_grid, 512);
  CHECK(curve.monotone_in_h);
  for (std::size_t i = 1; i + 1 < curve.f_values.size(); ++i) {
    const double second =
        curve.f_values[i + 1] - 2.0 * curve.f_values[i] + curve.f_values[i - 1];
    CHECK(second >= -1e-12);
  }
}

TEST_CASE("finite-horizon free energy decays at the critical point") {
  const ModelSpec spec = testutil::model_q1(1.5, 1.0, 8192);
  const StateSpace ss = build_state_space(spec);
  const double beta = 0.8;
  const SpectralData sd = perron_frobenius(build_annealed_operator(spec, ss, beta));
  const double h_c = -0.5 * beta * beta - std::log(sd.eigenvalue);
  const auto f_n = annealed_fn_sequence(spec, ss, beta, h_c, {512, 1024, 2048, 4096});
  const std::vector<int> ns = {512, 1024, 2048, 4096};
  for (std::size_t i = 0; i < ns.size(); ++i)
    CHECK(std::fabs(f_n[i]) <= 3.0 * std::log(ns[i]) / ns[i]);
  // and it moves toward zero
  CHECK(std::fabs(f_n.back()) < std::fabs(f_n.front()));
}

TEST_CASE("exact free energy: zero below the critical point, positive above") {
  const ModelSpec spec = testutil::model_q2(1.3);
  const StateSpace ss = build_state_space(spec);
  const double beta = 0.9;
  const SpectralData sd = perron_frobenius(build_annealed_operator(spec, ss, beta));
  const double h_c = -0.5 * beta * beta - std::log(sd.eigenvalue);
  CHECK(annealed_free_energy_exact(spec, ss, beta, h_c - 0.05) == 0.0);
  CHECK(annealed_free_energy_exact(spec, ss, beta, h_c) <= 1e-9);
  const double f = annealed_free_energy_exact(spec, ss, beta, h_c + 0.1);
  CHECK(f > 0.0);

  // cross-check the root against the finite-horizon DP at a supercritical h
  const auto f_n = annealed_fn_sequence(spec, ss, beta, h_c + 0.1, {1024, 2048});
  CHECK(std::fabs(f_n[1] - f) <= 3.0 * std::log(2048.0) / 2048.0);
  CHECK(std::fabs(f_n[1] - f) < std::fabs(f_n[0] - f) + 1e-9);
}

TEST_CASE("homogeneous exact free energy equals the scalar root") {
  // beta = 0: F solves sum_n K(n) e^{-F n} = e^{-h}
  const ModelSpec spec = testutil::model_q1(1.5, 1.0, 8192);
  const StateSpace ss = build_state_space(spec);
  const double h = 0.3;
  const double f = annealed_free_energy_exact(spec, ss, 0.0, h);
  double sum = 0.0;
  for (int n = 1; n <= spec.n_cut; ++n) sum += spec.k_table[n] * std::exp(-f * n);
  CHECK(sum == doctest::Approx(std::exp(-h)).epsilon(1e-7));
}

TEST_CASE("annealed exponent: max(1, 1/alpha) for alpha = 2 and alpha = 0.8") {
  std::vector<double> deltas;
  for (int i = 0; i < 8; ++i) deltas.push_back(1e-3 * std::pow(10.0, i / 7.0));
  {
    const ModelSpec spec = testutil::model_q1(2.0, 1.0, 20000);
    const StateSpace ss = build_state_space(spec);
    const ExponentFit fit = fit_annealed_exponent(spec, ss, 1.0, deltas);
    CHECK(std::fabs(fit.slope - 1.0) <= 0.1);
  }
  {
    const ModelSpec spec = testutil::model_q1(0.8, 1.0, 20000);
    const StateSpace ss = build_state_space(spec);
    const ExponentFit fit = fit_annealed_exponent(spec, ss, 1.0, deltas);
    CHECK(std::fabs(fit.slope - 1.25) <= 0.15);
  }
}

TEST_CASE("tilt means: bulk value and edges") {
  const ModelSpec spec = testutil::model_q2(1.2);
  const int N = 50;
  const double lam = 0.3;
  const auto m = tilt_site_means(spec, lam, N);
  CHECK(m[25] == doctest::Approx(-lam * spec.rho_bar()).epsilon(1e-14));
  CHECK(m[1] == doctest::Approx(-lam * (1.0 + spec.rho[1] + spec.rho[2])).epsilon(1e-14));
  CHECK(m[N] == m[1]);
}

TEST_CASE("tilted partition: lambda = 0 reduces to the plain restricted value") {
  const ModelSpec spec = testutil::model_q2(0.9);
  const StateSpace ss = build_state_space(spec);
  const int N = 64;
  const double beta = 0.8, h = -0.3;
  const double tilted = tilted_annealed_log_partition(spec, ss, beta, h, 0.0, N);
  const double plain = annealed_log_partition(spec, ss, beta, h, N, Restriction::Tilde)[N];
  CHECK(tilted == doctest::Approx(plain).epsilon(1e-12));
}

TEST_CASE("tilted partition matches enumeration with shifted means") {
  RngStream rng(17, 1);
  const ModelSpec spec = testutil::model_q2(1.0);
  const StateSpace ss = build_state_space(spec);
  for (int draw = 0; draw < 8; ++draw) {
    const double beta = 1.5 * rng.uniform01();
    const double h = 0.5 - rng.uniform01();
    const double lam = 0.5 * rng.uniform01();
    const int N = 10;
    const auto shift = tilt_site_means(spec, lam, N);
    const double brute = testutil::brute_annealed(spec, beta, h, N, Filter::Tilde, &shift);
    const double dp = tilted_annealed_log_partition(spec, ss, beta, h, lam, N);
    CHECK(log_close(dp, brute));
  }
}
