#include "pinning/spectral.hpp"

#include <cmath>
#include <stdexcept>

#include "pinning/tails.hpp"
#include "pinning/util.hpp"

namespace pinning {

void TransferOperator::apply_right(const std::vector<double>& v, std::vector<double>& w) const {
  const auto& ss = *space;
  w.assign(ss.size, 0.0);
  for (std::size_t x = 0; x < ss.size; ++x) {
    double acc = 0.0;
    const std::size_t off = x * ss.base;
    for (int e = 0; e < ss.base; ++e) acc += weights[off + e] * v[ss.successors[off + e]];
    w[x] = acc;
  }
}

void TransferOperator::apply_left(const std::vector<double>& u, std::vector<double>& w) const {
  const auto& ss = *space;
  w.assign(ss.size, 0.0);
  for (std::size_t x = 0; x < ss.size; ++x) {
    const std::size_t off = x * ss.base;
    const double ux = u[x];
    for (int e = 0; e < ss.base; ++e) w[ss.successors[off + e]] += weights[off + e] * ux;
  }
}

std::vector<double> TransferOperator::row_sums() const {
  const auto& ss = *space;
  std::vector<double> r(ss.size, 0.0);
  for (std::size_t x = 0; x < ss.size; ++x) {
    double acc = 0.0;
    for (int e = 0; e < ss.base; ++e) acc += weights[x * ss.base + e];
    r[x] = acc;
  }
  return r;
}

TransferOperator build_annealed_operator(const ModelSpec& spec, const StateSpace& ss,
                                         double beta) {
  if (beta < 0.0) throw std::invalid_argument("beta must be nonnegative");
  TransferOperator op;
  op.kind = OperatorKind::Annealed;
  op.beta = beta;
  op.space = &ss;
  op.weights.resize(ss.size * ss.base);
  const double b2 = beta * beta;
  for (std::size_t x = 0; x < ss.size; ++x) {
    for (int e = 0; e < ss.base; ++e) {
      const std::size_t y = ss.successor(x, e);
      const double kpart = (e == ss.star()) ? spec.k_star : spec.k_table[e + 1];
      op.weights[x * ss.base + e] = std::exp(b2 * ss.g_values[y]) * kpart;
    }
  }
  return op;
}

TransferOperator build_fractional_operator(const ModelSpec& spec, const StateSpace& ss,
                                           double beta, double gamma, double lambda_beta) {
  if (!(lambda_beta > 0.0)) throw std::invalid_argument("lambda(beta) must be provided");
  TransferOperator op;
  op.kind = OperatorKind::Fractional;
  op.beta = beta;
  op.gamma = gamma;
  op.space = &ss;
  op.weights.resize(ss.size * ss.base);
  const double b2 = beta * beta;
  const double star_sum = star_power_sum(spec, gamma);  // validates gamma range
  const double common = 0.5 * b2 * gamma * (gamma - 1.0) - gamma * std::log(lambda_beta);
  for (std::size_t x = 0; x < ss.size; ++x) {
    for (int e = 0; e < ss.base; ++e) {
      const std::size_t y = ss.successor(x, e);
      const double kpart =
          (e == ss.star()) ? star_sum : std::pow(spec.k_table[e + 1], gamma);
      op.weights[x * ss.base + e] =
          kpart * std::exp(common + gamma * gamma * b2 * ss.g_values[y]);
    }
  }
  return op;
}

TransferOperator normalized_kernel(const ModelSpec& spec, const StateSpace& ss, double beta,
                                   const SpectralData& sd) {
  TransferOperator op = build_annealed_operator(spec, ss, beta);
  op.kind = OperatorKind::Normalized;
  for (std::size_t x = 0; x < ss.size; ++x) {
    for (int e = 0; e < ss.base; ++e) {
      const std::size_t y = ss.successor(x, e);
      op.weights[x * ss.base + e] *= sd.right[y] / (sd.eigenvalue * sd.right[x]);
    }
  }
  return op;
}

namespace {

double sup_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

// Iterate v <- Av / ||Av||_inf. For a positive vector v the ratios
// (Av)_i / v_i bracket the dominant eigenvalue (Collatz-Wielandt), so the
// spread of the ratios is a certified error bound and drives the stop.
double power_iterate(const TransferOperator& op, bool left, std::vector<double>& v,
                     double tol, int max_iterations, int& iterations) {
  std::vector<double> w;
  double lambda = 0.0;
  int settled = 0;
  for (int it = 1; it <= max_iterations; ++it) {
    if (left)
      op.apply_left(v, w);
    else
      op.apply_right(v, w);
    double rmin = std::numeric_limits<double>::infinity();
    double rmax = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double r = w[i] / v[i];
      rmin = std::min(rmin, r);
      rmax = std::max(rmax, r);
    }
    lambda = 0.5 * (rmin + rmax);
    if (!(lambda > 0.0) || !std::isfinite(lambda))
      throw std::runtime_error("power iteration degenerated (reducible or corrupt operator)");
    const double norm = sup_norm(w);
    for (auto& x : w) x /= norm;
    v.swap(w);
    iterations = it;
    if (rmax - rmin <= tol * lambda) {
      if (++settled >= 2) return lambda;
    } else {
      settled = 0;
    }
  }
  throw std::runtime_error("power iteration failed to converge");
}

}  // namespace

SpectralData perron_frobenius(const TransferOperator& op, double tol, int max_iterations) {
  const auto& ss = *op.space;
  for (double w : op.weights)
    if (!(w > 0.0)) throw std::runtime_error("transfer operator has nonpositive entries");

  SpectralData sd;
  sd.right.assign(ss.size, 1.0);
  int it_r = 0, it_l = 0;
  const double lam_r = power_iterate(op, false, sd.right, tol, max_iterations, it_r);
  sd.left.assign(ss.size, 1.0);
  const double lam_l = power_iterate(op, true, sd.left, tol, max_iterations, it_l);
  sd.eigenvalue = lam_r;
  sd.iterations = it_r + it_l;
  if (std::fabs(lam_l - lam_r) > 1e-10 * lam_r)
    throw std::runtime_error("left/right eigenvalue mismatch in power iteration");

  // fix the scale: ||r||_inf = 1 already; set l . r = 1
  double dot = 0.0;
  for (std::size_t i = 0; i < ss.size; ++i) dot += sd.left[i] * sd.right[i];
  for (auto& x : sd.left) x /= dot;

  sd.pi.resize(ss.size);
  for (std::size_t i = 0; i < ss.size; ++i) sd.pi[i] = sd.left[i] * sd.right[i];

  std::vector<double> w;
  op.apply_right(sd.right, w);
  double res = 0.0;
  for (std::size_t i = 0; i < ss.size; ++i)
    res = std::max(res, std::fabs(w[i] - sd.eigenvalue * sd.right[i]));
  op.apply_left(sd.left, w);
  double lres = 0.0, lmax = 0.0;
  for (std::size_t i = 0; i < ss.size; ++i) {
    lres = std::max(lres, std::fabs(w[i] - sd.eigenvalue * sd.left[i]));
    lmax = std::max(lmax, std::fabs(sd.left[i]));
  }
  sd.residual = std::max(res / sd.eigenvalue, lres / (sd.eigenvalue * lmax));
  if (!(sd.residual <= 1e-11))
    throw std::runtime_error("perron_frobenius: residual " + format_g17(sd.residual) +
                             " above tolerance");
  return sd;
}

namespace {

// d/dgamma at gamma=1 of log of an entry: log K(part) - log lambda + beta^2/2
// + 2 beta^2 G(y); star slots pick up the extra conditional-entropy term.
RelevanceDerivative derivative_impl(const ModelSpec& spec, const StateSpace& ss, double beta,
                                    const SpectralData& sd) {
  const double b2 = beta * beta;
  const double log_lambda = std::log(sd.eigenvalue);
  const double h_kq = star_kernel_entropy(spec);

  const TransferOperator qhat1 = build_annealed_operator(spec, ss, beta);

  RelevanceDerivative out;
  double direct = 0.0;
  for (std::size_t x = 0; x < ss.size; ++x) {
    for (int e = 0; e < ss.base; ++e) {
      const std::size_t y = ss.successor(x, e);
      const double logk =
          (e == ss.star()) ? std::log(spec.k_star) : spec.log_kernel(e + 1);
      double factor = 0.5 * b2 - log_lambda + 2.0 * b2 * ss.g_values[y] + logk;
      if (e == ss.star()) factor -= h_kq;
      direct += sd.left[x] * factor * (qhat1.weight(x, e) / sd.eigenvalue) * sd.right[y];
    }
  }
  out.direct = direct;

  double mean_g = 0.0, star_mass = 0.0;
  for (std::size_t x = 0; x < ss.size; ++x) {
    mean_g += sd.pi[x] * ss.g_values[x];
    if (ss.last_symbol(x) == ss.star()) star_mass += sd.pi[x];
  }
  const TransferOperator qt = normalized_kernel(spec, ss, beta, sd);
  double chain_entropy = 0.0;
  for (std::size_t x = 0; x < ss.size; ++x) {
    for (int e = 0; e < ss.base; ++e) {
      const double p = qt.weight(x, e);
      if (p > 0.0) chain_entropy -= sd.pi[x] * p * std::log(p);
    }
  }
  out.mean_g = mean_g;
  out.star_mass = star_mass;
  out.chain_entropy = chain_entropy;
  out.relative_entropy = b2 * mean_g - log_lambda;
  out.entropy_form = 0.5 * b2 + b2 * mean_g - chain_entropy - h_kq * star_mass;
  return out;
}

}  // namespace

RelevanceDerivative relevance_derivative(const ModelSpec& spec, const StateSpace& ss,
                                         double beta, const SpectralData& sd) {
  return derivative_impl(spec, ss, beta, sd);
}

RelevanceDerivative relevance_derivative(const ModelSpec& spec, const StateSpace& ss,
                                         double beta) {
  const SpectralData sd = perron_frobenius(build_annealed_operator(spec, ss, beta));
  return derivative_impl(spec, ss, beta, sd);
}

std::vector<CurvePoint> annealed_critical_curve(const ModelSpec& spec, const StateSpace& ss,
                                                const std::vector<double>& betas) {
  std::vector<CurvePoint> out(betas.size());
  for (std::size_t i = 0; i < betas.size(); ++i) {
    const double beta = betas[i];
    if (beta < 0.0) throw std::invalid_argument("beta grid must be nonnegative");
    const SpectralData sd = perron_frobenius(build_annealed_operator(spec, ss, beta));
    CurvePoint p;
    p.beta = beta;
    p.lambda = sd.eigenvalue;
    p.h_c_a = -0.5 * beta * beta - std::log(sd.eigenvalue);
    p.d_gamma_at_1 = derivative_impl(spec, ss, beta, sd).direct;
    out[i] = p;
  }
  for (std::size_t i = 1; i < out.size(); ++i)
    out[i].beta0_bracket = (out[i - 1].d_gamma_at_1 < 0.0) != (out[i].d_gamma_at_1 < 0.0);
  return out;
}

double find_beta0(const ModelSpec& spec, const StateSpace& ss, double beta_lo, double beta_hi,
                  double tol) {
  auto deriv = [&](double b) { return relevance_derivative(spec, ss, b).direct; };
  double flo = deriv(beta_lo);
  double fhi = deriv(beta_hi);
  if ((flo < 0.0) == (fhi < 0.0))
    throw std::invalid_argument("find_beta0: no sign change over the bracket");
  while (beta_hi - beta_lo > tol) {
    const double mid = 0.5 * (beta_lo + beta_hi);
    const double fm = deriv(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      beta_lo = mid;
      flo = fm;
    } else {
      beta_hi = mid;
    }
  }
  return 0.5 * (beta_lo + beta_hi);
}

Certificate make_certificate(double beta, double gamma, double lambda_value) {
  Certificate c;
  c.beta = beta;
  c.gamma = gamma;
  c.value = lambda_value;
  c.margin = 1.0 - lambda_value;
  c.verdict =
      (lambda_value < 1.0 - kCertificateSafety) ? Verdict::Relevant : Verdict::Inconclusive;
  return c;
}

std::vector<Certificate> relevance_grid(const ModelSpec& spec, const StateSpace& ss,
                                        const std::vector<double>& betas,
                                        const std::vector<double>& gammas, unsigned threads) {
  for (double g : gammas)
    if (!(g > 1.0 / (1.0 + spec.alpha)) || !(g < 1.0))
      throw std::invalid_argument("relevance_grid: gamma must lie in (1/(1+alpha), 1)");
  std::vector<Certificate> out(betas.size() * gammas.size());
  parallel_for(betas.size(), threads, [&](std::size_t i) {
    const double beta = betas[i];
    const SpectralData sd = perron_frobenius(build_annealed_operator(spec, ss, beta));
    for (std::size_t j = 0; j < gammas.size(); ++j) {
      const TransferOperator qf =
          build_fractional_operator(spec, ss, beta, gammas[j], sd.eigenvalue);
      const SpectralData fsd = perron_frobenius(qf);
      out[i * gammas.size() + j] = make_certificate(beta, gammas[j], fsd.eigenvalue);
    }
  });
  return out;
}

std::string verdict_name(Verdict v) {
  return v == Verdict::Relevant ? "relevant" : "inconclusive";
}

}  // namespace pinning
