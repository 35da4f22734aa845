#pragma once

#include <string>
#include <vector>

#include "pinning/model.hpp"

namespace pinning {

enum class OperatorKind { Annealed, Fractional, Normalized };

// Transfer operator on the lumped state space. Entry (x, y) is nonzero only
// on the shift pattern y = (x_2..x_q, e); it is stored per (x, slot e).
struct TransferOperator {
  OperatorKind kind = OperatorKind::Annealed;
  double beta = 0.0;
  double gamma = 1.0;  // Fractional only
  const StateSpace* space = nullptr;
  std::vector<double> weights;  // [x*base + e]

  double weight(std::size_t x, int e) const { return weights[x * space->base + e]; }
  // w(x) = sum_e weight(x,e) v(succ(x,e))
  void apply_right(const std::vector<double>& v, std::vector<double>& w) const;
  // w(y) = sum over x,e with succ(x,e)=y of weight(x,e) u(x)
  void apply_left(const std::vector<double>& u, std::vector<double>& w) const;
  std::vector<double> row_sums() const;
};

// Perron-Frobenius data: dominant eigenvalue with positive eigenvectors,
// normalized so that max|right| = 1 and left.right = 1; pi = left*right is
// the stationary law of the normalized kernel.
struct SpectralData {
  double eigenvalue = 0.0;
  std::vector<double> right;
  std::vector<double> left;
  std::vector<double> pi;
  double residual = 0.0;
  int iterations = 0;
};

// e^{beta^2 G(y)} K(y_q) on the shift pattern, K(star) on star columns.
TransferOperator build_annealed_operator(const ModelSpec& spec, const StateSpace& ss,
                                         double beta);

// Fractional-moment operator; gamma in (1/(1+alpha), 1], lambda_beta is the
// already-computed annealed eigenvalue. Star columns carry sum_{n>q} K(n)^gamma.
TransferOperator build_fractional_operator(const ModelSpec& spec, const StateSpace& ss,
                                           double beta, double gamma, double lambda_beta);

// Row-stochastic kernel Q~(x,y) = Q(x,y) r(y) / (lambda r(x)).
TransferOperator normalized_kernel(const ModelSpec& spec, const StateSpace& ss, double beta,
                                   const SpectralData& sd);

// Power iteration (forward for the right vector, transposed for the left).
SpectralData perron_frobenius(const TransferOperator& op, double tol = 1e-13,
                              int max_iterations = 100000);

struct CurvePoint {
  double beta = 0.0;
  double lambda = 0.0;
  double h_c_a = 0.0;            // -beta^2/2 - log lambda
  double d_gamma_at_1 = 0.0;     // left derivative of the fractional eigenvalue
  bool beta0_bracket = false;    // sign change of the derivative in this grid cell
};

std::vector<CurvePoint> annealed_critical_curve(const ModelSpec& spec, const StateSpace& ss,
                                                const std::vector<double>& betas);

// Both evaluations of d/dgamma Lambda(beta, gamma) at gamma = 1^-:
// the direct bilinear form and the energy/entropy decomposition. They are
// algebraically equal; keeping both exposes the identity to tests.
struct RelevanceDerivative {
  double direct = 0.0;
  double entropy_form = 0.0;
  double mean_g = 0.0;          // E_pi[G]
  double chain_entropy = 0.0;   // h of the normalized kernel
  double star_mass = 0.0;       // pi(X_q = star)
  double relative_entropy = 0.0;  // beta^2 E_pi[G] - log lambda, >= 0
};

RelevanceDerivative relevance_derivative(const ModelSpec& spec, const StateSpace& ss,
                                         double beta);
RelevanceDerivative relevance_derivative(const ModelSpec& spec, const StateSpace& ss,
                                         double beta, const SpectralData& sd);

// Root of beta -> d/dgamma Lambda(beta,gamma)|_{1^-} by bisection; the ends
// of the bracket must produce opposite signs.
double find_beta0(const ModelSpec& spec, const StateSpace& ss, double beta_lo,
                  double beta_hi, double tol = 1e-8);

enum class Verdict { Relevant, Inconclusive };

struct Certificate {
  double beta = 0.0;
  double gamma = 0.0;
  double value = 0.0;   // Lambda(beta, gamma)
  double margin = 0.0;  // 1 - value
  Verdict verdict = Verdict::Inconclusive;
};

constexpr double kCertificateSafety = 1e-6;

Certificate make_certificate(double beta, double gamma, double lambda_value);

// Certificate per (beta, gamma) cell; cells are independent and run on
// `threads` workers in a fixed order.
std::vector<Certificate> relevance_grid(const ModelSpec& spec, const StateSpace& ss,
                                        const std::vector<double>& betas,
                                        const std::vector<double>& gammas,
                                        unsigned threads = 1);

std::string verdict_name(Verdict v);

}  // namespace pinning
