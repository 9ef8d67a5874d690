#include "seesim/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "seesim/spectral_space.hpp"

namespace seesim {

void BoundParams::validate() const {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw std::invalid_argument("BoundParams: alpha must lie in [0,1)");
  if (!(beta >= 0.0 && beta < 0.5)) throw std::invalid_argument("BoundParams: beta must lie in [0,1/2)");
  if (!(lambda < 1.0)) throw std::invalid_argument("BoundParams: lambda must be < 1");
  if (!(p >= 2.0)) throw std::invalid_argument("BoundParams: p must be >= 2");
  if (!(T > 0.0)) throw std::invalid_argument("BoundParams: T must be positive");
  if (!(L >= 0.0) || !(Lhat >= 0.0)) throw std::invalid_argument("BoundParams: L, Lhat must be >= 0");
}

void ExponentSpec::validate() const {
  if (k < 0) throw std::invalid_argument("ExponentSpec: k must be nonnegative");
  if (static_cast<int>(deltas.size()) != k)
    throw std::invalid_argument("ExponentSpec: deltas must have length k");
  double sum = 0.0;
  for (double d : deltas) {
    if (!(d >= 0.0 && d < 0.5)) throw std::invalid_argument("ExponentSpec: each delta must lie in [0,1/2)");
    sum += d;
  }
  if (!(sum < 0.5)) throw std::invalid_argument("ExponentSpec: sum of deltas must be < 1/2");
  if (!(alpha >= 0.0 && alpha < 1.0)) throw std::invalid_argument("ExponentSpec: alpha must lie in [0,1)");
  if (!(beta >= 0.0 && beta < 0.5)) throw std::invalid_argument("ExponentSpec: beta must lie in [0,1/2)");
}

double beta_fn(double x, double y) {
  if (!(x > 0.0) || !(y > 0.0)) throw std::domain_error("beta_fn: arguments must be positive");
  return std::exp(std::lgamma(x) + std::lgamma(y) - std::lgamma(x + y));
}

double gen_exp(double alpha, double beta, double x) {
  if (!(alpha < 1.0) || !(beta < 1.0)) throw std::domain_error("gen_exp: alpha, beta must be < 1");
  if (!(x >= 0.0)) throw std::domain_error("gen_exp: x must be nonnegative");
  if (x == 0.0) return 1.0;

  constexpr double kRelTol = 1e-14;
  constexpr int kMaxTerms = 10000;

  double sum = 1.0;
  double term = 1.0;  // x^n prod_{j<n} B(1-beta, j(1-beta)+1-alpha)
  for (int n = 1; n <= kMaxTerms; ++n) {
    term *= x * beta_fn(1.0 - beta, (n - 1) * (1.0 - beta) + 1.0 - alpha);
    sum += term;
    // Ratio of consecutive terms; B(1-beta, m(1-beta)+1-alpha) is
    // nonincreasing in m, so the current ratio bounds all later ones.
    double ratio = x * beta_fn(1.0 - beta, n * (1.0 - beta) + 1.0 - alpha);
    if (ratio < 1.0) {
      double tail = term * ratio / (1.0 - ratio);
      if (tail <= kRelTol * sum) return sum;
    }
  }
  throw std::runtime_error("gen_exp: series failed to certify convergence within 10000 terms");
}

namespace {

// sup_{t in (0,T]} of t^r * mu^r * e^{a t} for a single eigenvalue a with
// mu = eta - a > 0, including the t->0+ limit analytically.
double chi_mode(double a, double mu, double r, double T) {
  if (r == 0.0) {
    // sup e^{at}: t->0+ limit 1 when a <= 0, boundary T otherwise.
    return a <= 0.0 ? 1.0 : std::exp(a * T);
  }
  double t_star = T;
  if (a < 0.0) t_star = std::min(T, r / (-a));
  return std::pow(t_star * mu, r) * std::exp(a * t_star);
}

}  // namespace

double chi(const DiagonalOperator& op, double r, double T) {
  if (!(r >= 0.0 && r <= 1.0)) throw std::domain_error("chi: r must lie in [0,1]");
  if (!(T > 0.0)) throw std::domain_error("chi: T must be positive");
  double sup = 0.0;
  for (int i = 0; i < op.modes(); ++i) {
    double a = op.eigenvalues[i];
    sup = std::max(sup, chi_mode(a, op.eta - a, r, T));
  }
  return sup;
}

double theta(const BoundParams& params, double chi_a, double chi_b) {
  params.validate();
  const double a = params.alpha, b = params.beta;
  if (params.lambda < 0.5 && params.Lhat > 0.0) {
    double inner = chi_a * params.L * std::sqrt(2.0) * std::pow(params.T, 1.0 - a) / std::sqrt(1.0 - a) +
                   chi_b * params.Lhat * std::sqrt(params.p * (params.p - 1.0) * std::pow(params.T, 1.0 - 2.0 * b));
    return std::sqrt(2.0) * std::sqrt(gen_exp(2.0 * params.lambda, std::max(a, 2.0 * b), inner * inner));
  }
  if (params.Lhat == 0.0) {
    return gen_exp(params.lambda, a, chi_a * params.L * std::pow(params.T, 1.0 - a));
  }
  return std::numeric_limits<double>::infinity();
}

double iota(const ExponentSpec& spec, const std::vector<int>& J) {
  double sum = 0.0;
  int count = 0;
  if (!J.empty() && J.front() == kAllIndices) {
    for (double d : spec.deltas) sum += d;
    count = spec.k;
  } else {
    for (int i : J) {
      if (i >= 1 && i <= spec.k) {
        sum += spec.deltas[i - 1];
        ++count;
      }
    }
  }
  if (count >= 2) sum -= std::min(1.0 - spec.alpha, 0.5 - spec.beta);
  return sum;
}

}  // namespace seesim
