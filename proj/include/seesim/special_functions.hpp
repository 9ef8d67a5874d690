#pragma once

#include <vector>

namespace seesim {

struct DiagonalOperator;

/// Parameter pack of the Gronwall-type master constant Theta.
/// alpha/beta are the coefficient-smoothing orders, lambda the time-weight
/// exponent, L/Lhat the first-order drift/diffusion bounds.
struct BoundParams {
  double alpha = 0.0;  // in [0,1)
  double beta = 0.0;   // in [0,1/2)
  double lambda = 0.0; // in (-inf,1)
  double p = 2.0;      // >= 2
  double T = 1.0;      // > 0
  double eta = 0.0;
  double L = 0.0;      // >= 0
  double Lhat = 0.0;   // >= 0

  void validate() const;
};

/// (delta_1,...,delta_k) together with the smoothing orders; feeds the
/// time-weight exponent iota.
struct ExponentSpec {
  int k = 0;
  std::vector<double> deltas;
  double alpha = 0.0;
  double beta = 0.0;

  void validate() const;
};

/// Euler Beta function B(x,y) via the log-Gamma identity.
double beta_fn(double x, double y);

/// Generalized exponential function
///   E_{alpha,beta}[x] = 1 + sum_n x^n prod_{j<n} B(1-beta, j(1-beta)+1-alpha),
/// alpha,beta < 1, x >= 0. Series truncated once a certified relative tail
/// bound drops below 1e-14; throws if 10,000 terms do not certify the tail.
double gen_exp(double alpha, double beta, double x);

/// Semigroup smoothing constant
///   chi^{r,T}_{A,eta} = sup_{t in (0,T]} t^r ||(eta-A)^r e^{tA}||,
/// evaluated in closed form per eigenvalue (the t->0+ limit is included).
double chi(const DiagonalOperator& op, double r, double T);

/// The three-branch master constant Theta^{a,b,lambda}_{A,eta,p,T}(L,Lhat).
/// chi_a = chi(op,alpha,T), chi_b = chi(op,beta,T) are supplied by the
/// caller; the unbounded branch returns +infinity.
double theta(const BoundParams& params, double chi_a, double chi_b);

/// Distinguished value meaning J = the whole index set (J n {1..k} = {1..k}).
inline constexpr int kAllIndices = -1;

/// Time-weight exponent
///   iota^delta_J = sum_{i in J n {1..k}} delta_i
///                  - 1_{[2,inf)}(#(J n {1..k})) min{1-alpha, 1/2-beta}.
/// J holds 1-based indices; pass {kAllIndices} for the full set.
double iota(const ExponentSpec& spec, const std::vector<int>& J);

}  // namespace seesim
