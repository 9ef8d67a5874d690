#pragma once

#include <Eigen/Dense>

namespace seesim {

using Vec = Eigen::VectorXd;

/// The generator A on a truncated eigenbasis: a_1 >= a_2 >= ... with every
/// a_i strictly below the spectral shift eta.
struct DiagonalOperator {
  Vec eigenvalues;
  double eta = 0.0;

  int modes() const { return static_cast<int>(eigenvalues.size()); }
  void validate() const;

  /// Dirichlet Laplacian on (0,1): a_i = -pi^2 i^2, eta = 0.
  static DiagonalOperator dirichlet_laplacian(int n_modes);
};

/// e^{tA} v, coordinate-wise. t = 0 is the identity.
Vec semigroup_apply(const DiagonalOperator& op, double t, const Vec& v);

/// (eta - A)^r v; r may be negative.
Vec frac_power_apply(const DiagonalOperator& op, double r, const Vec& v);

/// Interpolation-space norm ||v||_{H_r} = ( sum_i (eta-a_i)^{2r} v_i^2 )^{1/2}.
double h_norm(const DiagonalOperator& op, double r, const Vec& v);

/// Throws if v contains NaN or Inf.
void require_finite(const Vec& v, const char* what);

}  // namespace seesim
