#include "seesim/spectral_space.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace seesim {

void DiagonalOperator::validate() const {
  if (modes() < 1) throw std::invalid_argument("DiagonalOperator: at least one mode required");
  for (int i = 0; i < modes(); ++i) {
    if (!std::isfinite(eigenvalues[i]))
      throw std::invalid_argument("DiagonalOperator: eigenvalues must be finite");
    if (!(eigenvalues[i] < eta))
      throw std::invalid_argument("DiagonalOperator: spectrum must lie strictly below eta");
    if (i > 0 && eigenvalues[i] > eigenvalues[i - 1])
      throw std::invalid_argument("DiagonalOperator: eigenvalues must be sorted nonincreasing");
  }
}

DiagonalOperator DiagonalOperator::dirichlet_laplacian(int n_modes) {
  DiagonalOperator op;
  op.eigenvalues.resize(n_modes);
  for (int i = 0; i < n_modes; ++i) {
    double m = static_cast<double>(i + 1);
    op.eigenvalues[i] = -M_PI * M_PI * m * m;
  }
  op.eta = 0.0;
  op.validate();
  return op;
}

Vec semigroup_apply(const DiagonalOperator& op, double t, const Vec& v) {
  if (!(t >= 0.0)) throw std::domain_error("semigroup_apply: t must be nonnegative");
  return (op.eigenvalues.array() * t).exp() * v.array();
}

Vec frac_power_apply(const DiagonalOperator& op, double r, const Vec& v) {
  if (r == 0.0) return v;
  return (op.eta - op.eigenvalues.array()).pow(r) * v.array();
}

double h_norm(const DiagonalOperator& op, double r, const Vec& v) {
  if (r == 0.0) return v.norm();
  double sum = ((op.eta - op.eigenvalues.array()).pow(2.0 * r) * v.array().square()).sum();
  return std::sqrt(sum);
}

void require_finite(const Vec& v, const char* what) {
  if (!v.allFinite())
    throw std::runtime_error(std::string("non-finite entries in ") + what);
}

}  // namespace seesim
