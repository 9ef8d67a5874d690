#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "seesim/model.hpp"
#include "seesim/simulator.hpp"
#include "seesim/special_functions.hpp"
#include "seesim/spectral_space.hpp"

namespace seesim {

/// Deterministic pairwise tree reduction; independent of thread scheduling.
double pairwise_sum(std::span<const double> values);

/// Monte Carlo estimate of || . ||_{L^p(P;H)} from per-sample H-norms at one
/// time node, with a delta-method standard error on the p-th moment.
struct MCNormEstimate {
  double p = 2.0;
  int t_index = 0;
  double value = 0.0;
  double std_error = 0.0;
  int samples = 0;
};

MCNormEstimate mc_lp_norm(std::span<const double> sample_norms, double p, int t_index);

/// Convenience overload over a simulated ensemble: the H-norm of path
/// `mask` at node t_index.
MCNormEstimate mc_lp_norm(const std::vector<DerivativeSystem>& ensemble, std::uint32_t mask,
                          double p, int t_index);

struct OlsFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // root-mean-square residual
};

/// Ordinary least squares of log(value) against log(t); needs >= 4 positive
/// points.
OlsFit exponent_fit(std::span<const double> ts, std::span<const double> values);

/// Taylor-remainder ladder for the Frechet property: common-noise
/// remainders R(eps) and the fitted slope of log R vs log eps.
struct FdFrechetReport {
  std::vector<double> eps;
  std::vector<double> remainder;  // R(eps)
  double slope = 0.0;
  double intercept = 0.0;
};

FdFrechetReport fd_frechet_check(const DiagonalOperator& op, const Model& model,
                                 const TimeGrid& grid, const Vec& x,
                                 const std::vector<Vec>& directions, int k, int samples,
                                 std::uint64_t seed, std::span<const double> eps_ladder,
                                 double p = 2.0);

/// Common-noise weighted Lipschitz ratio of Eq-style item (iv):
///   sup_t t^{iota^{(delta,0)}} ||X^{k,(x,u)}_t - X^{k,(y,u)}_t||_{L^p}
///        / ( ||x-y||_H prod ||u_i||_{H_{-delta_i}} ).
double lipschitz_probe(const DiagonalOperator& op, const Model& model, const TimeGrid& grid,
                       const Vec& x, const Vec& y, const std::vector<Vec>& directions, int k,
                       std::span<const double> deltas, double p, int samples,
                       std::uint64_t seed, double alpha = 0.0, double beta = 0.0);

/// Weighted-ratio report over a schedule of eigenmode probe tuples.
struct RatioReport {
  int k = 0;
  std::vector<double> deltas;
  std::vector<std::vector<int>> probes;  // 1-based eigenmode tuples
  std::vector<double> times;             // grid nodes t_1..t_steps
  Eigen::MatrixXd ratios;                // probes x times, weighted
  Eigen::MatrixXd std_errors;            // probes x times, same weighting
  Eigen::MatrixXd raw_norms;             // probes x times, unweighted L^p norms
  std::vector<double> denominators;      // per-probe prod ||e_m||_{H_{-delta}}
  double sup = 0.0;
  double sup_std_error = 0.0;
  int argmax_probe = 0;
  int argmax_t = 0;
};

RatioReport regularity_probe(const DiagonalOperator& op, const Model& model,
                             const TimeGrid& grid, const Vec& x, int k,
                             std::span<const double> deltas, double p, int samples,
                             std::uint64_t seed,
                             const std::vector<std::vector<int>>& mode_schedule,
                             double alpha = 0.0, double beta = 0.0);

/// Certified evaluation of the recursive a-priori bound (finite or +inf).
/// Requires a model with certified C_b norms.
double bound_rhs(const DiagonalOperator& op, const Model& model, int k,
                 std::span<const double> deltas, double p, double T,
                 double alpha = 0.0, double beta = 0.0);

struct BoundCheck {
  double lhs = 0.0;
  double lhs_std_error = 0.0;
  double rhs = 0.0;
  bool pass = false;
};

/// MC-estimated LHS of the a-priori inequality against the certified RHS,
/// with a 3-sigma sampling slack.
BoundCheck check_apriori_bound(const DiagonalOperator& op, const Model& model,
                               const TimeGrid& grid, const Vec& x, int k,
                               std::span<const double> deltas, double p, int samples,
                               std::uint64_t seed,
                               const std::vector<std::vector<int>>& mode_schedule,
                               double alpha = 0.0, double beta = 0.0);

}  // namespace seesim
