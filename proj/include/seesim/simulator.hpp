#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "seesim/model.hpp"
#include "seesim/partitions.hpp"
#include "seesim/spectral_space.hpp"

namespace seesim {

struct TimeGrid {
  double T = 1.0;
  int steps = 256;

  double h() const { return T / steps; }
  double time(int n) const { return T * n / steps; }
  void validate() const;
};

/// One realization of the truncated cylindrical Wiener process: iid
/// Normal(0,h) increments, steps x N_U, reproducible from the seed.
struct NoiseSample {
  Eigen::MatrixXd increments;
  std::uint64_t seed = 0;
};

NoiseSample sample_noise(std::uint64_t seed, const TimeGrid& grid, int n_u);

/// The subset-indexed family {X^{#I,(x,u_I)} : I subseteq {1..k}} under one
/// noise realization. Subsets are bitmasks over {1..k} (bit i-1 <-> index i);
/// mask 0 is the base process. Each path matrix is (steps+1) x N.
struct DerivativeSystem {
  int k = 0;
  Vec x;
  std::vector<Vec> directions;
  TimeGrid grid;
  std::uint64_t seed = 0;
  std::vector<Eigen::MatrixXd> paths;  // indexed by subset mask, size 2^k

  const Eigen::MatrixXd& path(std::uint32_t mask) const { return paths.at(mask); }
};

/// One exponential Euler step of the base process:
///   X_{n+1} = e^{hA} ( X_n + h F(X_n) + B(X_n) dW_n ).
Vec step_base(const DiagonalOperator& op, const Model& model, const TimeGrid& grid,
              const Vec& state, const Vec& noise_row);

/// The partition-sum drift of the derivative equation for a subset I:
///   sum_{pi in Pi_{|I|} relabeled to I} F^{(#pi)}(X^0)(X^{block_1},...).
/// partitions_on_subset must already be relabeled onto I; sub_state maps a
/// block (as a bitmask) to its path state at the current step.
Vec assemble_derivative_drift(const Model& model,
                              const std::vector<Partition>& partitions_on_subset,
                              const Vec& base_state,
                              const std::function<Vec(std::uint32_t)>& sub_state);

/// The diffusion analogue, applied to the noise increment du.
Vec assemble_derivative_diffusion(const Model& model,
                                  const std::vector<Partition>& partitions_on_subset,
                                  const Vec& base_state,
                                  const std::function<Vec(std::uint32_t)>& sub_state,
                                  const Vec& du);

DerivativeSystem simulate_system(const DiagonalOperator& op, const Model& model,
                                 const TimeGrid& grid, const Vec& x,
                                 const std::vector<Vec>& directions, int k,
                                 const NoiseSample& noise);

std::vector<DerivativeSystem> simulate_ensemble(const DiagonalOperator& op, const Model& model,
                                                const TimeGrid& grid, const Vec& x,
                                                const std::vector<Vec>& directions, int k,
                                                int samples, std::uint64_t base_seed);

/// Runs `samples` independent systems (seeds base_seed + index) and keeps
/// only the per-sample observable, in sample order regardless of thread
/// scheduling. This is the memory-friendly Monte Carlo workhorse.
std::vector<Eigen::MatrixXd> ensemble_apply(
    const DiagonalOperator& op, const Model& model, const TimeGrid& grid, const Vec& x,
    const std::vector<Vec>& directions, int k, int samples, std::uint64_t base_seed,
    const std::function<Eigen::MatrixXd(const DerivativeSystem&)>& observe);

/// Worker cap: SEE_DERIV_THREADS when set, hardware concurrency otherwise.
int worker_count();

}  // namespace seesim
