#include "seesim/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cstdlib>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>

namespace seesim {

void TimeGrid::validate() const {
  if (!(T > 0.0)) throw std::invalid_argument("TimeGrid: T must be positive");
  if (steps < 1) throw std::invalid_argument("TimeGrid: steps must be positive");
}

NoiseSample sample_noise(std::uint64_t seed, const TimeGrid& grid, int n_u) {
  grid.validate();
  if (n_u < 1) throw std::invalid_argument("sample_noise: N_U must be positive");
  NoiseSample out;
  out.seed = seed;
  out.increments.resize(grid.steps, n_u);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(grid.h()));
  for (int n = 0; n < grid.steps; ++n)
    for (int i = 0; i < n_u; ++i) out.increments(n, i) = normal(rng);
  return out;
}

Vec step_base(const DiagonalOperator& op, const Model& model, const TimeGrid& grid,
              const Vec& state, const Vec& noise_row) {
  Vec inner = state + grid.h() * model.drift_deriv(0, state, {}) +
              model.diffusion_deriv_apply(0, state, {}, noise_row);
  return semigroup_apply(op, grid.h(), inner);
}

namespace {

std::uint32_t block_mask(const std::vector<int>& block) {
  std::uint32_t mask = 0;
  for (int e : block) mask |= 1u << (e - 1);
  return mask;
}

Vec partition_sum(const Model& model, const std::vector<Partition>& parts,
                  const Vec& base_state, const std::function<Vec(std::uint32_t)>& sub_state,
                  const Vec* du) {
  Vec out = Vec::Zero(model.state_modes());
  std::vector<Vec> args;
  for (const Partition& p : parts) {
    args.clear();
    for (const auto& block : p.blocks) args.push_back(sub_state(block_mask(block)));
    int m = p.block_count();
    if (du == nullptr) {
      out += model.drift_deriv(m, base_state, args);
    } else {
      out += model.diffusion_deriv_apply(m, base_state, args, *du);
    }
  }
  return out;
}

}  // namespace

Vec assemble_derivative_drift(const Model& model,
                              const std::vector<Partition>& partitions_on_subset,
                              const Vec& base_state,
                              const std::function<Vec(std::uint32_t)>& sub_state) {
  return partition_sum(model, partitions_on_subset, base_state, sub_state, nullptr);
}

Vec assemble_derivative_diffusion(const Model& model,
                                  const std::vector<Partition>& partitions_on_subset,
                                  const Vec& base_state,
                                  const std::function<Vec(std::uint32_t)>& sub_state,
                                  const Vec& du) {
  return partition_sum(model, partitions_on_subset, base_state, sub_state, &du);
}

DerivativeSystem simulate_system(const DiagonalOperator& op, const Model& model,
                                 const TimeGrid& grid, const Vec& x,
                                 const std::vector<Vec>& directions, int k,
                                 const NoiseSample& noise) {
  grid.validate();
  op.validate();
  if (k < 0) throw std::invalid_argument("simulate_system: k must be nonnegative");
  if (k > model.max_order())
    throw std::invalid_argument("simulate_system: k exceeds the model capability n_max");
  if (static_cast<int>(directions.size()) != k)
    throw std::invalid_argument("simulate_system: need exactly k directions");
  const int n_state = model.state_modes();
  if (x.size() != n_state) throw std::invalid_argument("simulate_system: x dimension mismatch");
  require_finite(x, "initial value");
  for (const Vec& u : directions) {
    if (u.size() != n_state) throw std::invalid_argument("simulate_system: direction dimension mismatch");
    require_finite(u, "direction");
  }
  if (noise.increments.rows() != grid.steps || noise.increments.cols() != model.noise_modes())
    throw std::invalid_argument("simulate_system: noise sample shape mismatch");

  DerivativeSystem sys;
  sys.k = k;
  sys.x = x;
  sys.directions = directions;
  sys.grid = grid;
  sys.seed = noise.seed;

  const std::uint32_t n_subsets = 1u << k;
  sys.paths.assign(n_subsets, Eigen::MatrixXd::Zero(grid.steps + 1, n_state));

  // Relabeled partition family per nonempty subset, blocks read as masks.
  std::vector<std::vector<Partition>> subset_partitions(n_subsets);
  std::vector<std::uint32_t> order(n_subsets);
  for (std::uint32_t mask = 0; mask < n_subsets; ++mask) order[mask] = mask;
  std::sort(order.begin(), order.end(), [](std::uint32_t a, std::uint32_t b) {
    int pa = std::popcount(a), pb = std::popcount(b);
    return pa != pb ? pa < pb : a < b;
  });
  for (std::uint32_t mask = 1; mask < n_subsets; ++mask) {
    std::vector<int> subset;
    for (int i = 0; i < k; ++i)
      if (mask & (1u << i)) subset.push_back(i + 1);
    for (const Partition& p : enumerate_partitions(static_cast<int>(subset.size())))
      subset_partitions[mask].push_back(relabel_to_subset(p, subset));
  }

  // Initial conditions: x for the base process, u_i for singletons, 0 above.
  sys.paths[0].row(0) = x.transpose();
  for (int i = 0; i < k; ++i) sys.paths[1u << i].row(0) = directions[i].transpose();

  const Vec propagator = (op.eigenvalues.array() * grid.h()).exp();
  const double h = grid.h();

  for (int n = 0; n < grid.steps; ++n) {
    const Vec base_state = sys.paths[0].row(n).transpose();
    const Vec du = noise.increments.row(n).transpose();
    auto sub_state = [&](std::uint32_t m) -> Vec { return sys.paths[m].row(n).transpose(); };
    for (std::uint32_t mask : order) {
      Vec state = sys.paths[mask].row(n).transpose();
      Vec inner;
      if (mask == 0) {
        inner = state + h * model.drift_deriv(0, base_state, {}) +
                model.diffusion_deriv_apply(0, base_state, {}, du);
      } else {
        inner = state +
                h * assemble_derivative_drift(model, subset_partitions[mask], base_state, sub_state) +
                assemble_derivative_diffusion(model, subset_partitions[mask], base_state, sub_state, du);
      }
      Vec next = propagator.array() * inner.array();
      if (!next.allFinite())
        throw std::runtime_error("simulate_system: non-finite state at step " + std::to_string(n + 1) +
                                 ", subset mask " + std::to_string(mask) +
                                 ", seed " + std::to_string(noise.seed));
      sys.paths[mask].row(n + 1) = next.transpose();
    }
  }
  return sys;
}

std::vector<DerivativeSystem> simulate_ensemble(const DiagonalOperator& op, const Model& model,
                                                const TimeGrid& grid, const Vec& x,
                                                const std::vector<Vec>& directions, int k,
                                                int samples, std::uint64_t base_seed) {
  if (samples < 1) throw std::invalid_argument("simulate_ensemble: need at least one sample");
  std::vector<DerivativeSystem> out;
  out.reserve(samples);
  std::vector<std::string> failures;
  for (int m = 0; m < samples; ++m) {
    std::uint64_t seed = base_seed + static_cast<std::uint64_t>(m);
    try {
      out.push_back(simulate_system(op, model, grid, x, directions, k,
                                    sample_noise(seed, grid, model.noise_modes())));
    } catch (const std::exception& e) {
      failures.push_back("seed " + std::to_string(seed) + ": " + e.what());
    }
  }
  if (!failures.empty()) {
    std::string msg = "simulate_ensemble: " + std::to_string(failures.size()) + " sample(s) failed:";
    for (const auto& f : failures) msg += "\n  " + f;
    throw std::runtime_error(msg);
  }
  return out;
}

int worker_count() {
  if (const char* env = std::getenv("SEE_DERIV_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

std::vector<Eigen::MatrixXd> ensemble_apply(
    const DiagonalOperator& op, const Model& model, const TimeGrid& grid, const Vec& x,
    const std::vector<Vec>& directions, int k, int samples, std::uint64_t base_seed,
    const std::function<Eigen::MatrixXd(const DerivativeSystem&)>& observe) {
  if (samples < 1) throw std::invalid_argument("ensemble_apply: need at least one sample");
  std::vector<Eigen::MatrixXd> results(samples);
  std::vector<std::string> failures(samples);
  std::atomic<int> next{0};
  const int n_workers = std::min(worker_count(), samples);

  auto work = [&] {
    for (int m = next.fetch_add(1); m < samples; m = next.fetch_add(1)) {
      std::uint64_t seed = base_seed + static_cast<std::uint64_t>(m);
      try {
        DerivativeSystem sys = simulate_system(op, model, grid, x, directions, k,
                                               sample_noise(seed, grid, model.noise_modes()));
        results[m] = observe(sys);
      } catch (const std::exception& e) {
        failures[m] = "seed " + std::to_string(seed) + ": " + e.what();
      }
    }
  };

  if (n_workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  std::string msg;
  for (const auto& f : failures)
    if (!f.empty()) msg += "\n  " + f;
  if (!msg.empty()) throw std::runtime_error("ensemble_apply: sample failure(s):" + msg);
  return results;
}

}  // namespace seesim
