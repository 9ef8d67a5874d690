#include <doctest.h>

#include <cmath>
#include <random>

#include "seesim/simulator.hpp"

using namespace seesim;

namespace {

Vec random_vec(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = normal(rng);
  return v;
}

DiagonalOperator small_op(int n = 8) {
  DiagonalOperator op;
  op.eigenvalues.resize(n);
  for (int i = 0; i < n; ++i) op.eigenvalues[i] = -static_cast<double>((i + 1) * (i + 1));
  op.eta = 0.0;
  return op;
}

// Rank-0 model: F = 0, B = diag(q) additive noise. Everything about the
// scheme is solvable in closed form.
CanonicalModel additive_model(int n, double decay = 1.0, int n_max = 3) {
  return CanonicalModel::make_default(n, n, 0, Profile::Sin, decay, n_max);
}

}  // namespace

TEST_CASE("time grid") {
  TimeGrid grid{2.0, 8};
  CHECK(grid.h() == doctest::Approx(0.25));
  CHECK(grid.time(0) == 0.0);
  CHECK(grid.time(8) == 2.0);
  CHECK(grid.time(3) == doctest::Approx(0.75));
  CHECK_THROWS(TimeGrid{0.0, 8}.validate());
  CHECK_THROWS(TimeGrid{1.0, 0}.validate());
}

TEST_CASE("noise sampling: shape, determinism, moments") {
  TimeGrid grid{1.0, 64};
  NoiseSample a = sample_noise(42, grid, 6);
  NoiseSample b = sample_noise(42, grid, 6);
  NoiseSample c = sample_noise(43, grid, 6);
  CHECK(a.increments.rows() == 64);
  CHECK(a.increments.cols() == 6);
  CHECK((a.increments - b.increments).norm() == 0.0);
  CHECK((a.increments - c.increments).norm() > 0.0);

  // Pooled moments across a larger pull: mean ~ 0, variance ~ h.
  TimeGrid fine{1.0, 1000};
  NoiseSample big = sample_noise(7, fine, 32);
  double mean = big.increments.mean();
  double var = (big.increments.array() - mean).square().sum() / (big.increments.size() - 1);
  CHECK(std::abs(mean) < 5.0 * std::sqrt(fine.h() / big.increments.size()));
  CHECK(var == doctest::Approx(fine.h()).epsilon(0.05));
  CHECK_THROWS(sample_noise(0, grid, 0));
}

TEST_CASE("base path matches the closed-form additive recursion") {
  auto op = small_op(4);
  auto model = additive_model(4);
  TimeGrid grid{1.0, 32};
  std::mt19937_64 rng(3);
  Vec x = random_vec(rng, 4);
  NoiseSample noise = sample_noise(99, grid, 4);

  DerivativeSystem sys = simulate_system(op, model, grid, x, {}, 0, noise);
  CHECK(sys.paths.size() == 1);
  CHECK((sys.path(0).row(0).transpose() - x).norm() == 0.0);

  const Vec& q = model.spec().additive;
  for (int i = 0; i < 4; ++i) {
    double e = std::exp(op.eigenvalues[i] * grid.h());
    double state = x[i];
    for (int n = 0; n < grid.steps; ++n) {
      state = e * (state + q[i] * noise.increments(n, i));
      CHECK(sys.path(0)(n + 1, i) == doctest::Approx(state).epsilon(1e-13));
    }
  }

  // step_base agrees with the first row transition.
  Vec one = step_base(op, model, grid, x, noise.increments.row(0).transpose());
  CHECK((one - sys.path(0).row(1).transpose()).norm() <= 1e-15 * one.norm());
}

TEST_CASE("first derivative of the additive model is the deterministic semigroup orbit") {
  auto op = small_op(6);
  auto model = additive_model(6);
  TimeGrid grid{1.0, 16};
  std::mt19937_64 rng(5);
  Vec x = random_vec(rng, 6);
  Vec u = random_vec(rng, 6);
  NoiseSample noise = sample_noise(17, grid, 6);

  DerivativeSystem sys = simulate_system(op, model, grid, x, {u}, 1, noise);
  CHECK(sys.paths.size() == 2);
  CHECK((sys.path(1).row(0).transpose() - u).norm() == 0.0);
  for (int n = 0; n <= grid.steps; ++n) {
    Vec expect = semigroup_apply(op, grid.time(n), u);
    CHECK((sys.path(1).row(n).transpose() - expect).norm() <= 1e-12 * expect.norm());
  }
}

TEST_CASE("affine model: flow differences equal derivative paths exactly") {
  auto op = small_op(6);
  auto model = CanonicalModel::make_default(6, 6, 2, Profile::Linear, 1.0, 3);
  TimeGrid grid{1.0, 32};
  std::mt19937_64 rng(9);
  Vec x = random_vec(rng, 6);
  Vec u = random_vec(rng, 6);
  NoiseSample noise = sample_noise(23, grid, 6);

  DerivativeSystem base = simulate_system(op, model, grid, x, {}, 0, noise);
  DerivativeSystem shifted = simulate_system(op, model, grid, Vec(x + u), {}, 0, noise);
  DerivativeSystem deriv = simulate_system(op, model, grid, x, {u}, 1, noise);
  for (int n = 0; n <= grid.steps; ++n) {
    Vec diff = (shifted.path(0).row(n) - base.path(0).row(n)).transpose();
    Vec d = deriv.path(1).row(n).transpose();
    CHECK((diff - d).norm() <= 1e-11 * (d.norm() + 1.0));
  }
  // Second derivative of an affine flow vanishes identically.
  std::mt19937_64 rng2(10);
  Vec v = random_vec(rng2, 6);
  DerivativeSystem second = simulate_system(op, model, grid, x, {u, v}, 2, noise);
  CHECK(second.path(3).norm() == 0.0);
}

TEST_CASE("k = 2 multilinearity under common noise") {
  auto op = small_op(6);
  auto model = CanonicalModel::make_default(6, 6, 2, Profile::Sin, 1.5, 3);
  TimeGrid grid{1.0, 32};
  std::mt19937_64 rng(13);
  Vec x = random_vec(rng, 6);
  Vec u = random_vec(rng, 6), v = random_vec(rng, 6), w = random_vec(rng, 6);
  NoiseSample noise = sample_noise(31, grid, 6);

  DerivativeSystem combo = simulate_system(op, model, grid, x, {Vec(2.0 * u + w), v}, 2, noise);
  DerivativeSystem uv = simulate_system(op, model, grid, x, {u, v}, 2, noise);
  DerivativeSystem wv = simulate_system(op, model, grid, x, {w, v}, 2, noise);

  // Subsets containing index 1 are linear in u_1; subsets without it agree.
  for (std::uint32_t mask : {1u, 3u}) {
    Eigen::MatrixXd expect = 2.0 * uv.path(mask) + wv.path(mask);
    CHECK((combo.path(mask) - expect).norm() <= 1e-11 * expect.norm());
  }
  for (std::uint32_t mask : {0u, 2u}) {
    CHECK((combo.path(mask) - uv.path(mask)).norm() == 0.0);
    CHECK((combo.path(mask) - wv.path(mask)).norm() == 0.0);
  }
}

TEST_CASE("k = 2 symmetry: swapping directions permutes subset paths bit-identically") {
  auto op = small_op(6);
  auto model = CanonicalModel::make_default(6, 6, 2, Profile::Tanh, 1.5, 3);
  TimeGrid grid{1.0, 32};
  std::mt19937_64 rng(15);
  Vec x = random_vec(rng, 6);
  Vec u = random_vec(rng, 6), v = random_vec(rng, 6);
  NoiseSample noise = sample_noise(37, grid, 6);

  DerivativeSystem fwd = simulate_system(op, model, grid, x, {u, v}, 2, noise);
  DerivativeSystem swp = simulate_system(op, model, grid, x, {v, u}, 2, noise);
  CHECK((fwd.path(0) - swp.path(0)).norm() == 0.0);
  CHECK((fwd.path(1) - swp.path(2)).norm() == 0.0);
  CHECK((fwd.path(2) - swp.path(1)).norm() == 0.0);
  CHECK((fwd.path(3) - swp.path(3)).norm() == 0.0);
}

TEST_CASE("zero directions annihilate the corresponding subsets") {
  auto op = small_op(5);
  auto model = CanonicalModel::make_default(5, 5, 2, Profile::Sin, 1.5, 3);
  TimeGrid grid{1.0, 16};
  std::mt19937_64 rng(19);
  Vec x = random_vec(rng, 5);
  Vec v = random_vec(rng, 5);
  NoiseSample noise = sample_noise(41, grid, 5);

  DerivativeSystem sys = simulate_system(op, model, grid, x, {Vec(Vec::Zero(5)), v}, 2, noise);
  CHECK(sys.path(1).norm() == 0.0);  // X^{1,(x,0)}
  CHECK(sys.path(3).norm() == 0.0);  // X^{2,(x,0,v)}
  CHECK(sys.path(2).norm() > 0.0);
}

TEST_CASE("input validation") {
  auto op = small_op(4);
  auto model = CanonicalModel::make_default(4, 4, 1, Profile::Sin, 1.0, 2);
  TimeGrid grid{1.0, 8};
  Vec x = Vec::Zero(4);
  NoiseSample noise = sample_noise(1, grid, 4);
  CHECK_THROWS(simulate_system(op, model, grid, x, {x, x, x}, 3, noise));  // k > n_max
  CHECK_THROWS(simulate_system(op, model, grid, x, {}, 1, noise));         // missing direction
  CHECK_THROWS(simulate_system(op, model, grid, Vec(Vec::Zero(3)), {}, 0, noise));
  NoiseSample bad = sample_noise(1, TimeGrid{1.0, 4}, 4);
  CHECK_THROWS(simulate_system(op, model, grid, x, {}, 0, bad));
}

TEST_CASE("ensembles: ordering, determinism, threading") {
  auto op = small_op(4);
  auto model = CanonicalModel::make_default(4, 4, 1, Profile::Sin, 1.0, 2);
  TimeGrid grid{0.5, 16};
  Vec x = Vec::Ones(4);
  Vec u = Vec::Unit(4, 1);

  auto ensemble = simulate_ensemble(op, model, grid, x, {u}, 1, 6, 100);
  CHECK(ensemble.size() == 6);
  for (int m = 0; m < 6; ++m) CHECK(ensemble[m].seed == 100u + m);

  auto observe = [](const DerivativeSystem& sys) { return sys.path(1); };
  auto direct = ensemble_apply(op, model, grid, x, {u}, 1, 6, 100, observe);
  auto again = ensemble_apply(op, model, grid, x, {u}, 1, 6, 100, observe);
  for (int m = 0; m < 6; ++m) {
    CHECK((direct[m] - ensemble[m].path(1)).norm() == 0.0);
    CHECK((direct[m] - again[m]).norm() == 0.0);
  }
  CHECK(worker_count() >= 1);
}
