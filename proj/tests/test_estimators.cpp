#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "seesim/estimators.hpp"
#include "seesim/partitions.hpp"

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

// Independent transcription of the recursive a-priori bound, written
// directly off the displayed inequality with no memoization.
double bound_rhs_oracle(const DiagonalOperator& op, const Model& model,
                        const std::vector<double>& deltas, double p, double T,
                        double alpha, double beta) {
  const int k = static_cast<int>(deltas.size());
  double delta_sum = std::accumulate(deltas.begin(), deltas.end(), 0.0);
  double lambda = delta_sum - (k >= 2 ? std::min(1.0 - alpha, 0.5 - beta) : 0.0);

  BoundParams prm;
  prm.alpha = alpha;
  prm.beta = beta;
  prm.lambda = lambda;
  prm.p = p;
  prm.T = T;
  prm.eta = op.eta;
  prm.L = model.cb_seminorm_drift(1, op, alpha);
  prm.Lhat = model.cb_seminorm_diffusion(1, op, beta);
  double pre = theta(prm, chi(op, alpha, T), chi(op, beta, T));

  double bracket = (k == 1) ? chi(op, deltas[0], T) : 0.0;
  double sum = 0.0;
  for (const Partition& pi : enumerate_proper_partitions(k)) {
    double prod = 1.0;
    for (const auto& block : pi.blocks) {
      std::vector<double> sub;
      for (int idx : block) sub.push_back(deltas[idx - 1]);
      prod *= bound_rhs_oracle(op, model, sub, p * pi.block_count(), T, alpha, beta);
    }
    sum += prod;
  }
  double coeff =
      chi(op, alpha, T) * beta_fn(1.0 - alpha, 1.0 - delta_sum) * model.cb_norm_drift(k, op, alpha) +
      chi(op, beta, T) *
          std::sqrt(p * (p - 1.0) / 2.0 * beta_fn(1.0 - 2.0 * beta, 1.0 - 2.0 * delta_sum)) *
          model.cb_norm_diffusion(k, op, beta);
  bracket += std::max(std::pow(T, k), 1.0) * coeff * sum;
  return pre * bracket;
}

}  // namespace

TEST_CASE("pairwise_sum") {
  CHECK(pairwise_sum({}) == 0.0);
  std::vector<double> v(1000);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (auto& x : v) x = unif(rng);
  double plain = std::accumulate(v.begin(), v.end(), 0.0);
  CHECK(pairwise_sum(v) == doctest::Approx(plain).epsilon(1e-12));
  CHECK(pairwise_sum(v) == pairwise_sum(v));  // bit-stable
}

TEST_CASE("mc_lp_norm against direct moment computation") {
  std::vector<double> norms = {1.0, 2.0, 3.0, 4.0};
  MCNormEstimate est = mc_lp_norm(norms, 2.0, 7);
  CHECK(est.value == doctest::Approx(std::sqrt((1.0 + 4.0 + 9.0 + 16.0) / 4.0)).epsilon(1e-15));
  CHECK(est.t_index == 7);
  CHECK(est.samples == 4);
  // Delta method: se(value) = se(moment) * value / (p * moment).
  double moment = 30.0 / 4.0;
  double var = ((1 - moment) * (1 - moment) + (4 - moment) * (4 - moment) +
                (9 - moment) * (9 - moment) + (16 - moment) * (16 - moment)) / 3.0;
  double se_moment = std::sqrt(var / 4.0);
  CHECK(est.std_error == doctest::Approx(se_moment * est.value / (2.0 * moment)).epsilon(1e-13));

  // Constant ensemble: exact value, zero error; p = 4 reweights correctly.
  std::vector<double> constant(16, 2.5);
  MCNormEstimate c = mc_lp_norm(constant, 4.0, 0);
  CHECK(c.value == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(c.std_error == 0.0);
  CHECK_THROWS(mc_lp_norm(std::vector<double>{}, 2.0, 0));
  CHECK_THROWS(mc_lp_norm(norms, 0.5, 0));
}

TEST_CASE("exponent_fit recovers exact power laws") {
  std::vector<double> ts = {0.1, 0.2, 0.4, 0.8, 1.6};
  std::vector<double> vs;
  for (double t : ts) vs.push_back(3.0 * std::pow(t, 1.7));
  OlsFit fit = exponent_fit(ts, vs);
  CHECK(fit.slope == doctest::Approx(1.7).epsilon(1e-12));
  CHECK(fit.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(fit.residual <= 1e-12);
  CHECK_THROWS(exponent_fit(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}));
  CHECK_THROWS(exponent_fit(std::vector<double>{1, 2, 3, -4}, std::vector<double>{1, 2, 3, 4}));
}

TEST_CASE("fd_frechet_check: affine model has vanishing remainders") {
  auto op = small_op(6);
  auto model = CanonicalModel::make_default(6, 6, 2, Profile::Linear, 1.0, 3);
  TimeGrid grid{1.0, 32};
  std::mt19937_64 rng(3);
  Vec x = random_vec(rng, 6);
  Vec u = random_vec(rng, 6);
  std::vector<double> ladder = {1e-1, 1e-2, 1e-3};
  FdFrechetReport report = fd_frechet_check(op, model, grid, x, {u}, 1, 4, 50, ladder, 2.0);
  REQUIRE(report.remainder.size() == 3);
  for (double r : report.remainder) CHECK(r <= 1e-11);
}

TEST_CASE("fd_frechet_check: smooth model remainders decay roughly linearly") {
  auto op = small_op(6);
  auto model = CanonicalModel::make_default(6, 6, 2, Profile::Sin, 1.5, 3);
  TimeGrid grid{1.0, 32};
  std::mt19937_64 rng(5);
  Vec x = random_vec(rng, 6);
  Vec u = random_vec(rng, 6);
  std::vector<double> ladder = {1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
  FdFrechetReport report = fd_frechet_check(op, model, grid, x, {u}, 1, 8, 70, ladder, 2.0);
  CHECK(report.slope > 0.8);
  CHECK(report.remainder.back() < 0.1 * report.remainder.front());
  CHECK_THROWS(fd_frechet_check(op, model, grid, x, {u}, 1, 4, 1,
                                std::vector<double>{1e-2, 1e-1}, 2.0));
}

TEST_CASE("lipschitz_probe vanishes for the affine model") {
  auto op = small_op(6);
  auto model = CanonicalModel::make_default(6, 6, 2, Profile::Linear, 1.0, 3);
  TimeGrid grid{1.0, 16};
  std::mt19937_64 rng(7);
  Vec x = random_vec(rng, 6);
  Vec y = random_vec(rng, 6);
  Vec u = random_vec(rng, 6);
  std::vector<double> deltas = {0.2};
  CHECK(lipschitz_probe(op, model, grid, x, y, {u}, 1, deltas, 2.0, 4, 90) <= 1e-11);
  CHECK_THROWS(lipschitz_probe(op, model, grid, x, x, {u}, 1, deltas, 2.0, 4, 90));
}

TEST_CASE("lipschitz_probe is finite and positive for the smooth model") {
  auto op = small_op(6);
  auto model = CanonicalModel::make_default(6, 6, 2, Profile::Sin, 1.5, 3);
  TimeGrid grid{1.0, 16};
  std::mt19937_64 rng(9);
  Vec x = random_vec(rng, 6);
  Vec y = x + 0.5 * Vec::Unit(6, 0);
  Vec u = random_vec(rng, 6);
  std::vector<double> deltas = {0.2};
  double r = lipschitz_probe(op, model, grid, x, y, {u}, 1, deltas, 2.0, 8, 91);
  CHECK(r > 0.0);
  CHECK(std::isfinite(r));
}

TEST_CASE("regularity_probe closed form on the additive model") {
  auto op = small_op(8);
  auto model = CanonicalModel::make_default(8, 8, 0, Profile::Sin, 1.0, 2);
  TimeGrid grid{1.0, 64};
  Vec x = Vec::Zero(8);
  double delta = 0.2;
  std::vector<double> deltas = {delta};
  std::vector<std::vector<int>> schedule = {{1}, {2}, {4}};
  RatioReport report = regularity_probe(op, model, grid, x, 1, deltas, 2.0, 2, 11, schedule);
  REQUIRE(report.probes.size() == 3);
  REQUIRE(report.times.size() == 64);
  for (size_t pr = 0; pr < schedule.size(); ++pr) {
    int m = schedule[pr][0];
    double a = op.eigenvalues[m - 1];
    // X^1_t = e^{tA} e_m exactly, so the weighted ratio has a closed form.
    double expect = 0.0;
    for (int n = 1; n <= grid.steps; ++n) {
      double t = grid.time(n);
      expect = std::max(expect, std::pow(t, delta) * std::exp(a * t) * std::pow(-a, delta));
    }
    double sup = report.ratios.row(pr).maxCoeff();
    CHECK(sup == doctest::Approx(expect).epsilon(1e-10));
    CHECK(sup <= chi(op, delta, grid.T) * (1.0 + 1e-12));
    CHECK(report.std_errors.row(pr).maxCoeff() <= 1e-14);
    CHECK(report.denominators[pr] == doctest::Approx(std::pow(-a, -delta)).epsilon(1e-13));
  }
  CHECK(report.sup == doctest::Approx(report.ratios.maxCoeff()).epsilon(1e-15));
  CHECK_THROWS(regularity_probe(op, model, grid, x, 1, deltas, 2.0, 2, 11, {{1, 2}}));
  CHECK_THROWS(regularity_probe(op, model, grid, x, 1, deltas, 2.0, 2, 11, {{99}}));
}

TEST_CASE("bound_rhs agrees with an independent transcription") {
  auto op = small_op(8);
  // Mild diffusion keeps the deeply nested constants representable in double
  // even at the largest recursion exponents exercised here.
  CanonicalModel base = CanonicalModel::make_default(8, 8, 2, Profile::Sin, 1.5, 3);
  CanonicalModel::Spec spec = base.spec();
  for (auto& b : spec.diffusion_outputs) b *= 0.15;
  CanonicalModel model(spec, 8);

  struct Case { std::vector<double> deltas; double p, alpha, beta; };
  std::vector<Case> cases = {
      {{0.0}, 2.0, 0.0, 0.0},
      {{0.2}, 2.0, 0.0, 0.0},
      {{0.2}, 4.0, 0.25, 0.1},
      {{0.0, 0.0}, 2.0, 0.0, 0.0},
      {{0.2, 0.1}, 2.0, 0.1, 0.05},
      {{0.1, 0.1, 0.1}, 2.0, 0.0, 0.0},
  };
  for (const auto& c : cases) {
    double got = bound_rhs(op, model, static_cast<int>(c.deltas.size()), c.deltas, c.p, 1.0,
                           c.alpha, c.beta);
    double want = bound_rhs_oracle(op, model, c.deltas, c.p, 1.0, c.alpha, c.beta);
    CHECK(got == doctest::Approx(want).epsilon(1e-10));
    CHECK(std::isfinite(got));
    CHECK(got > 0.0);
  }
  // Desk-strength diffusion: larger but still finite at p = 2.
  for (std::vector<double> deltas : {std::vector<double>{0.2}, std::vector<double>{0.0, 0.0}}) {
    double got = bound_rhs(op, base, static_cast<int>(deltas.size()), deltas, 2.0, 1.0);
    double want = bound_rhs_oracle(op, base, deltas, 2.0, 1.0, 0.0, 0.0);
    CHECK(got == doctest::Approx(want).epsilon(1e-10));
    CHECK(std::isfinite(got));
  }
  CHECK_THROWS(bound_rhs(op, model, 0, std::vector<double>{}, 2.0, 1.0));
  CHECK_THROWS(bound_rhs(op, model, 2, std::vector<double>{0.1}, 2.0, 1.0));
}

TEST_CASE("check_apriori_bound passes on the additive model") {
  auto op = small_op(8);
  auto model = CanonicalModel::make_default(8, 8, 0, Profile::Sin, 1.0, 2);
  TimeGrid grid{1.0, 32};
  Vec x = Vec::Zero(8);
  std::vector<double> deltas = {0.2};
  BoundCheck check =
      check_apriori_bound(op, model, grid, x, 1, deltas, 2.0, 2, 13, {{1}, {2}, {4}});
  CHECK(check.pass);
  CHECK(check.lhs <= chi(op, 0.2, 1.0) * (1.0 + 1e-12));
  CHECK(check.rhs >= check.lhs);
}
