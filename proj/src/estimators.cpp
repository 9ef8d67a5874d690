#include "seesim/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace seesim {

double pairwise_sum(std::span<const double> values) {
  if (values.empty()) return 0.0;
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

MCNormEstimate mc_lp_norm(std::span<const double> sample_norms, double p, int t_index) {
  if (sample_norms.size() < 1) throw std::invalid_argument("mc_lp_norm: empty ensemble");
  if (!(p >= 1.0)) throw std::invalid_argument("mc_lp_norm: p must be >= 1");
  const int m = static_cast<int>(sample_norms.size());
  std::vector<double> powered(m);
  for (int i = 0; i < m; ++i) powered[i] = std::pow(sample_norms[i], p);
  double moment = pairwise_sum(powered) / m;

  MCNormEstimate est;
  est.p = p;
  est.t_index = t_index;
  est.samples = m;
  est.value = std::pow(moment, 1.0 / p);
  if (m >= 2) {
    std::vector<double> sq(m);
    for (int i = 0; i < m; ++i) {
      double d = powered[i] - moment;
      sq[i] = d * d;
    }
    double var = pairwise_sum(sq) / (m - 1);
    double se_moment = std::sqrt(var / m);
    // Delta method on g(y) = y^{1/p}.
    est.std_error = moment > 0.0 ? se_moment * est.value / (p * moment) : 0.0;
  }
  return est;
}

MCNormEstimate mc_lp_norm(const std::vector<DerivativeSystem>& ensemble, std::uint32_t mask,
                          double p, int t_index) {
  std::vector<double> norms;
  norms.reserve(ensemble.size());
  for (const auto& sys : ensemble) norms.push_back(sys.path(mask).row(t_index).norm());
  return mc_lp_norm(norms, p, t_index);
}

OlsFit exponent_fit(std::span<const double> ts, std::span<const double> values) {
  if (ts.size() != values.size()) throw std::invalid_argument("exponent_fit: length mismatch");
  if (ts.size() < 4) throw std::invalid_argument("exponent_fit: need at least 4 points");
  const int n = static_cast<int>(ts.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<double> lx(n), ly(n);
  for (int i = 0; i < n; ++i) {
    if (!(ts[i] > 0.0) || !(values[i] > 0.0))
      throw std::invalid_argument("exponent_fit: points must be positive");
    lx[i] = std::log(ts[i]);
    ly[i] = std::log(values[i]);
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  OlsFit fit;
  double denom = n * sxx - sx * sx;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  double rss = 0.0;
  for (int i = 0; i < n; ++i) {
    double r = ly[i] - fit.intercept - fit.slope * lx[i];
    rss += r * r;
  }
  fit.residual = std::sqrt(rss / n);
  return fit;
}

namespace {

std::uint32_t full_mask(int k) { return (1u << k) - 1u; }

double direction_norm_product_h(const std::vector<Vec>& dirs) {
  double prod = 1.0;
  for (const Vec& u : dirs) prod *= u.norm();
  return prod;
}

}  // namespace

FdFrechetReport fd_frechet_check(const DiagonalOperator& op, const Model& model,
                                 const TimeGrid& grid, const Vec& x,
                                 const std::vector<Vec>& directions, int k, int samples,
                                 std::uint64_t seed, std::span<const double> eps_ladder,
                                 double p) {
  if (k < 1 || k > model.max_order())
    throw std::invalid_argument("fd_frechet_check: k must lie in [1, n_max]");
  if (static_cast<int>(directions.size()) != k)
    throw std::invalid_argument("fd_frechet_check: need k directions");
  for (size_t j = 1; j < eps_ladder.size(); ++j)
    if (!(eps_ladder[j] < eps_ladder[j - 1]) || !(eps_ladder[j] > 0.0))
      throw std::invalid_argument("fd_frechet_check: eps ladder must be strictly decreasing and positive");

  const int n_eps = static_cast<int>(eps_ladder.size());
  const std::vector<Vec> lower_dirs(directions.begin(), directions.end() - 1);
  const Vec& u_k = directions.back();
  const std::uint32_t mask_low = full_mask(k - 1);
  const std::uint32_t mask_full = full_mask(k);
  const double denom_dirs = direction_norm_product_h(directions);

  // remainders(sample) is (n_eps x steps+1): per-eps remainder norm per node.
  auto observe_all = [&](std::uint64_t s) {
    NoiseSample noise = sample_noise(s, grid, model.noise_modes());
    DerivativeSystem ref = simulate_system(op, model, grid, x, lower_dirs, k - 1, noise);
    DerivativeSystem deriv = simulate_system(op, model, grid, x, directions, k, noise);
    Eigen::MatrixXd rem(n_eps, grid.steps + 1);
    for (int e = 0; e < n_eps; ++e) {
      double eps = eps_ladder[e];
      DerivativeSystem shifted =
          simulate_system(op, model, grid, x + eps * u_k, lower_dirs, k - 1, noise);
      for (int t = 0; t <= grid.steps; ++t) {
        rem(e, t) = (shifted.path(mask_low).row(t) - ref.path(mask_low).row(t) -
                     eps * deriv.path(mask_full).row(t))
                        .norm();
      }
    }
    return rem;
  };

  std::vector<Eigen::MatrixXd> per_sample(samples);
  for (int m = 0; m < samples; ++m) per_sample[m] = observe_all(seed + m);

  FdFrechetReport report;
  std::vector<double> norms(samples);
  for (int e = 0; e < n_eps; ++e) {
    double sup = 0.0;
    for (int t = 0; t <= grid.steps; ++t) {
      for (int m = 0; m < samples; ++m) norms[m] = per_sample[m](e, t);
      sup = std::max(sup, mc_lp_norm(norms, p, t).value);
    }
    report.eps.push_back(eps_ladder[e]);
    report.remainder.push_back(sup / (eps_ladder[e] * denom_dirs));
  }
  bool fittable = report.remainder.size() >= 4;
  for (double r : report.remainder)
    if (!(r > 0.0)) fittable = false;
  if (fittable) {
    OlsFit fit = exponent_fit(report.eps, report.remainder);
    report.slope = fit.slope;
    report.intercept = fit.intercept;
  }
  return report;
}

double lipschitz_probe(const DiagonalOperator& op, const Model& model, const TimeGrid& grid,
                       const Vec& x, const Vec& y, const std::vector<Vec>& directions, int k,
                       std::span<const double> deltas, double p, int samples,
                       std::uint64_t seed, double alpha, double beta) {
  if ((x - y).norm() == 0.0) throw std::invalid_argument("lipschitz_probe: x and y must differ");
  ExponentSpec spec;
  spec.k = k + 1;
  spec.deltas.assign(deltas.begin(), deltas.end());
  spec.deltas.push_back(0.0);  // appended delta_{k+1} = 0 activates the correction
  spec.alpha = alpha;
  spec.beta = beta;
  spec.validate();
  const double weight_exp = iota(spec, {kAllIndices});
  const std::uint32_t mask = full_mask(k);

  double denom = (x - y).norm();
  for (int i = 0; i < k; ++i) denom *= h_norm(op, -deltas[i], directions[i]);

  std::vector<Eigen::MatrixXd> per_sample(samples);
  for (int m = 0; m < samples; ++m) {
    NoiseSample noise = sample_noise(seed + m, grid, model.noise_modes());
    DerivativeSystem at_x = simulate_system(op, model, grid, x, directions, k, noise);
    DerivativeSystem at_y = simulate_system(op, model, grid, y, directions, k, noise);
    Eigen::MatrixXd diff(1, grid.steps + 1);
    for (int t = 0; t <= grid.steps; ++t)
      diff(0, t) = (at_x.path(mask).row(t) - at_y.path(mask).row(t)).norm();
    per_sample[m] = diff;
  }

  double sup = 0.0;
  std::vector<double> norms(samples);
  for (int t = 1; t <= grid.steps; ++t) {
    for (int m = 0; m < samples; ++m) norms[m] = per_sample[m](0, t);
    double w = std::pow(grid.time(t), weight_exp);
    sup = std::max(sup, w * mc_lp_norm(norms, p, t).value / denom);
  }
  return sup;
}

RatioReport regularity_probe(const DiagonalOperator& op, const Model& model,
                             const TimeGrid& grid, const Vec& x, int k,
                             std::span<const double> deltas, double p, int samples,
                             std::uint64_t seed,
                             const std::vector<std::vector<int>>& mode_schedule,
                             double alpha, double beta) {
  ExponentSpec spec;
  spec.k = k;
  spec.deltas.assign(deltas.begin(), deltas.end());
  spec.alpha = alpha;
  spec.beta = beta;
  spec.validate();
  const double weight_exp = iota(spec, {kAllIndices});
  const std::uint32_t mask = full_mask(k);

  RatioReport report;
  report.k = k;
  report.deltas = spec.deltas;
  report.probes = mode_schedule;
  for (int t = 1; t <= grid.steps; ++t) report.times.push_back(grid.time(t));
  const int n_probes = static_cast<int>(mode_schedule.size());
  report.ratios.resize(n_probes, grid.steps);
  report.std_errors.resize(n_probes, grid.steps);
  report.raw_norms.resize(n_probes, grid.steps);
  report.denominators.resize(n_probes);

  for (int pr = 0; pr < n_probes; ++pr) {
    const auto& modes = mode_schedule[pr];
    if (static_cast<int>(modes.size()) != k)
      throw std::invalid_argument("regularity_probe: probe tuple arity must equal k");
    std::vector<Vec> dirs;
    double denom = 1.0;
    for (int i = 0; i < k; ++i) {
      int m1 = modes[i];
      if (m1 < 1 || m1 > model.state_modes())
        throw std::invalid_argument("regularity_probe: eigenmode index out of range");
      Vec e = Vec::Zero(model.state_modes());
      e[m1 - 1] = 1.0;
      denom *= h_norm(op, -deltas[i], e);
      dirs.push_back(std::move(e));
    }

    auto observe = [&](const DerivativeSystem& sys) {
      Eigen::MatrixXd row(1, grid.steps + 1);
      for (int t = 0; t <= grid.steps; ++t) row(0, t) = sys.path(mask).row(t).norm();
      return row;
    };
    std::vector<Eigen::MatrixXd> per_sample =
        ensemble_apply(op, model, grid, x, dirs, k, samples, seed, observe);

    std::vector<double> norms(samples);
    for (int t = 1; t <= grid.steps; ++t) {
      for (int m = 0; m < samples; ++m) norms[m] = per_sample[m](0, t);
      MCNormEstimate est = mc_lp_norm(norms, p, t);
      double w = std::pow(grid.time(t), weight_exp) / denom;
      report.ratios(pr, t - 1) = w * est.value;
      report.std_errors(pr, t - 1) = w * est.std_error;
      report.raw_norms(pr, t - 1) = est.value;
    }
    report.denominators[pr] = denom;
  }

  report.sup = -1.0;
  for (int pr = 0; pr < n_probes; ++pr) {
    for (int t = 0; t < grid.steps; ++t) {
      if (report.ratios(pr, t) > report.sup) {
        report.sup = report.ratios(pr, t);
        report.sup_std_error = report.std_errors(pr, t);
        report.argmax_probe = pr;
        report.argmax_t = t + 1;
      }
    }
  }
  return report;
}

namespace {

struct BoundMemoKey {
  std::vector<double> deltas;
  double p;
  bool operator<(const BoundMemoKey& o) const {
    if (p != o.p) return p < o.p;
    return deltas < o.deltas;
  }
};

double bound_rhs_impl(const DiagonalOperator& op, const Model& model,
                      std::span<const double> deltas, double p, double T, double alpha,
                      double beta, std::map<BoundMemoKey, double>& memo) {
  const int k = static_cast<int>(deltas.size());
  BoundMemoKey key{{deltas.begin(), deltas.end()}, p};
  if (auto it = memo.find(key); it != memo.end()) return it->second;

  const double chi_a = chi(op, alpha, T);
  const double chi_b = chi(op, beta, T);
  double delta_sum = 0.0;
  for (double d : deltas) delta_sum += d;

  ExponentSpec spec;
  spec.k = k;
  spec.deltas.assign(deltas.begin(), deltas.end());
  spec.alpha = alpha;
  spec.beta = beta;
  spec.validate();

  BoundParams params;
  params.alpha = alpha;
  params.beta = beta;
  params.lambda = iota(spec, {kAllIndices});
  params.p = p;
  params.T = T;
  params.eta = op.eta;
  params.L = model.cb_seminorm_drift(1, op, alpha);
  params.Lhat = model.cb_seminorm_diffusion(1, op, beta);
  const double prefactor = theta(params, chi_a, chi_b);

  double bracket = k == 1 ? chi(op, deltas[0], T) : 0.0;

  double coeff = chi_a * beta_fn(1.0 - alpha, 1.0 - delta_sum) * model.cb_norm_drift(k, op, alpha) +
                 chi_b *
                     std::sqrt(p * (p - 1.0) / 2.0 * beta_fn(1.0 - 2.0 * beta, 1.0 - 2.0 * delta_sum)) *
                     model.cb_norm_diffusion(k, op, beta);

  double partition_sum = 0.0;
  for (const Partition& pi : enumerate_proper_partitions(k)) {
    double prod = 1.0;
    for (const auto& block : pi.blocks) {
      std::vector<double> sub_deltas;
      for (int idx : block) sub_deltas.push_back(deltas[idx - 1]);
      prod *= bound_rhs_impl(op, model, sub_deltas, p * pi.block_count(), T, alpha, beta, memo);
    }
    partition_sum += prod;
  }

  bracket += std::max(std::pow(T, k), 1.0) * coeff * partition_sum;
  double result = prefactor * bracket;
  memo.emplace(std::move(key), result);
  return result;
}

}  // namespace

double bound_rhs(const DiagonalOperator& op, const Model& model, int k,
                 std::span<const double> deltas, double p, double T, double alpha,
                 double beta) {
  if (k < 1) throw std::invalid_argument("bound_rhs: k must be >= 1");
  if (static_cast<int>(deltas.size()) != k)
    throw std::invalid_argument("bound_rhs: deltas must have length k");
  if (k > model.max_order()) throw std::invalid_argument("bound_rhs: k exceeds model capability");
  if (!model.has_certified_norms())
    throw std::runtime_error("bound_rhs: model carries no certified C_b norms");
  std::map<BoundMemoKey, double> memo;
  return bound_rhs_impl(op, model, deltas, p, T, alpha, beta, memo);
}

BoundCheck check_apriori_bound(const DiagonalOperator& op, const Model& model,
                               const TimeGrid& grid, const Vec& x, int k,
                               std::span<const double> deltas, double p, int samples,
                               std::uint64_t seed,
                               const std::vector<std::vector<int>>& mode_schedule,
                               double alpha, double beta) {
  RatioReport report =
      regularity_probe(op, model, grid, x, k, deltas, p, samples, seed, mode_schedule, alpha, beta);
  BoundCheck check;
  check.lhs = report.sup;
  check.lhs_std_error = report.sup_std_error;
  check.rhs = bound_rhs(op, model, k, deltas, p, grid.T, alpha, beta);
  check.pass = check.lhs <= check.rhs + 3.0 * check.lhs_std_error;
  return check;
}

}  // namespace seesim
