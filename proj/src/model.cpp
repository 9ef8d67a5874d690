#include "seesim/model.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace seesim {

namespace {

constexpr int kMaxProfileOrder = 12;

// tanh^{(m)}(s) as a polynomial in y = tanh(s):
//   P_0(y) = y,  P_{m+1}(y) = P_m'(y) (1 - y^2).
const std::vector<std::vector<double>>& tanh_deriv_polys() {
  static const std::vector<std::vector<double>> polys = [] {
    std::vector<std::vector<double>> out;
    out.push_back({0.0, 1.0});
    for (int m = 1; m <= kMaxProfileOrder; ++m) {
      const auto& prev = out.back();
      std::vector<double> d(prev.size() >= 2 ? prev.size() - 1 : 1, 0.0);
      for (size_t i = 1; i < prev.size(); ++i) d[i - 1] = prev[i] * static_cast<double>(i);
      // next = d - y^2 * d
      std::vector<double> next(d.size() + 2, 0.0);
      for (size_t i = 0; i < d.size(); ++i) {
        next[i] += d[i];
        next[i + 2] -= d[i];
      }
      out.push_back(std::move(next));
    }
    return out;
  }();
  return polys;
}

double eval_poly(const std::vector<double>& coeffs, double y) {
  double v = 0.0;
  for (size_t i = coeffs.size(); i-- > 0;) v = v * y + coeffs[i];
  return v;
}

std::mt19937_64 seeded_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

// Product of <dirs[i], f> over i < m, accumulated in sorted order so the
// result is bitwise invariant under permutations of dirs.
double direction_weight(const std::vector<Vec>& dirs, int m, const Vec& f) {
  double dots[16];
  for (int i = 0; i < m; ++i) dots[i] = dirs[i].dot(f);
  std::sort(dots, dots + m);
  double w = 1.0;
  for (int i = 0; i < m; ++i) w *= dots[i];
  return w;
}

Vec gaussian_vec(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = normal(rng);
  return v;
}

}  // namespace

Profile profile_from_string(const std::string& name) {
  if (name == "sin") return Profile::Sin;
  if (name == "tanh") return Profile::Tanh;
  if (name == "linear") return Profile::Linear;
  throw std::invalid_argument("unknown profile '" + name + "' (expected sin, tanh, or linear)");
}

double profile_deriv(Profile p, int m, double s) {
  if (m < 0 || m > kMaxProfileOrder) throw std::invalid_argument("profile_deriv: unsupported order");
  switch (p) {
    case Profile::Sin:
      switch (m % 4) {
        case 0: return std::sin(s);
        case 1: return std::cos(s);
        case 2: return -std::sin(s);
        default: return -std::cos(s);
      }
    case Profile::Tanh:
      return eval_poly(tanh_deriv_polys()[m], std::tanh(s));
    case Profile::Linear:
      if (m == 0) return s;
      return m == 1 ? 1.0 : 0.0;
  }
  throw std::logic_error("unreachable");
}

double profile_deriv_bound(Profile p, int m) {
  if (m < 0 || m > kMaxProfileOrder) throw std::invalid_argument("profile_deriv_bound: unsupported order");
  switch (p) {
    case Profile::Sin:
      return 1.0;
    case Profile::Tanh: {
      if (m == 0) return 1.0;
      double sum = 0.0;
      for (double c : tanh_deriv_polys()[m]) sum += std::abs(c);
      return sum;  // |P_m(y)| <= sum |coeffs| on y in [-1,1]
    }
    case Profile::Linear:
      if (m == 0) return std::numeric_limits<double>::infinity();
      return m == 1 ? 1.0 : 0.0;
  }
  throw std::logic_error("unreachable");
}

Vec Model::diffusion_deriv_apply(int m, const Vec& x, const std::vector<Vec>& dirs, const Vec& du) const {
  Vec out = Vec::Zero(state_modes());
  for (int i = 0; i < noise_modes(); ++i) {
    if (du[i] != 0.0) out += du[i] * diffusion_deriv(m, x, dirs, i);
  }
  return out;
}

double Model::cb_seminorm_drift(int, const DiagonalOperator&, double) const {
  throw std::runtime_error("model carries no certified C_b norms");
}

double Model::cb_seminorm_diffusion(int, const DiagonalOperator&, double) const {
  throw std::runtime_error("model carries no certified C_b norms");
}

double Model::drift_base_norm(const DiagonalOperator&, double) const {
  throw std::runtime_error("model carries no certified C_b norms");
}

double Model::diffusion_base_norm(const DiagonalOperator&, double) const {
  throw std::runtime_error("model carries no certified C_b norms");
}

double Model::cb_norm_drift(int k, const DiagonalOperator& op, double alpha) const {
  double sum = drift_base_norm(op, alpha);
  for (int m = 1; m <= k; ++m) sum += cb_seminorm_drift(m, op, alpha);
  return sum;
}

double Model::cb_norm_diffusion(int k, const DiagonalOperator& op, double beta) const {
  double sum = diffusion_base_norm(op, beta);
  for (int m = 1; m <= k; ++m) sum += cb_seminorm_diffusion(m, op, beta);
  return sum;
}

void Model::require_order(int m) const {
  if (m < 0 || m > max_order())
    throw std::runtime_error("requested derivative order " + std::to_string(m) +
                             " exceeds the model capability n_max = " + std::to_string(max_order()));
}

CanonicalModel::CanonicalModel(Spec spec, int state_modes)
    : spec_(std::move(spec)), state_modes_(state_modes) {
  if (state_modes_ < 1) throw std::invalid_argument("CanonicalModel: state_modes must be positive");
  if (spec_.n_max < 1 || spec_.n_max > kMaxProfileOrder)
    throw std::invalid_argument("CanonicalModel: n_max must lie in [1,12]");
  if (spec_.additive.size() == 0 || spec_.additive.size() > state_modes_)
    throw std::invalid_argument("CanonicalModel: additive amplitudes must cover 1..N_U with N_U <= N");
  if (spec_.drift_const.size() == 0) spec_.drift_const = Vec::Zero(state_modes_);
  auto check_dim = [&](const std::vector<Vec>& vs, const char* what) {
    if (static_cast<int>(vs.size()) != rank())
      throw std::invalid_argument(std::string("CanonicalModel: ") + what + " must have one vector per rank");
    for (const auto& v : vs) {
      if (v.size() != state_modes_)
        throw std::invalid_argument(std::string("CanonicalModel: ") + what + " dimension mismatch");
      require_finite(v, what);
    }
  };
  check_dim(spec_.drift_outputs, "drift_outputs");
  check_dim(spec_.noise_couplings, "noise_couplings");
  check_dim(spec_.diffusion_outputs, "diffusion_outputs");
  if (static_cast<int>(spec_.features.size()) != rank())
    throw std::invalid_argument("CanonicalModel: features must have one vector per rank");
  for (const auto& f : spec_.features) {
    if (f.size() != state_modes_) throw std::invalid_argument("CanonicalModel: feature dimension mismatch");
    require_finite(f, "features");
  }
  // Noise couplings must live on the truncated noise basis.
  for (const auto& a : spec_.noise_couplings) {
    for (int i = noise_modes(); i < state_modes_; ++i) {
      if (a[i] != 0.0)
        throw std::invalid_argument("CanonicalModel: noise_couplings supported outside the noise modes");
    }
  }
  require_finite(spec_.additive, "additive amplitudes");
  require_finite(spec_.drift_const, "drift_const");
}

CanonicalModel CanonicalModel::make_default(int state_modes, int noise_modes, int rank,
                                            Profile profile, double additive_decay,
                                            int n_max) {
  if (noise_modes > state_modes) throw std::invalid_argument("make_default: N_U must be <= N");
  Spec spec;
  spec.n_max = n_max;
  spec.profile = profile;
  spec.drift_const = Vec::Zero(state_modes);
  spec.additive.resize(noise_modes);
  for (int i = 0; i < noise_modes; ++i)
    spec.additive[i] = std::pow(static_cast<double>(i + 1), -additive_decay);

  // Deterministic broadband vectors. Features carry weight across the whole
  // spectrum (mild decay, Walsh-type sign modulation per rank index so no
  // entry vanishes); outputs decay like i^{-2}.
  auto walsh = [](int j, int i) { return ((i >> j) & 1) ? -1.0 : 1.0; };
  for (int j = 0; j < rank; ++j) {
    Vec f(state_modes), a = Vec::Zero(state_modes), g(state_modes), b(state_modes);
    for (int i = 0; i < state_modes; ++i) {
      f[i] = std::pow(i + 1.0, -0.4) * ((i + 1.0) * (i + 1.0) / ((i + 1.0) * (i + 1.0) + 25.0)) * walsh(j, i);
      g[i] = std::pow(i + 1.0, -2.0) * walsh(j, i);
      b[i] = std::pow(i + 1.0, -2.0) * walsh(j + 1, i);
    }
    for (int i = 0; i < noise_modes; ++i) a[i] = walsh(j, i);
    spec.features.push_back(f / f.norm());
    spec.noise_couplings.push_back(a / a.norm());
    spec.drift_outputs.push_back(0.4 * g / g.norm());
    spec.diffusion_outputs.push_back(3.25 * b / b.norm());
  }
  return CanonicalModel(std::move(spec), state_modes);
}

Vec CanonicalModel::drift_deriv(int m, const Vec& x, const std::vector<Vec>& dirs) const {
  require_order(m);
  if (m > 0 && static_cast<int>(dirs.size()) < m)
    throw std::invalid_argument("drift_deriv: need m directions");
  Vec out = m == 0 ? Vec(spec_.drift_const) : Vec(Vec::Zero(state_modes_));
  for (int j = 0; j < rank(); ++j) {
    double w = profile_deriv(spec_.profile, m, x.dot(spec_.features[j])) *
               direction_weight(dirs, m, spec_.features[j]);
    out += w * spec_.drift_outputs[j];
  }
  return out;
}

Vec CanonicalModel::diffusion_deriv(int m, const Vec& x, const std::vector<Vec>& dirs, int noise_mode) const {
  require_order(m);
  if (noise_mode < 0 || noise_mode >= noise_modes())
    throw std::out_of_range("diffusion_deriv: noise mode out of range");
  Vec out = Vec::Zero(state_modes_);
  if (m == 0) out[noise_mode] = spec_.additive[noise_mode];
  for (int j = 0; j < rank(); ++j) {
    double w = profile_deriv(spec_.profile, m, x.dot(spec_.features[j])) *
               direction_weight(dirs, m, spec_.features[j]);
    out += (w * spec_.noise_couplings[j][noise_mode]) * spec_.diffusion_outputs[j];
  }
  return out;
}

Vec CanonicalModel::diffusion_deriv_apply(int m, const Vec& x, const std::vector<Vec>& dirs, const Vec& du) const {
  require_order(m);
  Vec out = Vec::Zero(state_modes_);
  if (m == 0) out.head(noise_modes()) = spec_.additive.array() * du.array();
  for (int j = 0; j < rank(); ++j) {
    double w = profile_deriv(spec_.profile, m, x.dot(spec_.features[j])) *
               direction_weight(dirs, m, spec_.features[j]);
    out += (w * spec_.noise_couplings[j].head(noise_modes()).dot(du)) * spec_.diffusion_outputs[j];
  }
  return out;
}

double CanonicalModel::cb_seminorm_drift(int m, const DiagonalOperator& op, double alpha) const {
  double sum = 0.0;
  for (int j = 0; j < rank(); ++j) {
    sum += profile_deriv_bound(spec_.profile, m) *
           std::pow(spec_.features[j].norm(), m) *
           h_norm(op, -alpha, spec_.drift_outputs[j]);
  }
  return sum;
}

double CanonicalModel::cb_seminorm_diffusion(int m, const DiagonalOperator& op, double beta) const {
  double sum = 0.0;
  for (int j = 0; j < rank(); ++j) {
    sum += profile_deriv_bound(spec_.profile, m) *
           std::pow(spec_.features[j].norm(), m) *
           spec_.noise_couplings[j].norm() *
           h_norm(op, -beta, spec_.diffusion_outputs[j]);
  }
  return sum;
}

double CanonicalModel::drift_base_norm(const DiagonalOperator& op, double alpha) const {
  return h_norm(op, -alpha, drift_deriv(0, Vec::Zero(state_modes_), {}));
}

double CanonicalModel::diffusion_base_norm(const DiagonalOperator& op, double beta) const {
  // Additive part exactly, state part by the rank-one triangle inequality.
  double additive_sq = 0.0;
  for (int i = 0; i < noise_modes(); ++i) {
    additive_sq += spec_.additive[i] * spec_.additive[i] *
                   std::pow(op.eta - op.eigenvalues[i], -2.0 * beta);
  }
  double sum = std::sqrt(additive_sq);
  for (int j = 0; j < rank(); ++j) {
    sum += std::abs(profile_deriv(spec_.profile, 0, 0.0)) *
           spec_.noise_couplings[j].norm() *
           h_norm(op, -beta, spec_.diffusion_outputs[j]);
  }
  return sum;
}

std::vector<FdValidationRow> fd_validate_model(const Model& model, const Vec& x,
                                               int orders, double epsilon,
                                               std::uint64_t seed) {
  if (orders > model.max_order())
    throw std::invalid_argument("fd_validate_model: orders exceeds model capability");
  auto rng = seeded_rng(seed);
  std::vector<Vec> dirs;
  for (int i = 0; i < orders; ++i) {
    Vec v = gaussian_vec(rng, model.state_modes());
    dirs.push_back(v / v.norm());
  }
  Vec du = gaussian_vec(rng, model.noise_modes());

  std::vector<FdValidationRow> report;
  for (int m = 1; m <= orders; ++m) {
    std::vector<Vec> lower(dirs.begin(), dirs.begin() + (m - 1));
    std::vector<Vec> full(dirs.begin(), dirs.begin() + m);
    const Vec& v = dirs[m - 1];

    Vec exact_f = model.drift_deriv(m, x, full);
    Vec fd_f = (model.drift_deriv(m - 1, x + epsilon * v, lower) -
                model.drift_deriv(m - 1, x - epsilon * v, lower)) /
               (2.0 * epsilon);
    Vec exact_b = model.diffusion_deriv_apply(m, x, full, du);
    Vec fd_b = (model.diffusion_deriv_apply(m - 1, x + epsilon * v, lower, du) -
                model.diffusion_deriv_apply(m - 1, x - epsilon * v, lower, du)) /
               (2.0 * epsilon);

    FdValidationRow row;
    row.order = m;
    row.max_rel_dev_drift = (fd_f - exact_f).norm() / std::max(1.0, exact_f.norm());
    row.max_rel_dev_diffusion = (fd_b - exact_b).norm() / std::max(1.0, exact_b.norm());
    report.push_back(row);
  }
  return report;
}

}  // namespace seesim
