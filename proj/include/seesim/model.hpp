#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "seesim/spectral_space.hpp"

namespace seesim {

/// Scalar profile with derivatives of every order in closed form.
/// "linear" is the test profile phi(s) = s (affine-linear coefficients).
enum class Profile { Sin, Tanh, Linear };

Profile profile_from_string(const std::string& name);

/// m-th derivative of the profile at s.
double profile_deriv(Profile p, int m, double s);

/// A certified upper bound for sup_s |profile^{(m)}(s)|. Infinite only for
/// Profile::Linear at m = 0, which never enters a norm bound.
double profile_deriv_bound(Profile p, int m);

/// Coefficient pair (F, B) with symmetric multilinear derivative oracles.
/// The noise basis is the eigenbasis of H truncated to noise_modes() modes.
class Model {
 public:
  virtual ~Model() = default;

  virtual int max_order() const = 0;
  virtual int state_modes() const = 0;
  virtual int noise_modes() const = 0;

  /// F^{(m)}(x)(dirs); m = 0 returns F(x) and ignores dirs.
  virtual Vec drift_deriv(int m, const Vec& x, const std::vector<Vec>& dirs) const = 0;

  /// B^{(m)}(x)(dirs) applied to the noise-basis vector e_{mode} (0-based).
  virtual Vec diffusion_deriv(int m, const Vec& x, const std::vector<Vec>& dirs, int noise_mode) const = 0;

  /// B^{(m)}(x)(dirs) applied to a full noise vector du (one increment row).
  /// Default sums diffusion_deriv over modes; concrete models override with
  /// the closed form.
  virtual Vec diffusion_deriv_apply(int m, const Vec& x, const std::vector<Vec>& dirs, const Vec& du) const;

  /// Whether analytic C_b^m bounds are available (canonical model only).
  virtual bool has_certified_norms() const { return false; }

  /// Upper bound for the seminorm |F|_{C_b^m(H, H_{-alpha})}, m >= 1.
  virtual double cb_seminorm_drift(int m, const DiagonalOperator& op, double alpha) const;

  /// Upper bound for |B|_{C_b^m(H, HS(U, H_{-beta}))}, m >= 1.
  virtual double cb_seminorm_diffusion(int m, const DiagonalOperator& op, double beta) const;

  /// ||F(0)||_{H_{-alpha}} and an upper bound for ||B(0)||_{HS(U,H_{-beta})}.
  virtual double drift_base_norm(const DiagonalOperator& op, double alpha) const;
  virtual double diffusion_base_norm(const DiagonalOperator& op, double beta) const;

  /// Full norm ||F||_{C_b^k} = ||F(0)|| + sum_{m<=k} |F|_{C_b^m} (upper bound).
  double cb_norm_drift(int k, const DiagonalOperator& op, double alpha) const;
  double cb_norm_diffusion(int k, const DiagonalOperator& op, double beta) const;

  void require_order(int m) const;
};

/// Canonical finite-rank test model:
///   F(x)   = f0 + sum_j phi(<x,f_j>) g_j
///   B(x)u  = sum_i q_i <u,e_i> e_i + sum_j phi(<x,f_j>) <u,a_j> b_j
/// All derivative orders exist in closed form with certified bounds.
class CanonicalModel : public Model {
 public:
  struct Spec {
    int n_max = 3;
    Profile profile = Profile::Sin;
    Vec drift_const;                 // f0; empty means zero
    std::vector<Vec> features;       // f_j
    std::vector<Vec> drift_outputs;  // g_j
    std::vector<Vec> noise_couplings;  // a_j (supported on the noise modes)
    std::vector<Vec> diffusion_outputs;  // b_j
    Vec additive;                    // q, one amplitude per noise mode
  };

  CanonicalModel(Spec spec, int state_modes);

  /// The acceptance-scale default: rank-J couplings with smooth outputs,
  /// broadband features, and additive amplitudes q_i = i^{-gamma}.
  static CanonicalModel make_default(int state_modes, int noise_modes, int rank,
                                     Profile profile, double additive_decay,
                                     int n_max);

  int max_order() const override { return spec_.n_max; }
  int state_modes() const override { return state_modes_; }
  int noise_modes() const override { return static_cast<int>(spec_.additive.size()); }

  Vec drift_deriv(int m, const Vec& x, const std::vector<Vec>& dirs) const override;
  Vec diffusion_deriv(int m, const Vec& x, const std::vector<Vec>& dirs, int noise_mode) const override;
  Vec diffusion_deriv_apply(int m, const Vec& x, const std::vector<Vec>& dirs, const Vec& du) const override;

  bool has_certified_norms() const override { return true; }
  double cb_seminorm_drift(int m, const DiagonalOperator& op, double alpha) const override;
  double cb_seminorm_diffusion(int m, const DiagonalOperator& op, double beta) const override;
  double drift_base_norm(const DiagonalOperator& op, double alpha) const override;
  double diffusion_base_norm(const DiagonalOperator& op, double beta) const override;

  const Spec& spec() const { return spec_; }

 private:
  int rank() const { return static_cast<int>(spec_.features.size()); }

  Spec spec_;
  int state_modes_;
};

/// Per-order result of validating derivative oracles against central finite
/// differences of the next-lower order.
struct FdValidationRow {
  int order = 0;
  double max_rel_dev_drift = 0.0;
  double max_rel_dev_diffusion = 0.0;
};

std::vector<FdValidationRow> fd_validate_model(const Model& model, const Vec& x,
                                               int orders, double epsilon,
                                               std::uint64_t seed = 20240817);

}  // namespace seesim
