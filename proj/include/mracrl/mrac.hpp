#pragma once

// Model-reference adaptive inner-loop controllers for companion-form plants.
//
// Linear form:     u = K^T x    + k_u xi,  xi = u_r - (1/b_r) (D alpha_r)^T e
// Nonlinear form:  u = K^T z(x) + k_u xi,  xi = u_r - (1/b_r) alpha_r^T (z - z_r)
//                                               + (1/b_r) beta_r^T e
// with the gradient laws
//   K'   = -Gamma * regressor * (e^T P B_r)
//   k_u' = -gamma_u * xi * (e^T P B_r)
// where P A_H + A_H^T P = -Q. The error dynamics are e' = A_H e + lambda B_r
// (K~^T regressor + k~_u xi), so V = e^T P e + lambda K~^T Gamma^-1 K~ +
// lambda k~_u^2 / gamma_u has V' = -e^T Q e.

#include <optional>

#include "mracrl/num_core.hpp"
#include "mracrl/plant.hpp"

namespace mracrl {

/// Scalar gain set: omega/psi fill every D entry, Gamma = gamma_x I,
/// Q = diag(q_theta, 1, ..., 1).
struct MracGainPreset {
  double omega = 2.0;
  double psi = 0.0;
  double gamma_x = 10.0;
  double gamma_u = 10.0;
  double q_theta = 1.0;
};

/// Stiff error feedback for inner loops at or above kFastInnerRateHz. The
/// heavy angle weight in Q keeps adaptation alive once e_theta is small.
inline constexpr MracGainPreset kFastInnerLoopGains{100.0, -50.0, 100.0, 0.1, 1e4};
/// Soft feedback and slow adaptation that stay stable under a 0.1 s hold.
inline constexpr MracGainPreset kSlowInnerLoopGains{8.0, -6.0, 0.1, 0.001, 1.0};
inline constexpr double kFastInnerRateHz = 50.0;

struct MracConfig {
  Vector omega;   // used where alpha_r,i > 0; each > 1
  Vector psi;     // used where alpha_r,i < 0; each <= 0
  Vector beta_r;  // nonlinear form only; strictly negative
  Matrix gamma_x;
  double gamma_u = 10.0;
  Matrix Q;
  Form variant = Form::kLinear;

  /// omega = 2, psi = 0, beta_r = -|alpha_r|, Gamma = 10 I, gamma_u = 10, Q = I.
  static MracConfig defaults(const CompanionSystem& reference);

  /// Applies `gains`. The nonlinear beta_r is alpha_r - D alpha_r, so both
  /// forms share the same A_H.
  static MracConfig from_preset(const CompanionSystem& reference, const MracGainPreset& gains);

  /// kFastInnerLoopGains or kSlowInnerLoopGains by inner-loop rate.
  static MracConfig for_inner_rate(const CompanionSystem& reference, double inner_rate_hz);

  void validate() const;
};

struct MracDerived {
  Form form = Form::kLinear;
  Matrix D;  // empty for the nonlinear form
  Matrix A_H;
  Matrix P;
  Vector h;
  Vector alpha_r;
  double b_r = 1.0;
  Vector d_alpha;  // D alpha_r (linear form)
  Vector beta_r;   // nonlinear form
  Vector PB;       // P B_r, reused by every adaptation step
};

struct AdaptiveState {
  Vector K_hat;
  double k_u_hat = 1.0;

  /// K_hat = 0, k_u_hat = 1: exact feedthrough of u_r when the models match.
  static AdaptiveState initial(Eigen::Index n) { return {Vector::Zero(n), 1.0}; }
};

/// Fixed gains satisfying the matching conditions A + lambda B_r K*^T = A_r,
/// lambda k_u* = 1. Only computable when the true plant is known.
struct IdealGains {
  Vector K_star;
  double k_u_star = 1.0;
  double lambda_true = 1.0;
};

Matrix build_D(const Vector& alpha_r, const MracConfig& config);

MracDerived derive_linear(const Vector& alpha_r, double b_r, const MracConfig& config,
                          const Tolerances& tol = {});
MracDerived derive_nonlinear(const Vector& alpha_r, double b_r, const MracConfig& config,
                             const Tolerances& tol = {});
/// Dispatches on the reference system's form.
MracDerived derive(const CompanionSystem& reference, const MracConfig& config,
                   const Tolerances& tol = {});

double xi_linear(double u_r, const Vector& e, const MracDerived& derived);
double xi_nonlinear(double u_r, const Vector& e, const Vector& zeta_x, const Vector& zeta_r,
                    const MracDerived& derived);

double control(const AdaptiveState& adaptive, const Vector& regressor, double xi);

AdaptiveState adapt_step(const AdaptiveState& adaptive, const Vector& regressor,
                         const Vector& e, double xi, const MracDerived& derived,
                         const MracConfig& config, double dt);

double lyapunov_value(const Vector& e, const AdaptiveState& adaptive, const IdealGains& ideal,
                      const MracDerived& derived, const MracConfig& config);

IdealGains ideal_gains(const CompanionSystem& true_system, const CompanionSystem& reference);

/// One adaptive inner loop bound to a reference model. `tick` follows the
/// per-tick order: form e, compute u from the pre-update gains, then adapt.
class MracController {
 public:
  MracController(const CompanionSystem& reference, MracConfig config, const Tolerances& tol = {});

  struct Output {
    double u = 0.0;
    double xi = 0.0;
  };

  Output tick(const Vector& x, const Vector& x_r, double u_r, double dt);

  const MracDerived& derived() const { return derived_; }
  const MracConfig& config() const { return config_; }
  const AdaptiveState& state() const { return state_; }
  const CompanionSystem& reference() const { return reference_; }

 private:
  CompanionSystem reference_;
  MracConfig config_;
  MracDerived derived_;
  AdaptiveState state_;
};

}  // namespace mracrl
