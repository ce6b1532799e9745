#include "mracrl/mrac.hpp"

#include <cmath>
#include <string>

namespace mracrl {

namespace {

void require_length(const Vector& v, Eigen::Index n, const char* what) {
  if (v.size() != n) {
    throw DimensionError(std::string(what) + ": length " + std::to_string(v.size()) +
                         ", expected " + std::to_string(n));
  }
}

Matrix companion(const Vector& last_row) {
  const Eigen::Index n = last_row.size();
  Matrix A = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) A(i, i + 1) = 1.0;
  A.row(n - 1) = last_row.transpose();
  return A;
}

MracDerived finish(MracDerived d, const MracConfig& config, const Tolerances& tol) {
  const Eigen::Index n = d.alpha_r.size();
  if (!is_hurwitz(d.A_H)) throw ConstructionError("MRAC: A_H is not Hurwitz");
  d.h = Vector::Zero(n);
  d.h(n - 1) = 1.0;
  d.P = solve_lyapunov(d.A_H, config.Q, tol).P;
  d.PB = d.P * (d.b_r * d.h);
  return d;
}

}  // namespace

MracConfig MracConfig::defaults(const CompanionSystem& reference) {
  const Eigen::Index n = reference.dim();
  MracConfig c;
  c.omega = Vector::Constant(n, 2.0);
  c.psi = Vector::Zero(n);
  c.beta_r = -reference.alpha().cwiseAbs();
  c.gamma_x = 10.0 * Matrix::Identity(n, n);
  c.gamma_u = 10.0;
  c.Q = Matrix::Identity(n, n);
  c.variant = reference.form();
  return c;
}

MracConfig MracConfig::from_preset(const CompanionSystem& reference,
                                   const MracGainPreset& gains) {
  const Eigen::Index n = reference.dim();
  MracConfig c = defaults(reference);
  c.omega = Vector::Constant(n, gains.omega);
  c.psi = Vector::Constant(n, gains.psi);
  c.gamma_x = gains.gamma_x * Matrix::Identity(n, n);
  c.gamma_u = gains.gamma_u;
  c.Q(0, 0) = gains.q_theta;
  const Vector& alpha = reference.alpha();
  c.beta_r = alpha - build_D(alpha, c) * alpha;
  return c;
}

MracConfig MracConfig::for_inner_rate(const CompanionSystem& reference, double inner_rate_hz) {
  if (!(inner_rate_hz > 0.0)) throw ArgumentError("MracConfig: inner rate must be positive");
  return from_preset(reference,
                     inner_rate_hz >= kFastInnerRateHz ? kFastInnerLoopGains : kSlowInnerLoopGains);
}

void MracConfig::validate() const {
  const Eigen::Index n = Q.rows();
  if (n < 1 || Q.cols() != n) throw DimensionError("MracConfig: Q must be square");
  if (gamma_x.rows() != n || gamma_x.cols() != n) {
    throw DimensionError("MracConfig: Gamma shape differs from Q");
  }
  if (variant == Form::kLinear) {
    require_length(omega, n, "MracConfig.omega");
    require_length(psi, n, "MracConfig.psi");
    if ((omega.array() <= 1.0).any()) throw ArgumentError("MracConfig: every omega_i must be > 1");
    if ((psi.array() > 0.0).any()) throw ArgumentError("MracConfig: every psi_i must be <= 0");
  } else {
    require_length(beta_r, n, "MracConfig.beta_r");
    if ((beta_r.array() >= 0.0).any()) {
      throw ArgumentError("MracConfig: every beta_r entry must be strictly negative");
    }
  }
  if (!is_symmetric(gamma_x) || !is_positive_definite(gamma_x)) {
    throw ArgumentError("MracConfig: Gamma must be symmetric positive definite");
  }
  if (!(gamma_u > 0.0)) throw ArgumentError("MracConfig: gamma_u must be positive");
  if (!is_symmetric(Q) || !is_positive_definite(Q)) {
    throw ArgumentError("MracConfig: Q must be symmetric positive definite");
  }
}

Matrix build_D(const Vector& alpha_r, const MracConfig& config) {
  const Eigen::Index n = alpha_r.size();
  require_length(config.omega, n, "build_D omega");
  require_length(config.psi, n, "build_D psi");
  Matrix D = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (alpha_r(i) > 0.0) {
      D(i, i) = config.omega(i);
    } else if (alpha_r(i) < 0.0) {
      D(i, i) = config.psi(i);
    } else {
      throw DegenerateParameterError("build_D: alpha_r[" + std::to_string(i) +
                                     "] is zero; D_ii is undefined");
    }
  }
  return D;
}

MracDerived derive_linear(const Vector& alpha_r, double b_r, const MracConfig& config,
                          const Tolerances& tol) {
  if (config.variant != Form::kLinear) throw ArgumentError("derive_linear: config is nonlinear");
  config.validate();
  require_length(alpha_r, config.Q.rows(), "derive_linear alpha_r");
  if (b_r == 0.0) throw DegenerateParameterError("derive_linear: b_r is zero");
  MracDerived d;
  d.form = Form::kLinear;
  d.alpha_r = alpha_r;
  d.b_r = b_r;
  d.D = build_D(alpha_r, config);
  d.d_alpha = d.D * alpha_r;
  // A_r - h (D alpha_r)^T only touches the last row.
  d.A_H = companion(alpha_r - d.d_alpha);
  return finish(std::move(d), config, tol);
}

MracDerived derive_nonlinear(const Vector& alpha_r, double b_r, const MracConfig& config,
                             const Tolerances& tol) {
  if (config.variant != Form::kNonlinear) {
    throw ArgumentError("derive_nonlinear: config is linear");
  }
  config.validate();
  require_length(alpha_r, config.Q.rows(), "derive_nonlinear alpha_r");
  if (b_r == 0.0) throw DegenerateParameterError("derive_nonlinear: b_r is zero");
  MracDerived d;
  d.form = Form::kNonlinear;
  d.alpha_r = alpha_r;
  d.b_r = b_r;
  d.beta_r = config.beta_r;
  // A_r - h alpha_r^T + h beta_r^T replaces the last row by beta_r.
  d.A_H = companion(config.beta_r);
  return finish(std::move(d), config, tol);
}

MracDerived derive(const CompanionSystem& reference, const MracConfig& config,
                   const Tolerances& tol) {
  if (reference.form() != config.variant) {
    throw ArgumentError("MRAC: config variant does not match the reference model form");
  }
  return reference.form() == Form::kLinear
             ? derive_linear(reference.alpha(), reference.b_scalar(), config, tol)
             : derive_nonlinear(reference.alpha(), reference.b_scalar(), config, tol);
}

double xi_linear(double u_r, const Vector& e, const MracDerived& derived) {
  require_length(e, derived.d_alpha.size(), "xi_linear e");
  return u_r - derived.d_alpha.dot(e) / derived.b_r;
}

double xi_nonlinear(double u_r, const Vector& e, const Vector& zeta_x, const Vector& zeta_r,
                    const MracDerived& derived) {
  const Eigen::Index n = derived.alpha_r.size();
  require_length(e, n, "xi_nonlinear e");
  require_length(zeta_x, n, "xi_nonlinear zeta");
  require_length(zeta_r, n, "xi_nonlinear zeta_r");
  return u_r - derived.alpha_r.dot(zeta_x - zeta_r) / derived.b_r +
         derived.beta_r.dot(e) / derived.b_r;
}

double control(const AdaptiveState& adaptive, const Vector& regressor, double xi) {
  require_length(regressor, adaptive.K_hat.size(), "control regressor");
  return adaptive.K_hat.dot(regressor) + adaptive.k_u_hat * xi;
}

AdaptiveState adapt_step(const AdaptiveState& adaptive, const Vector& regressor,
                         const Vector& e, double xi, const MracDerived& derived,
                         const MracConfig& config, double dt) {
  if (!(dt > 0.0)) throw ArgumentError("adapt_step: dt must be positive");
  require_length(e, derived.PB.size(), "adapt_step e");
  require_length(regressor, adaptive.K_hat.size(), "adapt_step regressor");
  const double s = e.dot(derived.PB);
  AdaptiveState next;
  next.K_hat = adaptive.K_hat - dt * s * (config.gamma_x * regressor);
  next.k_u_hat = adaptive.k_u_hat - dt * config.gamma_u * xi * s;
  if (!next.K_hat.allFinite()) throw NumericError("adapt_step: K_hat became non-finite");
  if (!std::isfinite(next.k_u_hat)) throw NumericError("adapt_step: k_u_hat became non-finite");
  return next;
}

double lyapunov_value(const Vector& e, const AdaptiveState& adaptive, const IdealGains& ideal,
                      const MracDerived& derived, const MracConfig& config) {
  const Vector K_err = adaptive.K_hat - ideal.K_star;
  const double k_err = adaptive.k_u_hat - ideal.k_u_star;
  const Vector weighted = config.gamma_x.llt().solve(K_err);
  return e.dot(derived.P * e) + ideal.lambda_true * K_err.dot(weighted) +
         ideal.lambda_true * k_err * k_err / config.gamma_u;
}

IdealGains ideal_gains(const CompanionSystem& true_system, const CompanionSystem& reference) {
  if (true_system.dim() != reference.dim()) {
    throw DimensionError("ideal_gains: systems differ in dimension");
  }
  if (true_system.form() != reference.form()) {
    throw ArgumentError("ideal_gains: systems differ in form");
  }
  IdealGains g;
  const double b_r = reference.b_scalar() * reference.lambda_scale();
  g.lambda_true = true_system.lambda_scale() * true_system.b_scalar() / b_r;
  if (!(g.lambda_true > 0.0)) throw ArgumentError("ideal_gains: input gains differ in sign");
  g.k_u_star = 1.0 / g.lambda_true;
  g.K_star = (reference.alpha() - true_system.alpha()) / (g.lambda_true * b_r);
  return g;
}

MracController::MracController(const CompanionSystem& reference, MracConfig config,
                               const Tolerances& tol)
    : reference_(reference),
      config_(std::move(config)),
      derived_(derive(reference_, config_, tol)),
      state_(AdaptiveState::initial(reference_.dim())) {}

MracController::Output MracController::tick(const Vector& x, const Vector& x_r, double u_r,
                                            double dt) {
  const Vector e = x - x_r;
  Output out;
  if (derived_.form == Form::kLinear) {
    out.xi = xi_linear(u_r, e, derived_);
    out.u = control(state_, x, out.xi);
    state_ = adapt_step(state_, x, e, out.xi, derived_, config_, dt);
  } else {
    const Vector z = zeta(x, reference_);
    const Vector z_r = zeta(x_r, reference_);
    out.xi = xi_nonlinear(u_r, e, z, z_r, derived_);
    out.u = control(state_, z, out.xi);
    state_ = adapt_step(state_, z, e, out.xi, derived_, config_, dt);
  }
  return out;
}

}  // namespace mracrl
