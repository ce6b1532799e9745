#pragma once

#include <string_view>

#include "mracrl/num_core.hpp"

namespace mracrl {

enum class Form { kLinear, kNonlinear };

std::string_view to_string(Form form);
Form form_from_string(std::string_view s);

/// Physical pendulum constants: ml^2 th'' = mgl f(th) - b th' + u.
struct PlantParams {
  double m = 1.0;
  double l = 1.0;
  double b = 1.0;
  double g = 10.0;

  static PlantParams nominal() { return {}; }
  void validate() const;
  bool operator==(const PlantParams&) const = default;
};

/// Companion-form system  x' = A zeta(x) + lambda B u  with A's last row
/// `alpha` and B's last entry `b_scalar`. For the linear form zeta is the
/// identity; for the nonlinear form zeta(x) = [sin x1, x2, ..., xn].
class CompanionSystem {
 public:
  CompanionSystem(Vector alpha, double b_scalar, Form form, double lambda_scale = 1.0);

  const Vector& alpha() const { return alpha_; }
  double b_scalar() const { return b_scalar_; }
  double lambda_scale() const { return lambda_scale_; }
  Form form() const { return form_; }
  Eigen::Index dim() const { return alpha_.size(); }

  /// Full A matrix (super-diagonal ones, last row alpha).
  Matrix a_matrix() const;
  /// B_r column [0, ..., b_scalar].
  Vector b_column() const;

 private:
  Vector alpha_;
  double b_scalar_;
  Form form_;
  double lambda_scale_;
};

struct PlantState {
  Vector x;
  double t = 0.0;
};

CompanionSystem companion_from_pendulum(const PlantParams& params, Form form);

/// phi applied to the first coordinate; identity for the linear form.
double phi(Form form, double x1);

Vector zeta(const Vector& x, const CompanionSystem& system);

Vector plant_derivative(const CompanionSystem& system, const Vector& x, double u);

/// Advances `dt` seconds with `substeps` Euler steps, holding u constant.
PlantState step_plant(const CompanionSystem& system, const PlantState& state, double u,
                      double dt, int substeps);

/// 1/2 m l^2 th'^2 + m g l cos th, with th = 0 upright (nonlinear pendulum).
/// Non-increasing when u = 0 and b > 0.
double pendulum_energy(const PlantParams& params, const Vector& x);

}  // namespace mracrl
