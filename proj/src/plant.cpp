#include "mracrl/plant.hpp"

#include <cmath>
#include <string>

namespace mracrl {

std::string_view to_string(Form form) {
  return form == Form::kLinear ? "linear" : "nonlinear";
}

Form form_from_string(std::string_view s) {
  if (s == "linear") return Form::kLinear;
  if (s == "nonlinear") return Form::kNonlinear;
  throw ArgumentError("unknown form '" + std::string(s) + "' (expected linear|nonlinear)");
}

void PlantParams::validate() const {
  if (!(m > 0.0 && l > 0.0 && b > 0.0 && g > 0.0)) {
    throw ArgumentError("PlantParams: m, l, b, g must all be positive");
  }
}

CompanionSystem::CompanionSystem(Vector alpha, double b_scalar, Form form, double lambda_scale)
    : alpha_(std::move(alpha)), b_scalar_(b_scalar), form_(form), lambda_scale_(lambda_scale) {
  if (alpha_.size() < 1) throw DimensionError("CompanionSystem: empty alpha");
  if (!alpha_.allFinite() || !std::isfinite(b_scalar_)) {
    throw NumericError("CompanionSystem: non-finite coefficients");
  }
  for (Eigen::Index i = 0; i < alpha_.size(); ++i) {
    if (alpha_(i) == 0.0) {
      throw DegenerateParameterError("CompanionSystem: alpha[" + std::to_string(i) +
                                     "] is zero; its sign must be known");
    }
  }
  if (b_scalar_ == 0.0) throw DegenerateParameterError("CompanionSystem: b is zero");
  if (!(lambda_scale_ > 0.0)) throw ArgumentError("CompanionSystem: lambda must be positive");
}

Matrix CompanionSystem::a_matrix() const {
  const Eigen::Index n = dim();
  Matrix A = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) A(i, i + 1) = 1.0;
  A.row(n - 1) = alpha_.transpose();
  return A;
}

Vector CompanionSystem::b_column() const {
  Vector B = Vector::Zero(dim());
  B(dim() - 1) = b_scalar_;
  return B;
}

CompanionSystem companion_from_pendulum(const PlantParams& params, Form form) {
  params.validate();
  const double inertia = params.m * params.l * params.l;
  Vector alpha(2);
  alpha << params.g / params.l, -params.b / inertia;
  return CompanionSystem(alpha, 1.0 / inertia, form);
}

double phi(Form form, double x1) { return form == Form::kLinear ? x1 : std::sin(x1); }

Vector zeta(const Vector& x, const CompanionSystem& system) {
  if (x.size() != system.dim()) {
    throw ArgumentError("zeta: state length " + std::to_string(x.size()) +
                        " != system dimension " + std::to_string(system.dim()));
  }
  Vector z = x;
  z(0) = phi(system.form(), x(0));
  return z;
}

Vector plant_derivative(const CompanionSystem& system, const Vector& x, double u) {
  const Vector z = zeta(x, system);
  const Eigen::Index n = system.dim();
  Vector dx(n);
  // Super-diagonal of A acts on zeta, whose entries 2..n are copies of x.
  for (Eigen::Index i = 0; i + 1 < n; ++i) dx(i) = z(i + 1);
  dx(n - 1) = system.alpha().dot(z) + system.lambda_scale() * system.b_scalar() * u;
  if (!dx.allFinite()) throw NumericError("plant_derivative: non-finite result");
  return dx;
}

PlantState step_plant(const CompanionSystem& system, const PlantState& state, double u,
                      double dt, int substeps) {
  if (substeps < 1) throw ArgumentError("step_plant: substeps must be >= 1");
  if (!(dt > 0.0)) throw ArgumentError("step_plant: dt must be positive");
  const double h = dt / substeps;
  const auto f = [&](const Vector& x) { return plant_derivative(system, x, u); };
  PlantState next{state.x, state.t};
  for (int k = 0; k < substeps; ++k) next.x = euler_step(f, next.x, h);
  next.t = state.t + dt;
  return next;
}

double pendulum_energy(const PlantParams& p, const Vector& x) {
  return 0.5 * p.m * p.l * p.l * x(1) * x(1) + p.m * p.g * p.l * std::cos(x(0));
}

}  // namespace mracrl
