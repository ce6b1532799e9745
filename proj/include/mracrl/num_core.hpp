#pragma once

// Small dense kernels shared by the controllers: stability checks, the
// Lyapunov and Riccati solvers used to build A_H / P and the LQR gain, and
// the fixed-step Euler integrator.

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "mracrl/errors.hpp"

namespace mracrl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Tolerances {
  /// Lyapunov residual bound, relative to max(1, ||Q||_F).
  double lyapunov = 1e-10;
  /// Newton-Kleinman stopping residual, relative to max(1, ||Q||_F).
  double care = 1e-10;
  int care_max_iterations = 100;
  /// Relative asymmetry accepted by symmetric-input checks.
  double symmetry = 1e-12;
};

struct LyapunovSolution {
  Matrix P;
  double residual_norm = 0.0;
};

struct CareSolution {
  Matrix P;
  Vector K;  // gain row, u = -K x
  double residual_norm = 0.0;
  int iterations = 0;
};

bool all_finite(const Matrix& m);

/// Monic characteristic polynomial coefficients c[0..n-1] of
/// s^n + c[n-1] s^(n-1) + ... + c[0].
Vector characteristic_polynomial(const Matrix& A);

/// True iff every eigenvalue of A has strictly negative real part.
/// Closed-form trace/determinant test for n <= 2, Routh-Hurwitz for n = 3, 4,
/// eigenvalues above that.
bool is_hurwitz(const Matrix& A);

bool is_symmetric(const Matrix& A, double rel_tol = 1e-12);

/// Leading principal minors for n <= 3, symmetric eigenvalues otherwise.
bool is_positive_definite(const Matrix& A);

/// Solves P A + A^T P = -Q for symmetric positive definite P.
LyapunovSolution solve_lyapunov(const Matrix& A, const Matrix& Q,
                                const Tolerances& tol = {});

/// Kronecker-vectorized solve of P A + A^T P = -C for any symmetric C.
/// No stability or definiteness checks; used by the Riccati iteration where
/// the right-hand side is only semidefinite.
Matrix lyapunov_kronecker(const Matrix& A, const Matrix& C);

/// Residual ||P A + A^T P + Q||_F.
double lyapunov_residual(const Matrix& A, const Matrix& P, const Matrix& Q);

/// Continuous-time algebraic Riccati equation with a single input column:
///   A^T P + P A - P B R^-1 B^T P + Q = 0,  K = R^-1 B^T P.
/// Newton-Kleinman iteration started from a pole-shifting stabilizing gain.
CareSolution solve_care(const Matrix& A, const Vector& B, const Matrix& Q, double R,
                        const Tolerances& tol = {});

double care_residual(const Matrix& A, const Vector& B, const Matrix& Q, double R,
                     const Matrix& P);

/// One explicit Euler step x + dt * f(x). `f` is evaluated exactly once.
template <class Derivative>
Vector euler_step(Derivative&& f, const Vector& x, double dt) {
  if (!(dt > 0.0)) throw ArgumentError("euler_step: dt must be positive");
  const Vector dx = f(x);
  if (dx.size() != x.size()) {
    throw DimensionError("euler_step: derivative length " + std::to_string(dx.size()) +
                         " != state length " + std::to_string(x.size()));
  }
  if (!dx.allFinite()) {
    throw NumericError("euler_step: non-finite derivative (dt = " + std::to_string(dt) + ")");
  }
  return x + dt * dx;
}

}  // namespace mracrl
