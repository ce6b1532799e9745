#include "mracrl/num_core.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace mracrl {

namespace {

void require_square(const Matrix& A, const char* who) {
  if (A.rows() != A.cols() || A.rows() < 1) {
    throw DimensionError(std::string(who) + ": expected a non-empty square matrix, got " +
                         std::to_string(A.rows()) + "x" + std::to_string(A.cols()));
  }
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

// Bass's construction: with beta > ||A||, -(A + beta I) is Hurwitz and
//   (A + beta I) Z + Z (A + beta I)^T = 2 B B^T
// has Z > 0 for a controllable pair. K = B^T Z^-1 then gives
//   (A - B K)^T Z^-1 + Z^-1 (A - B K) = -2 beta Z^-1.
Vector pole_shifting_gain(const Matrix& A, const Vector& B) {
  const Eigen::Index n = A.rows();
  if (is_hurwitz(A)) return Vector::Zero(n);
  const double beta = A.norm() + 1.0;
  const Matrix shifted = A + beta * Matrix::Identity(n, n);
  // Z M^T + M Z = 2 B B^T  <=>  Z (-M^T) + (-M^T)^T Z = -2 B B^T.
  const Matrix Z = lyapunov_kronecker(-shifted.transpose(), 2.0 * B * B.transpose());
  Eigen::LDLT<Matrix> ldlt(symmetrize(Z));
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
      ldlt.vectorD().minCoeff() <= 1e-14 * std::max(1.0, Z.norm())) {
    throw ConvergenceError("solve_care: pair (A, B) is not controllable; no stabilizing start");
  }
  Vector K = ldlt.solve(B);
  if (!is_hurwitz(A - B * K.transpose())) {
    throw ConvergenceError("solve_care: pole-shifting start is not stabilizing");
  }
  return K;
}

}  // namespace

Vector characteristic_polynomial(const Matrix& A) {
  require_square(A, "characteristic_polynomial");
  // Faddeev-LeVerrier: M_k = A M_(k-1) + c_(n-k+1) I,  c_(n-k) = -tr(A M_k) / k.
  const Eigen::Index n = A.rows();
  Vector c(n + 1);
  c(n) = 1.0;
  Matrix M = Matrix::Zero(n, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    M = A * M + c(n - k + 1) * Matrix::Identity(n, n);
    c(n - k) = -(A * M).trace() / static_cast<double>(k);
  }
  return c.head(n);
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

bool is_hurwitz(const Matrix& A) {
  require_square(A, "is_hurwitz");
  if (!A.allFinite()) throw NumericError("is_hurwitz: non-finite entries");
  const Eigen::Index n = A.rows();
  if (n == 1) return A(0, 0) < 0.0;
  if (n == 2) {
    return A.trace() < 0.0 && A.determinant() > 0.0;
  }
  if (n <= 4) {
    // Routh-Hurwitz on s^n + c[n-1] s^(n-1) + ... + c[0].
    const Vector c = characteristic_polynomial(A);
    if ((c.array() <= 0.0).any()) return false;
    if (n == 3) return c(2) * c(1) > c(0);
    return c(3) * c(2) > c(1) &&
           c(3) * c(2) * c(1) > c(1) * c(1) + c(3) * c(3) * c(0);
  }
  Eigen::EigenSolver<Matrix> es(A, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) throw NumericError("is_hurwitz: eigenvalue solve failed");
  return (es.eigenvalues().real().array() < 0.0).all();
}

bool is_symmetric(const Matrix& A, double rel_tol) {
  if (A.rows() != A.cols()) return false;
  return (A - A.transpose()).norm() <= rel_tol * std::max(1.0, A.norm());
}

bool is_positive_definite(const Matrix& A) {
  require_square(A, "is_positive_definite");
  const Eigen::Index n = A.rows();
  if (n <= 3) {
    for (Eigen::Index k = 1; k <= n; ++k) {
      if (!(A.topLeftCorner(k, k).determinant() > 0.0)) return false;
    }
    return true;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(A), Eigen::EigenvaluesOnly);
  return es.info() == Eigen::Success && es.eigenvalues().minCoeff() > 0.0;
}

Matrix lyapunov_kronecker(const Matrix& A, const Matrix& C) {
  require_square(A, "lyapunov");
  const Eigen::Index n = A.rows();
  if (C.rows() != n || C.cols() != n) throw DimensionError("lyapunov: Q shape differs from A");

  // Column-major vec: vec(A^T P) = (I kron A^T) vec P, vec(P A) = (A^T kron I) vec P.
  const Matrix I = Matrix::Identity(n, n);
  const Matrix L = kron(I, A.transpose()) + kron(A.transpose(), I);
  Eigen::FullPivLU<Matrix> lu(L);
  if (!lu.isInvertible()) throw StabilityError("lyapunov: operator is singular");

  const Vector rhs = -Eigen::Map<const Vector>(C.data(), n * n);
  Vector p = lu.solve(rhs);
  // One step of iterative refinement keeps the residual at rounding level
  // for poorly scaled A.
  p += lu.solve(rhs - L * p);
  return symmetrize(Eigen::Map<const Matrix>(p.data(), n, n));
}

double lyapunov_residual(const Matrix& A, const Matrix& P, const Matrix& Q) {
  return (P * A + A.transpose() * P + Q).norm();
}

LyapunovSolution solve_lyapunov(const Matrix& A, const Matrix& Q, const Tolerances& tol) {
  require_square(A, "solve_lyapunov");
  if (Q.rows() != A.rows() || Q.cols() != A.cols()) {
    throw DimensionError("solve_lyapunov: Q shape differs from A_H");
  }
  if (!is_hurwitz(A)) throw StabilityError("solve_lyapunov: A_H is not Hurwitz");
  if (!is_symmetric(Q, tol.symmetry) || !is_positive_definite(Q)) {
    throw ArgumentError("solve_lyapunov: Q must be symmetric positive definite");
  }
  LyapunovSolution sol;
  sol.P = lyapunov_kronecker(A, Q);
  sol.residual_norm = lyapunov_residual(A, sol.P, Q);
  if (sol.residual_norm > tol.lyapunov * std::max(1.0, Q.norm())) {
    throw NumericError("solve_lyapunov: residual " + std::to_string(sol.residual_norm) +
                       " above tolerance");
  }
  return sol;
}

double care_residual(const Matrix& A, const Vector& B, const Matrix& Q, double R,
                     const Matrix& P) {
  const Vector PB = P * B;
  return (A.transpose() * P + P * A - PB * PB.transpose() / R + Q).norm();
}

CareSolution solve_care(const Matrix& A, const Vector& B, const Matrix& Q, double R,
                        const Tolerances& tol) {
  require_square(A, "solve_care");
  const Eigen::Index n = A.rows();
  if (B.size() != n) throw DimensionError("solve_care: B length differs from A");
  if (Q.rows() != n || Q.cols() != n) throw DimensionError("solve_care: Q shape differs from A");
  if (!(R > 0.0)) throw ArgumentError("solve_care: R must be positive");
  if (!is_symmetric(Q, tol.symmetry)) throw ArgumentError("solve_care: Q must be symmetric");

  const double stop = tol.care * std::max(1.0, Q.norm());
  CareSolution sol;
  sol.K = pole_shifting_gain(A, B);
  double best = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= tol.care_max_iterations; ++it) {
    const Matrix Acl = A - B * sol.K.transpose();
    const Matrix rhs = Q + R * sol.K * sol.K.transpose();
    sol.P = lyapunov_kronecker(Acl, rhs);
    sol.K = sol.P * B / R;
    sol.iterations = it;
    sol.residual_norm = care_residual(A, B, Q, R, sol.P);
    if (!std::isfinite(sol.residual_norm)) throw NumericError("solve_care: non-finite iterate");
    if (sol.residual_norm <= stop) return sol;
    // Quadratic convergence has stalled at rounding level.
    if (it > 5 && sol.residual_norm >= best) break;
    best = std::min(best, sol.residual_norm);
  }
  if (sol.residual_norm <= 1e-8 * std::max(1.0, Q.norm()) &&
      is_hurwitz(A - B * sol.K.transpose())) {
    return sol;
  }
  throw ConvergenceError("solve_care: Newton-Kleinman did not converge (residual " +
                         std::to_string(sol.residual_norm) + ")");
}

}  // namespace mracrl
