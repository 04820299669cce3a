#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

namespace esbgk {

template <typename Scalar>
using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;
template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;

/// Eigenvalues of a symmetric 3x3 matrix by cyclic Jacobi rotations.
/// Used where the trigonometric formula loses accuracy (clustered spectrum).
template <typename Scalar>
Vector3<Scalar> sym3_eigenvalues_jacobi(Matrix3<Scalar> a, int max_sweeps = 50) {
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    const Scalar off = a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);
    if (off <= std::numeric_limits<Scalar>::min()) break;
    for (int p = 0; p < 2; ++p) {
      for (int q = p + 1; q < 3; ++q) {
        if (a(p, q) == Scalar(0)) continue;
        const Scalar tau = (a(q, q) - a(p, p)) / (Scalar(2) * a(p, q));
        const Scalar t = (tau >= 0 ? Scalar(1) : Scalar(-1)) /
                         (std::abs(tau) + std::sqrt(Scalar(1) + tau * tau));
        const Scalar c = Scalar(1) / std::sqrt(Scalar(1) + t * t);
        const Scalar s = t * c;
        Matrix3<Scalar> rot = Matrix3<Scalar>::Identity();
        rot(p, p) = c;
        rot(q, q) = c;
        rot(p, q) = s;
        rot(q, p) = -s;
        a = rot.transpose() * a * rot;
        a(p, q) = a(q, p) = Scalar(0);
      }
    }
  }
  Vector3<Scalar> ev = a.diagonal();
  std::sort(ev.data(), ev.data() + 3);
  return ev;
}

/// Ascending eigenvalues of a symmetric 3x3 matrix.
///
/// Closed-form trigonometric solution of the characteristic cubic. When the
/// normalised discriminant p²/scale² falls below `jacobi_threshold` the three
/// roots are nearly coincident and the arccos step is ill-conditioned, so the
/// Jacobi iteration takes over.
template <typename Scalar>
Vector3<Scalar> sym3_eigenvalues(const Matrix3<Scalar>& a, Scalar jacobi_threshold = Scalar(1e-12)) {
  const Scalar off = a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);
  const Scalar q = a.trace() / Scalar(3);
  const Scalar d0 = a(0, 0) - q, d1 = a(1, 1) - q, d2 = a(2, 2) - q;
  const Scalar p2 = d0 * d0 + d1 * d1 + d2 * d2 + Scalar(2) * off;
  const Scalar scale2 = std::max(q * q, a.squaredNorm() / Scalar(3));
  if (off == Scalar(0)) {
    Vector3<Scalar> ev = a.diagonal();
    std::sort(ev.data(), ev.data() + 3);
    return ev;
  }
  if (p2 <= jacobi_threshold * scale2) return sym3_eigenvalues_jacobi<Scalar>(a);

  const Scalar p = std::sqrt(p2 / Scalar(6));
  const Matrix3<Scalar> b = (a - q * Matrix3<Scalar>::Identity()) / p;
  const Scalar r = std::clamp(b.determinant() / Scalar(2), Scalar(-1), Scalar(1));
  const Scalar phi = std::acos(r) / Scalar(3);
  const Scalar two_pi_3 = Scalar(2) * std::numbers::pi_v<Scalar> / Scalar(3);
  const Scalar largest = q + Scalar(2) * p * std::cos(phi);
  const Scalar smallest = q + Scalar(2) * p * std::cos(phi + two_pi_3);
  const Scalar middle = Scalar(3) * q - largest - smallest;
  return Vector3<Scalar>(smallest, middle, largest);
}

/// Inverse of a symmetric positive definite 3x3 matrix via the adjugate.
template <typename Scalar>
Matrix3<Scalar> spd3_inverse(const Matrix3<Scalar>& a) {
  Matrix3<Scalar> adj;
  adj(0, 0) = a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1);
  adj(0, 1) = a(0, 2) * a(2, 1) - a(0, 1) * a(2, 2);
  adj(0, 2) = a(0, 1) * a(1, 2) - a(0, 2) * a(1, 1);
  adj(1, 1) = a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0);
  adj(1, 2) = a(0, 2) * a(1, 0) - a(0, 0) * a(1, 2);
  adj(2, 2) = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  adj(1, 0) = adj(0, 1);
  adj(2, 0) = adj(0, 2);
  adj(2, 1) = adj(1, 2);
  const Scalar det = a(0, 0) * adj(0, 0) + a(0, 1) * adj(1, 0) + a(0, 2) * adj(2, 0);
  return adj / det;
}

}  // namespace esbgk
