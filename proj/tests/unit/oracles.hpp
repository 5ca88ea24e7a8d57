#pragma once

// Independent closed forms used as reference values. Nothing here calls the
// library's differentiation or inversion code.

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

// Schwarzschild in (t, r, θ, φ), signature (−,+,+,+).
inline Eigen::Matrix4d schwarzschild_inverse(double M, const Eigen::Vector4d& x) {
  const double r = x[1], s = std::sin(x[2]);
  const double f = 1.0 - 2.0 * M / r;
  Eigen::Matrix4d g = Eigen::Matrix4d::Zero();
  g(0, 0) = -1.0 / f;
  g(1, 1) = f;
  g(2, 2) = 1.0 / (r * r);
  g(3, 3) = 1.0 / (r * r * s * s);
  return g;
}

inline double schwarzschild_hamiltonian(double M, const Eigen::Vector4d& x, const Eigen::Vector4d& p) {
  return 0.5 * p.dot(schwarzschild_inverse(M, x) * p);
}

// Γ^μ_{λν} stored as gamma[λ][ν][μ] (contravariant index last).
inline std::vector<double> schwarzschild_christoffel(double M, const Eigen::Vector4d& x) {
  const double r = x[1], th = x[2];
  const double s = std::sin(th), c = std::cos(th);
  std::vector<double> G(64, 0.0);
  auto set = [&](int up, int a, int b, double v) {
    G[static_cast<std::size_t>((a * 4 + b) * 4 + up)] = v;
    G[static_cast<std::size_t>((b * 4 + a) * 4 + up)] = v;
  };
  set(0, 0, 1, M / (r * (r - 2.0 * M)));
  set(1, 0, 0, M * (r - 2.0 * M) / (r * r * r));
  set(1, 1, 1, -M / (r * (r - 2.0 * M)));
  set(1, 2, 2, -(r - 2.0 * M));
  set(1, 3, 3, -(r - 2.0 * M) * s * s);
  set(2, 1, 2, 1.0 / r);
  set(2, 3, 3, -s * c);
  set(3, 1, 3, 1.0 / r);
  set(3, 2, 3, c / s);
  return G;
}

// Kerr Hamiltonian written out term by term in Boyer–Lindquist coordinates.
inline double kerr_hamiltonian(double M, double a, const Eigen::Vector4d& x, const Eigen::Vector4d& p) {
  const double r = x[1], s = std::sin(x[2]), c = std::cos(x[2]);
  const double delta = r * r - 2.0 * M * r + a * a;
  const double rho2 = r * r + a * a * c * c;
  const double ang = a * s * p[0] + p[3] / s;
  const double lt = (r * r + a * a) * p[0] + a * p[3];
  return (delta * p[1] * p[1] + p[2] * p[2] + ang * ang - lt * lt / delta) / (2.0 * rho2);
}

// Inverse of a 4x4 matrix by cofactors (independent of the library's LU path).
inline Eigen::Matrix4d cofactor_inverse(const Eigen::Matrix4d& m) {
  Eigen::Matrix4d cof;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      Eigen::Matrix3d minor;
      for (int a = 0, ra = 0; a < 4; ++a) {
        if (a == i) continue;
        for (int b = 0, cb = 0; b < 4; ++b) {
          if (b == j) continue;
          minor(ra, cb++) = m(a, b);
        }
        ++ra;
      }
      cof(i, j) = ((i + j) % 2 ? -1.0 : 1.0) * minor.determinant();
    }
  double det = 0.0;
  for (int j = 0; j < 4; ++j) det += m(0, j) * cof(0, j);
  return cof.transpose() / det;
}

// Charged particle in a uniform field B (F_xy = B), π̇ = qF ẋ, m ẋ = π.
struct Cyclotron {
  double q, B, m;
  Eigen::Vector2d x0, v0;
  double omega() const { return q * B / m; }
  Eigen::Vector2d position(double tau) const {
    const double w = omega(), s = std::sin(w * tau), c = std::cos(w * tau);
    return x0 + Eigen::Vector2d(v0[0] * s - v0[1] * c + v0[1], v0[0] * c + v0[1] * s - v0[0]) / w;
  }
  Eigen::Vector2d velocity(double tau) const {
    const double w = omega(), s = std::sin(w * tau), c = std::cos(w * tau);
    return Eigen::Vector2d(v0[0] * c + v0[1] * s, -v0[0] * s + v0[1] * c);
  }
  double radius() const { return m * v0.norm() / std::abs(q * B); }
};

}  // namespace oracle
