#include <doctest.h>

#include <cmath>

#include "covmech/catalog.hpp"
#include "covmech/dynamics.hpp"
#include "covmech/errors.hpp"
#include "covmech/gauge.hpp"
#include "covmech/sampling.hpp"

using namespace covmech;

TEST_CASE("structure constants") {
  const auto f = StructureConstants::su2();
  CHECK(f(0, 1, 2) == 1.0);
  CHECK(f(1, 0, 2) == -1.0);
  CHECK(f(1, 2, 0) == 1.0);
  CHECK(f.jacobi_residual() == 0.0);
  CHECK(StructureConstants::abelian(2).jacobi_residual() == 0.0);
  std::vector<double> bad(8, 0.0);
  bad[0 * 4 + 1 * 2 + 0] = 1.0;  // f(0,1,0) without its antisymmetric partner
  CHECK_THROWS(StructureConstants(2, bad));
}

TEST_CASE("uniform abelian field on the plane") {
  const System sys = build_flat_plane({1.0, 2.0, 0.7});
  const auto& bg = std::get<AbelianBackground>(sys.hamiltonian.ctx.background);
  const auto F = field_strength_abelian(bg, sys.hamiltonian.ctx.chart, Eigen::Vector2d(0.3, -1.2));
  CHECK(F(0, 1) == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(F(1, 0) == -F(0, 1));
  CHECK(F(0, 0) == 0.0);
}

TEST_CASE("quantum-dot field strength carries the Larmor term") {
  const QuantumDotParams p;
  const auto ctx = quantum_dot_context(p);
  const auto& bg = std::get<AbelianBackground>(ctx.background);
  const Eigen::Vector3d x(1.3, 0.2, 0.4);
  const auto F = field_strength_abelian(bg, ctx.chart, x);
  CHECK(F(0, 2) == doctest::Approx(2.0 * p.omegaL * 1.3).epsilon(1e-14));
  CHECK(F(0, 1) == 0.0);
}

TEST_CASE("SU(2) plane field strength equals eps_ij B^a") {
  SU2PlaneParams p;
  p.g = 1.7;
  const System sys = build_su2_plane(p);
  const auto& bg = std::get<NonAbelianBackground>(sys.hamiltonian.ctx.background);
  for (const auto& pt : sample_points(sys, 100, 1)) {
    const auto F = field_strength_nonabelian(bg, sys.hamiltonian.ctx.chart, pt.x);
    for (int a = 0; a < 3; ++a) {
      CHECK(std::abs(F[a](0, 1) - p.B[a]) <= 1e-12);
      CHECK(F[a](1, 0) == -F[a](0, 1));
    }
  }
}

TEST_CASE("non-abelian field strength keeps the commutator term") {
  // A^1_x = x2... a potential with non-commuting components: A^1_x = 1, A^2_y = 1.
  const auto bg = NonAbelianBackground::from_closure(0.5, StructureConstants::su2(), 2, [](auto x) {
    using S = std::remove_const_t<typename decltype(x)::value_type>;
    std::vector<S> a(6, S(0.0));
    a[0] = S(1.0) + 0.0 * x[0];  // a=0, μ=x
    a[3] = S(1.0);               // a=1, μ=y
    return a;
  });
  const System sys = build_flat_plane({});
  const auto F = field_strength_nonabelian(bg, sys.hamiltonian.ctx.chart, Eigen::Vector2d(0.1, 0.2));
  // F^3_xy = g f_{12}^3 A^1_x A^2_y = 0.5
  CHECK(F[2](0, 1) == doctest::Approx(0.5));
  CHECK(F[0](0, 1) == 0.0);
}

TEST_CASE("abelian gauge transformation leaves F, brackets and orbits unchanged") {
  const System sys = build_flat_plane({1.0, 1.5, 0.8});
  const auto& bg = std::get<AbelianBackground>(sys.hamiltonian.ctx.background);
  const auto moved = apply_gauge_transformation(bg, [](auto x) { return sin(x[0]) * x[1] + x[0] * x[0] * x[1]; });
  const Eigen::Vector2d x(0.4, -0.9);
  const auto F0 = field_strength_abelian(bg, sys.hamiltonian.ctx.chart, x);
  const auto F1 = field_strength_abelian(moved, sys.hamiltonian.ctx.chart, x);
  CHECK((F0 - F1).cwiseAbs().maxCoeff() <= 1e-14);
  const Eigen::VectorXd a0 = bg.potential(x), a1 = moved.potential(x);
  CHECK(a1[0] - a0[0] == doctest::Approx(std::cos(0.4) * -0.9 + 2 * 0.4 * -0.9));

  // Canonical momentum shifts while the covariant one does not.
  const Eigen::Vector2d pi(0.3, 0.2);
  const Eigen::VectorXd p0 = canonical_momentum(bg, x, pi);
  const Eigen::VectorXd p1 = canonical_momentum(moved, x, pi);
  CHECK((covariant_momentum(bg, x, p0) - pi).norm() <= 1e-15);
  CHECK((covariant_momentum(moved, x, p1) - pi).norm() <= 1e-15);

  HamiltonianSpec h2 = sys.hamiltonian;
  h2.ctx.background = moved;
  IntegratorConfig cfg;
  cfg.method = IntegratorMethod::Rk4Fixed;
  cfg.step = 0.01;
  PhasePoint p{x, pi, Eigen::VectorXd()};
  const auto t0 = integrate(sys.hamiltonian, p, cfg, 0.0, 3.0);
  const auto t1 = integrate(h2, p, cfg, 0.0, 3.0);
  CHECK((t0.points.back().x - t1.points.back().x).norm() <= 1e-12);
}

TEST_CASE("scalar potential gradient routes agree") {
  const auto ctx = quantum_dot_context(QuantumDotParams{});
  const Eigen::Vector3d x(0.8, -0.4, 1.0);
  const auto& phi = *ctx.scalar_potential;
  CHECK((phi.gradient(x) - phi.gradient_fd(x)).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK(phi.gradient(x)[2] == 0.0);
}
