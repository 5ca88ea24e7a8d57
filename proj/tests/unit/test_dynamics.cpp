#include <doctest.h>

#include <cmath>

#include "covmech/catalog.hpp"
#include "covmech/dynamics.hpp"
#include "covmech/errors.hpp"
#include "covmech/sampling.hpp"
#include "oracles.hpp"

using namespace covmech;

TEST_CASE("Hamiltonian values") {
  const System flat = build_flat_plane({});
  CHECK(hamiltonian_eval(flat.hamiltonian, {Eigen::Vector2d(0, 0), Eigen::Vector2d(3, 4), {}}) == 12.5);

  const System qd = build_quantum_dot({1.0, 1.0, 0.0, 0.0});
  CHECK(hamiltonian_eval(qd.hamiltonian, {Eigen::Vector3d(1, 0, 0.7), Eigen::Vector3d::Zero(), {}}) ==
        doctest::Approx(0.5).epsilon(1e-15));

  const System kerr0 = build_kerr({1.0, 0.0});
  for (const auto& p : sample_points(kerr0, 50, 12)) {
    const double ref = oracle::schwarzschild_hamiltonian(1.0, p.x, p.pi);
    CHECK(std::abs(hamiltonian_eval(kerr0.hamiltonian, p) - ref) <= 1e-12 * std::max(1.0, std::abs(ref)));
  }
  const System kerr = build_kerr({1.0, 0.8});
  for (const auto& p : sample_points(kerr, 50, 13)) {
    const double ref = oracle::kerr_hamiltonian(1.0, 0.8, p.x, p.pi);
    CHECK(std::abs(hamiltonian_eval(kerr.hamiltonian, p) - ref) <= 1e-12 * std::max(1.0, std::abs(ref)));
  }
}

TEST_CASE("analytic Hamiltonian gradient matches differences") {
  for (const auto& name : system_names()) {
    const System sys = build_system(name, {});
    for (const auto& p : sample_points(sys, 10, 2)) {
      const auto a = hamiltonian_gradient(sys.hamiltonian, p);
      const auto b = hamiltonian_observable(sys.hamiltonian).gradient_fd(p);
      CHECK((a.dx - b.dx).cwiseAbs().maxCoeff() <= 1e-7 * std::max(1.0, b.dx.norm()));
      CHECK((a.dpi - b.dpi).cwiseAbs().maxCoeff() <= 1e-7 * std::max(1.0, b.dpi.norm()));
    }
  }
}

TEST_CASE("bracket equations of motion match the force laws") {
  for (const auto& name : system_names()) {
    ParamMap params;
    if (name == "flat-plane") params = {{"B", 0.9}, {"q", -1.3}, {"m", 2.0}};
    const System sys = build_system(name, params);
    for (const auto& p : sample_points(sys, 100, 77)) {
      const PhaseTangent a = equations_of_motion(sys.hamiltonian, p);
      const PhaseTangent b = equations_of_motion_force_law(sys.hamiltonian, p);
      const double sx = std::max(1.0, b.dx.cwiseAbs().maxCoeff());
      const double sp = std::max(1.0, b.dpi.cwiseAbs().maxCoeff());
      CHECK((a.dx - b.dx).cwiseAbs().maxCoeff() <= 1e-9 * sx);
      CHECK((a.dpi - b.dpi).cwiseAbs().maxCoeff() <= 1e-9 * sp);
      if (sys.charge_dim() > 0) CHECK((a.dt - b.dt).cwiseAbs().maxCoeff() <= 1e-9);
    }
  }
}

TEST_CASE("flat free particle moves on a straight line") {
  const System flat = build_flat_plane({2.0, 0.0, 0.0});
  IntegratorConfig cfg;
  cfg.method = IntegratorMethod::Rk4Fixed;
  cfg.step = 0.01;
  const PhasePoint p0{Eigen::Vector2d(0.5, -1.0), Eigen::Vector2d(1.0, 3.0), {}};
  const auto traj = integrate(flat.hamiltonian, p0, cfg, 0.0, 10.0);
  REQUIRE(traj.status == TrajectoryStatus::Completed);
  const Eigen::Vector2d expected = p0.x + p0.pi * 10.0 / 2.0;
  CHECK((traj.points.back().x - expected).norm() <= 1e-12);
  CHECK(traj.tau.back() == doctest::Approx(10.0));
  for (std::size_t i = 1; i < traj.tau.size(); ++i) CHECK(traj.tau[i] > traj.tau[i - 1]);
}

TEST_CASE("cyclotron orbit") {
  const double q = 1.5, B = 0.8, m = 1.2;
  const System sys = build_flat_plane({m, q, B});
  const oracle::Cyclotron ref{q, B, m, Eigen::Vector2d(0.3, 0.1), Eigen::Vector2d(0.6, -0.2)};
  const PhasePoint p0{ref.x0, m * ref.v0, {}};
  IntegratorConfig cfg;
  cfg.rel_tol = 1e-12;
  cfg.abs_tol = 1e-14;
  const auto traj = integrate(sys.hamiltonian, p0, cfg, 0.0, 20.0);
  REQUIRE(traj.status == TrajectoryStatus::Completed);
  double max_err = 0.0;
  for (std::size_t i = 0; i < traj.points.size(); ++i)
    max_err = std::max(max_err, (traj.points[i].x - ref.position(traj.tau[i])).norm());
  CHECK(max_err <= 1e-8);
  // Radius from the orbit: distance of samples from the guiding centre.
  const Eigen::Vector2d v0 = ref.v0;
  const Eigen::Vector2d centre = ref.x0 + Eigen::Vector2d(v0[1], -v0[0]) / ref.omega();
  double rmin = 1e300, rmax = 0.0;
  for (const auto& p : traj.points) {
    const double r = (p.x - centre).norm();
    rmin = std::min(rmin, r);
    rmax = std::max(rmax, r);
  }
  CHECK(std::abs(rmax - ref.radius()) <= 1e-6 * ref.radius());
  CHECK(std::abs(rmin - ref.radius()) <= 1e-6 * ref.radius());
}

TEST_CASE("momentum and velocity round trip") {
  const System flat = build_flat_plane({2.0, 0.0, 0.0});
  const auto pi = momentum_from_velocity(flat.hamiltonian, Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0));
  CHECK(pi[0] == 2.0);
  CHECK(pi[1] == 0.0);
  const System qd = build_quantum_dot({});
  const auto pq = momentum_from_velocity(qd.hamiltonian, Eigen::Vector3d(2, 0, 0), Eigen::Vector3d(0, 0, 0.3));
  CHECK(pq[2] == doctest::Approx(4 * 0.3));
  const System kerr = build_kerr({});
  for (const auto& p : sample_points(kerr, 20, 5)) {
    const auto v = velocity_from_momentum(kerr.hamiltonian, p.x, p.pi);
    const auto back = momentum_from_velocity(kerr.hamiltonian, p.x, v);
    CHECK((back - p.pi).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, p.pi.cwiseAbs().maxCoeff()));
    CHECK((v - equations_of_motion(kerr.hamiltonian, p).dx).norm() <= 1e-12 * std::max(1.0, v.norm()));
  }
}

TEST_CASE("decoupled harmonic motion of the quantum dot") {
  const double w0 = 1.3;
  const System qd = build_quantum_dot({w0, 0.9, 0.0, 0.0});
  const PhasePoint p0{Eigen::Vector3d(1.0, 0.0, 0.0), Eigen::Vector3d::Zero(), {}};
  IntegratorConfig cfg;
  cfg.rel_tol = 1e-12;
  cfg.abs_tol = 1e-14;
  const double tau1 = 1.0;  // ρ = cos(ω₀τ) stays positive
  const auto traj = integrate(qd.hamiltonian, p0, cfg, 0.0, tau1, {qd.observable("H")});
  REQUIRE(traj.status == TrajectoryStatus::Completed);
  CHECK(traj.points.back().x[0] == doctest::Approx(std::cos(w0 * tau1)).epsilon(1e-9));
  CHECK(traj.points.back().x[1] == 0.0);
  CHECK(traj.monitors[0].initial == doctest::Approx(0.5 * w0 * w0));
  CHECK(traj.monitors[0].max_abs() <= 1e-11);
}

TEST_CASE("Wong precession keeps the Casimir") {
  const System su2 = build_su2_plane({});
  const auto traj = integrate(su2.hamiltonian, su2.initial, IntegratorConfig{}, 0.0, 50.0, {su2.observable("casimir")});
  REQUIRE(traj.status == TrajectoryStatus::Completed);
  CHECK(traj.monitors[0].max_relative() <= 1e-9);
}

TEST_CASE("integrator statuses and config validation") {
  const System qd = build_quantum_dot({1.0, 1.0, 0.0, 0.0});
  // Heads straight for the axis.
  const PhasePoint p0{Eigen::Vector3d(0.5, 0.0, 0.0), Eigen::Vector3d(-1.0, 0.0, 0.0), {}};
  IntegratorConfig cfg;
  cfg.domain_margin = 0.05;
  const auto traj = integrate(qd.hamiltonian, p0, cfg, 0.0, 5.0);
  CHECK(traj.status == TrajectoryStatus::DomainStop);
  for (const auto& p : traj.points) CHECK(qd.hamiltonian.ctx.chart.in_domain(p.x));

  IntegratorConfig few;
  few.max_steps = 3;
  const auto t2 = integrate(qd.hamiltonian, qd.initial, few, 0.0, 100.0);
  CHECK(t2.status == TrajectoryStatus::MaxStepsExceeded);
  CHECK_THROWS_AS(t2.throw_if_failed(), MaxStepsExceeded);

  IntegratorConfig bad;
  bad.rel_tol = -1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  CHECK(integrator_method_from_string("rk4") == IntegratorMethod::Rk4Fixed);
  CHECK(integrator_method_from_string("rk45-adaptive") == IntegratorMethod::Rk45Adaptive);
}
