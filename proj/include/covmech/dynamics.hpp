#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "covmech/phase.hpp"

namespace covmech {

// H = (1/2m) g^{μν} π_μ π_ν + Φ(x); the gauge fields enter only through the bracket.
struct HamiltonianSpec {
  double mass = 1.0;
  BracketContext ctx;

  BackgroundKind kind() const { return ctx.kind(); }
};

double hamiltonian_eval(const HamiltonianSpec& ham, const PhasePoint& p);
PhaseGradient hamiltonian_gradient(const HamiltonianSpec& ham, const PhasePoint& p);
Observable hamiltonian_observable(const HamiltonianSpec& ham, std::string name = "H");

struct PhaseTangent {
  Eigen::VectorXd dx, dpi, dt;
  Eigen::VectorXd packed() const;
};

// (ẋ, π̇, ṫ) = ({x, H}, {π, H}, {t, H}).
PhaseTangent equations_of_motion(const HamiltonianSpec& ham, const PhasePoint& p);

// Same tangent from the Lorentz/Wong force laws:
//   g_{μν}(ẍ^ν + Γ_{κλ}^ν ẋ^κ ẋ^λ) = (1/m)(force_{μν} ẋ^ν − ∂_μΦ),
//   ṫ_a = −g f_{ab}^c t_c A_μ^b ẋ^μ,
// with π̇_μ = m ∂_λ g_{μν} ẋ^λ ẋ^ν + m g_{μν} ẍ^ν.
PhaseTangent equations_of_motion_force_law(const HamiltonianSpec& ham, const PhasePoint& p);

// π_μ = m g_{μν} v^ν and its inverse.
Eigen::VectorXd momentum_from_velocity(const HamiltonianSpec& ham, const Coords& x, const Eigen::VectorXd& v);
Eigen::VectorXd velocity_from_momentum(const HamiltonianSpec& ham, const Coords& x, const Eigen::VectorXd& pi);

enum class IntegratorMethod { Rk4Fixed, Rk45Adaptive };

std::string_view to_string(IntegratorMethod m);
IntegratorMethod integrator_method_from_string(std::string_view s);

struct IntegratorConfig {
  IntegratorMethod method = IntegratorMethod::Rk45Adaptive;
  double step = 1e-2;        // fixed step, or first trial step when adaptive (<= 0: automatic)
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  long max_steps = 10'000'000;
  double domain_margin = 0.0;
  long record_every = 1;     // keep every n-th accepted step (the last one is always kept)

  void validate() const;
};

enum class TrajectoryStatus { Completed, DomainStop, MaxStepsExceeded, NonFiniteState };
std::string_view to_string(TrajectoryStatus s);

struct MonitorDrift {
  std::string name;
  double initial = 0.0;
  std::vector<double> drift;  // G(τ_i) − G(τ_0), one per sample
  double max_abs() const;
  // max |ΔG| / |G(0)|, or the absolute drift when G(0) = 0.
  double max_relative() const;
};

struct Trajectory {
  std::vector<double> tau;
  std::vector<PhasePoint> points;
  long accepted = 0;
  long rejected = 0;
  TrajectoryStatus status = TrajectoryStatus::Completed;
  std::string message;
  std::vector<MonitorDrift> monitors;

  // Throws MaxStepsExceeded or NonFiniteState for the corresponding status.
  void throw_if_failed() const;
};

Trajectory integrate(const HamiltonianSpec& ham, const PhasePoint& p0, const IntegratorConfig& cfg, double tau0,
                     double tau1, const std::vector<Observable>& monitors = {});

}  // namespace covmech
