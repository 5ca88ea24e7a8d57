#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "covmech/dynamics.hpp"
#include "covmech/phase.hpp"
#include "covmech/tensor_field.hpp"

namespace covmech {

using ParamMap = std::map<std::string, double>;

// Box used for random verification points: coordinates uniform in [lo, hi],
// momenta uniform in a ball, charges uniform on a sphere.
struct SampleBox {
  Eigen::VectorXd lo, hi;
  double momentum_radius = 1.0;
  double charge_radius = 0.0;
};

struct Tolerances {
  double conserved = 1e-9;  // |{G,H}| / scale
  double killing = 1e-9;    // killing_residual / scale
  double hierarchy = 1e-9;  // hierarchy_residual / scale
  double closure = 1e-6;    // |{{G,K},H}| / scale
  double drift = 1e-7;      // relative trajectory drift
};

struct NamedField {
  std::string name;
  SymmetricTensorField field;
};

struct NamedSeries {
  std::string name;
  GeneratorSeries series;
};

// A deliberately broken variant that must fail its check by a wide margin.
struct NegativeControl {
  enum class Kind { Conserved, Hierarchy };
  std::string name;
  std::string description;
  Kind kind = Kind::Conserved;
  HamiltonianSpec hamiltonian;  // may differ from the system's (detuned parameters)
  Observable observable;
  std::optional<GeneratorSeries> series;
  double tolerance = 0.0;
};

class System {
 public:
  std::string name;
  ParamMap params;
  HamiltonianSpec hamiltonian;
  std::vector<Observable> constants;  // registered constants of motion
  std::vector<NamedField> killing_fields;
  std::vector<NamedSeries> series;
  std::vector<NegativeControl> negative_controls;
  std::vector<std::pair<std::string, std::string>> closure_pairs;
  // Names that exist for this system but cannot be built with the current parameters.
  std::map<std::string, std::string> unavailable;
  SampleBox box;
  PhasePoint initial;
  double span = 1.0;
  Tolerances tol;

  int dim() const { return hamiltonian.ctx.dim(); }
  int charge_dim() const { return hamiltonian.ctx.charge_dim(); }

  // Registered constants, then x<i>, pi<i>, t<a>, coordinate names and pi_<coordinate>.
  // Throws UnknownName, or DetunedParameters for names listed in `unavailable`.
  Observable observable(const std::string& name) const;
  const Observable* find_constant(const std::string& name) const;
  std::vector<std::string> constant_names() const;
};

struct KerrParams {
  double M = 1.0;
  double a = 0.8;
};

struct QuantumDotParams {
  double omega0 = 1.0;
  double omegaz = 1.0;
  double omegaL = 1.7320508075688772;
  double kappa = 0.5;

  bool tuned() const;
};

struct SU2PlaneParams {
  double g = 1.0;
  Eigen::Vector3d B{0.3, -0.4, 1.2};
  Eigen::Vector3d t0{0.5, 0.2, -0.7};
};

struct FlatPlaneParams {
  double m = 1.0;
  double q = 1.0;
  double B = 0.0;
};

System build_kerr(const KerrParams& p);
System build_quantum_dot(const QuantumDotParams& p);
System build_su2_plane(const SU2PlaneParams& p);
System build_flat_plane(const FlatPlaneParams& p);

// The rank-4 invariant of the quantum dot as a direct closure and as a
// factorial-weighted series. Throws DetunedParameters unless p.tuned() or allow_detuned.
Observable quantum_dot_g4(const QuantumDotParams& p, bool allow_detuned = false);
GeneratorSeries quantum_dot_g4_series(const QuantumDotParams& p, bool allow_detuned = false);
BracketContext quantum_dot_context(const QuantumDotParams& p, double larmor_orientation = 1.0);

// Carter constant: angular term r²(a sinθ p_t + p_φ/sinθ)². With sin2_variant
// the term is r²(a p_t + p_φ/sin²θ)², which is not conserved.
Observable kerr_carter(const KerrParams& p, bool sin2_variant = false);
SymmetricTensorField kerr_carter_tensor(const KerrParams& p);

// Catalog names and parameter defaults for config-driven construction.
std::vector<std::string> system_names();
ParamMap default_params(const std::string& system);
// Unknown parameter names raise ConfigError; unknown systems raise UnknownName.
System build_system(const std::string& system, const ParamMap& params);

}  // namespace covmech
