#include "covmech/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "covmech/errors.hpp"
#include "covmech/geometry.hpp"
#include "covmech/killing.hpp"

namespace covmech {

namespace {

using std::cos;
using std::sin;
using std::sqrt;

constexpr double kPi = std::numbers::pi;

template <typename S>
using Vec = std::vector<S>;

// Canonical component vector of a rank-n field from (index list, value) pairs.
struct CanonicalFill {
  std::shared_ptr<const SymmetricLayout> layout;
  explicit CanonicalFill(int rank, int dim) : layout(SymmetricLayout::get(rank, dim)) {}
  std::size_t slot(std::initializer_list<int> idx) const {
    return layout->canonical_of(std::span(idx.begin(), idx.size()));
  }
  std::size_t powers(std::initializer_list<int> p) const {
    return layout->canonical_of_powers(std::span(p.begin(), p.size()));
  }
  std::size_t size() const { return layout->size(); }
};

SymmetricTensorField constant_vector(int dim, int axis) {
  SymmetricTensor v(1, dim);
  v[static_cast<std::size_t>(axis)] = 1.0;
  return SymmetricTensorField::constant(v);
}

MetricChart flat_plane_chart() {
  return MetricChart::from_closure(
             "plane", {"x", "y"},
             [](auto x) {
               using S = std::remove_const_t<typename decltype(x)::value_type>;
               return Vec<S>{S(1.0), S(0.0), S(0.0), S(1.0)};
             },
             [](const Coords& x) { return x.size() == 2 && x.allFinite(); })
      .with_signature({1, 1});
}

// Rotation generator (−y, x) on the plane.
SymmetricTensorField plane_rotation() {
  return SymmetricTensorField::from_closure(1, 2, [](auto x) {
    using S = std::remove_const_t<typename decltype(x)::value_type>;
    return Vec<S>{-x[1], x[0]};
  });
}

std::vector<NamedField> plane_killing_fields(const MetricChart& chart) {
  return {{"d_x", constant_vector(2, 0)},
          {"d_y", constant_vector(2, 1)},
          {"rotation", plane_rotation()},
          {"inverse_metric", inverse_metric_field(chart)}};
}

void require_finite(const ParamMap& params) {
  for (const auto& [k, v] : params)
    if (!std::isfinite(v)) throw ConfigError("params." + k, "must be a finite number");
}

}  // namespace

// ---------------------------------------------------------------- System

const Observable* System::find_constant(const std::string& n) const {
  for (const auto& c : constants)
    if (c.name() == n) return &c;
  return nullptr;
}

std::vector<std::string> System::constant_names() const {
  std::vector<std::string> out;
  for (const auto& c : constants) out.push_back(c.name());
  return out;
}

Observable System::observable(const std::string& n) const {
  if (const auto* c = find_constant(n)) return *c;
  if (const auto it = unavailable.find(n); it != unavailable.end()) throw DetunedParameters(it->second);
  const int d = dim();
  const int k = charge_dim();
  auto indexed = [&](const std::string& prefix, int limit) -> int {
    if (n.size() <= prefix.size() || n.compare(0, prefix.size(), prefix) != 0) return -1;
    const std::string rest = n.substr(prefix.size());
    if (!std::all_of(rest.begin(), rest.end(), [](char ch) { return ch >= '0' && ch <= '9'; })) return -1;
    const int i = std::stoi(rest);
    return i < limit ? i : -1;
  };
  if (const int i = indexed("pi", d); i >= 0) return momentum_observable(i, d, k, n);
  if (const int i = indexed("x", d); i >= 0) return coordinate_observable(i, d, k, n);
  if (const int i = indexed("t", k); i >= 0) return charge_observable(i, d, k, n);
  const auto& names = hamiltonian.ctx.chart.coordinate_names();
  for (int i = 0; i < d; ++i) {
    if (n == names[static_cast<std::size_t>(i)]) return coordinate_observable(i, d, k, n);
    if (n == "pi_" + names[static_cast<std::size_t>(i)]) return momentum_observable(i, d, k, n);
  }
  throw UnknownName("unknown observable '" + n + "' for system '" + name + "'");
}

// ---------------------------------------------------------------- Kerr

namespace {

void check_kerr(const KerrParams& p) {
  if (!(p.M > 0.0) || !std::isfinite(p.a)) throw ConfigError("params.M", "Kerr mass must be positive");
  if (!(std::abs(p.a) < p.M)) throw ExtremalParams("Kerr parameters need |a| < M");
}

// Boyer–Lindquist metric, signature (−,+,+,+), coordinates (t, r, θ, φ).
MetricChart kerr_chart(const KerrParams& p) {
  const double M = p.M, a = p.a;
  const double rp = M + std::sqrt(M * M - a * a), rm = M - std::sqrt(M * M - a * a);
  auto domain = [M, a](const Coords& x) {
    if (x.size() != 4 || !x.allFinite()) return false;
    const double r = x[1], th = x[2];
    const double delta = r * r - 2.0 * M * r + a * a;
    const double rho2 = r * r + a * a * std::cos(th) * std::cos(th);
    return delta > 0.0 && rho2 > 0.0 && std::sin(th) != 0.0;
  };
  return MetricChart::from_closure(
             "kerr", {"t", "r", "theta", "phi"},
             [M, a](auto x) {
               using S = std::remove_const_t<typename decltype(x)::value_type>;
               const S r = x[1];
               const S s = sin(x[2]), c = cos(x[2]);
               const S rho2 = r * r + a * a * c * c;
               const S delta = r * r - 2.0 * M * r + a * a;
               Vec<S> g(16, S(0.0));
               g[0] = -(1.0 - 2.0 * M * r / rho2);
               g[3] = -2.0 * M * a * r * s * s / rho2;
               g[5] = rho2 / delta;
               g[10] = rho2;
               g[15] = (r * r + a * a + 2.0 * M * a * a * r * s * s / rho2) * s * s;
               return g;
             },
             domain)
      .with_boundary_distance([rp, rm](const Coords& x) {
        return std::min({std::abs(x[1] - rp), std::abs(x[1] - rm), std::abs(std::sin(x[2]))});
      })
      .with_signature({-1, 1, 1, 1});
}

}  // namespace

Observable kerr_carter(const KerrParams& p, bool sin2_variant) {
  check_kerr(p);
  const double M = p.M, a = p.a;
  return Observable::from_closure(sin2_variant ? "carter_sin2" : "carter", 4, 0,
                                  [M, a, sin2_variant](auto x, auto pi, auto) {
                                    using S = std::remove_const_t<typename decltype(x)::value_type>;
                                    const S r = x[1];
                                    const S s = sin(x[2]), c = cos(x[2]);
                                    const S rho2 = r * r + a * a * c * c;
                                    const S delta = r * r - 2.0 * M * r + a * a;
                                    const S pt = pi[0], pr = pi[1], pth = pi[2], pph = pi[3];
                                    const S ang = sin2_variant ? a * pt + pph / (s * s) : a * s * pt + pph / s;
                                    const S lt = (r * r + a * a) * pt + a * pph;
                                    return (-delta * a * a * c * c * pr * pr + r * r * pth * pth + r * r * ang * ang +
                                            a * a * c * c / delta * lt * lt) /
                                           (2.0 * rho2);
                                  });
}

SymmetricTensorField kerr_carter_tensor(const KerrParams& p) {
  check_kerr(p);
  const double M = p.M, a = p.a;
  const CanonicalFill fill(2, 4);
  return SymmetricTensorField::from_closure(2, 4, [M, a, fill](auto x) {
    using S = std::remove_const_t<typename decltype(x)::value_type>;
    const S r = x[1];
    const S s = sin(x[2]), c = cos(x[2]);
    const S rho2 = r * r + a * a * c * c;
    const S delta = r * r - 2.0 * M * r + a * a;
    const S w = 1.0 / (2.0 * rho2);
    const S r2a2 = r * r + a * a;
    Vec<S> k(fill.size(), S(0.0));
    k[fill.slot({0, 0})] = w * (r * r * a * a * s * s + a * a * c * c * r2a2 * r2a2 / delta);
    k[fill.slot({0, 3})] = w * (r * r * a + a * a * a * c * c * r2a2 / delta);
    k[fill.slot({1, 1})] = -w * delta * a * a * c * c;
    k[fill.slot({2, 2})] = w * r * r;
    k[fill.slot({3, 3})] = w * (r * r / (s * s) + a * a * a * a * c * c / delta);
    return k;
  });
}

System build_kerr(const KerrParams& p) {
  check_kerr(p);
  System sys;
  sys.name = "kerr";
  sys.params = {{"M", p.M}, {"a", p.a}};
  sys.hamiltonian.mass = 1.0;
  sys.hamiltonian.ctx.chart = kerr_chart(p);
  const int d = 4;

  sys.constants.push_back(hamiltonian_observable(sys.hamiltonian, "H"));
  sys.constants.push_back(momentum_observable(0, d, 0, "p_t"));
  sys.constants.push_back(momentum_observable(3, d, 0, "p_phi"));
  sys.constants.push_back(kerr_carter(p).with_polynomial_form([&] {
    GeneratorSeries s(d, 0, false);
    s.set(2, kerr_carter_tensor(p));
    return s;
  }()));

  sys.killing_fields = {{"carter", kerr_carter_tensor(p)},
                        {"d_t", constant_vector(d, 0)},
                        {"d_phi", constant_vector(d, 3)},
                        {"inverse_metric", inverse_metric_field(sys.hamiltonian.ctx.chart)}};

  NegativeControl sin2;
  sin2.name = "carter_sin2";
  sin2.description = "Carter constant with the angular term r^2 (a p_t + p_phi / sin^2 theta)^2";
  sin2.kind = NegativeControl::Kind::Conserved;
  sin2.hamiltonian = sys.hamiltonian;
  sin2.observable = kerr_carter(p, true);
  sys.negative_controls.push_back(std::move(sin2));

  sys.closure_pairs = {{"p_phi", "carter"}, {"p_t", "carter"}, {"p_t", "p_phi"}};

  const double M = p.M;
  sys.box.lo = Eigen::Vector4d(0.0, 3.0 * M, 0.2, 0.0);
  sys.box.hi = Eigen::Vector4d(1.0, 20.0 * M, kPi - 0.2, 2.0 * kPi);
  sys.box.momentum_radius = 1.0;

  // Bound, non-equatorial timelike orbit: E = 0.965, L = 3.4, p_θ fixed, p_r from H = −1/2.
  PhasePoint init;
  init.x = Eigen::Vector4d(0.0, 10.0 * M, kPi / 2.0 - 0.3, 0.0);
  init.pi = Eigen::Vector4d(-0.965, 0.0, 1.2 * M, 3.4 * M);
  init.t = Eigen::VectorXd();
  {
    HamiltonianSpec h = sys.hamiltonian;
    const double h0 = hamiltonian_eval(h, init);
    const double grr = inverse_metric_at(h.ctx.chart, init.x)(1, 1);
    const double pr2 = (-0.5 - h0) / (0.5 * grr);
    init.pi[1] = pr2 > 0.0 ? std::sqrt(pr2) : 0.0;
  }
  sys.initial = init;
  sys.span = 1e4 * M;
  sys.tol = {1e-8, 1e-8, 1e-8, 1e-7, 1e-7};
  return sys;
}

// ---------------------------------------------------------------- Quantum dot

bool QuantumDotParams::tuned() const {
  const double lhs = omegaL * omegaL + omega0 * omega0;
  const double rhs = 4.0 * omegaz * omegaz;
  return std::abs(lhs - rhs) <= 1e-12 * std::max(std::abs(lhs), std::abs(rhs));
}

namespace {

void check_quantum_dot(const QuantumDotParams& p) {
  if (!(p.omega0 > 0.0)) throw ConfigError("params.omega0", "must be positive");
  if (!(p.omegaz > 0.0)) throw ConfigError("params.omegaz", "must be positive");
  if (!std::isfinite(p.omegaL)) throw ConfigError("params.omegaL", "must be finite");
  if (!std::isfinite(p.kappa)) throw ConfigError("params.kappa", "must be finite");
}

void check_tuned(const QuantumDotParams& p, bool allow_detuned) {
  if (!allow_detuned && !p.tuned())
    throw DetunedParameters("G4 needs omegaL^2 + omega0^2 = 4 omegaz^2 (got " +
                            std::to_string(p.omegaL * p.omegaL + p.omega0 * p.omega0) + " vs " +
                            std::to_string(4.0 * p.omegaz * p.omegaz) + ")");
}

MetricChart axial_chart() {
  return MetricChart::from_closure(
             "axial", {"rho", "z", "phi"},
             [](auto x) {
               using S = std::remove_const_t<typename decltype(x)::value_type>;
               Vec<S> g(9, S(0.0));
               g[0] = S(1.0);
               g[4] = S(1.0);
               g[8] = x[0] * x[0];
               return g;
             },
             [](const Coords& x) { return x.size() == 3 && x.allFinite() && x[0] > 0.0; })
      .with_boundary_distance([](const Coords& x) { return x[0]; })
      .with_signature({1, 1, 1});
}

// Coefficient of π^(a,b,c) = π_ρ^a π_z^b π_φ^c in G4, one closure per monomial.
template <typename S>
struct QdVars {
  S rho, z, R;
};

template <typename S>
QdVars<S> qd_vars(std::span<const S> x) {
  return {x[0], x[1], sqrt(x[0] * x[0] + x[1] * x[1])};
}

}  // namespace

BracketContext quantum_dot_context(const QuantumDotParams& p, double larmor_orientation) {
  check_quantum_dot(p);
  BracketContext ctx;
  ctx.chart = axial_chart();
  const double wl = larmor_orientation * p.omegaL;
  ctx.background = AbelianBackground::from_closure(1.0, 3, [wl](auto x) {
    using S = std::remove_const_t<typename decltype(x)::value_type>;
    return Vec<S>{S(0.0), S(0.0), wl * x[0] * x[0]};
  });
  const double w0 = p.omega0, wz = p.omegaz, k = p.kappa;
  ctx.scalar_potential = ScalarPotential::from_closure(3, [w0, wz, k](auto x) {
    using S = std::remove_const_t<typename decltype(x)::value_type>;
    const S r2 = x[0] * x[0] + x[1] * x[1];
    const S phi = 0.5 * (w0 * w0 * x[0] * x[0] + wz * wz * x[1] * x[1]);
    if (k == 0.0) return phi;
    return phi - k / sqrt(r2);
  });
  return ctx;
}

Observable quantum_dot_g4(const QuantumDotParams& p, bool allow_detuned) {
  check_quantum_dot(p);
  check_tuned(p, allow_detuned);
  const double w0 = p.omega0, wz = p.omegaz, wL = p.omegaL, k = p.kappa;
  return Observable::from_closure("G4", 3, 0, [w0, wz, wL, k](auto x, auto pi, auto) {
    using S = std::remove_const_t<typename decltype(x)::value_type>;
    const S r = x[0], z = x[1];
    const S pr = pi[0], pz = pi[1], pf = pi[2];
    const S R = sqrt(r * r + z * z);
    const S r2 = r * r, z2 = z * z, r4 = r2 * r2;
    const S pr2 = pr * pr, pz2 = pz * pz, pf2 = pf * pf;
    const double w02 = w0 * w0, wz2 = wz * wz, wL2 = wL * wL;
    S g = r2 * pz2 * pz2 - 2.0 * r * z * pr * pz2 * pz + z2 * pr2 * pz2 + pf2 * pf2 / r2 + pr2 * pf2 +
          (2.0 + z2 / r2) * pz2 * pf2;
    g += 2.0 * wL * pf * (r2 * pr2 + (2.0 * r2 + z2) * pz2) + (2.0 * wz2 * z2 * z * r + 2.0 * k * z * r / R) * pr * pz;
    g += ((2.0 * wz2 - w02) * z2 * r2 + 2.0 * wL2 * r4 - 2.0 * k * r2 / R) * pz2 + wL2 * r4 * pr2;
    g += (2.0 * wz2 * z2 + (w02 - 5.0 * wL2) * r2 - 2.0 * k / R) * pf2;
    g += -2.0 * wL * pf * ((3.0 * wL2 - w02) * r4 - 2.0 * wz2 * r2 * z2 + 2.0 * k * r2 / R) +
         wz2 * wz2 * r2 * z2 * z2 + 2.0 * wz2 * wL2 * r4 * z2;
    g += -wL2 * (3.0 * wL2 - 4.0 * wz2) * r4 * r2 + 2.0 * k / R * (wz2 * r2 * z2 - wL2 * r4) +
         0.5 * k * k * (r2 - z2) / (r2 + z2);
    return g;
  });
}

GeneratorSeries quantum_dot_g4_series(const QuantumDotParams& p, bool allow_detuned) {
  check_quantum_dot(p);
  check_tuned(p, allow_detuned);
  const double w02 = p.omega0 * p.omega0, wz2 = p.omegaz * p.omegaz, wL = p.omegaL, wL2 = wL * wL, k = p.kappa;
  GeneratorSeries s(3, 0, true);
  // Canonical component = monomial coefficient × a! b! c!.
  {
    const CanonicalFill f(4, 3);
    s.set(4, SymmetricTensorField::from_closure(4, 3, [f](auto x) {
      using S = std::remove_const_t<typename decltype(x)::value_type>;
      const auto v = qd_vars(x);
      Vec<S> c(f.size(), S(0.0));
      c[f.powers({0, 4, 0})] = 24.0 * v.rho * v.rho;
      c[f.powers({1, 3, 0})] = -12.0 * v.rho * v.z;
      c[f.powers({2, 2, 0})] = 4.0 * v.z * v.z;
      c[f.powers({0, 0, 4})] = 24.0 / (v.rho * v.rho);
      c[f.powers({2, 0, 2})] = S(4.0);
      c[f.powers({0, 2, 2})] = 4.0 * (2.0 + v.z * v.z / (v.rho * v.rho));
      return c;
    }));
  }
  {
    const CanonicalFill f(3, 3);
    s.set(3, SymmetricTensorField::from_closure(3, 3, [f, wL](auto x) {
      using S = std::remove_const_t<typename decltype(x)::value_type>;
      const auto v = qd_vars(x);
      Vec<S> c(f.size(), S(0.0));
      c[f.powers({2, 0, 1})] = 2.0 * (2.0 * wL * v.rho * v.rho);
      c[f.powers({0, 2, 1})] = 2.0 * (2.0 * wL * (2.0 * v.rho * v.rho + v.z * v.z));
      return c;
    }));
  }
  {
    const CanonicalFill f(2, 3);
    s.set(2, SymmetricTensorField::from_closure(2, 3, [f, w02, wz2, wL2, k](auto x) {
      using S = std::remove_const_t<typename decltype(x)::value_type>;
      const auto v = qd_vars(x);
      const S r2 = v.rho * v.rho, z2 = v.z * v.z;
      Vec<S> c(f.size(), S(0.0));
      c[f.powers({1, 1, 0})] = 2.0 * wz2 * z2 * v.z * v.rho + 2.0 * k * v.z * v.rho / v.R;
      c[f.powers({0, 2, 0})] = 2.0 * ((2.0 * wz2 - w02) * z2 * r2 + 2.0 * wL2 * r2 * r2 - 2.0 * k * r2 / v.R);
      c[f.powers({2, 0, 0})] = 2.0 * wL2 * r2 * r2;
      c[f.powers({0, 0, 2})] = 2.0 * (2.0 * wz2 * z2 + (w02 - 5.0 * wL2) * r2 - 2.0 * k / v.R);
      return c;
    }));
  }
  {
    s.set(1, SymmetricTensorField::from_closure(1, 3, [w02, wz2, wL, wL2, k](auto x) {
      using S = std::remove_const_t<typename decltype(x)::value_type>;
      const auto v = qd_vars(x);
      const S r2 = v.rho * v.rho, z2 = v.z * v.z;
      return Vec<S>{S(0.0), S(0.0),
                    -2.0 * wL * ((3.0 * wL2 - w02) * r2 * r2 - 2.0 * wz2 * r2 * z2 + 2.0 * k * r2 / v.R)};
    }));
  }
  s.set(0, SymmetricTensorField::from_closure(0, 3, [wz2, wL2, k](auto x) {
    using S = std::remove_const_t<typename decltype(x)::value_type>;
    const auto v = qd_vars(x);
    const S r2 = v.rho * v.rho, z2 = v.z * v.z;
    return Vec<S>{wz2 * wz2 * r2 * z2 * z2 + 2.0 * wz2 * wL2 * r2 * r2 * z2 -
                  wL2 * (3.0 * wL2 - 4.0 * wz2) * r2 * r2 * r2 + 2.0 * k / v.R * (wz2 * r2 * z2 - wL2 * r2 * r2) +
                  0.5 * k * k * (r2 - z2) / (r2 + z2)};
  }));
  return s;
}

System build_quantum_dot(const QuantumDotParams& p) {
  check_quantum_dot(p);
  System sys;
  sys.name = "quantum-dot";
  sys.params = {{"omega0", p.omega0}, {"omegaz", p.omegaz}, {"omegaL", p.omegaL}, {"kappa", p.kappa}};
  sys.hamiltonian.mass = 1.0;
  sys.hamiltonian.ctx = quantum_dot_context(p);
  const double wL = p.omegaL;

  GeneratorSeries jseries(3, 0, true);
  jseries.set(1, constant_vector(3, 2));
  jseries.set(0, SymmetricTensorField::from_closure(0, 3, [wL](auto x) {
    using S = std::remove_const_t<typename decltype(x)::value_type>;
    return Vec<S>{wL * x[0] * x[0]};
  }));

  sys.constants.push_back(hamiltonian_observable(sys.hamiltonian, "H"));
  sys.constants.push_back(Observable::from_closure("J", 3, 0, [wL](auto x, auto pi, auto) {
                            return pi[2] + wL * x[0] * x[0];
                          }).with_polynomial_form(jseries));
  sys.series.push_back({"J", jseries});
  sys.killing_fields = {{"d_z", constant_vector(3, 1)},
                        {"d_phi", constant_vector(3, 2)},
                        {"inverse_metric", inverse_metric_field(sys.hamiltonian.ctx.chart)}};

  if (p.tuned()) {
    const GeneratorSeries g4 = quantum_dot_g4_series(p);
    sys.constants.push_back(quantum_dot_g4(p).with_polynomial_form(g4));
    sys.series.push_back({"G4", g4});
    sys.killing_fields.push_back({"G4_leading", *g4.term(4)});
    sys.closure_pairs = {{"J", "G4"}};

    // The tuned invariant against a system whose field is off by 10%.
    QuantumDotParams off = p;
    off.omegaL = p.omegaL != 0.0 ? 1.1 * p.omegaL : 0.1 * p.omegaz;
    NegativeControl detuned;
    detuned.name = "G4_detuned";
    detuned.description = "tuned G4 series checked against omegaL = " + std::to_string(off.omegaL);
    detuned.kind = NegativeControl::Kind::Hierarchy;
    detuned.hamiltonian.mass = 1.0;
    detuned.hamiltonian.ctx = quantum_dot_context(off);
    detuned.observable = quantum_dot_g4(p).renamed("G4_detuned");
    detuned.series = g4;
    sys.negative_controls.push_back(std::move(detuned));

    if (p.omegaL != 0.0) {
      NegativeControl flipped;
      flipped.name = "G4_reversed_field";
      flipped.description = "tuned G4 checked against the bracket with the opposite field orientation";
      flipped.kind = NegativeControl::Kind::Hierarchy;
      flipped.hamiltonian.mass = 1.0;
      flipped.hamiltonian.ctx = quantum_dot_context(p, -1.0);
      flipped.observable = quantum_dot_g4(p).renamed("G4_reversed_field");
      flipped.series = g4;
      sys.negative_controls.push_back(std::move(flipped));
    }
  } else {
    sys.unavailable["G4"] = "G4 is only registered when omegaL^2 + omega0^2 = 4 omegaz^2";
    NegativeControl detuned;
    detuned.name = "G4_detuned";
    detuned.description = "G4 series built from the detuned parameters";
    detuned.kind = NegativeControl::Kind::Hierarchy;
    detuned.hamiltonian = sys.hamiltonian;
    detuned.observable = quantum_dot_g4(p, true).renamed("G4_detuned");
    detuned.series = quantum_dot_g4_series(p, true);
    sys.negative_controls.push_back(std::move(detuned));
  }

  sys.box.lo = Eigen::Vector3d(0.3, -1.5, 0.0);
  sys.box.hi = Eigen::Vector3d(2.0, 1.5, 2.0 * kPi);
  sys.box.momentum_radius = 1.0;
  sys.initial.x = Eigen::Vector3d(1.0, 0.3, 0.0);
  sys.initial.pi = Eigen::Vector3d(0.2, 0.1, 0.5);
  sys.initial.t = Eigen::VectorXd();
  sys.span = 1e3;
  sys.tol = {1e-8, 1e-8, 1e-7, 1e-6, 1e-6};
  return sys;
}

// ---------------------------------------------------------------- SU(2) plane

System build_su2_plane(const SU2PlaneParams& p) {
  if (!std::isfinite(p.g)) throw ConfigError("params.g", "must be finite");
  if (!(p.B.norm() > 0.0) || !p.B.allFinite()) throw ConfigError("params.B", "|B| must be positive");
  if (!p.t0.allFinite()) throw ConfigError("params.t", "charges must be finite");
  System sys;
  sys.name = "su2-plane";
  sys.params = {{"g", p.g}, {"B1", p.B[0]}, {"B2", p.B[1]}, {"B3", p.B[2]},
                {"t1", p.t0[0]}, {"t2", p.t0[1]}, {"t3", p.t0[2]}};
  const double g = p.g;
  const double b1 = p.B[0], b2 = p.B[1], b3 = p.B[2];
  sys.hamiltonian.mass = 1.0;
  sys.hamiltonian.ctx.chart = flat_plane_chart();
  // A^a_i = −½ ε_ij x^j B^a: A^a_x = −½ y B^a, A^a_y = ½ x B^a.
  sys.hamiltonian.ctx.background =
      NonAbelianBackground::from_closure(g, StructureConstants::su2(), 2, [b1, b2, b3](auto x) {
        using S = std::remove_const_t<typename decltype(x)::value_type>;
        Vec<S> a(6, S(0.0));
        const double b[3] = {b1, b2, b3};
        for (int i = 0; i < 3; ++i) {
          a[static_cast<std::size_t>(2 * i)] = -0.5 * b[i] * x[1];
          a[static_cast<std::size_t>(2 * i + 1)] = 0.5 * b[i] * x[0];
        }
        return a;
      });
  auto tb = [b1, b2, b3](auto t) { return b1 * t[0] + b2 * t[1] + b3 * t[2]; };

  sys.constants.push_back(hamiltonian_observable(sys.hamiltonian, "H"));
  sys.constants.push_back(Observable::from_closure("casimir", 2, 3, [](auto, auto, auto t) {
    return t[0] * t[0] + t[1] * t[1] + t[2] * t[2];
  }));
  sys.constants.push_back(Observable::from_closure("J", 2, 3, [g, tb](auto x, auto pi, auto t) {
    return x[0] * pi[1] - x[1] * pi[0] + 0.5 * g * tb(t) * (x[0] * x[0] + x[1] * x[1]);
  }));
  // K_i = x_i π² − π_i (π·x) + s(½ ε_ij π_j |x|² + x_i x_j ε_jk π_k) + ½ s² x_i |x|², s = g B·t.
  for (int i = 0; i < 2; ++i) {
    sys.constants.push_back(
        Observable::from_closure(i == 0 ? "K_x" : "K_y", 2, 3, [g, tb, i](auto x, auto pi, auto t) {
          using S = std::remove_const_t<typename decltype(x)::value_type>;
          const S s = g * tb(t);
          const S x2 = x[0] * x[0] + x[1] * x[1];
          const S p2 = pi[0] * pi[0] + pi[1] * pi[1];
          const S px = pi[0] * x[0] + pi[1] * x[1];
          const S eps_pi = i == 0 ? pi[1] : -pi[0];  // ε_ij π_j
          const S xi = x[static_cast<std::size_t>(i)];
          const S ang = x[0] * pi[1] - x[1] * pi[0];  // x_j ε_jk π_k
          return xi * p2 - pi[static_cast<std::size_t>(i)] * px + s * (0.5 * eps_pi * x2 + xi * ang) +
                 0.5 * s * s * xi * x2;
        }));
  }

  // Series forms (factorial weights) for the hierarchy.
  auto s_of = [g, b1, b2, b3](auto t) { return g * (b1 * t[0] + b2 * t[1] + b3 * t[2]); };
  {
    GeneratorSeries j(2, 3, true);
    j.set(1, plane_rotation());
    j.set(0, SymmetricTensorField::from_closure(0, 2, [s_of](auto x, auto t) {
      using S = std::remove_const_t<typename decltype(x)::value_type>;
      return Vec<S>{0.5 * s_of(t) * (x[0] * x[0] + x[1] * x[1])};
    }, 3));
    sys.series.push_back({"J", j});
  }
  const CanonicalFill f2(2, 2);
  for (int i = 0; i < 2; ++i) {
    GeneratorSeries k(2, 3, true);
    k.set(2, SymmetricTensorField::from_closure(2, 2, [f2, i](auto x) {
      using S = std::remove_const_t<typename decltype(x)::value_type>;
      Vec<S> c(f2.size(), S(0.0));
      // K_x: x π_y² − y π_x π_y;  K_y: y π_x² − x π_x π_y.
      if (i == 0) {
        c[f2.slot({1, 1})] = 2.0 * x[0];
        c[f2.slot({0, 1})] = -x[1];
      } else {
        c[f2.slot({0, 0})] = 2.0 * x[1];
        c[f2.slot({0, 1})] = -x[0];
      }
      return c;
    }));
    k.set(1, SymmetricTensorField::from_closure(1, 2, [s_of, i](auto x, auto t) {
      using S = std::remove_const_t<typename decltype(x)::value_type>;
      const S s = s_of(t);
      const S x2 = x[0] * x[0] + x[1] * x[1];
      if (i == 0) return Vec<S>{-s * x[0] * x[1], s * (0.5 * x2 + x[0] * x[0])};
      return Vec<S>{s * (-0.5 * x2 - x[1] * x[1]), s * x[0] * x[1]};
    }, 3));
    k.set(0, SymmetricTensorField::from_closure(0, 2, [s_of, i](auto x, auto t) {
      using S = std::remove_const_t<typename decltype(x)::value_type>;
      const S s = s_of(t);
      return Vec<S>{0.5 * s * s * x[static_cast<std::size_t>(i)] * (x[0] * x[0] + x[1] * x[1])};
    }, 3));
    sys.series.push_back({i == 0 ? "K_x" : "K_y", k});
  }
  for (auto& c : sys.constants)
    for (const auto& s : sys.series)
      if (c.name() == s.name) c = c.with_polynomial_form(s.series);

  sys.killing_fields = plane_killing_fields(sys.hamiltonian.ctx.chart);
  sys.killing_fields.push_back({"K_x_leading", *sys.series[1].series.term(2)});
  sys.killing_fields.push_back({"K_y_leading", *sys.series[2].series.term(2)});

  NegativeControl stripped;
  stripped.name = "J_stripped";
  stripped.description = "angular momentum without the charge-dependent term";
  stripped.kind = NegativeControl::Kind::Conserved;
  stripped.hamiltonian = sys.hamiltonian;
  stripped.observable = Observable::from_closure("J_stripped", 2, 3, [](auto x, auto pi, auto) {
    return x[0] * pi[1] - x[1] * pi[0];
  });
  sys.negative_controls.push_back(std::move(stripped));

  sys.closure_pairs = {{"J", "K_x"}, {"J", "K_y"}, {"K_x", "K_y"}};
  sys.box.lo = Eigen::Vector2d(-2.0, -2.0);
  sys.box.hi = Eigen::Vector2d(2.0, 2.0);
  sys.box.momentum_radius = 1.0;
  sys.box.charge_radius = p.t0.norm();
  sys.initial.x = Eigen::Vector2d(1.0, 0.0);
  sys.initial.pi = Eigen::Vector2d(0.0, 0.7);
  sys.initial.t = p.t0;
  sys.span = 1e3;
  sys.tol = {1e-9, 1e-9, 1e-9, 1e-6, 1e-7};
  return sys;
}

// ---------------------------------------------------------------- flat plane

System build_flat_plane(const FlatPlaneParams& p) {
  if (!(p.m > 0.0)) throw ConfigError("params.m", "mass must be positive");
  if (!std::isfinite(p.q) || !std::isfinite(p.B)) throw ConfigError("params", "q and B must be finite");
  System sys;
  sys.name = "flat-plane";
  sys.params = {{"m", p.m}, {"q", p.q}, {"B", p.B}};
  sys.hamiltonian.mass = p.m;
  sys.hamiltonian.ctx.chart = flat_plane_chart();
  const double qb = p.q * p.B;
  if (p.B != 0.0) {
    const double b = p.B;
    sys.hamiltonian.ctx.background = AbelianBackground::from_closure(p.q, 2, [b](auto x) {
      using S = std::remove_const_t<typename decltype(x)::value_type>;
      return Vec<S>{-0.5 * b * x[1], 0.5 * b * x[0]};
    });
  }
  sys.constants.push_back(hamiltonian_observable(sys.hamiltonian, "H"));
  sys.constants.push_back(
      Observable::from_closure("p_x", 2, 0, [qb](auto x, auto pi, auto) { return pi[0] - qb * x[1]; }));
  sys.constants.push_back(
      Observable::from_closure("p_y", 2, 0, [qb](auto x, auto pi, auto) { return pi[1] + qb * x[0]; }));
  sys.constants.push_back(Observable::from_closure("J", 2, 0, [qb](auto x, auto pi, auto) {
    return x[0] * pi[1] - x[1] * pi[0] + 0.5 * qb * (x[0] * x[0] + x[1] * x[1]);
  }));
  sys.killing_fields = plane_killing_fields(sys.hamiltonian.ctx.chart);
  if (p.B != 0.0) {
    NegativeControl stripped;
    stripped.name = "J_stripped";
    stripped.description = "angular momentum without the field term";
    stripped.kind = NegativeControl::Kind::Conserved;
    stripped.hamiltonian = sys.hamiltonian;
    stripped.observable = Observable::from_closure("J_stripped", 2, 0, [](auto x, auto pi, auto) {
      return x[0] * pi[1] - x[1] * pi[0];
    });
    sys.negative_controls.push_back(std::move(stripped));
  }
  sys.closure_pairs = {{"p_x", "p_y"}, {"J", "p_x"}, {"J", "p_y"}};
  sys.box.lo = Eigen::Vector2d(-2.0, -2.0);
  sys.box.hi = Eigen::Vector2d(2.0, 2.0);
  sys.box.momentum_radius = 1.0;
  sys.initial.x = Eigen::Vector2d(0.0, 0.0);
  sys.initial.pi = Eigen::Vector2d(1.0, 0.5);
  sys.initial.t = Eigen::VectorXd();
  sys.span = 10.0;
  sys.tol = {1e-10, 1e-10, 1e-10, 1e-6, 1e-9};
  return sys;
}

// ---------------------------------------------------------------- registry

std::vector<std::string> system_names() { return {"flat-plane", "kerr", "quantum-dot", "su2-plane"}; }

ParamMap default_params(const std::string& system) {
  if (system == "kerr") {
    const KerrParams p;
    return {{"M", p.M}, {"a", p.a}};
  }
  if (system == "quantum-dot") {
    const QuantumDotParams p;
    return {{"omega0", p.omega0}, {"omegaz", p.omegaz}, {"omegaL", p.omegaL}, {"kappa", p.kappa}};
  }
  if (system == "su2-plane") {
    const SU2PlaneParams p;
    return {{"g", p.g},       {"B1", p.B[0]},  {"B2", p.B[1]}, {"B3", p.B[2]},
            {"t1", p.t0[0]}, {"t2", p.t0[1]}, {"t3", p.t0[2]}};
  }
  if (system == "flat-plane") {
    const FlatPlaneParams p;
    return {{"m", p.m}, {"q", p.q}, {"B", p.B}};
  }
  throw UnknownName("unknown system '" + system + "'");
}

System build_system(const std::string& system, const ParamMap& params) {
  ParamMap merged = default_params(system);
  for (const auto& [k, v] : params) {
    if (!merged.count(k)) throw ConfigError("params." + k, "unknown parameter for system '" + system + "'");
    merged[k] = v;
  }
  require_finite(merged);
  if (system == "kerr") return build_kerr({merged["M"], merged["a"]});
  if (system == "quantum-dot")
    return build_quantum_dot({merged["omega0"], merged["omegaz"], merged["omegaL"], merged["kappa"]});
  if (system == "su2-plane") {
    SU2PlaneParams p;
    p.g = merged["g"];
    p.B = Eigen::Vector3d(merged["B1"], merged["B2"], merged["B3"]);
    p.t0 = Eigen::Vector3d(merged["t1"], merged["t2"], merged["t3"]);
    return build_su2_plane(p);
  }
  return build_flat_plane({merged["m"], merged["q"], merged["B"]});
}

}  // namespace covmech
