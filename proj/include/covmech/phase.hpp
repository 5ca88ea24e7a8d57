#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "covmech/gauge.hpp"
#include "covmech/geometry.hpp"
#include "covmech/tensor_field.hpp"

namespace covmech {

// Position, covariant momenta π_μ (lower index) and internal charges t_a.
struct PhasePoint {
  Coords x;
  Eigen::VectorXd pi;
  Eigen::VectorXd t;

  int dim() const { return static_cast<int>(x.size()); }
  int charge_dim() const { return static_cast<int>(t.size()); }
  // Concatenation (x, π, t).
  Eigen::VectorXd packed() const;
  static PhasePoint unpack(std::span<const double> flat, int dim, int charge_dim);
};

// Value and first derivatives of a phase-space function. dx is the plain
// partial ∂G/∂x^μ at fixed (π, t).
struct PhaseGradient {
  double value = 0.0;
  Eigen::VectorXd dx, dpi, dt;
};

// Scalar phase-space function G(x, π, t).
class Observable {
 public:
  Observable() = default;

  // f(span<const T> x, span<const T> pi, span<const T> t) -> T
  template <typename F>
  static Observable from_closure(std::string name, int dim, int charge_dim, F f);

  // Derivatives by central differences.
  static Observable from_numeric(std::string name, int dim, int charge_dim, std::function<double(const PhasePoint&)> f);

  static Observable from_gradient(std::string name, int dim, int charge_dim,
                                  std::function<PhaseGradient(const PhasePoint&)> gradient);

  // Contracted series; derivatives come from the tensor fields.
  static Observable from_series(std::string name, GeneratorSeries series);

  Observable with_polynomial_form(GeneratorSeries series) const;
  Observable renamed(std::string name) const;

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  int charge_dim() const { return charge_dim_; }
  DiffMode mode() const { return mode_; }
  const std::optional<GeneratorSeries>& polynomial_form() const { return series_; }

  double operator()(const PhasePoint& p) const;
  PhaseGradient gradient(const PhasePoint& p) const;
  PhaseGradient gradient_fd(const PhasePoint& p) const;

 private:
  std::string name_;
  int dim_ = 0;
  int charge_dim_ = 0;
  DiffMode mode_ = DiffMode::FiniteDifference;
  std::function<double(const PhasePoint&)> eval_;
  std::function<PhaseGradient(const PhasePoint&)> gradient_;
  std::optional<GeneratorSeries> series_;
};

PhaseGradient unpack_gradient(double value, const Eigen::VectorXd& flat, int dim, int charge_dim);

template <typename F>
Observable Observable::from_closure(std::string name, int dim, int charge_dim, F f) {
  const int n = 2 * dim + charge_dim;
  auto map = ComponentMap::from_generic(n, 1, [f, dim, charge_dim](auto in) {
    using S = std::remove_const_t<typename decltype(in)::value_type>;
    return std::vector<S>{S(f(in.subspan(0, dim), in.subspan(dim, dim), in.subspan(2 * dim, charge_dim)))};
  });
  Observable o;
  o.name_ = std::move(name);
  o.dim_ = dim;
  o.charge_dim_ = charge_dim;
  o.mode_ = DiffMode::DualNumber;
  o.eval_ = [map](const PhasePoint& p) {
    const auto flat = p.packed();
    return map(as_span(flat))[0];
  };
  o.gradient_ = [map, dim, charge_dim](const PhasePoint& p) {
    const auto flat = p.packed();
    const double v = map(as_span(flat))[0];
    return unpack_gradient(v, map.jacobian_dual(as_span(flat)).row(0).transpose(), dim, charge_dim);
  };
  return o;
}

// Built-in vocabulary.
Observable coordinate_observable(int index, int dim, int charge_dim, std::string name = {});
Observable momentum_observable(int index, int dim, int charge_dim, std::string name = {});
Observable charge_observable(int index, int dim, int charge_dim, std::string name = {});

enum class BackgroundKind { None, Abelian, NonAbelian };

// Everything the covariant bracket needs: the chart, an optional gauge
// background and an optional scalar potential.
struct BracketContext {
  MetricChart chart;
  std::variant<std::monostate, AbelianBackground, NonAbelianBackground> background;
  std::optional<ScalarPotential> scalar_potential;

  int dim() const { return chart.dim(); }
  int charge_dim() const;
  BackgroundKind kind() const;
  void validate(const PhasePoint& p) const;
};

// Geometry and gauge data evaluated once at a point.
struct LocalFrame {
  Eigen::MatrixXd g, ginv;
  std::vector<Eigen::MatrixXd> dg;
  DenseTensor gamma;
  // q F_{μν} (abelian) or g t_a F^a_{μν} (non-abelian), zero otherwise.
  Eigen::MatrixXd force;
  std::vector<Eigen::MatrixXd> field_strength;  // F_{μν} or F^a_{μν}
  Eigen::MatrixXd gauge_potential;              // (a, μ) A^a_μ, non-abelian only
  double coupling = 0.0;
  const StructureConstants* structure = nullptr;
  Eigen::VectorXd dphi;
};

LocalFrame local_frame(const BracketContext& ctx, const PhasePoint& p);

// D_μ G = ∂G/∂x^μ + Γ_{μν}^λ π_λ ∂G/∂π_ν + g f_{ab}^c t_c A_μ^a ∂G/∂t_b.
Eigen::VectorXd covariant_observable_derivative(const BracketContext& ctx, const Observable& obs, const PhasePoint& p);
Eigen::VectorXd covariant_derivative(const LocalFrame& frame, const PhasePoint& p, const PhaseGradient& grad);

// Bracket value together with the magnitude of the largest terms entering it.
struct ScaledValue {
  double value = 0.0;
  double scale = 0.0;
  double relative() const { return scale > 0.0 ? std::abs(value) / scale : std::abs(value); }
};

// {G,K} = D_μG ∂K/∂π_μ − ∂G/∂π_μ D_μK + (force)_{μν} ∂G/∂π_μ ∂K/∂π_ν + f_{ab}^c t_c ∂G/∂t_a ∂K/∂t_b.
// Dynamics follow dG/dτ = {G, H} with {x^μ, π_ν} = δ^μ_ν.
double covariant_bracket(const BracketContext& ctx, const Observable& g, const Observable& k, const PhasePoint& p);
ScaledValue covariant_bracket_scaled(const BracketContext& ctx, const Observable& g, const Observable& k,
                                     const PhasePoint& p);
ScaledValue bracket_from_gradients(const LocalFrame& frame, const PhasePoint& p, const PhaseGradient& g,
                                   const PhaseGradient& k);

// {G, K} wrapped as an observable; its derivatives come from central differences.
Observable bracket_observable(const BracketContext& ctx, const Observable& g, const Observable& k);

// {{G,K},J} + {{K,J},G} + {{J,G},K}.
ScaledValue jacobi_residual(const BracketContext& ctx, const Observable& g, const Observable& k, const Observable& j,
                            const PhasePoint& p);

// Covariant phase-space transformation generated by G: Δx^μ = ∂G/∂π_μ, Δπ_μ = −D_μG.
struct NoetherFlow {
  Eigen::VectorXd dx;
  Eigen::VectorXd dpi;
};
NoetherFlow noether_flow(const BracketContext& ctx, const Observable& g, const PhasePoint& p);

}  // namespace covmech
