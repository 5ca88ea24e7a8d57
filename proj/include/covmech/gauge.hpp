#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "covmech/differentiation.hpp"
#include "covmech/geometry.hpp"

namespace covmech {

// Structure constants f_{ab}^c of a Lie algebra of gauge charges.
class StructureConstants {
 public:
  StructureConstants() = default;
  // Flat storage f[(a*n + b)*n + c]. Throws unless exactly antisymmetric in (a, b).
  StructureConstants(int algebra_dim, std::vector<double> f);

  // f_{ab}^c = ε_{abc}.
  static StructureConstants su2();
  // Commuting algebra of the given dimension.
  static StructureConstants abelian(int algebra_dim);

  int dim() const { return dim_; }
  double operator()(int a, int b, int c) const {
    return f_[static_cast<std::size_t>((a * dim_ + b) * dim_ + c)];
  }
  // max over (a,b,c,e) of |f_ab^d f_dc^e + f_bc^d f_da^e + f_ca^d f_db^e|.
  double jacobi_residual() const;

 private:
  int dim_ = 0;
  std::vector<double> f_;
};

// Scalar potential Φ(x).
class ScalarPotential {
 public:
  ScalarPotential() = default;
  // phi(span<const T> x) -> T
  template <typename F>
  static ScalarPotential from_closure(int dim, F phi) {
    ScalarPotential s;
    s.map_ = ComponentMap::from_generic(dim, 1, [phi](auto x) {
      using S = std::remove_const_t<typename decltype(x)::value_type>;
      return std::vector<S>{S(phi(x))};
    });
    return s;
  }
  static ScalarPotential from_numeric(int dim, std::function<double(const Coords&)> phi);
  ScalarPotential with_gradient(std::function<Eigen::VectorXd(const Coords&)> grad) const;

  int dim() const { return map_.in_dim(); }
  double value(const Coords& x) const;
  Eigen::VectorXd gradient(const Coords& x) const;
  Eigen::VectorXd gradient_fd(const Coords& x) const;

 private:
  ComponentMap map_;
};

// Abelian potential A_μ(x) coupled with charge q.
class AbelianBackground {
 public:
  AbelianBackground() = default;
  // potential(span<const T> x) -> std::vector<T> of dim entries.
  template <typename F>
  static AbelianBackground from_closure(double charge, int dim, F potential) {
    AbelianBackground bg;
    bg.charge_ = charge;
    bg.map_ = ComponentMap::from_generic(dim, dim, potential);
    return bg;
  }
  static AbelianBackground from_numeric(double charge, int dim, std::function<Eigen::VectorXd(const Coords&)> potential);
  static AbelianBackground from_map(double charge, ComponentMap potential);

  double charge() const { return charge_; }
  int dim() const { return map_.in_dim(); }
  const ComponentMap& potential_map() const { return map_; }

  Eigen::VectorXd potential(const Coords& x) const;
  // (μ, ν) -> ∂_ν A_μ
  Eigen::MatrixXd potential_jacobian(const Coords& x) const;

 private:
  double charge_ = 0.0;
  ComponentMap map_;
};

// Non-abelian potential A_μ^a(x), coupling g, structure constants f.
class NonAbelianBackground {
 public:
  NonAbelianBackground() = default;
  // potential(span<const T> x) -> std::vector<T> of algebra_dim*dim entries, index a*dim + μ.
  template <typename F>
  static NonAbelianBackground from_closure(double coupling, StructureConstants f, int dim, F potential) {
    NonAbelianBackground bg;
    bg.coupling_ = coupling;
    bg.dim_ = dim;
    bg.structure_ = std::move(f);
    bg.map_ = ComponentMap::from_generic(dim, bg.structure_.dim() * dim, potential);
    return bg;
  }

  double coupling() const { return coupling_; }
  int dim() const { return dim_; }
  int algebra_dim() const { return structure_.dim(); }
  const StructureConstants& structure() const { return structure_; }

  // (a, μ) -> A_μ^a
  Eigen::MatrixXd potential(const Coords& x) const;
  // per a: (μ, ν) -> ∂_ν A_μ^a
  std::vector<Eigen::MatrixXd> potential_jacobian(const Coords& x) const;

 private:
  double coupling_ = 0.0;
  int dim_ = 0;
  StructureConstants structure_;
  ComponentMap map_;
};

// F_{μν} = ∂_μ A_ν − ∂_ν A_μ, exactly antisymmetric.
Eigen::MatrixXd field_strength_abelian(const AbelianBackground& bg, const MetricChart& chart, const Coords& x);

// F^a_{μν} = ∂_μ A^a_ν − ∂_ν A^a_μ + g f_{bc}^a A^b_μ A^c_ν. The Christoffel terms
// of ∇_μ A_ν − ∇_ν A_μ cancel, so plain partials are used.
std::vector<Eigen::MatrixXd> field_strength_nonabelian(const NonAbelianBackground& bg, const MetricChart& chart,
                                                       const Coords& x);

// A'_μ = A_μ + ∂_μ Λ. Exact second derivatives when both A and Λ are generic closures.
AbelianBackground apply_gauge_transformation(const AbelianBackground& bg, const ComponentMap& gauge_function);

template <typename F>
AbelianBackground apply_gauge_transformation(const AbelianBackground& bg, F gauge_function) {
  return apply_gauge_transformation(bg, ComponentMap::from_generic(bg.dim(), 1, [gauge_function](auto x) {
    using S = std::remove_const_t<typename decltype(x)::value_type>;
    return std::vector<S>{S(gauge_function(x))};
  }));
}

// π_μ = p_μ − q A_μ and its inverse.
Eigen::VectorXd covariant_momentum(const AbelianBackground& bg, const Coords& x, const Eigen::VectorXd& p);
Eigen::VectorXd canonical_momentum(const AbelianBackground& bg, const Coords& x, const Eigen::VectorXd& pi);

}  // namespace covmech
