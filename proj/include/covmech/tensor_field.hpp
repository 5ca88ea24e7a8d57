#pragma once

#include <optional>
#include <span>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

#include "covmech/differentiation.hpp"
#include "covmech/tensor.hpp"

namespace covmech {

// Symmetric contravariant tensor field G^{μ1...μn}(x), optionally depending on
// internal gauge charges t as well. Components are given in canonical order.
class SymmetricTensorField {
 public:
  SymmetricTensorField() = default;

  // f(span<const T> x) or f(span<const T> x, span<const T> t) -> std::vector<T>
  // with one entry per canonical multi-index.
  template <typename F>
  static SymmetricTensorField from_closure(int rank, int dim, F f, int charge_dim = 0);

  static SymmetricTensorField from_numeric(
      int rank, int dim,
      std::function<std::vector<double>(std::span<const double> x, std::span<const double> t)> f,
      int charge_dim = 0);

  static SymmetricTensorField constant(const SymmetricTensor& value, int charge_dim = 0);

  // Analytic Jacobian of the canonical components w.r.t. (x, t).
  SymmetricTensorField with_jacobian(JacobianFn jac) const;

  int rank() const { return rank_; }
  int dim() const { return dim_; }
  int charge_dim() const { return charge_dim_; }
  DiffMode mode() const { return map_.mode(); }

  SymmetricTensor value(const Eigen::VectorXd& x, const Eigen::VectorXd& t = {}) const;

  struct Derivatives {
    SymmetricTensor value;
    std::vector<SymmetricTensor> dx;  // ∂/∂x^λ
    std::vector<SymmetricTensor> dt;  // ∂/∂t_b
  };
  Derivatives derivatives(const Eigen::VectorXd& x, const Eigen::VectorXd& t = {}) const;
  Derivatives derivatives(const Eigen::VectorXd& x, const Eigen::VectorXd& t, DiffMode mode) const;

 private:
  std::vector<double> packed_input(const Eigen::VectorXd& x, const Eigen::VectorXd& t) const;

  int rank_ = 0;
  int dim_ = 0;
  int charge_dim_ = 0;
  ComponentMap map_;
};

template <typename F>
SymmetricTensorField SymmetricTensorField::from_closure(int rank, int dim, F f, int charge_dim) {
  SymmetricTensorField field;
  field.rank_ = rank;
  field.dim_ = dim;
  field.charge_dim_ = charge_dim;
  const auto ncomp = static_cast<int>(SymmetricLayout::get(rank, dim)->size());
  field.map_ = ComponentMap::from_generic(dim + charge_dim, ncomp, [f, dim, charge_dim](auto in) {
    using T = typename decltype(in)::value_type;
    using S = std::remove_const_t<T>;
    const auto x = in.subspan(0, dim);
    if constexpr (std::is_invocable_v<F, std::span<const S>, std::span<const S>>) {
      return std::vector<S>(f(x, in.subspan(dim, charge_dim)));
    } else {
      return std::vector<S>(f(x));
    }
  });
  return field;
}

// Power series G = Σ_n w_n G^(n)μ1..μn π_μ1..π_μn with w_n = 1/n! (weighted)
// or w_n = 1 (plain monomials). Missing ranks are zero.
class GeneratorSeries {
 public:
  GeneratorSeries() = default;
  GeneratorSeries(int dim, int charge_dim, bool factorial_weights);

  GeneratorSeries& set(int rank, SymmetricTensorField field);

  int dim() const { return dim_; }
  int charge_dim() const { return charge_dim_; }
  int max_rank() const { return static_cast<int>(terms_.size()) - 1; }
  bool factorial_weights() const { return factorial_weights_; }
  double weight(int rank) const;
  const std::optional<SymmetricTensorField>& term(int rank) const;

  double evaluate(const Eigen::VectorXd& x, const Eigen::VectorXd& pi, const Eigen::VectorXd& t = {}) const;

  struct Gradient {
    double value = 0.0;
    Eigen::VectorXd dx, dpi, dt;
  };
  Gradient gradient(const Eigen::VectorXd& x, const Eigen::VectorXd& pi, const Eigen::VectorXd& t = {}) const;

 private:
  int dim_ = 0;
  int charge_dim_ = 0;
  bool factorial_weights_ = true;
  std::vector<std::optional<SymmetricTensorField>> terms_;
};

}  // namespace covmech
