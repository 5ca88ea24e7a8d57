#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "covmech/dual.hpp"
#include "covmech/errors.hpp"

namespace covmech {

// How a ComponentMap obtains its Jacobian.
enum class DiffMode { Analytic, DualNumber, FiniteDifference };

std::string_view to_string(DiffMode mode);

// Central-difference step for coordinate value v: cbrt(eps) * max(1, |v|).
inline double fd_step(double v) {
  static const double base = std::cbrt(std::numeric_limits<double>::epsilon());
  return base * std::max(1.0, std::abs(v));
}

template <typename T>
using ClosureOf = std::function<std::vector<T>(std::span<const T>)>;

using JacobianFn = std::function<Eigen::MatrixXd(std::span<const double>)>;

// A type-erased smooth map R^in -> R^out with a Jacobian.
//
// Built from a generic callable (templated on the scalar type) the map keeps
// double, Dual1 and Dual2 instantiations so derivatives are exact to rounding.
// Built from a plain double callable it falls back to central differences.
class ComponentMap {
 public:
  ComponentMap() = default;

  template <typename F>
  static ComponentMap from_generic(int in_dim, int out_dim, F f);

  static ComponentMap from_numeric(int in_dim, int out_dim, ClosureOf<double> f);

  // Attach an analytic Jacobian (out x in); becomes the default route.
  ComponentMap with_jacobian(JacobianFn jac) const;

  int in_dim() const { return in_dim_; }
  int out_dim() const { return out_dim_; }
  DiffMode mode() const { return mode_; }
  bool dual_capable() const { return static_cast<bool>(f1_); }
  bool second_order_capable() const { return static_cast<bool>(f2_); }

  std::vector<double> operator()(std::span<const double> x) const;

  // Jacobian by the default route (analytic > dual > finite difference).
  Eigen::MatrixXd jacobian(std::span<const double> x) const;
  Eigen::MatrixXd jacobian_dual(std::span<const double> x) const;
  Eigen::MatrixXd jacobian_fd(std::span<const double> x) const;

  // Gradient map of a scalar (out_dim == 1) map. The result is exact-dual
  // capable when this map was built from a generic callable.
  ComponentMap gradient_map() const;

  // Pointwise sum of two maps of equal shape.
  friend ComponentMap operator+(const ComponentMap& a, const ComponentMap& b);

 private:
  int in_dim_ = 0;
  int out_dim_ = 0;
  DiffMode mode_ = DiffMode::FiniteDifference;
  ClosureOf<double> f0_;
  ClosureOf<Dual1> f1_;
  ClosureOf<Dual2> f2_;
  JacobianFn jac_;
};

template <typename F>
ComponentMap ComponentMap::from_generic(int in_dim, int out_dim, F f) {
  ComponentMap m;
  m.in_dim_ = in_dim;
  m.out_dim_ = out_dim;
  m.mode_ = DiffMode::DualNumber;
  m.f0_ = [f](std::span<const double> x) { return std::vector<double>(f(x)); };
  m.f1_ = [f](std::span<const Dual1> x) { return std::vector<Dual1>(f(x)); };
  m.f2_ = [f](std::span<const Dual2> x) { return std::vector<Dual2>(f(x)); };
  return m;
}

// Plain gradient of a scalar map at x by central differences.
Eigen::VectorXd fd_gradient(const std::function<double(std::span<const double>)>& f,
                            std::span<const double> x);

inline std::span<const double> as_span(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace covmech
