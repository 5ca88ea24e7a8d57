#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "covmech/differentiation.hpp"
#include "covmech/tensor.hpp"
#include "covmech/tensor_field.hpp"

namespace covmech {

using Coords = Eigen::VectorXd;
using DomainPredicate = std::function<bool(const Coords&)>;
// Non-negative distance-like measure to the nearest exclusion zone.
using BoundaryDistance = std::function<double(const Coords&)>;

// Coordinate chart with metric g_{μν}(x).
//
// Index convention: Christoffel symbols are returned as Γ[λ][ν][μ] = Γ_{λν}^μ,
// contravariant index last. Metric partials are returned as one matrix per
// coordinate: partials[λ](μ, ν) = ∂_λ g_{μν}.
class MetricChart {
 public:
  MetricChart() = default;

  // metric(span<const T> x) -> std::vector<T> of dim*dim entries, row-major.
  // Only the upper triangle is read; the lower one is mirrored from it.
  template <typename F>
  static MetricChart from_closure(std::string name, std::vector<std::string> coordinate_names, F metric,
                                  DomainPredicate domain = {});

  static MetricChart from_numeric(std::string name, std::vector<std::string> coordinate_names,
                                  std::function<Eigen::MatrixXd(const Coords&)> metric, DomainPredicate domain = {});

  MetricChart with_partials(std::function<std::vector<Eigen::MatrixXd>(const Coords&)> partials) const;
  MetricChart with_boundary_distance(BoundaryDistance distance) const;
  MetricChart with_signature(std::vector<int> signature) const;
  MetricChart with_singularity_tolerance(double tol) const;

  const std::string& name() const { return name_; }
  int dim() const { return static_cast<int>(coordinate_names_.size()); }
  const std::vector<std::string>& coordinate_names() const { return coordinate_names_; }
  const std::vector<int>& signature_hint() const { return signature_; }
  double singularity_tolerance() const { return singularity_tolerance_; }
  DiffMode diff_mode() const { return map_.mode(); }

  bool in_domain(const Coords& x) const;
  void require_domain(const Coords& x) const;
  double boundary_distance(const Coords& x) const;

  Eigen::MatrixXd metric(const Coords& x) const;
  std::vector<Eigen::MatrixXd> metric_partials(const Coords& x) const;
  std::vector<Eigen::MatrixXd> metric_partials(const Coords& x, DiffMode mode) const;

 private:
  std::string name_;
  std::vector<std::string> coordinate_names_;
  std::vector<int> signature_;
  double singularity_tolerance_ = 1e-12;
  DomainPredicate domain_;
  BoundaryDistance distance_;
  ComponentMap map_;
};

template <typename F>
MetricChart MetricChart::from_closure(std::string name, std::vector<std::string> coordinate_names, F metric,
                                      DomainPredicate domain) {
  MetricChart c;
  c.name_ = std::move(name);
  c.coordinate_names_ = std::move(coordinate_names);
  c.domain_ = std::move(domain);
  const int d = c.dim();
  c.map_ = ComponentMap::from_generic(d, d * d, [metric, d](auto x) {
    using S = std::remove_const_t<typename decltype(x)::value_type>;
    std::vector<S> g(metric(x));
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < i; ++j) g[static_cast<std::size_t>(i * d + j)] = g[static_cast<std::size_t>(j * d + i)];
    return g;
  });
  return c;
}

// g^{μν}(x). Throws OutOfDomain or SingularMetric.
Eigen::MatrixXd inverse_metric_at(const MetricChart& chart, const Coords& x);
// Inverse of an already evaluated metric with the chart's singularity test.
Eigen::MatrixXd invert_metric(const Eigen::MatrixXd& g, double singularity_tolerance);

DenseTensor christoffel_at(const MetricChart& chart, const Coords& x);
DenseTensor christoffel_at(const MetricChart& chart, const Coords& x, DiffMode mode);
// Γ_{λν}^μ = ½ g^{μκ}(∂_λ g_{κν} + ∂_ν g_{κλ} − ∂_κ g_{λν}).
DenseTensor christoffel_from(const Eigen::MatrixXd& inverse_metric, const std::vector<Eigen::MatrixXd>& partials);

// ∇_λ G^{μ1..μn} for a contravariant field; result index order [λ][μ1..μn].
DenseTensor covariant_tensor_derivative(const MetricChart& chart, const SymmetricTensorField& field,
                                        const Coords& x, const Eigen::VectorXd& t = {});
// Same, from already evaluated field derivatives and connection.
DenseTensor covariant_tensor_derivative(const SymmetricTensorField::Derivatives& field, const DenseTensor& christoffel);

// The inverse metric as a rank-2 contravariant field, with analytic partials
// ∂g^{-1} = −g^{-1} ∂g g^{-1}.
SymmetricTensorField inverse_metric_field(const MetricChart& chart);

}  // namespace covmech
