#include "covmech/geometry.hpp"

#include <cmath>
#include <sstream>

#include "covmech/errors.hpp"

namespace covmech {

namespace {

std::string describe(const Coords& x) {
  std::ostringstream os;
  os << "(";
  for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ")";
  return os.str();
}

}  // namespace

MetricChart MetricChart::from_numeric(std::string name, std::vector<std::string> coordinate_names,
                                      std::function<Eigen::MatrixXd(const Coords&)> metric, DomainPredicate domain) {
  MetricChart c;
  c.name_ = std::move(name);
  c.coordinate_names_ = std::move(coordinate_names);
  c.domain_ = std::move(domain);
  const int d = c.dim();
  c.map_ = ComponentMap::from_numeric(d, d * d, [metric = std::move(metric), d](std::span<const double> xs) {
    const Coords x = Eigen::Map<const Eigen::VectorXd>(xs.data(), d);
    const Eigen::MatrixXd g = metric(x);
    std::vector<double> out(static_cast<std::size_t>(d * d));
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) out[static_cast<std::size_t>(i * d + j)] = g(std::min(i, j), std::max(i, j));
    return out;
  });
  return c;
}

MetricChart MetricChart::with_partials(std::function<std::vector<Eigen::MatrixXd>(const Coords&)> partials) const {
  MetricChart c = *this;
  const int d = dim();
  c.map_ = map_.with_jacobian([partials = std::move(partials), d](std::span<const double> xs) {
    const Coords x = Eigen::Map<const Eigen::VectorXd>(xs.data(), d);
    const auto dg = partials(x);
    Eigen::MatrixXd jac(d * d, d);
    for (int l = 0; l < d; ++l)
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) jac(i * d + j, l) = dg[static_cast<std::size_t>(l)](i, j);
    return jac;
  });
  return c;
}

MetricChart MetricChart::with_boundary_distance(BoundaryDistance distance) const {
  MetricChart c = *this;
  c.distance_ = std::move(distance);
  return c;
}

MetricChart MetricChart::with_signature(std::vector<int> signature) const {
  MetricChart c = *this;
  c.signature_ = std::move(signature);
  return c;
}

MetricChart MetricChart::with_singularity_tolerance(double tol) const {
  MetricChart c = *this;
  c.singularity_tolerance_ = tol;
  return c;
}

bool MetricChart::in_domain(const Coords& x) const {
  if (x.size() != dim()) return false;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (!std::isfinite(x[i])) return false;
  return !domain_ || domain_(x);
}

void MetricChart::require_domain(const Coords& x) const {
  if (x.size() != dim()) {
    throw DimensionMismatch("chart '" + name_ + "' has dimension " + std::to_string(dim()) + ", point has " +
                            std::to_string(x.size()));
  }
  if (!in_domain(x)) throw OutOfDomain("point " + describe(x) + " is outside the domain of chart '" + name_ + "'");
}

double MetricChart::boundary_distance(const Coords& x) const {
  if (!in_domain(x)) return 0.0;
  return distance_ ? distance_(x) : std::numeric_limits<double>::infinity();
}

Eigen::MatrixXd MetricChart::metric(const Coords& x) const {
  require_domain(x);
  const auto flat = map_(as_span(x));
  const int d = dim();
  Eigen::MatrixXd g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = flat[static_cast<std::size_t>(i * d + j)];
  return g;
}

std::vector<Eigen::MatrixXd> MetricChart::metric_partials(const Coords& x) const {
  return metric_partials(x, map_.mode());
}

std::vector<Eigen::MatrixXd> MetricChart::metric_partials(const Coords& x, DiffMode mode) const {
  require_domain(x);
  Eigen::MatrixXd jac;
  switch (mode) {
    case DiffMode::Analytic: jac = map_.jacobian(as_span(x)); break;
    case DiffMode::DualNumber: jac = map_.jacobian_dual(as_span(x)); break;
    case DiffMode::FiniteDifference: jac = map_.jacobian_fd(as_span(x)); break;
  }
  const int d = dim();
  std::vector<Eigen::MatrixXd> out(static_cast<std::size_t>(d), Eigen::MatrixXd(d, d));
  for (int l = 0; l < d; ++l)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        // Read the upper triangle so the result is exactly symmetric.
        out[static_cast<std::size_t>(l)](i, j) = jac(std::min(i, j) * d + std::max(i, j), l);
      }
  return out;
}

Eigen::MatrixXd invert_metric(const Eigen::MatrixXd& g, double singularity_tolerance) {
  // Hadamard bound: |det g| <= prod of row norms.
  double bound = 1.0;
  for (Eigen::Index i = 0; i < g.rows(); ++i) bound *= g.row(i).norm();
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(g);
  const double det = lu.determinant();
  if (!(std::abs(det) > singularity_tolerance * bound)) {
    std::ostringstream os;
    os << "metric is singular: |det g| = " << std::abs(det) << " <= " << singularity_tolerance << " * " << bound;
    throw SingularMetric(os.str());
  }
  Eigen::MatrixXd inv = lu.inverse();
  return 0.5 * (inv + inv.transpose());
}

Eigen::MatrixXd inverse_metric_at(const MetricChart& chart, const Coords& x) {
  return invert_metric(chart.metric(x), chart.singularity_tolerance());
}

DenseTensor christoffel_from(const Eigen::MatrixXd& ginv, const std::vector<Eigen::MatrixXd>& dg) {
  const auto d = static_cast<int>(ginv.rows());
  DenseTensor gamma(3, d);
  for (int l = 0; l < d; ++l) {
    for (int n = l; n < d; ++n) {
      for (int m = 0; m < d; ++m) {
        double s = 0.0;
        for (int k = 0; k < d; ++k) {
          s += ginv(m, k) * (dg[static_cast<std::size_t>(l)](k, n) + dg[static_cast<std::size_t>(n)](k, l) -
                             dg[static_cast<std::size_t>(k)](l, n));
        }
        gamma({l, n, m}) = 0.5 * s;
        gamma({n, l, m}) = 0.5 * s;
      }
    }
  }
  return gamma;
}

DenseTensor christoffel_at(const MetricChart& chart, const Coords& x) {
  return christoffel_from(inverse_metric_at(chart, x), chart.metric_partials(x));
}

DenseTensor christoffel_at(const MetricChart& chart, const Coords& x, DiffMode mode) {
  return christoffel_from(inverse_metric_at(chart, x), chart.metric_partials(x, mode));
}

DenseTensor covariant_tensor_derivative(const SymmetricTensorField::Derivatives& field, const DenseTensor& gamma) {
  const int n = field.value.rank();
  const int d = field.value.dim();
  DenseTensor out(n + 1, d);
  const auto layout = SymmetricLayout::get(n + 1, d);
  const auto& flayout = field.value.layout();
  for (std::size_t f = 0; f < out.size(); ++f) {
    MultiIndex idx = layout->unflatten(f);
    const int lambda = idx[0];
    MultiIndex mu(idx.begin() + 1, idx.end());
    double s = field.dx[static_cast<std::size_t>(lambda)].at(mu);
    for (int i = 0; i < n; ++i) {
      const int mi = mu[static_cast<std::size_t>(i)];
      for (int k = 0; k < d; ++k) {
        mu[static_cast<std::size_t>(i)] = k;
        s += gamma({lambda, k, mi}) * field.value[flayout.canonical_of(mu)];
      }
      mu[static_cast<std::size_t>(i)] = mi;
    }
    out[f] = s;
  }
  return out;
}

DenseTensor covariant_tensor_derivative(const MetricChart& chart, const SymmetricTensorField& field, const Coords& x,
                                        const Eigen::VectorXd& t) {
  chart.require_domain(x);
  if (field.dim() != chart.dim()) throw DimensionMismatch("tensor field dimension differs from chart dimension");
  const auto derivs = field.derivatives(x, field.charge_dim() > 0 ? t : Eigen::VectorXd());
  if (field.rank() == 0) return covariant_tensor_derivative(derivs, DenseTensor(3, chart.dim()));
  return covariant_tensor_derivative(derivs, christoffel_at(chart, x));
}

SymmetricTensorField inverse_metric_field(const MetricChart& chart) {
  const int d = chart.dim();
  auto field = SymmetricTensorField::from_numeric(2, d, [chart](std::span<const double> xs, std::span<const double>) {
    const Coords x = Eigen::Map<const Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
    const Eigen::MatrixXd ginv = inverse_metric_at(chart, x);
    const auto layout = SymmetricLayout::get(2, chart.dim());
    std::vector<double> c(layout->size());
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = ginv(layout->multi_index(k)[0], layout->multi_index(k)[1]);
    return c;
  });
  return field.with_jacobian([chart](std::span<const double> xs) {
    const Coords x = Eigen::Map<const Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
    const Eigen::MatrixXd ginv = inverse_metric_at(chart, x);
    const auto dg = chart.metric_partials(x);
    const auto layout = SymmetricLayout::get(2, chart.dim());
    Eigen::MatrixXd jac(static_cast<Eigen::Index>(layout->size()), chart.dim());
    for (int l = 0; l < chart.dim(); ++l) {
      const Eigen::MatrixXd dinv = -ginv * dg[static_cast<std::size_t>(l)] * ginv;
      for (std::size_t k = 0; k < layout->size(); ++k)
        jac(static_cast<Eigen::Index>(k), l) = dinv(layout->multi_index(k)[0], layout->multi_index(k)[1]);
    }
    return jac;
  });
}

}  // namespace covmech
