#include "covmech/gauge.hpp"

#include <cmath>

#include "covmech/errors.hpp"

namespace covmech {

StructureConstants::StructureConstants(int algebra_dim, std::vector<double> f)
    : dim_(algebra_dim), f_(std::move(f)) {
  const auto n = static_cast<std::size_t>(algebra_dim);
  if (f_.size() != n * n * n) throw DimensionMismatch("structure constants need algebra_dim^3 entries");
  for (int a = 0; a < dim_; ++a)
    for (int b = 0; b < dim_; ++b)
      for (int c = 0; c < dim_; ++c)
        if ((*this)(a, b, c) != -(*this)(b, a, c)) throw Error("structure constants are not antisymmetric");
}

StructureConstants StructureConstants::su2() {
  std::vector<double> f(27, 0.0);
  auto set = [&](int a, int b, int c, double v) { f[static_cast<std::size_t>((a * 3 + b) * 3 + c)] = v; };
  set(0, 1, 2, 1.0);
  set(1, 2, 0, 1.0);
  set(2, 0, 1, 1.0);
  set(1, 0, 2, -1.0);
  set(2, 1, 0, -1.0);
  set(0, 2, 1, -1.0);
  return StructureConstants(3, std::move(f));
}

StructureConstants StructureConstants::abelian(int algebra_dim) {
  const auto n = static_cast<std::size_t>(algebra_dim);
  return StructureConstants(algebra_dim, std::vector<double>(n * n * n, 0.0));
}

double StructureConstants::jacobi_residual() const {
  const auto& f = *this;
  double worst = 0.0;
  for (int a = 0; a < dim_; ++a)
    for (int b = 0; b < dim_; ++b)
      for (int c = 0; c < dim_; ++c)
        for (int e = 0; e < dim_; ++e) {
          double s = 0.0;
          for (int d = 0; d < dim_; ++d) s += f(a, b, d) * f(d, c, e) + f(b, c, d) * f(d, a, e) + f(c, a, d) * f(d, b, e);
          worst = std::max(worst, std::abs(s));
        }
  return worst;
}

ScalarPotential ScalarPotential::from_numeric(int dim, std::function<double(const Coords&)> phi) {
  ScalarPotential s;
  s.map_ = ComponentMap::from_numeric(dim, 1, [phi = std::move(phi), dim](std::span<const double> xs) {
    return std::vector<double>{phi(Eigen::Map<const Eigen::VectorXd>(xs.data(), dim))};
  });
  return s;
}

ScalarPotential ScalarPotential::with_gradient(std::function<Eigen::VectorXd(const Coords&)> grad) const {
  ScalarPotential s = *this;
  const int d = dim();
  s.map_ = map_.with_jacobian([grad = std::move(grad), d](std::span<const double> xs) {
    return Eigen::MatrixXd(grad(Eigen::Map<const Eigen::VectorXd>(xs.data(), d)).transpose());
  });
  return s;
}

double ScalarPotential::value(const Coords& x) const { return map_(as_span(x))[0]; }

Eigen::VectorXd ScalarPotential::gradient(const Coords& x) const { return map_.jacobian(as_span(x)).row(0).transpose(); }

Eigen::VectorXd ScalarPotential::gradient_fd(const Coords& x) const {
  return map_.jacobian_fd(as_span(x)).row(0).transpose();
}

AbelianBackground AbelianBackground::from_numeric(double charge, int dim,
                                                  std::function<Eigen::VectorXd(const Coords&)> potential) {
  return from_map(charge, ComponentMap::from_numeric(dim, dim, [potential = std::move(potential), dim](std::span<const double> xs) {
                    const Eigen::VectorXd a = potential(Eigen::Map<const Eigen::VectorXd>(xs.data(), dim));
                    return std::vector<double>(a.data(), a.data() + a.size());
                  }));
}

AbelianBackground AbelianBackground::from_map(double charge, ComponentMap potential) {
  if (potential.in_dim() != potential.out_dim()) throw DimensionMismatch("abelian potential must map R^d -> R^d");
  AbelianBackground bg;
  bg.charge_ = charge;
  bg.map_ = std::move(potential);
  return bg;
}

Eigen::VectorXd AbelianBackground::potential(const Coords& x) const {
  const auto a = map_(as_span(x));
  return Eigen::Map<const Eigen::VectorXd>(a.data(), static_cast<Eigen::Index>(a.size()));
}

Eigen::MatrixXd AbelianBackground::potential_jacobian(const Coords& x) const { return map_.jacobian(as_span(x)); }

Eigen::MatrixXd NonAbelianBackground::potential(const Coords& x) const {
  const auto a = map_(as_span(x));
  Eigen::MatrixXd out(algebra_dim(), dim_);
  for (int i = 0; i < algebra_dim(); ++i)
    for (int m = 0; m < dim_; ++m) out(i, m) = a[static_cast<std::size_t>(i * dim_ + m)];
  return out;
}

std::vector<Eigen::MatrixXd> NonAbelianBackground::potential_jacobian(const Coords& x) const {
  const Eigen::MatrixXd jac = map_.jacobian(as_span(x));
  std::vector<Eigen::MatrixXd> out(static_cast<std::size_t>(algebra_dim()), Eigen::MatrixXd(dim_, dim_));
  for (int a = 0; a < algebra_dim(); ++a)
    for (int m = 0; m < dim_; ++m)
      for (int n = 0; n < dim_; ++n) out[static_cast<std::size_t>(a)](m, n) = jac(a * dim_ + m, n);
  return out;
}

Eigen::MatrixXd field_strength_abelian(const AbelianBackground& bg, const MetricChart& chart, const Coords& x) {
  chart.require_domain(x);
  const Eigen::MatrixXd j = bg.potential_jacobian(x);
  const int d = bg.dim();
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(d, d);
  for (int m = 0; m < d; ++m)
    for (int n = m + 1; n < d; ++n) {
      f(m, n) = j(n, m) - j(m, n);
      f(n, m) = -f(m, n);
    }
  return f;
}

std::vector<Eigen::MatrixXd> field_strength_nonabelian(const NonAbelianBackground& bg, const MetricChart& chart,
                                                       const Coords& x) {
  chart.require_domain(x);
  const Eigen::MatrixXd a = bg.potential(x);
  const auto j = bg.potential_jacobian(x);
  const auto& f = bg.structure();
  const int d = bg.dim();
  const int k = bg.algebra_dim();
  std::vector<Eigen::MatrixXd> out(static_cast<std::size_t>(k), Eigen::MatrixXd::Zero(d, d));
  for (int c = 0; c < k; ++c) {
    auto& fc = out[static_cast<std::size_t>(c)];
    const auto& jc = j[static_cast<std::size_t>(c)];
    for (int m = 0; m < d; ++m)
      for (int n = m + 1; n < d; ++n) {
        double quad = 0.0;
        for (int p = 0; p < k; ++p)
          for (int q = 0; q < k; ++q) quad += f(p, q, c) * a(p, m) * a(q, n);
        fc(m, n) = jc(n, m) - jc(m, n) + bg.coupling() * quad;
        fc(n, m) = -fc(m, n);
      }
  }
  return out;
}

AbelianBackground apply_gauge_transformation(const AbelianBackground& bg, const ComponentMap& gauge_function) {
  if (gauge_function.in_dim() != bg.dim() || gauge_function.out_dim() != 1) {
    throw DimensionMismatch("gauge function must be a scalar on the chart");
  }
  return AbelianBackground::from_map(bg.charge(), bg.potential_map() + gauge_function.gradient_map());
}

Eigen::VectorXd covariant_momentum(const AbelianBackground& bg, const Coords& x, const Eigen::VectorXd& p) {
  return p - bg.charge() * bg.potential(x);
}

Eigen::VectorXd canonical_momentum(const AbelianBackground& bg, const Coords& x, const Eigen::VectorXd& pi) {
  return pi + bg.charge() * bg.potential(x);
}

}  // namespace covmech
