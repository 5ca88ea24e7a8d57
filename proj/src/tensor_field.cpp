#include "covmech/tensor_field.hpp"

#include <string>

namespace covmech {

SymmetricTensorField SymmetricTensorField::from_numeric(
    int rank, int dim,
    std::function<std::vector<double>(std::span<const double>, std::span<const double>)> f,
    int charge_dim) {
  SymmetricTensorField field;
  field.rank_ = rank;
  field.dim_ = dim;
  field.charge_dim_ = charge_dim;
  const auto ncomp = static_cast<int>(SymmetricLayout::get(rank, dim)->size());
  field.map_ = ComponentMap::from_numeric(dim + charge_dim, ncomp,
                                          [f = std::move(f), dim, charge_dim](std::span<const double> in) {
                                            return f(in.subspan(0, dim), in.subspan(dim, charge_dim));
                                          });
  return field;
}

SymmetricTensorField SymmetricTensorField::constant(const SymmetricTensor& value, int charge_dim) {
  std::vector<double> comps(value.components().begin(), value.components().end());
  auto field = from_closure(value.rank(), value.dim(), [comps](auto x) {
    using S = std::remove_const_t<typename decltype(x)::value_type>;
    return std::vector<S>(comps.begin(), comps.end());
  }, charge_dim);
  return field;
}

SymmetricTensorField SymmetricTensorField::with_jacobian(JacobianFn jac) const {
  SymmetricTensorField f = *this;
  f.map_ = map_.with_jacobian(std::move(jac));
  return f;
}

std::vector<double> SymmetricTensorField::packed_input(const Eigen::VectorXd& x, const Eigen::VectorXd& t) const {
  if (x.size() != dim_) throw DimensionMismatch("tensor field expects " + std::to_string(dim_) + " coordinates");
  std::vector<double> in(x.data(), x.data() + x.size());
  if (charge_dim_ > 0) {
    if (t.size() != charge_dim_) {
      throw DimensionMismatch("tensor field expects " + std::to_string(charge_dim_) + " charges");
    }
    in.insert(in.end(), t.data(), t.data() + t.size());
  }
  return in;
}

SymmetricTensor SymmetricTensorField::value(const Eigen::VectorXd& x, const Eigen::VectorXd& t) const {
  return SymmetricTensor(rank_, dim_, map_(packed_input(x, t)));
}

SymmetricTensorField::Derivatives SymmetricTensorField::derivatives(const Eigen::VectorXd& x,
                                                                    const Eigen::VectorXd& t) const {
  return derivatives(x, t, map_.mode());
}

SymmetricTensorField::Derivatives SymmetricTensorField::derivatives(const Eigen::VectorXd& x,
                                                                    const Eigen::VectorXd& t,
                                                                    DiffMode mode) const {
  const auto in = packed_input(x, t);
  Eigen::MatrixXd jac;
  switch (mode) {
    case DiffMode::Analytic: jac = map_.jacobian(in); break;
    case DiffMode::DualNumber: jac = map_.jacobian_dual(in); break;
    case DiffMode::FiniteDifference: jac = map_.jacobian_fd(in); break;
  }
  Derivatives d;
  d.value = SymmetricTensor(rank_, dim_, map_(in));
  const auto ncomp = static_cast<Eigen::Index>(d.value.size());
  auto column = [&](int j) {
    std::vector<double> c(static_cast<std::size_t>(ncomp));
    for (Eigen::Index i = 0; i < ncomp; ++i) c[static_cast<std::size_t>(i)] = jac(i, j);
    return SymmetricTensor(rank_, dim_, std::move(c));
  };
  for (int l = 0; l < dim_; ++l) d.dx.push_back(column(l));
  for (int b = 0; b < charge_dim_; ++b) d.dt.push_back(column(dim_ + b));
  return d;
}

GeneratorSeries::GeneratorSeries(int dim, int charge_dim, bool factorial_weights)
    : dim_(dim), charge_dim_(charge_dim), factorial_weights_(factorial_weights) {}

GeneratorSeries& GeneratorSeries::set(int rank, SymmetricTensorField field) {
  if (field.rank() != rank || field.dim() != dim_) throw DimensionMismatch("series term has wrong rank or dim");
  if (field.charge_dim() != 0 && field.charge_dim() != charge_dim_) {
    throw DimensionMismatch("series term charge dimension mismatch");
  }
  if (static_cast<int>(terms_.size()) <= rank) terms_.resize(static_cast<std::size_t>(rank) + 1);
  terms_[static_cast<std::size_t>(rank)] = std::move(field);
  return *this;
}

double GeneratorSeries::weight(int rank) const { return factorial_weights_ ? 1.0 / factorial(rank) : 1.0; }

const std::optional<SymmetricTensorField>& GeneratorSeries::term(int rank) const {
  static const std::optional<SymmetricTensorField> none;
  if (rank < 0 || rank >= static_cast<int>(terms_.size())) return none;
  return terms_[static_cast<std::size_t>(rank)];
}

namespace {
Eigen::VectorXd charges_for(const SymmetricTensorField& f, const Eigen::VectorXd& t) {
  return f.charge_dim() > 0 ? t : Eigen::VectorXd();
}
}  // namespace

double GeneratorSeries::evaluate(const Eigen::VectorXd& x, const Eigen::VectorXd& pi, const Eigen::VectorXd& t) const {
  double sum = 0.0;
  for (int n = 0; n <= max_rank(); ++n) {
    const auto& f = term(n);
    if (!f) continue;
    sum += weight(n) * f->value(x, charges_for(*f, t)).contract(pi);
  }
  return sum;
}

GeneratorSeries::Gradient GeneratorSeries::gradient(const Eigen::VectorXd& x, const Eigen::VectorXd& pi,
                                                    const Eigen::VectorXd& t) const {
  Gradient g;
  g.dx = Eigen::VectorXd::Zero(dim_);
  g.dpi = Eigen::VectorXd::Zero(dim_);
  g.dt = Eigen::VectorXd::Zero(charge_dim_);
  for (int n = 0; n <= max_rank(); ++n) {
    const auto& f = term(n);
    if (!f) continue;
    const double w = weight(n);
    const auto d = f->derivatives(x, charges_for(*f, t));
    g.value += w * d.value.contract(pi);
    g.dpi += w * d.value.contract_gradient(pi);
    for (int l = 0; l < dim_; ++l) g.dx[l] += w * d.dx[static_cast<std::size_t>(l)].contract(pi);
    for (std::size_t b = 0; b < d.dt.size(); ++b) g.dt[static_cast<Eigen::Index>(b)] += w * d.dt[b].contract(pi);
  }
  return g;
}

}  // namespace covmech
