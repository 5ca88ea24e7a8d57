#include "covmech/differentiation.hpp"

namespace covmech {

std::string_view to_string(DiffMode mode) {
  switch (mode) {
    case DiffMode::Analytic: return "analytic";
    case DiffMode::DualNumber: return "dual";
    case DiffMode::FiniteDifference: return "finite-difference";
  }
  return "unknown";
}

ComponentMap ComponentMap::from_numeric(int in_dim, int out_dim, ClosureOf<double> f) {
  ComponentMap m;
  m.in_dim_ = in_dim;
  m.out_dim_ = out_dim;
  m.mode_ = DiffMode::FiniteDifference;
  m.f0_ = std::move(f);
  return m;
}

ComponentMap ComponentMap::with_jacobian(JacobianFn jac) const {
  ComponentMap m = *this;
  m.jac_ = std::move(jac);
  m.mode_ = DiffMode::Analytic;
  return m;
}

std::vector<double> ComponentMap::operator()(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != in_dim_) {
    throw DimensionMismatch("component map expects " + std::to_string(in_dim_) + " inputs, got " +
                            std::to_string(x.size()));
  }
  auto out = f0_(x);
  if (static_cast<int>(out.size()) != out_dim_) {
    throw DimensionMismatch("component map produced " + std::to_string(out.size()) +
                            " outputs, expected " + std::to_string(out_dim_));
  }
  return out;
}

Eigen::MatrixXd ComponentMap::jacobian(std::span<const double> x) const {
  switch (mode_) {
    case DiffMode::Analytic: return jac_(x);
    case DiffMode::DualNumber: return jacobian_dual(x);
    case DiffMode::FiniteDifference: return jacobian_fd(x);
  }
  return jacobian_fd(x);
}

Eigen::MatrixXd ComponentMap::jacobian_dual(std::span<const double> x) const {
  if (!f1_) throw DifferentiationError("component map has no dual-number instantiation");
  Eigen::MatrixXd jac(out_dim_, in_dim_);
  std::vector<Dual1> xd(x.begin(), x.end());
  for (int j = 0; j < in_dim_; ++j) {
    xd[j].eps = 1.0;
    const auto out = f1_(xd);
    for (int i = 0; i < out_dim_; ++i) jac(i, j) = out[i].eps;
    xd[j].eps = 0.0;
  }
  return jac;
}

Eigen::MatrixXd ComponentMap::jacobian_fd(std::span<const double> x) const {
  Eigen::MatrixXd jac(out_dim_, in_dim_);
  std::vector<double> xp(x.begin(), x.end());
  for (int j = 0; j < in_dim_; ++j) {
    const double x0 = x[j];
    const double h = fd_step(x0);
    xp[j] = x0 + h;
    const double hp = xp[j] - x0;
    const auto fp = f0_(xp);
    xp[j] = x0 - h;
    const double hm = x0 - xp[j];
    const auto fm = f0_(xp);
    xp[j] = x0;
    for (int i = 0; i < out_dim_; ++i) jac(i, j) = (fp[i] - fm[i]) / (hp + hm);
  }
  return jac;
}

ComponentMap ComponentMap::gradient_map() const {
  if (out_dim_ != 1) throw DimensionMismatch("gradient_map requires a scalar map");
  const ComponentMap self = *this;
  const int n = in_dim_;
  if (f1_ && f2_) {
    ComponentMap g;
    g.in_dim_ = n;
    g.out_dim_ = n;
    g.mode_ = DiffMode::DualNumber;
    auto f1 = f1_;
    auto f2 = f2_;
    g.f0_ = [f1, n](std::span<const double> x) {
      std::vector<double> grad(n);
      std::vector<Dual1> xd(x.begin(), x.end());
      for (int j = 0; j < n; ++j) {
        xd[j].eps = 1.0;
        grad[j] = f1(xd)[0].eps;
        xd[j].eps = 0.0;
      }
      return grad;
    };
    // Input carries the outer direction; inner direction seeds the gradient slot.
    g.f1_ = [f2, n](std::span<const Dual1> x) {
      std::vector<Dual1> grad(n);
      std::vector<Dual2> xd(n);
      for (int i = 0; i < n; ++i) xd[i] = Dual2(Dual1(x[i].val, 0.0), Dual1(x[i].eps, 0.0));
      for (int j = 0; j < n; ++j) {
        xd[j].val.eps = 1.0;
        const Dual2 r = f2(xd)[0];
        grad[j] = Dual1(r.val.eps, r.eps.eps);
        xd[j].val.eps = 0.0;
      }
      return grad;
    };
    return g;
  }
  return from_numeric(n, n, [self](std::span<const double> x) {
    const Eigen::MatrixXd j = self.jacobian(x);
    return std::vector<double>(j.data(), j.data() + j.size());
  });
}

ComponentMap operator+(const ComponentMap& a, const ComponentMap& b) {
  if (a.in_dim_ != b.in_dim_ || a.out_dim_ != b.out_dim_) {
    throw DimensionMismatch("cannot add component maps of different shape");
  }
  auto add = [](auto lhs, const auto& rhs) {
    for (std::size_t i = 0; i < lhs.size(); ++i) lhs[i] += rhs[i];
    return lhs;
  };
  ComponentMap m;
  m.in_dim_ = a.in_dim_;
  m.out_dim_ = a.out_dim_;
  m.f0_ = [a, b, add](std::span<const double> x) { return add(a.f0_(x), b.f0_(x)); };
  if (a.f1_ && b.f1_) {
    m.f1_ = [fa = a.f1_, fb = b.f1_, add](std::span<const Dual1> x) { return add(fa(x), fb(x)); };
    m.mode_ = DiffMode::DualNumber;
  } else {
    m.mode_ = DiffMode::FiniteDifference;
  }
  if (a.f2_ && b.f2_) {
    m.f2_ = [fa = a.f2_, fb = b.f2_, add](std::span<const Dual2> x) { return add(fa(x), fb(x)); };
  }
  if (a.mode_ == DiffMode::Analytic || b.mode_ == DiffMode::Analytic) {
    m.jac_ = [a, b](std::span<const double> x) -> Eigen::MatrixXd { return a.jacobian(x) + b.jacobian(x); };
    m.mode_ = DiffMode::Analytic;
  }
  return m;
}

Eigen::VectorXd fd_gradient(const std::function<double(std::span<const double>)>& f,
                            std::span<const double> x) {
  const auto n = static_cast<int>(x.size());
  Eigen::VectorXd grad(n);
  std::vector<double> xp(x.begin(), x.end());
  for (int j = 0; j < n; ++j) {
    const double x0 = x[j];
    const double h = fd_step(x0);
    xp[j] = x0 + h;
    const double hp = xp[j] - x0;
    const double fp = f(xp);
    xp[j] = x0 - h;
    const double hm = x0 - xp[j];
    const double fm = f(xp);
    xp[j] = x0;
    grad[j] = (fp - fm) / (hp + hm);
  }
  return grad;
}

}  // namespace covmech
