#include "covmech/phase.hpp"

#include <cmath>

#include "covmech/errors.hpp"

namespace covmech {

Eigen::VectorXd PhasePoint::packed() const {
  Eigen::VectorXd out(x.size() + pi.size() + t.size());
  out << x, pi, t;
  return out;
}

PhasePoint PhasePoint::unpack(std::span<const double> flat, int dim, int charge_dim) {
  if (static_cast<int>(flat.size()) != 2 * dim + charge_dim) throw DimensionMismatch("packed phase point has wrong length");
  PhasePoint p;
  p.x = Eigen::Map<const Eigen::VectorXd>(flat.data(), dim);
  p.pi = Eigen::Map<const Eigen::VectorXd>(flat.data() + dim, dim);
  p.t = Eigen::Map<const Eigen::VectorXd>(flat.data() + 2 * dim, charge_dim);
  return p;
}

PhaseGradient unpack_gradient(double value, const Eigen::VectorXd& flat, int dim, int charge_dim) {
  PhaseGradient g;
  g.value = value;
  g.dx = flat.segment(0, dim);
  g.dpi = flat.segment(dim, dim);
  g.dt = flat.segment(2 * dim, charge_dim);
  return g;
}

Observable Observable::from_numeric(std::string name, int dim, int charge_dim,
                                    std::function<double(const PhasePoint&)> f) {
  Observable o;
  o.name_ = std::move(name);
  o.dim_ = dim;
  o.charge_dim_ = charge_dim;
  o.mode_ = DiffMode::FiniteDifference;
  o.eval_ = f;
  o.gradient_ = [f, dim, charge_dim](const PhasePoint& p) {
    const Eigen::VectorXd flat = p.packed();
    const auto grad = fd_gradient(
        [&](std::span<const double> v) { return f(PhasePoint::unpack(v, dim, charge_dim)); }, as_span(flat));
    return unpack_gradient(f(p), grad, dim, charge_dim);
  };
  return o;
}

Observable Observable::from_gradient(std::string name, int dim, int charge_dim,
                                     std::function<PhaseGradient(const PhasePoint&)> gradient) {
  Observable o;
  o.name_ = std::move(name);
  o.dim_ = dim;
  o.charge_dim_ = charge_dim;
  o.mode_ = DiffMode::Analytic;
  o.eval_ = [gradient](const PhasePoint& p) { return gradient(p).value; };
  o.gradient_ = std::move(gradient);
  return o;
}

Observable Observable::from_series(std::string name, GeneratorSeries series) {
  const int dim = series.dim();
  const int charge_dim = series.charge_dim();
  Observable o = from_gradient(std::move(name), dim, charge_dim, [series](const PhasePoint& p) {
    const auto g = series.gradient(p.x, p.pi, p.t);
    return PhaseGradient{g.value, g.dx, g.dpi, g.dt};
  });
  o.eval_ = [series](const PhasePoint& p) { return series.evaluate(p.x, p.pi, p.t); };
  o.series_ = std::move(series);
  return o;
}

Observable Observable::with_polynomial_form(GeneratorSeries series) const {
  Observable o = *this;
  o.series_ = std::move(series);
  return o;
}

Observable Observable::renamed(std::string name) const {
  Observable o = *this;
  o.name_ = std::move(name);
  return o;
}

double Observable::operator()(const PhasePoint& p) const { return eval_(p); }

PhaseGradient Observable::gradient(const PhasePoint& p) const { return gradient_(p); }

PhaseGradient Observable::gradient_fd(const PhasePoint& p) const {
  const Eigen::VectorXd flat = p.packed();
  const auto grad = fd_gradient(
      [&](std::span<const double> v) { return eval_(PhasePoint::unpack(v, dim_, charge_dim_)); }, as_span(flat));
  return unpack_gradient(eval_(p), grad, dim_, charge_dim_);
}

namespace {

Observable unit_observable(std::string name, int dim, int charge_dim, int slot) {
  return Observable::from_gradient(std::move(name), dim, charge_dim, [dim, charge_dim, slot](const PhasePoint& p) {
    Eigen::VectorXd flat = Eigen::VectorXd::Zero(2 * dim + charge_dim);
    flat[slot] = 1.0;
    return unpack_gradient(p.packed()[slot], flat, dim, charge_dim);
  });
}

}  // namespace

Observable coordinate_observable(int index, int dim, int charge_dim, std::string name) {
  if (index < 0 || index >= dim) throw DimensionMismatch("coordinate index out of range");
  return unit_observable(name.empty() ? "x" + std::to_string(index) : std::move(name), dim, charge_dim, index);
}

Observable momentum_observable(int index, int dim, int charge_dim, std::string name) {
  if (index < 0 || index >= dim) throw DimensionMismatch("momentum index out of range");
  return unit_observable(name.empty() ? "pi" + std::to_string(index) : std::move(name), dim, charge_dim, dim + index);
}

Observable charge_observable(int index, int dim, int charge_dim, std::string name) {
  if (index < 0 || index >= charge_dim) throw DimensionMismatch("charge index out of range");
  return unit_observable(name.empty() ? "t" + std::to_string(index) : std::move(name), dim, charge_dim,
                         2 * dim + index);
}

int BracketContext::charge_dim() const {
  if (const auto* na = std::get_if<NonAbelianBackground>(&background)) return na->algebra_dim();
  return 0;
}

BackgroundKind BracketContext::kind() const {
  if (std::holds_alternative<AbelianBackground>(background)) return BackgroundKind::Abelian;
  if (std::holds_alternative<NonAbelianBackground>(background)) return BackgroundKind::NonAbelian;
  return BackgroundKind::None;
}

void BracketContext::validate(const PhasePoint& p) const {
  if (p.pi.size() != dim()) throw DimensionMismatch("momentum dimension differs from chart dimension");
  if (p.t.size() != charge_dim()) {
    throw DimensionMismatch("phase point carries " + std::to_string(p.t.size()) + " charges, context expects " +
                            std::to_string(charge_dim()));
  }
  chart.require_domain(p.x);
}

LocalFrame local_frame(const BracketContext& ctx, const PhasePoint& p) {
  ctx.validate(p);
  LocalFrame f;
  const int d = ctx.dim();
  f.g = ctx.chart.metric(p.x);
  f.ginv = invert_metric(f.g, ctx.chart.singularity_tolerance());
  f.dg = ctx.chart.metric_partials(p.x);
  f.gamma = christoffel_from(f.ginv, f.dg);
  f.force = Eigen::MatrixXd::Zero(d, d);
  if (const auto* ab = std::get_if<AbelianBackground>(&ctx.background)) {
    f.field_strength = {field_strength_abelian(*ab, ctx.chart, p.x)};
    f.force = ab->charge() * f.field_strength[0];
  } else if (const auto* na = std::get_if<NonAbelianBackground>(&ctx.background)) {
    f.field_strength = field_strength_nonabelian(*na, ctx.chart, p.x);
    f.gauge_potential = na->potential(p.x);
    f.coupling = na->coupling();
    f.structure = &na->structure();
    for (int m = 0; m < d; ++m)
      for (int n = m + 1; n < d; ++n) {
        double s = 0.0;
        for (int a = 0; a < na->algebra_dim(); ++a) s += p.t[a] * f.field_strength[static_cast<std::size_t>(a)](m, n);
        f.force(m, n) = na->coupling() * s;
        f.force(n, m) = -f.force(m, n);
      }
  }
  f.dphi = ctx.scalar_potential ? ctx.scalar_potential->gradient(p.x) : Eigen::VectorXd::Zero(d);
  return f;
}

Eigen::VectorXd covariant_derivative(const LocalFrame& frame, const PhasePoint& p, const PhaseGradient& grad) {
  const auto d = static_cast<int>(p.x.size());
  Eigen::VectorXd out = grad.dx;
  for (int m = 0; m < d; ++m) {
    double s = 0.0;
    for (int n = 0; n < d; ++n)
      for (int l = 0; l < d; ++l) s += frame.gamma({m, n, l}) * p.pi[l] * grad.dpi[n];
    out[m] += s;
  }
  if (frame.structure != nullptr && grad.dt.size() > 0) {
    const auto& f = *frame.structure;
    const int k = f.dim();
    for (int m = 0; m < d; ++m) {
      double s = 0.0;
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b)
          for (int c = 0; c < k; ++c) s += f(a, b, c) * p.t[c] * frame.gauge_potential(a, m) * grad.dt[b];
      out[m] += frame.coupling * s;
    }
  }
  return out;
}

Eigen::VectorXd covariant_observable_derivative(const BracketContext& ctx, const Observable& obs, const PhasePoint& p) {
  const LocalFrame frame = local_frame(ctx, p);
  return covariant_derivative(frame, p, obs.gradient(p));
}

namespace {

// Sum of the absolute values of the terms that make up D_μG.
Eigen::VectorXd covariant_derivative_magnitude(const LocalFrame& frame, const PhasePoint& p, const PhaseGradient& grad) {
  const auto d = static_cast<int>(p.x.size());
  Eigen::VectorXd out = grad.dx.cwiseAbs();
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n)
      for (int l = 0; l < d; ++l) out[m] += std::abs(frame.gamma({m, n, l}) * p.pi[l] * grad.dpi[n]);
  if (frame.structure != nullptr && grad.dt.size() > 0) {
    const auto& f = *frame.structure;
    const int k = f.dim();
    for (int m = 0; m < d; ++m)
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b)
          for (int c = 0; c < k; ++c)
            out[m] += std::abs(frame.coupling * f(a, b, c) * p.t[c] * frame.gauge_potential(a, m) * grad.dt[b]);
  }
  return out;
}

}  // namespace

ScaledValue bracket_from_gradients(const LocalFrame& frame, const PhasePoint& p, const PhaseGradient& g,
                                   const PhaseGradient& k) {
  const Eigen::VectorXd dg = covariant_derivative(frame, p, g);
  const Eigen::VectorXd dk = covariant_derivative(frame, p, k);
  const Eigen::VectorXd mg = covariant_derivative_magnitude(frame, p, g);
  const Eigen::VectorXd mk = covariant_derivative_magnitude(frame, p, k);
  const auto d = static_cast<int>(p.x.size());
  // Every term is written so that swapping (g, k) negates it exactly.
  double value = 0.0;
  double scale = 0.0;
  for (int m = 0; m < d; ++m) {
    value += dg[m] * k.dpi[m] - g.dpi[m] * dk[m];
    scale += std::abs(mg[m] * k.dpi[m]) + std::abs(g.dpi[m] * mk[m]);
  }
  for (int m = 0; m < d; ++m)
    for (int n = m + 1; n < d; ++n) {
      const double w = frame.force(m, n) * (g.dpi[m] * k.dpi[n] - g.dpi[n] * k.dpi[m]);
      value += w;
      scale += std::abs(w);
    }
  if (frame.structure != nullptr && g.dt.size() > 0) {
    const auto& f = *frame.structure;
    const int nc = f.dim();
    for (int c = 0; c < nc; ++c)
      for (int a = 0; a < nc; ++a)
        for (int b = a + 1; b < nc; ++b) {
          const double w = f(a, b, c) * p.t[c] * (g.dt[a] * k.dt[b] - g.dt[b] * k.dt[a]);
          value += w;
          scale += std::abs(w);
        }
  }
  return {value, scale};
}

ScaledValue covariant_bracket_scaled(const BracketContext& ctx, const Observable& g, const Observable& k,
                                     const PhasePoint& p) {
  const LocalFrame frame = local_frame(ctx, p);
  return bracket_from_gradients(frame, p, g.gradient(p), k.gradient(p));
}

double covariant_bracket(const BracketContext& ctx, const Observable& g, const Observable& k, const PhasePoint& p) {
  return covariant_bracket_scaled(ctx, g, k, p).value;
}

Observable bracket_observable(const BracketContext& ctx, const Observable& g, const Observable& k) {
  return Observable::from_numeric("{" + g.name() + "," + k.name() + "}", ctx.dim(), ctx.charge_dim(),
                                  [ctx, g, k](const PhasePoint& p) { return covariant_bracket(ctx, g, k, p); });
}

ScaledValue jacobi_residual(const BracketContext& ctx, const Observable& g, const Observable& k, const Observable& j,
                            const PhasePoint& p) {
  const LocalFrame frame = local_frame(ctx, p);
  const auto outer = [&](const Observable& a, const Observable& b, const Observable& c) {
    const Observable ab = bracket_observable(ctx, a, b);
    return bracket_from_gradients(frame, p, ab.gradient(p), c.gradient(p));
  };
  const ScaledValue t1 = outer(g, k, j);
  const ScaledValue t2 = outer(k, j, g);
  const ScaledValue t3 = outer(j, g, k);
  return {t1.value + t2.value + t3.value, std::max({t1.scale, t2.scale, t3.scale})};
}

NoetherFlow noether_flow(const BracketContext& ctx, const Observable& g, const PhasePoint& p) {
  const LocalFrame frame = local_frame(ctx, p);
  const PhaseGradient grad = g.gradient(p);
  return {grad.dpi, -covariant_derivative(frame, p, grad)};
}

}  // namespace covmech
