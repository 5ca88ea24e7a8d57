#include "covmech/killing.hpp"

#include <cmath>

#include "covmech/errors.hpp"

namespace covmech {

namespace {

// ∇_λ G^{μ..} (value) and Σ|terms| (magnitude), index order [λ][μ..]. When a
// non-abelian frame is given the charge rotation term of D_λ is included.
struct NablaPair {
  DenseTensor value;
  DenseTensor magnitude;
};

NablaPair covariant_with_magnitude(const SymmetricTensorField::Derivatives& f, const DenseTensor& gamma,
                                   const LocalFrame* frame, const Eigen::VectorXd& t) {
  const int n = f.value.rank();
  const int d = f.value.dim();
  NablaPair out{DenseTensor(n + 1, d), DenseTensor(n + 1, d)};
  const auto layout = SymmetricLayout::get(n + 1, d);
  const auto& fl = f.value.layout();
  const bool charged = frame != nullptr && frame->structure != nullptr && !f.dt.empty();
  for (std::size_t k = 0; k < out.value.size(); ++k) {
    MultiIndex idx = layout->unflatten(k);
    const int lambda = idx[0];
    MultiIndex mu(idx.begin() + 1, idx.end());
    const std::size_t self = fl.canonical_of(mu);
    double s = f.dx[static_cast<std::size_t>(lambda)][self];
    double mag = std::abs(s);
    for (int i = 0; i < n; ++i) {
      const int mi = mu[static_cast<std::size_t>(i)];
      for (int c = 0; c < d; ++c) {
        mu[static_cast<std::size_t>(i)] = c;
        const double term = gamma({lambda, c, mi}) * f.value[fl.canonical_of(mu)];
        s += term;
        mag += std::abs(term);
      }
      mu[static_cast<std::size_t>(i)] = mi;
    }
    if (charged) {
      const auto& sc = *frame->structure;
      const int nc = sc.dim();
      for (int a = 0; a < nc; ++a)
        for (int b = 0; b < nc; ++b)
          for (int c = 0; c < nc; ++c) {
            const double coef = sc(a, b, c);
            if (coef == 0.0) continue;
            const double term = frame->coupling * coef * t[c] * frame->gauge_potential(a, lambda) *
                                f.dt[static_cast<std::size_t>(b)][self];
            s += term;
            mag += std::abs(term);
          }
    }
    out.value[k] = s;
    out.magnitude[k] = mag;
  }
  return out;
}

// Contract the first index with M: out[κ][rest] = Σ_λ M(κ, λ) in[λ][rest].
DenseTensor contract_first(const Eigen::MatrixXd& m, const DenseTensor& in, bool absolute) {
  const int r = in.rank();
  const int d = in.dim();
  DenseTensor out(r, d);
  std::size_t block = 1;
  for (int i = 1; i < r; ++i) block *= static_cast<std::size_t>(d);
  for (int k = 0; k < d; ++k)
    for (int l = 0; l < d; ++l) {
      const double w = absolute ? std::abs(m(k, l)) : m(k, l);
      if (w == 0.0) continue;
      for (std::size_t j = 0; j < block; ++j) out[static_cast<std::size_t>(k) * block + j] += w * in[static_cast<std::size_t>(l) * block + j];
    }
  return out;
}

// out[κ][rest] = Σ_μ W(κ, μ) G^{μ rest}, G symmetric of rank r >= 1.
DenseTensor contract_into_symmetric(const Eigen::MatrixXd& w, const SymmetricTensor& g, bool absolute) {
  return contract_first(w, g.expand(), absolute);
}

double max_of(const DenseTensor& t) { return t.max_abs(); }

Eigen::VectorXd charges_for(const SymmetricTensorField& f, const Eigen::VectorXd& t) {
  return f.charge_dim() > 0 ? t : Eigen::VectorXd();
}

}  // namespace

TensorResidual killing_residual(const MetricChart& chart, const SymmetricTensorField& field, const Coords& x,
                                const Eigen::VectorXd& t) {
  chart.require_domain(x);
  if (field.dim() != chart.dim()) throw DimensionMismatch("tensor field dimension differs from chart dimension");
  const Eigen::MatrixXd ginv = inverse_metric_at(chart, x);
  const DenseTensor gamma = christoffel_from(ginv, chart.metric_partials(x));
  const auto derivs = field.derivatives(x, charges_for(field, t));
  const NablaPair nabla = covariant_with_magnitude(derivs, gamma, nullptr, {});
  TensorResidual r;
  r.value = symmetrize(contract_first(ginv, nabla.value, false));
  r.scale = max_of(contract_first(ginv, nabla.magnitude, true));
  return r;
}

std::vector<TensorResidual> hierarchy_residual(const BracketContext& ctx, const GeneratorSeries& series,
                                               const Coords& x, const Eigen::VectorXd& t, double mass) {
  if (series.dim() != ctx.dim()) throw DimensionMismatch("series dimension differs from chart dimension");
  PhasePoint p{x, Eigen::VectorXd::Zero(ctx.dim()), t};
  if (p.t.size() == 0) p.t = Eigen::VectorXd::Zero(ctx.charge_dim());
  const LocalFrame frame = local_frame(ctx, p);
  const int d = ctx.dim();
  const int top = series.max_rank();
  // W(κ, μ) = Σ_ν g^{κν} force_{μν}, so the force term reads W(κ, μ) G^{μ..}.
  const Eigen::MatrixXd w = frame.ginv * frame.force.transpose();
  const bool has_phi = ctx.scalar_potential.has_value();

  std::vector<std::optional<SymmetricTensorField::Derivatives>> derivs(static_cast<std::size_t>(top + 1));
  for (int n = 0; n <= top; ++n) {
    const auto& f = series.term(n);
    if (f) derivs[static_cast<std::size_t>(n)] = f->derivatives(x, charges_for(*f, p.t));
  }
  auto term = [&](int n) -> const SymmetricTensorField::Derivatives* {
    if (n < 0 || n > top || !derivs[static_cast<std::size_t>(n)]) return nullptr;
    return &*derivs[static_cast<std::size_t>(n)];
  };

  std::vector<TensorResidual> out;
  // Rank 0: −m ∂_μΦ G^(1)μ.
  {
    TensorResidual r{SymmetricTensor(0, d), 0.0};
    if (has_phi && term(1)) {
      double s = 0.0, mag = 0.0;
      for (int mu = 0; mu < d; ++mu) {
        const double v = -mass * frame.dphi[mu] * term(1)->value[static_cast<std::size_t>(mu)];
        s += v;
        mag += std::abs(v);
      }
      r.value[0] = s;
      r.scale = mag;
    }
    out.push_back(std::move(r));
  }
  const bool weighted = series.factorial_weights();
  for (int k = 1; k <= top + 1; ++k) {
    DenseTensor acc(k, d);
    double scale = 0.0;
    if (const auto* lower = term(k - 1)) {
      const NablaPair nabla = covariant_with_magnitude(*lower, frame.gamma, &frame, p.t);
      const DenseTensor raised = contract_first(frame.ginv, nabla.value, false);
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += raised[i];
      scale = std::max(scale, max_of(contract_first(frame.ginv, nabla.magnitude, true)));
    }
    if (const auto* same = term(k)) {
      const double c = weighted ? 1.0 : static_cast<double>(k);
      const DenseTensor f = contract_into_symmetric(w, same->value, false);
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += c * f[i];
      scale = std::max(scale, std::abs(c) * max_of(contract_into_symmetric(w, same->value, true)));
    }
    if (has_phi) {
      if (const auto* upper = term(k + 1)) {
        const double c = -mass * (weighted ? 1.0 / k : static_cast<double>(k + 1));
        const Eigen::MatrixXd grad_row = frame.dphi.transpose();
        // Σ_μ ∂_μΦ G^{μ κ1..κk}: contract the first index against a 1 x d row,
        // then read the rank-k block.
        const DenseTensor full = upper->value.expand();
        std::size_t block = acc.size();
        for (std::size_t j = 0; j < block; ++j) {
          double s = 0.0, mag = 0.0;
          for (int mu = 0; mu < d; ++mu) {
            const double v = grad_row(0, mu) * full[static_cast<std::size_t>(mu) * block + j];
            s += v;
            mag += std::abs(v);
          }
          acc[j] += c * s;
          scale = std::max(scale, std::abs(c) * mag);
        }
      }
    }
    out.push_back({symmetrize(acc), scale});
  }
  return out;
}

double contract_hierarchy(const std::vector<TensorResidual>& residual, const GeneratorSeries& series,
                          const Eigen::VectorXd& pi) {
  double s = residual.empty() ? 0.0 : residual[0].value[0];
  for (std::size_t k = 1; k < residual.size(); ++k) {
    s += series.weight(static_cast<int>(k) - 1) * residual[k].value.contract(pi);
  }
  return s;
}

void SweepResult::add(std::size_t index, const PhasePoint& p, double value, double scale) {
  const double a = std::abs(value);
  const double rel = scale > 0.0 ? a / scale : a;
  mean_abs = (mean_abs * static_cast<double>(count) + a) / static_cast<double>(count + 1);
  ++count;
  max_abs = std::max(max_abs, a);
  if (count == 1 || rel > max_relative) {
    max_relative = rel;
    worst_index = index;
    worst_point = p;
    worst_scale = scale;
  }
}

SweepResult conserved_check(const HamiltonianSpec& hamiltonian, const Observable& obs,
                            std::span<const PhasePoint> sample) {
  SweepResult r;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const PhasePoint& p = sample[i];
    const LocalFrame frame = local_frame(hamiltonian.ctx, p);
    const ScaledValue b = bracket_from_gradients(frame, p, obs.gradient(p), hamiltonian_gradient(hamiltonian, p));
    r.add(i, p, b.value, b.scale);
  }
  return r;
}

SweepResult closure_check(const HamiltonianSpec& hamiltonian, const Observable& g, const Observable& k,
                          std::span<const PhasePoint> sample) {
  const Observable inner = bracket_observable(hamiltonian.ctx, g, k);
  SweepResult r;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const PhasePoint& p = sample[i];
    const LocalFrame frame = local_frame(hamiltonian.ctx, p);
    const PhaseGradient hg = hamiltonian_gradient(hamiltonian, p);
    const ScaledValue b = bracket_from_gradients(frame, p, inner.gradient(p), hg);
    // {G,K} may vanish identically; its differenced gradient is then pure
    // rounding noise, so the scale also carries the size of its terms.
    const ScaledValue gk = bracket_from_gradients(frame, p, g.gradient(p), k.gradient(p));
    double dh = hg.dx.cwiseAbs().maxCoeff();
    dh = std::max(dh, hg.dpi.cwiseAbs().maxCoeff());
    if (hg.dt.size()) dh = std::max(dh, hg.dt.cwiseAbs().maxCoeff());
    r.add(i, p, b.value, std::max(b.scale, gk.scale * dh));
  }
  return r;
}

std::vector<RankSweep> hierarchy_sweep(const BracketContext& ctx, const GeneratorSeries& series,
                                       std::span<const PhasePoint> sample, double mass) {
  std::vector<RankSweep> out;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const auto res = hierarchy_residual(ctx, series, sample[i].x, sample[i].t, mass);
    if (out.empty()) {
      for (std::size_t k = 0; k < res.size(); ++k) out.push_back({static_cast<int>(k), {}});
    }
    for (std::size_t k = 0; k < res.size(); ++k) out[k].result.add(i, sample[i], res[k].max_abs(), res[k].scale);
  }
  return out;
}

SweepResult killing_sweep(const MetricChart& chart, const SymmetricTensorField& field,
                          std::span<const PhasePoint> sample) {
  SweepResult r;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const auto res = killing_residual(chart, field, sample[i].x, sample[i].t);
    r.add(i, sample[i], res.max_abs(), res.scale);
  }
  return r;
}

SymmetricTensor generator_bracket_at(const MetricChart& chart, const SymmetricTensorField& a,
                                     const SymmetricTensorField& b, const Coords& x) {
  const int n = a.rank();
  const int m = b.rank();
  if (n == 0 || m == 0) throw RankZeroOperand("generator_bracket needs operands of rank >= 1");
  if (a.dim() != chart.dim() || b.dim() != chart.dim()) throw DimensionMismatch("generator dimension differs from chart");
  if (a.charge_dim() != 0 || b.charge_dim() != 0) throw DimensionMismatch("generator_bracket takes charge-free fields");
  const Eigen::MatrixXd ginv = inverse_metric_at(chart, x);
  const DenseTensor gamma = christoffel_from(ginv, chart.metric_partials(x));
  const auto da = a.derivatives(x);
  const auto db = b.derivatives(x);
  const DenseTensor na = covariant_with_magnitude(da, gamma, nullptr, {}).value;  // [λ][ν1..νn]
  const DenseTensor nb = covariant_with_magnitude(db, gamma, nullptr, {}).value;  // [λ][ρ1..ρm]
  const DenseTensor ea = da.value.expand();
  const DenseTensor eb = db.value.expand();
  const int d = chart.dim();
  const int r = n + m - 1;
  DenseTensor acc(r, d);
  const auto layout = SymmetricLayout::get(r, d);
  const auto la = SymmetricLayout::get(n, d);
  const auto lb = SymmetricLayout::get(m, d);
  const auto la1 = SymmetricLayout::get(n + 1, d);
  const auto lb1 = SymmetricLayout::get(m + 1, d);
  for (std::size_t f = 0; f < acc.size(); ++f) {
    const MultiIndex idx = layout->unflatten(f);
    double s = 0.0;
    // m B^{λ ρ2..ρm} ∇_λ A^{ν1..νn}, indices (ρ2..ρm, ν1..νn).
    {
      MultiIndex bi(idx.begin(), idx.begin() + (m - 1));
      bi.insert(bi.begin(), 0);
      MultiIndex ai(idx.begin() + (m - 1), idx.end());
      ai.insert(ai.begin(), 0);
      for (int l = 0; l < d; ++l) {
        bi[0] = l;
        ai[0] = l;
        s += m * eb[lb->flat(bi)] * na[la1->flat(ai)];
      }
    }
    // n A^{λ ν2..νn} ∇_λ B^{ρ1..ρm}, indices (ν2..νn, ρ1..ρm).
    {
      MultiIndex ai(idx.begin(), idx.begin() + (n - 1));
      ai.insert(ai.begin(), 0);
      MultiIndex bi(idx.begin() + (n - 1), idx.end());
      bi.insert(bi.begin(), 0);
      for (int l = 0; l < d; ++l) {
        ai[0] = l;
        bi[0] = l;
        s -= n * ea[la->flat(ai)] * nb[lb1->flat(bi)];
      }
    }
    acc[f] = s;
  }
  return symmetrize(acc);
}

SymmetricTensorField generator_bracket(const MetricChart& chart, const SymmetricTensorField& a,
                                       const SymmetricTensorField& b) {
  if (a.rank() == 0 || b.rank() == 0) throw RankZeroOperand("generator_bracket needs operands of rank >= 1");
  return SymmetricTensorField::from_numeric(a.rank() + b.rank() - 1, chart.dim(),
                                            [chart, a, b](std::span<const double> xs, std::span<const double>) {
                                              const Coords x = Eigen::Map<const Eigen::VectorXd>(
                                                  xs.data(), static_cast<Eigen::Index>(xs.size()));
                                              const auto c = generator_bracket_at(chart, a, b, x);
                                              return std::vector<double>(c.components().begin(), c.components().end());
                                            });
}

Observable monomial_observable(std::string name, const SymmetricTensorField& field, int charge_dim) {
  GeneratorSeries s(field.dim(), charge_dim, false);
  s.set(field.rank(), field);
  return Observable::from_series(std::move(name), std::move(s));
}

}  // namespace covmech
