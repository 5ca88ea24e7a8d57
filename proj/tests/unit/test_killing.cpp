#include <doctest.h>

#include <cmath>

#include "covmech/catalog.hpp"
#include "covmech/errors.hpp"
#include "covmech/killing.hpp"
#include "covmech/sampling.hpp"
#include "test_support.hpp"

using namespace covmech;

namespace {

MetricChart flat3() {
  return MetricChart::from_closure(
      "flat3", {"x", "y", "z"},
      [](auto x) {
        using S = std::remove_const_t<typename decltype(x)::value_type>;
        std::vector<S> g(9, S(0.0));
        g[0] = g[4] = g[8] = S(1.0) + 0.0 * x[0];
        return g;
      },
      [](const Coords&) { return true; });
}

// Rotation generator about axis k: (J_k)^i = ε_{kji} x^j, so J_z = (−y, x, 0).
SymmetricTensorField rotation(int k) {
  return SymmetricTensorField::from_closure(1, 3, [k](auto x) {
    using S = std::remove_const_t<typename decltype(x)::value_type>;
    std::vector<S> v(3, S(0.0));
    const int i = (k + 1) % 3, j = (k + 2) % 3;
    v[static_cast<std::size_t>(i)] = -x[static_cast<std::size_t>(j)];
    v[static_cast<std::size_t>(j)] = x[static_cast<std::size_t>(i)];
    return v;
  });
}

}  // namespace

TEST_CASE("so(3) from the generator bracket") {
  const auto chart = flat3();
  SampleRng rng(4);
  for (int n = 0; n < 20; ++n) {
    const Eigen::Vector3d x(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2));
    for (int a = 0; a < 3; ++a) {
      const int b = (a + 1) % 3, c = (a + 2) % 3;
      const SymmetricTensor br = generator_bracket_at(chart, rotation(a), rotation(b), x);
      const SymmetricTensor jc = rotation(c).value(x);
      // [J_a, J_b] = J_c, as for the angular-momentum observables.
      for (int i = 0; i < 3; ++i) CHECK(std::abs(br[static_cast<std::size_t>(i)] - jc[static_cast<std::size_t>(i)]) <= 1e-15);
    }
  }
}

TEST_CASE("translations commute; bracket is antisymmetric") {
  const auto chart = flat3();
  SymmetricTensor ex(1, 3), ey(1, 3);
  ex[0] = 1.0;
  ey[1] = 1.0;
  const Eigen::Vector3d x(0.2, 0.3, 0.4);
  const auto tr = generator_bracket_at(chart, SymmetricTensorField::constant(ex), SymmetricTensorField::constant(ey), x);
  CHECK(tr.max_abs() == 0.0);

  const System kerr = build_kerr({1.0, 0.7});
  const auto& k = kerr.killing_fields[0].field;
  const auto& dphi = kerr.killing_fields[2].field;
  for (const auto& p : sample_points(kerr, 10, 6)) {
    const auto ab = generator_bracket_at(kerr.hamiltonian.ctx.chart, k, dphi, p.x);
    const auto ba = generator_bracket_at(kerr.hamiltonian.ctx.chart, dphi, k, p.x);
    for (std::size_t i = 0; i < ab.size(); ++i) CHECK(std::abs(ab[i] + ba[i]) <= 1e-12 * std::max(1.0, std::abs(ab[i])));
    // The Carter tensor is axially symmetric.
    CHECK(ab.max_abs() <= 1e-8);
  }
  CHECK_THROWS_AS(generator_bracket(chart, SymmetricTensorField::constant(SymmetricTensor(0, 3)), rotation(0)),
                  RankZeroOperand);
}

TEST_CASE("generator bracket matches the bracket of wrapped monomials") {
  const System kerr = build_kerr({1.0, 0.8});
  const auto& chart = kerr.hamiltonian.ctx.chart;
  const auto& carter = kerr.killing_fields[0].field;
  // A non-Killing vector field to make the check non-trivial.
  const auto v = SymmetricTensorField::from_closure(1, 4, [](auto x) {
    using S = std::remove_const_t<typename decltype(x)::value_type>;
    return std::vector<S>{x[1] * x[1], sin(x[2]), x[1] * cos(x[2]), S(0.3)};
  });
  const auto a = monomial_observable("A", carter);
  const auto b = monomial_observable("B", v);
  for (const auto& p : sample_points(kerr, 100, 15)) {
    const double direct = covariant_bracket(kerr.hamiltonian.ctx, a, b, p);
    const double via = generator_bracket_at(chart, carter, v, p.x).contract(p.pi);
    CHECK(std::abs(direct - via) <= 1e-9 * std::max(1.0, std::abs(direct)));
  }
}

TEST_CASE("Killing residuals") {
  const System kerr = build_kerr({1.0, 0.8});
  for (const auto& f : kerr.killing_fields) {
    const auto s = killing_sweep(kerr.hamiltonian.ctx.chart, f.field, sample_points(kerr, 100, 19));
    CHECK_MESSAGE(s.max_relative <= 1e-8, f.name);
  }
  // A non-Killing field fails.
  SymmetricTensor dr(1, 4);
  dr[1] = 1.0;
  const auto r = killing_residual(kerr.hamiltonian.ctx.chart, SymmetricTensorField::constant(dr), Eigen::Vector4d(0, 6, 1, 0));
  CHECK(r.relative() > 1e-3);
}

TEST_CASE("hierarchy contraction reproduces m{G,H}") {
  for (const auto& name : {"quantum-dot", "su2-plane"}) {
    const System sys = build_system(name, {});
    for (const auto& s : sys.series) {
      const Observable g = Observable::from_series(s.name, s.series);
      for (const auto& p : sample_points(sys, 10, 23)) {
        const auto res = hierarchy_residual(sys.hamiltonian.ctx, s.series, p.x, p.t, sys.hamiltonian.mass);
        const double contracted = contract_hierarchy(res, s.series, p.pi);
        const ScaledValue b = covariant_bracket_scaled(sys.hamiltonian.ctx, g, sys.observable("H"), p);
        CHECK(std::abs(contracted - sys.hamiltonian.mass * b.value) <= 1e-10 * std::max(1.0, b.scale));
      }
    }
  }
  // Same identity with a non-conserved random series in the non-abelian context.
  const System su2 = build_su2_plane({});
  GeneratorSeries rs(2, 3, true);
  rs.set(2, SymmetricTensorField::from_closure(2, 2, [](auto x, auto t) {
    using S = std::remove_const_t<typename decltype(x)::value_type>;
    return std::vector<S>{x[0] * t[1], x[1] * x[0], t[2] + x[1]};
  }, 3));
  rs.set(1, SymmetricTensorField::from_closure(1, 2, [](auto x, auto t) {
    using S = std::remove_const_t<typename decltype(x)::value_type>;
    return std::vector<S>{t[0] * x[1], x[0] * x[0] * t[2]};
  }, 3));
  rs.set(0, SymmetricTensorField::from_closure(0, 2, [](auto x, auto t) {
    using S = std::remove_const_t<typename decltype(x)::value_type>;
    return std::vector<S>{x[0] * t[0] * t[1]};
  }, 3));
  const Observable g = Observable::from_series("R", rs);
  for (const auto& p : sample_points(su2, 20, 29)) {
    const auto res = hierarchy_residual(su2.hamiltonian.ctx, rs, p.x, p.t);
    const ScaledValue b = covariant_bracket_scaled(su2.hamiltonian.ctx, g, su2.observable("H"), p);
    CHECK(std::abs(contract_hierarchy(res, rs, p.pi) - b.value) <= 1e-10 * std::max(1.0, b.scale));
    CHECK(res.size() == 4);
  }
}

TEST_CASE("truncation: a pure Killing tensor has a vanishing hierarchy") {
  const System kerr = build_kerr({1.0, 0.8});
  GeneratorSeries s(4, 0, false);
  s.set(2, kerr.killing_fields[0].field);
  for (const auto& p : sample_points(kerr, 20, 37)) {
    const auto res = hierarchy_residual(kerr.hamiltonian.ctx, s, p.x);
    REQUIRE(res.size() == 4);
    CHECK(res[0].max_abs() == 0.0);
    CHECK(res[1].max_abs() == 0.0);
    CHECK(res[2].max_abs() == 0.0);
    const auto k = killing_residual(kerr.hamiltonian.ctx.chart, kerr.killing_fields[0].field, p.x);
    for (std::size_t i = 0; i < k.value.size(); ++i) CHECK(res[3].value[i] == k.value[i]);
  }
}

TEST_CASE("conserved and closure checks") {
  const System flat = build_flat_plane({});
  const auto pts = sample_points(flat, 50, 1);
  const auto px = flat.observable("p_x"), py = flat.observable("p_y");
  CHECK(closure_check(flat.hamiltonian, px, py, pts).max_abs == 0.0);
  const System axial = build_quantum_dot({2.0, 1.0, 0.0, 0.0});
  CHECK(conserved_check(axial.hamiltonian, axial.observable("J"), sample_points(axial, 50, 3)).max_abs <= 1e-10);

  const System su2 = build_su2_plane({});
  const auto spts = sample_points(su2, 100, 8);
  const auto j = su2.observable("J");
  CHECK(closure_check(su2.hamiltonian, j, su2.observable("K_x"), spts).max_relative <= 1e-6);
  const auto stripped = su2.negative_controls[0].observable;
  CHECK(conserved_check(su2.hamiltonian, stripped, spts).max_relative > 1e-2);

  const System kerr = build_kerr({});
  const auto kpts = sample_points(kerr, 100, 9);
  CHECK(closure_check(kerr.hamiltonian, kerr.observable("p_phi"), kerr.observable("carter"), kpts).max_relative <= 1e-7);
}

TEST_CASE("quantum-dot hierarchy and its detuned control") {
  const QuantumDotParams tuned{1.0, 1.0, std::sqrt(3.0), 0.7};
  const System qd = build_quantum_dot(tuned);
  const auto pts = sample_points(qd, 100, 10);
  const auto& g4 = qd.series[1].series;
  for (const auto& rs : hierarchy_sweep(qd.hamiltonian.ctx, g4, pts)) CHECK(rs.result.max_relative <= 1e-7);
  QuantumDotParams off = tuned;
  off.omegaL *= 1.1;
  double worst = 0.0;
  for (const auto& rs : hierarchy_sweep(quantum_dot_context(off), g4, pts)) worst = std::max(worst, rs.result.max_relative);
  CHECK(worst > 1e-3);
}
