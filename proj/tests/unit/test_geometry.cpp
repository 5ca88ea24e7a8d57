#include <doctest.h>

#include <cmath>

#include "covmech/catalog.hpp"
#include "covmech/errors.hpp"
#include "covmech/geometry.hpp"
#include "covmech/killing.hpp"
#include "covmech/sampling.hpp"
#include "oracles.hpp"

using namespace covmech;

namespace {

MetricChart schwarzschild_chart(double M) {
  return MetricChart::from_closure(
      "schwarzschild", {"t", "r", "theta", "phi"},
      [M](auto x) {
        using S = std::remove_const_t<typename decltype(x)::value_type>;
        std::vector<S> g(16, S(0.0));
        const S f = 1.0 - 2.0 * M / x[1];
        const S s = sin(x[2]);
        g[0] = -f;
        g[5] = 1.0 / f;
        g[10] = x[1] * x[1];
        g[15] = x[1] * x[1] * s * s;
        return g;
      },
      [M](const Coords& x) { return x[1] > 2 * M && std::sin(x[2]) != 0.0; });
}

MetricChart polar_chart() {
  return MetricChart::from_closure(
      "polar", {"r", "phi"},
      [](auto x) {
        using S = std::remove_const_t<typename decltype(x)::value_type>;
        return std::vector<S>{S(1.0), S(0.0), S(0.0), x[0] * x[0]};
      },
      [](const Coords& x) { return x[0] > 0; });
}

}  // namespace

TEST_CASE("Schwarzschild Christoffels match the closed form") {
  const double M = 1.3;
  const auto chart = schwarzschild_chart(M);
  SampleRng rng(5);
  for (int k = 0; k < 20; ++k) {
    const Eigen::Vector4d x(rng.uniform(0, 1), rng.uniform(3, 20), rng.uniform(0.3, 2.8), rng.uniform(0, 6));
    const DenseTensor gamma = christoffel_at(chart, x);
    const auto ref = oracle::schwarzschild_christoffel(M, x);
    for (std::size_t i = 0; i < 64; ++i) CHECK(gamma[i] == doctest::Approx(ref[i]).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("finite-difference and dual Christoffels agree on the catalog charts") {
  for (const auto& name : system_names()) {
    const System sys = build_system(name, {});
    const auto pts = sample_points(sys, 20, 9);
    for (const auto& p : pts) {
      const DenseTensor a = christoffel_at(sys.hamiltonian.ctx.chart, p.x, DiffMode::DualNumber);
      const DenseTensor b = christoffel_at(sys.hamiltonian.ctx.chart, p.x, DiffMode::FiniteDifference);
      const double scale = std::max(1.0, a.max_abs());
      for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-6 * scale);
    }
  }
}

TEST_CASE("metric inverse agrees with cofactor inversion on Kerr") {
  const System kerr = build_kerr({1.0, 0.8});
  for (const auto& p : sample_points(kerr, 20, 2)) {
    const Eigen::Matrix4d g = kerr.hamiltonian.ctx.chart.metric(p.x);
    const Eigen::Matrix4d ref = oracle::cofactor_inverse(g);
    const Eigen::MatrixXd inv = inverse_metric_at(kerr.hamiltonian.ctx.chart, p.x);
    CHECK((inv - ref).cwiseAbs().maxCoeff() <= 1e-12 * ref.cwiseAbs().maxCoeff());
    CHECK((inv - inv.transpose()).norm() == 0.0);
  }
}

TEST_CASE("metric compatibility on every catalog chart") {
  for (const auto& name : system_names()) {
    const System sys = build_system(name, {});
    const auto ginv = inverse_metric_field(sys.hamiltonian.ctx.chart);
    for (const auto& p : sample_points(sys, 100, 4)) {
      const auto r = killing_residual(sys.hamiltonian.ctx.chart, ginv, p.x);
      CHECK(r.max_abs() <= 1e-10 * std::max(1.0, r.scale));
      const DenseTensor nabla = covariant_tensor_derivative(sys.hamiltonian.ctx.chart, ginv, p.x);
      CHECK(nabla.max_abs() <= 1e-10 * std::max(1.0, r.scale));
    }
  }
}

TEST_CASE("polar chart: Christoffels and rotation isometry") {
  const auto chart = polar_chart();
  const Eigen::Vector2d x(2.0, 0.4);
  const DenseTensor gamma = christoffel_at(chart, x);
  CHECK(gamma({1, 1, 0}) == doctest::Approx(-2.0));
  CHECK(gamma({0, 1, 1}) == doctest::Approx(0.5));
  CHECK(gamma({1, 0, 1}) == doctest::Approx(0.5));
  SymmetricTensor dphi(1, 2);
  dphi[1] = 1.0;
  const auto r = killing_residual(chart, SymmetricTensorField::constant(dphi), x);
  CHECK(r.max_abs() <= 1e-10);
  SymmetricTensor dr(1, 2);
  dr[0] = 1.0;
  CHECK(killing_residual(chart, SymmetricTensorField::constant(dr), x).max_abs() > 0.1);
}

TEST_CASE("domain and singularity errors") {
  const auto chart = polar_chart();
  CHECK_THROWS_AS(inverse_metric_at(chart, Eigen::Vector2d(-1.0, 0.0)), OutOfDomain);
  CHECK_THROWS_AS(chart.metric(Eigen::Vector3d(1.0, 0.0, 0.0)), DimensionMismatch);
  const auto degenerate = MetricChart::from_closure(
      "degenerate", {"a", "b"},
      [](auto x) {
        using S = std::remove_const_t<typename decltype(x)::value_type>;
        return std::vector<S>{S(1.0), S(1.0), S(1.0), S(1.0) + 0.0 * x[0]};
      },
      [](const Coords&) { return true; });
  CHECK_THROWS_AS(inverse_metric_at(degenerate, Eigen::Vector2d(0.0, 0.0)), SingularMetric);
  const System kerr = build_kerr({1.0, 0.5});
  CHECK_FALSE(kerr.hamiltonian.ctx.chart.in_domain(Eigen::Vector4d(0, 1.5, 1.0, 0)));  // between horizons
  CHECK_FALSE(kerr.hamiltonian.ctx.chart.in_domain(Eigen::Vector4d(0, 5.0, 0.0, 0)));  // on the axis
}

TEST_CASE("metric partials: analytic override is used") {
  const auto chart = polar_chart().with_partials([](const Coords& x) {
    std::vector<Eigen::MatrixXd> d(2, Eigen::MatrixXd::Zero(2, 2));
    d[0](1, 1) = 2.0 * x[0];
    return d;
  });
  CHECK(chart.diff_mode() == DiffMode::Analytic);
  const auto d = chart.metric_partials(Eigen::Vector2d(3.0, 1.0));
  CHECK(d[0](1, 1) == 6.0);
}
