#include <doctest.h>

#include <cmath>

#include "covmech/differentiation.hpp"

using namespace covmech;

TEST_CASE("dual numbers carry exact first derivatives") {
  const Dual1 x(0.7, 1.0);
  const Dual1 y = sin(x) * exp(x) / (1.0 + x * x);
  const double v = 0.7;
  const double f = std::sin(v) * std::exp(v) / (1 + v * v);
  const double df = (std::cos(v) * std::exp(v) + std::sin(v) * std::exp(v)) / (1 + v * v) -
                    std::sin(v) * std::exp(v) * 2 * v / ((1 + v * v) * (1 + v * v));
  CHECK(y.val == doctest::Approx(f).epsilon(1e-15));
  CHECK(y.eps == doctest::Approx(df).epsilon(1e-14));
}

TEST_CASE("nested duals give second derivatives") {
  // f = x^3 sqrt(x): f'' = (35/4) x^{3/2}
  const double v = 1.3;
  const Dual2 x(Dual1(v, 1.0), Dual1(1.0, 0.0));
  const Dual2 f = x * x * x * sqrt(x);
  CHECK(f.eps.eps == doctest::Approx(35.0 / 4.0 * std::pow(v, 1.5)).epsilon(1e-13));
}

TEST_CASE("component map routes agree") {
  auto map = ComponentMap::from_generic(2, 2, [](auto x) {
    using S = std::remove_const_t<typename decltype(x)::value_type>;
    return std::vector<S>{x[0] * x[1], cos(x[0]) + x[1] * x[1] * x[1]};
  });
  const std::vector<double> p{0.4, -1.1};
  const Eigen::MatrixXd jd = map.jacobian_dual(p);
  const Eigen::MatrixXd jf = map.jacobian_fd(p);
  Eigen::MatrixXd exact(2, 2);
  exact << p[1], p[0], -std::sin(p[0]), 3 * p[1] * p[1];
  CHECK((jd - exact).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((jf - exact).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(map.mode() == DiffMode::DualNumber);

  auto analytic = map.with_jacobian([](std::span<const double> x) {
    Eigen::MatrixXd j(2, 2);
    j << x[1], x[0], -std::sin(x[0]), 3 * x[1] * x[1];
    return j;
  });
  CHECK(analytic.mode() == DiffMode::Analytic);
  CHECK((analytic.jacobian(p) - exact).norm() == 0.0);
}

TEST_CASE("numeric maps fall back to central differences") {
  auto map = ComponentMap::from_numeric(1, 1, [](std::span<const double> x) { return std::vector<double>{std::exp(x[0])}; });
  const std::vector<double> p{0.5};
  CHECK(map.mode() == DiffMode::FiniteDifference);
  CHECK(map.jacobian(p)(0, 0) == doctest::Approx(std::exp(0.5)).epsilon(1e-9));
  CHECK_THROWS_AS(map.jacobian_dual(p), DifferentiationError);
}

TEST_CASE("gradient map of a generic scalar is exact") {
  auto f = ComponentMap::from_generic(2, 1, [](auto x) {
    using S = std::remove_const_t<typename decltype(x)::value_type>;
    return std::vector<S>{x[0] * x[0] * x[1] + sin(x[1])};
  });
  const auto g = f.gradient_map();
  const std::vector<double> p{0.3, 0.9};
  const auto v = g(p);
  CHECK(v[0] == doctest::Approx(2 * 0.3 * 0.9).epsilon(1e-15));
  CHECK(v[1] == doctest::Approx(0.09 + std::cos(0.9)).epsilon(1e-15));
  // Hessian through the dual route of the gradient map.
  const Eigen::MatrixXd h = g.jacobian_dual(p);
  CHECK(h(0, 0) == doctest::Approx(2 * 0.9));
  CHECK(h(0, 1) == doctest::Approx(2 * 0.3));
  CHECK(h(1, 1) == doctest::Approx(-std::sin(0.9)));
}

TEST_CASE("dimension mismatch is reported") {
  auto map = ComponentMap::from_generic(2, 1, [](auto x) {
    using S = std::remove_const_t<typename decltype(x)::value_type>;
    return std::vector<S>{x[0] + x[1]};
  });
  const std::vector<double> p{1.0};
  CHECK_THROWS_AS(map(p), DimensionMismatch);
}

TEST_CASE("fd step scales with magnitude") {
  CHECK(fd_step(0.0) == fd_step(1.0));
  CHECK(fd_step(100.0) == doctest::Approx(100.0 * fd_step(1.0)));
}
