#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "covmech/sampling.hpp"
#include "covmech/tensor.hpp"
#include "covmech/tensor_field.hpp"

using namespace covmech;

TEST_CASE("layout sizes and multiplicities") {
  const auto l = SymmetricLayout::get(4, 3);
  CHECK(l->size() == 15);  // C(3+4-1, 4)
  CHECK(l->dense_size() == 81);
  double total = 0.0;
  for (std::size_t c = 0; c < l->size(); ++c) total += l->multiplicity(c);
  CHECK(total == 81.0);
  const int idx[] = {2, 0, 1, 0};
  const int sorted[] = {0, 0, 1, 2};
  CHECK(l->canonical_of(idx) == l->canonical_of(sorted));
  const int powers[] = {2, 1, 1};
  CHECK(l->canonical_of_powers(powers) == l->canonical_of(sorted));
  CHECK(l->multiplicity(l->canonical_of(sorted)) == 12.0);
}

TEST_CASE("expansion round-trips and contraction matches the dense sum") {
  SampleRng rng(3);
  SymmetricTensor t(3, 3);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(-1, 1);
  const DenseTensor e = t.expand();
  const SymmetricTensor back = symmetrize(e);
  for (std::size_t i = 0; i < t.size(); ++i) CHECK(back[i] == t[i]);

  const Eigen::Vector3d p(0.3, -0.7, 1.1);
  double dense = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) dense += e({a, b, c}) * p[a] * p[b] * p[c];
  CHECK(t.contract(p) == doctest::Approx(dense).epsilon(1e-14));

  const Eigen::VectorXd g = t.contract_gradient(p);
  for (int i = 0; i < 3; ++i) {
    double expected = 0.0;
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) expected += 3.0 * e({i, b, c}) * p[b] * p[c];
    CHECK(g[i] == doctest::Approx(expected).epsilon(1e-14));
  }
}

TEST_CASE("symmetrizer is idempotent bit for bit") {
  SampleRng rng(11);
  for (int rank = 1; rank <= 4; ++rank) {
    DenseTensor d(rank, 3);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = rng.uniform(-5, 5);
    const SymmetricTensor once = symmetrize(d);
    const SymmetricTensor twice = symmetrize(once.expand());
    for (std::size_t i = 0; i < once.size(); ++i) CHECK(once[i] == twice[i]);
  }
}

TEST_CASE("symmetrizer averages over permutations with unit weight") {
  DenseTensor d(2, 2);
  d({0, 1}) = 1.0;
  const SymmetricTensor s = symmetrize(d);
  CHECK(s({0, 1}) == 0.5);
  CHECK(s({1, 0}) == 0.5);
  CHECK(s({0, 0}) == 0.0);
}

TEST_CASE("lower_all lowers every index") {
  DenseTensor t(2, 2);
  t({0, 1}) = 1.0;
  t({1, 0}) = 1.0;
  Eigen::Matrix2d g;
  g << 2, 0, 0, 3;
  const DenseTensor low = lower_all(t, g);
  CHECK(low({0, 1}) == 6.0);
  CHECK(low({0, 0}) == 0.0);
}

TEST_CASE("generator series weights and gradients") {
  GeneratorSeries s(2, 0, true);
  s.set(2, SymmetricTensorField::from_closure(2, 2, [](auto x) {
    using S = std::remove_const_t<typename decltype(x)::value_type>;
    return std::vector<S>{x[0], S(0.0), x[1] * x[1]};  // (00, 01, 11)
  }));
  s.set(0, SymmetricTensorField::from_closure(0, 2, [](auto x) {
    using S = std::remove_const_t<typename decltype(x)::value_type>;
    return std::vector<S>{x[0] * x[1]};
  }));
  const Eigen::Vector2d x(0.5, 2.0), p(1.5, -0.5);
  // ½ (x0 p0² + x1² p1²) + x0 x1
  const double expected = 0.5 * (0.5 * 2.25 + 4.0 * 0.25) + 1.0;
  CHECK(s.evaluate(x, p) == doctest::Approx(expected).epsilon(1e-15));
  const auto g = s.gradient(x, p);
  CHECK(g.dpi[0] == doctest::Approx(0.5 * 1.5).epsilon(1e-15));
  CHECK(g.dpi[1] == doctest::Approx(4.0 * -0.5).epsilon(1e-15));
  CHECK(g.dx[0] == doctest::Approx(0.5 * 2.25 + 2.0).epsilon(1e-15));
  CHECK(g.dx[1] == doctest::Approx(0.5 * 2 * 2.0 * 0.25 + 0.5).epsilon(1e-15));
  CHECK(s.weight(3) == doctest::Approx(1.0 / 6.0));

  GeneratorSeries plain(2, 0, false);
  plain.set(2, *s.term(2));
  CHECK(plain.evaluate(x, p) == doctest::Approx(0.5 * 2.25 + 4.0 * 0.25).epsilon(1e-15));
}

TEST_CASE("tensor field derivative routes agree") {
  auto f = SymmetricTensorField::from_closure(1, 2, [](auto x, auto t) {
    using S = std::remove_const_t<typename decltype(x)::value_type>;
    return std::vector<S>{sin(x[0]) * t[0], x[1] * x[0]};
  }, 1);
  const Eigen::Vector2d x(0.4, 1.2);
  Eigen::VectorXd t(1);
  t << 0.7;
  const auto a = f.derivatives(x, t, DiffMode::DualNumber);
  const auto b = f.derivatives(x, t, DiffMode::FiniteDifference);
  for (int l = 0; l < 2; ++l)
    for (std::size_t c = 0; c < 2; ++c) CHECK(a.dx[l][c] == doctest::Approx(b.dx[l][c]).epsilon(1e-8));
  CHECK(a.dt[0][0] == doctest::Approx(std::sin(0.4)).epsilon(1e-15));
}
