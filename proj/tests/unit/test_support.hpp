#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "covmech/phase.hpp"
#include "covmech/sampling.hpp"

namespace testsupport {

// Random polynomial in the packed phase variables (x, π, t): a few monomials of
// total degree <= 3 with coefficients in [-1, 1].
inline covmech::Observable random_polynomial(int dim, int charge_dim, std::uint64_t seed, std::string name = "P") {
  covmech::SampleRng rng(seed);
  const int n = 2 * dim + charge_dim;
  struct Term {
    double c;
    std::vector<int> vars;
  };
  std::vector<Term> terms;
  for (int k = 0; k < 5; ++k) {
    Term t{rng.uniform(-1.0, 1.0), {}};
    const int degree = 1 + static_cast<int>(rng.uniform() * 3.0);
    for (int d = 0; d < degree; ++d) t.vars.push_back(std::min(n - 1, static_cast<int>(rng.uniform() * n)));
    terms.push_back(t);
  }
  return covmech::Observable::from_closure(std::move(name), dim, charge_dim, [terms, dim, charge_dim](auto x, auto pi, auto t) {
    using S = std::remove_const_t<typename decltype(x)::value_type>;
    auto var = [&](int i) -> S {
      if (i < dim) return x[static_cast<std::size_t>(i)];
      if (i < 2 * dim) return pi[static_cast<std::size_t>(i - dim)];
      return t[static_cast<std::size_t>(i - 2 * dim)];
    };
    (void)charge_dim;
    S sum(0.0);
    for (const auto& term : terms) {
      S m(term.c);
      for (int v : term.vars) m = m * var(v);
      sum = sum + m;
    }
    return sum;
  });
}

}  // namespace testsupport
