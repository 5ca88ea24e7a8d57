#include "covmech/sampling.hpp"

#include "covmech/errors.hpp"

namespace covmech {

Eigen::VectorXd SampleRng::ball(int dim, double radius) {
  Eigen::VectorXd v(dim);
  if (dim == 0) return v;
  for (;;) {
    for (int i = 0; i < dim; ++i) v[i] = uniform(-1.0, 1.0);
    if (v.squaredNorm() <= 1.0) return radius * v;
  }
}

Eigen::VectorXd SampleRng::sphere(int dim, double radius) {
  Eigen::VectorXd v(dim);
  if (dim == 0) return v;
  for (;;) {
    for (int i = 0; i < dim; ++i) v[i] = uniform(-1.0, 1.0);
    const double n2 = v.squaredNorm();
    if (n2 <= 1.0 && n2 > 1e-4) return radius * v / std::sqrt(n2);
  }
}

std::vector<PhasePoint> sample_points(const System& sys, std::size_t n, std::uint64_t seed) {
  SampleRng rng(seed);
  const int d = sys.dim();
  const int k = sys.charge_dim();
  const auto& chart = sys.hamiltonian.ctx.chart;
  std::vector<PhasePoint> out;
  out.reserve(n);
  std::size_t attempts = 0;
  while (out.size() < n) {
    if (++attempts > 1000 * (n + 1)) throw OutOfDomain("sample box of '" + sys.name + "' misses the chart domain");
    PhasePoint p;
    p.x.resize(d);
    for (int i = 0; i < d; ++i) p.x[i] = rng.uniform(sys.box.lo[i], sys.box.hi[i]);
    p.pi = rng.ball(d, sys.box.momentum_radius);
    p.t = rng.sphere(k, sys.box.charge_radius);
    if (!chart.in_domain(p.x)) continue;
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace covmech
