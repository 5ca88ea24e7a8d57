#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "covmech/catalog.hpp"

namespace covmech {

// Portable uniform draws on top of std::mt19937_64 (the standard
// distributions are not bit-identical across library implementations).
class SampleRng {
 public:
  explicit SampleRng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform in the ball of the given radius (rejection from the cube).
  Eigen::VectorXd ball(int dim, double radius);
  // Uniform on the sphere of the given radius.
  Eigen::VectorXd sphere(int dim, double radius);

 private:
  std::mt19937_64 engine_;
};

// n verification points drawn from the system's sample box; points outside
// the chart domain are redrawn. Same seed, same points.
std::vector<PhasePoint> sample_points(const System& sys, std::size_t n, std::uint64_t seed);

}  // namespace covmech
