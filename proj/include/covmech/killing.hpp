#pragma once

#include <span>
#include <vector>

#include "covmech/dynamics.hpp"
#include "covmech/geometry.hpp"
#include "covmech/phase.hpp"
#include "covmech/tensor_field.hpp"

namespace covmech {

// A symmetric residual array together with the magnitude of the largest
// terms that entered it; checks compare max_abs() against tol * scale.
struct TensorResidual {
  SymmetricTensor value;
  double scale = 0.0;

  double max_abs() const { return value.max_abs(); }
  double relative() const { return scale > 0.0 ? max_abs() / scale : max_abs(); }
};

// Unit-weight symmetrization of g^{κλ} ∇_λ G^{μ1..μn} (all indices up). Vanishes
// iff ∇_(μ G_{μ1..μn)} = 0, i.e. G is a Killing tensor at x.
TensorResidual killing_residual(const MetricChart& chart, const SymmetricTensorField& field, const Coords& x,
                                const Eigen::VectorXd& t = {});

// Order-by-order residual of m {G, H} = 0 for the series G, ranks 0..N+1.
// Entry k >= 1 is normalized by the weight of G^(k-1):
//   R_k = sym(g D G^(k-1)) + c_k sym(force·g·G^(k)) − m d_k sym(∂Φ·G^(k+1))
// with c_k = 1, d_k = 1/k for factorial weights (c_k = k, d_k = k+1 for plain
// monomials). Entry 0 is −m ∂_μΦ G^(1)μ.
std::vector<TensorResidual> hierarchy_residual(const BracketContext& ctx, const GeneratorSeries& series,
                                               const Coords& x, const Eigen::VectorXd& t = {}, double mass = 1.0);

// Re-assembles m {G, H} at momentum pi from hierarchy_residual output.
double contract_hierarchy(const std::vector<TensorResidual>& residual, const GeneratorSeries& series,
                          const Eigen::VectorXd& pi);

struct SweepResult {
  std::size_t count = 0;
  double max_abs = 0.0;
  double mean_abs = 0.0;
  double max_relative = 0.0;
  std::size_t worst_index = 0;
  PhasePoint worst_point;
  double worst_scale = 0.0;

  void add(std::size_t index, const PhasePoint& p, double value, double scale);
  bool passes(double tol) const { return max_relative <= tol; }
};

// max |{G, H}| over the sample.
SweepResult conserved_check(const HamiltonianSpec& hamiltonian, const Observable& obs,
                            std::span<const PhasePoint> sample);

// max |{{G, K}, H}| over the sample. The scale is the larger of the outer
// bracket's terms and the terms of {G, K} times max |∂H|.
SweepResult closure_check(const HamiltonianSpec& hamiltonian, const Observable& g, const Observable& k,
                          std::span<const PhasePoint> sample);

// Per-rank sweep of hierarchy_residual / killing_residual.
struct RankSweep {
  int rank = 0;
  SweepResult result;
};
std::vector<RankSweep> hierarchy_sweep(const BracketContext& ctx, const GeneratorSeries& series,
                                       std::span<const PhasePoint> sample, double mass = 1.0);
SweepResult killing_sweep(const MetricChart& chart, const SymmetricTensorField& field,
                          std::span<const PhasePoint> sample);

// Bracket of monomial generators A (rank n) and B (rank m), rank n+m−1:
//   sym(m B^{λ…} ∇_λ A^{…} − n A^{λ…} ∇_λ B^{…}).
SymmetricTensor generator_bracket_at(const MetricChart& chart, const SymmetricTensorField& a,
                                     const SymmetricTensorField& b, const Coords& x);
SymmetricTensorField generator_bracket(const MetricChart& chart, const SymmetricTensorField& a,
                                       const SymmetricTensorField& b);

// Monomial observable G = G^{μ1..μn} π_μ1..π_μn for a single tensor field.
Observable monomial_observable(std::string name, const SymmetricTensorField& field, int charge_dim = 0);

}  // namespace covmech
