#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace covmech {

using MultiIndex = std::vector<int>;

// Index bookkeeping for rank-n symmetric arrays in d dimensions.
// Canonical entries are the non-decreasing multi-indices in lexicographic order.
class SymmetricLayout {
 public:
  static std::shared_ptr<const SymmetricLayout> get(int rank, int dim);

  SymmetricLayout(int rank, int dim);

  int rank() const { return rank_; }
  int dim() const { return dim_; }
  std::size_t size() const { return canonical_.size(); }
  std::size_t dense_size() const { return dense_to_canonical_.size(); }

  const MultiIndex& multi_index(std::size_t canon) const { return canonical_[canon]; }
  // Number of distinct orderings of the canonical multi-index.
  double multiplicity(std::size_t canon) const { return multiplicity_[canon]; }

  std::size_t canonical_of_dense(std::size_t flat) const { return dense_to_canonical_[flat]; }
  std::size_t canonical_of(std::span<const int> index) const;
  // Canonical slot of the monomial with the given per-coordinate powers.
  std::size_t canonical_of_powers(std::span<const int> powers) const;

  std::size_t flat(std::span<const int> index) const;
  MultiIndex unflatten(std::size_t flat) const;

 private:
  int rank_;
  int dim_;
  std::vector<MultiIndex> canonical_;
  std::vector<double> multiplicity_;
  std::vector<std::size_t> dense_to_canonical_;
};

// Dense rank-n array over d dimensions, row-major in the index order.
class DenseTensor {
 public:
  DenseTensor() = default;
  DenseTensor(int rank, int dim);

  int rank() const { return rank_; }
  int dim() const { return dim_; }
  std::size_t size() const { return data_.size(); }

  double& operator[](std::size_t flat) { return data_[flat]; }
  double operator[](std::size_t flat) const { return data_[flat]; }
  double& at(std::span<const int> index);
  double at(std::span<const int> index) const;
  double& operator()(std::initializer_list<int> index) { return at(std::span(index.begin(), index.size())); }
  double operator()(std::initializer_list<int> index) const { return at(std::span(index.begin(), index.size())); }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  double max_abs() const;

 private:
  int rank_ = 0;
  int dim_ = 0;
  std::vector<double> data_;
};

// Rank-n symmetric array stored by canonical multi-index.
class SymmetricTensor {
 public:
  SymmetricTensor() = default;
  SymmetricTensor(int rank, int dim);
  SymmetricTensor(int rank, int dim, std::vector<double> canonical);

  int rank() const { return layout_->rank(); }
  int dim() const { return layout_->dim(); }
  const SymmetricLayout& layout() const { return *layout_; }
  std::size_t size() const { return components_.size(); }

  double& operator[](std::size_t canon) { return components_[canon]; }
  double operator[](std::size_t canon) const { return components_[canon]; }
  double at(std::span<const int> index) const { return components_[layout_->canonical_of(index)]; }
  double operator()(std::initializer_list<int> index) const { return at(std::span(index.begin(), index.size())); }
  std::span<const double> components() const { return components_; }
  std::span<double> components() { return components_; }

  DenseTensor expand() const;
  // Full contraction with a covector: T^{i1..in} p_i1 ... p_in.
  double contract(const Eigen::VectorXd& p) const;
  // Gradient of contract() with respect to p: n T^{i i2..in} p_i2 ... p_in.
  Eigen::VectorXd contract_gradient(const Eigen::VectorXd& p) const;
  double max_abs() const;

 private:
  std::shared_ptr<const SymmetricLayout> layout_;
  std::vector<double> components_;
};

// Unit-weight symmetrization over all index permutations. Applied to an
// already symmetric array it returns the same values bit for bit.
SymmetricTensor symmetrize(const DenseTensor& t);

// Lower every index with the metric: T_{i..} = g_{ia} ... T^{a..}.
DenseTensor lower_all(const DenseTensor& t, const Eigen::MatrixXd& g);

double factorial(int n);

}  // namespace covmech
