#include "covmech/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <utility>

#include "covmech/errors.hpp"

namespace covmech {

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

std::shared_ptr<const SymmetricLayout> SymmetricLayout::get(int rank, int dim) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const SymmetricLayout>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{rank, dim}];
  if (!slot) slot = std::make_shared<const SymmetricLayout>(rank, dim);
  return slot;
}

SymmetricLayout::SymmetricLayout(int rank, int dim) : rank_(rank), dim_(dim) {
  if (rank < 0 || dim <= 0) throw DimensionMismatch("symmetric layout needs rank >= 0 and dim > 0");
  std::size_t dense = 1;
  for (int i = 0; i < rank; ++i) dense *= static_cast<std::size_t>(dim);

  std::map<MultiIndex, std::size_t> slot_of;
  dense_to_canonical_.resize(dense);
  for (std::size_t f = 0; f < dense; ++f) {
    MultiIndex idx = unflatten(f);
    std::sort(idx.begin(), idx.end());
    auto [it, inserted] = slot_of.try_emplace(idx, 0);
    if (inserted) canonical_.push_back(idx);
  }
  // Lexicographic order of the canonical list.
  std::sort(canonical_.begin(), canonical_.end());
  for (std::size_t c = 0; c < canonical_.size(); ++c) slot_of[canonical_[c]] = c;
  for (std::size_t f = 0; f < dense; ++f) {
    MultiIndex idx = unflatten(f);
    std::sort(idx.begin(), idx.end());
    dense_to_canonical_[f] = slot_of[idx];
  }
  multiplicity_.resize(canonical_.size());
  for (std::size_t c = 0; c < canonical_.size(); ++c) {
    double m = factorial(rank);
    const auto& idx = canonical_[c];
    for (std::size_t i = 0; i < idx.size();) {
      std::size_t j = i;
      while (j < idx.size() && idx[j] == idx[i]) ++j;
      m /= factorial(static_cast<int>(j - i));
      i = j;
    }
    multiplicity_[c] = m;
  }
}

std::size_t SymmetricLayout::flat(std::span<const int> index) const {
  if (static_cast<int>(index.size()) != rank_) throw DimensionMismatch("multi-index rank mismatch");
  std::size_t f = 0;
  for (int i : index) {
    if (i < 0 || i >= dim_) throw DimensionMismatch("multi-index out of range");
    f = f * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(i);
  }
  return f;
}

MultiIndex SymmetricLayout::unflatten(std::size_t f) const {
  MultiIndex idx(rank_);
  for (int k = rank_ - 1; k >= 0; --k) {
    idx[k] = static_cast<int>(f % static_cast<std::size_t>(dim_));
    f /= static_cast<std::size_t>(dim_);
  }
  return idx;
}

std::size_t SymmetricLayout::canonical_of(std::span<const int> index) const {
  return dense_to_canonical_[flat(index)];
}

std::size_t SymmetricLayout::canonical_of_powers(std::span<const int> powers) const {
  if (static_cast<int>(powers.size()) != dim_) throw DimensionMismatch("power vector length != dim");
  MultiIndex idx;
  for (int i = 0; i < dim_; ++i) idx.insert(idx.end(), powers[i], i);
  return canonical_of(idx);
}

DenseTensor::DenseTensor(int rank, int dim) : rank_(rank), dim_(dim) {
  std::size_t n = 1;
  for (int i = 0; i < rank; ++i) n *= static_cast<std::size_t>(dim);
  data_.assign(n, 0.0);
}

namespace {
std::size_t dense_flat(std::span<const int> index, int rank, int dim) {
  if (static_cast<int>(index.size()) != rank) throw DimensionMismatch("multi-index rank mismatch");
  std::size_t f = 0;
  for (int i : index) {
    if (i < 0 || i >= dim) throw DimensionMismatch("multi-index out of range");
    f = f * static_cast<std::size_t>(dim) + static_cast<std::size_t>(i);
  }
  return f;
}
}  // namespace

double& DenseTensor::at(std::span<const int> index) { return data_[dense_flat(index, rank_, dim_)]; }

double DenseTensor::at(std::span<const int> index) const { return data_[dense_flat(index, rank_, dim_)]; }

double DenseTensor::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

SymmetricTensor::SymmetricTensor(int rank, int dim)
    : layout_(SymmetricLayout::get(rank, dim)), components_(layout_->size(), 0.0) {}

SymmetricTensor::SymmetricTensor(int rank, int dim, std::vector<double> canonical)
    : layout_(SymmetricLayout::get(rank, dim)), components_(std::move(canonical)) {
  if (components_.size() != layout_->size()) {
    throw DimensionMismatch("symmetric tensor expects " + std::to_string(layout_->size()) +
                            " canonical components");
  }
}

DenseTensor SymmetricTensor::expand() const {
  DenseTensor d(rank(), dim());
  for (std::size_t f = 0; f < d.size(); ++f) d[f] = components_[layout_->canonical_of_dense(f)];
  return d;
}

double SymmetricTensor::contract(const Eigen::VectorXd& p) const {
  double sum = 0.0;
  for (std::size_t c = 0; c < components_.size(); ++c) {
    double term = components_[c] * layout_->multiplicity(c);
    for (int i : layout_->multi_index(c)) term *= p[i];
    sum += term;
  }
  return sum;
}

Eigen::VectorXd SymmetricTensor::contract_gradient(const Eigen::VectorXd& p) const {
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(dim());
  const int n = rank();
  if (n == 0) return grad;
  for (std::size_t c = 0; c < components_.size(); ++c) {
    const auto& idx = layout_->multi_index(c);
    const double w = components_[c] * layout_->multiplicity(c);
    // d/dp_k of prod p_idx: sum over positions holding k.
    for (int pos = 0; pos < n; ++pos) {
      if (pos > 0 && idx[pos] == idx[pos - 1]) continue;
      int count = 0;
      double rest = 1.0;
      bool skipped = false;
      for (int q = 0; q < n; ++q) {
        if (idx[q] == idx[pos]) ++count;
        if (idx[q] == idx[pos] && !skipped) {
          skipped = true;
          continue;
        }
        rest *= p[idx[q]];
      }
      grad[idx[pos]] += w * count * rest;
    }
  }
  return grad;
}

double SymmetricTensor::max_abs() const {
  double m = 0.0;
  for (double v : components_) m = std::max(m, std::abs(v));
  return m;
}

SymmetricTensor symmetrize(const DenseTensor& t) {
  SymmetricTensor out(t.rank(), t.dim());
  const auto& layout = out.layout();
  std::vector<int> count(layout.size(), 0);
  std::vector<double> first(layout.size(), 0.0);
  std::vector<double> shifted(layout.size(), 0.0);
  for (std::size_t f = 0; f < t.size(); ++f) {
    const std::size_t c = layout.canonical_of_dense(f);
    if (count[c] == 0) first[c] = t[f];
    shifted[c] += t[f] - first[c];
    ++count[c];
  }
  // Shifted mean: equal inputs reproduce the input exactly.
  for (std::size_t c = 0; c < layout.size(); ++c) out[c] = first[c] + shifted[c] / count[c];
  return out;
}

DenseTensor lower_all(const DenseTensor& t, const Eigen::MatrixXd& g) {
  DenseTensor cur = t;
  const int n = t.rank();
  const int d = t.dim();
  const auto layout = SymmetricLayout::get(n, d);
  for (int slot = 0; slot < n; ++slot) {
    DenseTensor next(n, d);
    for (std::size_t f = 0; f < next.size(); ++f) {
      MultiIndex idx = layout->unflatten(f);
      const int i = idx[slot];
      double s = 0.0;
      for (int a = 0; a < d; ++a) {
        idx[slot] = a;
        s += g(i, a) * cur[layout->flat(idx)];
      }
      next[f] = s;
    }
    cur = std::move(next);
  }
  return cur;
}

}  // namespace covmech
