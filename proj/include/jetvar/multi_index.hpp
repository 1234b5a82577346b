#pragma once

#include <compare>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace jetvar {

/// Symmetric multi-index over the base directions, stored as an exponent
/// vector: (2,0) is the second derivative along the first coordinate.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::size_t dim) : exps_(dim, 0) {}
  MultiIndex(std::initializer_list<int> exps) : exps_(exps) { check(); }
  explicit MultiIndex(std::vector<int> exps) : exps_(std::move(exps)) { check(); }

  static MultiIndex unit(std::size_t dim, std::size_t direction) {
    MultiIndex m(dim);
    m.exps_.at(direction) = 1;
    return m;
  }

  std::size_t dim() const { return exps_.size(); }
  int operator[](std::size_t i) const { return exps_[i]; }
  const std::vector<int>& exponents() const { return exps_; }

  int order() const { return std::accumulate(exps_.begin(), exps_.end(), 0); }

  MultiIndex plus(std::size_t direction, int by = 1) const {
    MultiIndex m = *this;
    m.exps_.at(direction) += by;
    m.check();
    return m;
  }
  MultiIndex operator+(const MultiIndex& o) const {
    MultiIndex m = *this;
    for (std::size_t i = 0; i < exps_.size(); ++i) m.exps_[i] += o.exps_.at(i);
    return m;
  }
  /// True iff every exponent of `o` is <= the matching exponent here.
  bool contains(const MultiIndex& o) const {
    for (std::size_t i = 0; i < exps_.size(); ++i)
      if (o.exps_.at(i) > exps_[i]) return false;
    return true;
  }
  MultiIndex operator-(const MultiIndex& o) const {
    if (!contains(o)) throw std::invalid_argument("multi-index difference would be negative");
    MultiIndex m = *this;
    for (std::size_t i = 0; i < exps_.size(); ++i) m.exps_[i] -= o.exps_[i];
    return m;
  }

  auto operator<=>(const MultiIndex&) const = default;

  /// All multi-indices of the given dimension with order exactly `k`, in
  /// lexicographic order of exponent vectors.
  static std::vector<MultiIndex> of_order(std::size_t dim, int k) {
    std::vector<MultiIndex> out;
    MultiIndex cur(dim);
    enumerate(out, cur, 0, k);
    return out;
  }
  static std::vector<MultiIndex> up_to_order(std::size_t dim, int k) {
    std::vector<MultiIndex> out;
    for (int j = 0; j <= k; ++j) {
      auto part = of_order(dim, j);
      out.insert(out.end(), part.begin(), part.end());
    }
    return out;
  }

 private:
  void check() const {
    for (int e : exps_)
      if (e < 0) throw std::invalid_argument("negative multi-index exponent");
  }
  static void enumerate(std::vector<MultiIndex>& out, MultiIndex& cur, std::size_t pos, int left) {
    if (cur.dim() == 0) {
      if (left == 0) out.push_back(cur);
      return;
    }
    if (pos + 1 == cur.dim()) {
      cur.exps_[pos] = left;
      out.push_back(cur);
      cur.exps_[pos] = 0;
      return;
    }
    for (int e = 0; e <= left; ++e) {
      cur.exps_[pos] = e;
      enumerate(out, cur, pos + 1, left - e);
    }
    cur.exps_[pos] = 0;
  }

  std::vector<int> exps_;
};

}  // namespace jetvar
