#pragma once

// Exact dense linear algebra over the rationals, sized for truncated
// cochain spaces (a few hundred columns).

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "form.hpp"

namespace jetvar::linalg {

using Vector = std::vector<Rational>;
using Matrix = std::vector<Vector>;  // row-major

inline bool is_zero(const Vector& v) {
  for (const Rational& x : v)
    if (x != 0) return false;
  return true;
}

/// In-place reduced row echelon form; returns the pivot columns.
inline std::vector<std::size_t> rref(Matrix& a, std::size_t cols) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < cols && row < a.size(); ++col) {
    std::size_t p = row;
    while (p < a.size() && a[p][col] == 0) ++p;
    if (p == a.size()) continue;
    std::swap(a[p], a[row]);
    const Rational inv = 1 / a[row][col];
    for (std::size_t j = col; j < cols; ++j) a[row][j] *= inv;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (i == row || a[i][col] == 0) continue;
      const Rational f = a[i][col];
      for (std::size_t j = col; j < cols; ++j) a[i][j] -= f * a[row][j];
    }
    pivots.push_back(col);
    ++row;
  }
  a.resize(row);
  return pivots;
}

/// Basis of {x : A x = 0} for A with the given number of columns.
inline std::vector<Vector> nullspace(Matrix a, std::size_t cols) {
  const auto pivots = rref(a, cols);
  std::vector<bool> is_pivot(cols, false);
  for (std::size_t p : pivots) is_pivot[p] = true;
  std::vector<Vector> out;
  for (std::size_t free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    Vector x(cols);
    x[free] = 1;
    for (std::size_t i = 0; i < pivots.size(); ++i) x[pivots[i]] = -a[i][free];
    out.push_back(std::move(x));
  }
  return out;
}

/// Incrementally grown subspace kept in reduced echelon form.
class Span {
 public:
  explicit Span(std::size_t ambient) : n_(ambient) {}

  std::size_t ambient() const { return n_; }
  std::size_t dim() const { return rows_.size(); }
  const std::vector<Vector>& basis() const { return rows_; }

  Vector reduce(Vector v) const {
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const Rational f = v[pivots_[i]];
      if (f == 0) continue;
      for (std::size_t j = pivots_[i]; j < n_; ++j) v[j] -= f * rows_[i][j];
    }
    return v;
  }
  bool contains(const Vector& v) const { return is_zero(reduce(v)); }

  /// Adds v; returns false when v was already in the span.
  bool insert(const Vector& v) {
    Vector r = reduce(v);
    std::size_t p = 0;
    while (p < n_ && r[p] == 0) ++p;
    if (p == n_) return false;
    const Rational inv = 1 / r[p];
    for (std::size_t j = p; j < n_; ++j) r[j] *= inv;
    for (auto& row : rows_) {
      const Rational f = row[p];
      if (f == 0) continue;
      for (std::size_t j = p; j < n_; ++j) row[j] -= f * r[j];
    }
    auto at = std::lower_bound(pivots_.begin(), pivots_.end(), p);
    rows_.insert(rows_.begin() + (at - pivots_.begin()), std::move(r));
    pivots_.insert(at, p);
    return true;
  }

 private:
  std::size_t n_;
  std::vector<Vector> rows_;
  std::vector<std::size_t> pivots_;
};

using SparseVector = std::map<std::size_t, Rational>;

/// Sparse echelon basis: each stored row has a distinct leading index and
/// incoming vectors are reduced at every leading index, so the span of the
/// rows with leading index >= k is exactly the part of the span vanishing
/// below k.
class SparseEchelon {
 public:
  std::size_t dim() const { return rows_.size(); }
  const std::map<std::size_t, SparseVector>& rows() const { return rows_; }

  SparseVector reduce(SparseVector v) const {
    auto it = v.begin();
    while (it != v.end()) {
      auto row = rows_.find(it->first);
      if (row == rows_.end()) {
        ++it;
        continue;
      }
      const std::size_t lead = it->first;
      const Rational f = it->second;  // rows are monic
      for (const auto& [j, x] : row->second) {
        Rational& y = v[j];
        y -= f * x;
        if (y == 0) v.erase(j);
      }
      it = v.upper_bound(lead);
    }
    return v;
  }

  /// Adds v; returns the reduced vector (empty when v was dependent).
  SparseVector insert(const SparseVector& v) {
    SparseVector r = reduce(v);
    if (r.empty()) return r;
    const Rational inv = 1 / r.begin()->second;
    for (auto& [j, x] : r) x *= inv;
    rows_.emplace(r.begin()->first, r);
    return r;
  }

 private:
  std::map<std::size_t, SparseVector> rows_;
};

/// Coordinates of forms with respect to a growing list of monomials.
class MonomialIndex {
 public:
  std::size_t size() const { return order_.size(); }
  const Monomial& monomial(std::size_t i) const { return order_[i]; }

  std::size_t intern(const Monomial& m) {
    auto [it, fresh] = index_.try_emplace(m, order_.size());
    if (fresh) order_.push_back(m);
    return it->second;
  }
  std::optional<std::size_t> find(const Monomial& m) const {
    auto it = index_.find(m);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  void intern_all(const GradedForm& f) {
    for (const Term& t : f.terms()) intern(t.mono);
  }
  /// Coordinates in the current index (all monomials must be interned).
  Vector coordinates(const GradedForm& f, std::size_t width) const {
    Vector v(width);
    for (const Term& t : f.terms()) v.at(index_.at(t.mono)) = t.coeff;
    return v;
  }
  SparseVector sparse(const GradedForm& f) const {
    SparseVector v;
    for (const Term& t : f.terms()) v.emplace(index_.at(t.mono), t.coeff);
    return v;
  }
  GradedForm form(const Vector& v) const {
    std::vector<Term> terms;
    for (std::size_t i = 0; i < v.size(); ++i)
      if (v[i] != 0) terms.push_back({order_[i], v[i]});
    std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.mono < b.mono; });
    return GradedForm::from_canonical(std::move(terms));
  }

 private:
  std::map<Monomial, std::size_t> index_;
  std::vector<Monomial> order_;
};

}  // namespace jetvar::linalg
