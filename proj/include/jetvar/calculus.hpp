#pragma once

// Differential operators of the variational bicomplex and the calculus of
// generalized (super)symmetries on a single global chart.

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "form.hpp"

namespace jetvar {

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

inline GradedForm coord(std::size_t lambda) { return GradedForm(Atom::coord(lambda)); }
inline GradedForm dx(std::size_t lambda) { return GradedForm(Atom::dx(lambda)); }
inline GradedForm jet(const Model& m, FieldId a, const MultiIndex& mi) { return GradedForm(Atom::jet(m, a, mi)); }
inline GradedForm jet(const Model& m, FieldId a) { return jet(m, a, MultiIndex(m.dim())); }
inline GradedForm theta(const Model& m, FieldId a, const MultiIndex& mi) { return GradedForm(Atom::theta(m, a, mi)); }
inline GradedForm theta(const Model& m, FieldId a) { return theta(m, a, MultiIndex(m.dim())); }

/// omega = dx^1 ^ ... ^ dx^n.
inline GradedForm volume(const Model& m) {
  GradedForm w(1);
  for (std::size_t l = 0; l < m.dim(); ++l) w = w * dx(l);
  return w;
}

// ---------------------------------------------------------------------------
// Total derivatives and differentials
// ---------------------------------------------------------------------------

/// d_lambda: acts on coefficients as the total derivative and shifts the
/// multi-index of contact forms, so that d_H = dx^lambda ^ d_lambda.
inline GradedForm total_derivative(const Model& m, std::size_t lambda, const GradedForm& f) {
  if (lambda >= m.dim()) throw std::invalid_argument("unknown base direction");
  return apply_derivation(f, 0, Parity::even, [lambda](Atom a) -> GradedForm {
    switch (a.kind()) {
      case AtomKind::coord: return a.index() == lambda ? GradedForm(1) : GradedForm();
      case AtomKind::jet:
      case AtomKind::contact: return GradedForm(a.shifted(lambda));
      case AtomKind::horizontal: return {};
    }
    return {};
  });
}

/// d_Lambda = product of d_lambda^(Lambda_lambda).
inline GradedForm total_derivative(const Model& m, const MultiIndex& mi, GradedForm f) {
  if (mi.dim() != m.dim()) throw std::invalid_argument("multi-index length differs from base dimension");
  for (std::size_t l = 0; l < mi.dim(); ++l)
    for (int k = 0; k < mi[l]; ++k) f = total_derivative(m, l, f);
  return f;
}

inline GradedForm d_horizontal(const Model& m, const GradedForm& f) {
  GradedForm r;
  for (std::size_t l = 0; l < m.dim(); ++l) r += dx(l) * total_derivative(m, l, f);
  return r;
}

inline GradedForm d_vertical(const GradedForm& f) {
  return apply_derivation(f, 1, Parity::even, [](Atom a) -> GradedForm {
    return a.kind() == AtomKind::jet ? GradedForm(a.as_contact()) : GradedForm();
  });
}

/// Exterior differential, defined on generators:
///   d x = dx, d s_L = theta_L + s_{l+L} dx^l, d theta_L = dx^l ^ theta_{l+L}.
inline GradedForm d_total(const Model& m, const GradedForm& f) {
  const std::size_t n = m.dim();
  return apply_derivation(f, 1, Parity::even, [n](Atom a) -> GradedForm {
    GradedForm r;
    switch (a.kind()) {
      case AtomKind::coord: return GradedForm(Atom::dx(a.index()));
      case AtomKind::jet:
        r = GradedForm(a.as_contact());
        for (std::size_t l = 0; l < n; ++l) r += GradedForm(a.shifted(l)) * GradedForm(Atom::dx(l));
        return r;
      case AtomKind::contact:
        for (std::size_t l = 0; l < n; ++l) r += GradedForm(Atom::dx(l)) * GradedForm(a.shifted(l));
        return r;
      case AtomKind::horizontal: return {};
    }
    return {};
  });
}

/// Left partial derivative with respect to a jet variable.
inline GradedForm partial(Atom var, const GradedForm& f) {
  if (var.kind() != AtomKind::jet && var.kind() != AtomKind::coord)
    throw std::invalid_argument("partial derivative needs a coordinate or jet variable");
  return apply_derivation(f, 0, var.parity(), [var](Atom a) { return a == var ? GradedForm(1) : GradedForm(); });
}

/// Contraction with the vector dual to a single generator: partial_lambda
/// (dual of dx^lambda) or partial^Lambda_a (dual of theta^a_Lambda).
inline GradedForm contract_dual(Atom generator, const GradedForm& f) {
  if (generator.form_degree() != 1) throw std::invalid_argument("dual generator must be dx or theta");
  return apply_derivation(f, 1, generator.parity(), [generator](Atom a) {
    return a == generator ? GradedForm(1) : GradedForm();
  });
}

/// omega_mu = partial_mu contracted into omega.
inline GradedForm volume_minor(const Model& m, std::size_t mu) { return contract_dual(Atom::dx(mu), volume(m)); }

// ---------------------------------------------------------------------------
// Derivations
// ---------------------------------------------------------------------------

/// A graded derivation of the ring of graded functions, stored by its
/// horizontal components and vertical characteristics. The components
/// upsilon^a_Lambda on jet variables are generated on demand:
///   upsilon^a_Lambda = d_Lambda theta^a + s^a_{mu+Lambda} upsilon^mu.
/// A raw derivation instead carries a hand-entered finite family of
/// components (missing ones are zero); it need not be contact preserving.
class Derivation {
 public:
  using ComponentKey = std::pair<FieldId, MultiIndex>;

  Derivation() = default;

  static Derivation generalized(const Model& m, std::vector<GradedForm> horizontal,
                                std::vector<GradedForm> characteristics) {
    Derivation v(m, std::move(horizontal));
    if (characteristics.empty()) characteristics.resize(m.num_fields());
    if (characteristics.size() != m.num_fields()) throw std::invalid_argument("one characteristic per field expected");
    v.chars_ = std::move(characteristics);
    v.settle_parity();
    return v;
  }
  static Derivation vertical(const Model& m, std::vector<GradedForm> characteristics) {
    return generalized(m, {}, std::move(characteristics));
  }
  static Derivation raw(const Model& m, std::vector<GradedForm> horizontal, std::map<ComponentKey, GradedForm> components) {
    Derivation v(m, std::move(horizontal));
    v.raw_ = true;
    v.chars_.resize(m.num_fields());
    for (auto& [key, value] : components) {
      if (key.first >= m.num_fields()) throw std::invalid_argument("unknown field in component family");
      if (key.second.dim() != m.dim()) throw std::invalid_argument("multi-index length differs from base dimension");
      v.raw_components_[Atom::theta(m, key.first, key.second).code()] = value;
    }
    v.settle_parity();
    return v;
  }

  std::size_t dim() const { return horizontal_.size(); }
  Parity parity() const { return parity_; }
  bool is_raw() const { return raw_; }
  const std::vector<GradedForm>& horizontal() const { return horizontal_; }
  const std::vector<GradedForm>& characteristics() const { return chars_; }
  const GradedForm& horizontal(std::size_t l) const { return horizontal_.at(l); }
  const GradedForm& characteristic(FieldId a) const { return chars_.at(a); }

  bool is_vertical() const {
    return std::all_of(horizontal_.begin(), horizontal_.end(), [](const GradedForm& f) { return f.is_zero(); });
  }
  /// Horizontal components depend on base coordinates only.
  bool is_projected() const {
    for (const GradedForm& h : horizontal_)
      for (const Term& t : h.terms())
        for (const Factor& f : t.mono)
          if (f.atom.kind() != AtomKind::coord) return false;
    return true;
  }

  /// Largest jet order among the defining components (-1 if none).
  int jet_order() const {
    int r = -1;
    for (const auto& h : horizontal_) r = std::max(r, h.jet_order());
    for (const auto& c : chars_) r = std::max(r, c.jet_order());
    for (const auto& [code, c] : raw_components_) r = std::max(r, c.jet_order());
    return r;
  }
  /// Largest multi-index order of a hand-entered component (-1 if none).
  int raw_order() const {
    int r = -1;
    for (const auto& [code, c] : raw_components_) r = std::max(r, atom_of(code).order());
    return r;
  }

  /// upsilon^a_Lambda, the coefficient of partial^Lambda_a.
  GradedForm component(FieldId a, const MultiIndex& mi) const {
    const Atom th = theta_atom(a, mi);
    if (raw_) {
      auto it = raw_components_.find(th.code());
      return it == raw_components_.end() ? GradedForm() : it->second;
    }
    GradedForm r = prolonged_characteristic(th);
    for (std::size_t mu = 0; mu < dim(); ++mu)
      if (!horizontal_[mu].is_zero()) r += GradedForm(th.as_jet().shifted(mu)) * horizontal_[mu];
    return r;
  }

  /// Value of the contraction on a generator.
  GradedForm contract_generator(Atom g) const {
    if (g.kind() == AtomKind::horizontal) return horizontal_.at(g.index());
    if (g.kind() != AtomKind::contact) return {};
    if (!raw_) return prolonged_characteristic(g);
    GradedForm r = component(g.index(), g.multi_index(dim()));
    for (std::size_t mu = 0; mu < dim(); ++mu)
      if (!horizontal_[mu].is_zero()) r -= GradedForm(g.as_jet().shifted(mu)) * horizontal_[mu];
    return r;
  }

  Derivation vertical_part() const {
    if (raw_) throw std::logic_error("horizontal splitting needs a generalized symmetry");
    Derivation v = *this;
    for (auto& h : v.horizontal_) h = GradedForm();
    v.memo_ = std::make_shared<Memo>();
    return v;
  }
  Derivation horizontal_part() const {
    if (raw_) throw std::logic_error("horizontal splitting needs a generalized symmetry");
    Derivation v = *this;
    for (auto& c : v.chars_) c = GradedForm();
    v.memo_ = std::make_shared<Memo>();
    return v;
  }

 private:
  struct Memo {
    std::mutex mutex;
    std::map<std::uint64_t, GradedForm> table;
  };

  Derivation(const Model& m, std::vector<GradedForm> horizontal) : horizontal_(std::move(horizontal)) {
    if (horizontal_.empty()) horizontal_.resize(m.dim());
    if (horizontal_.size() != m.dim()) throw std::invalid_argument("one horizontal component per base direction expected");
    for (const auto& f : m.fields()) field_parity_.push_back(f.parity);
    memo_ = std::make_shared<Memo>();
  }

  static Atom atom_of(std::uint64_t code) { return Atom::from_code(code); }

  Atom theta_atom(FieldId a, const MultiIndex& mi) const {
    if (a >= field_parity_.size()) throw std::invalid_argument("unknown field");
    if (mi.dim() != dim()) throw std::invalid_argument("multi-index length differs from base dimension");
    return Atom::theta(a, field_parity_[a], mi);
  }

  /// d_Lambda theta^a, memoized per (field, multi-index).
  GradedForm prolonged_characteristic(Atom th) const {
    {
      std::lock_guard<std::mutex> lock(memo_->mutex);
      auto it = memo_->table.find(th.code());
      if (it != memo_->table.end()) return it->second;
    }
    GradedForm r;
    std::size_t dir = dim();
    for (std::size_t l = 0; l < dim(); ++l)
      if (th.exponent(l) > 0) dir = l;
    if (dir == dim()) {
      r = chars_.at(th.index());
    } else {
      MultiIndex lower = th.multi_index(dim()) - MultiIndex::unit(dim(), dir);
      GradedForm below = prolonged_characteristic(Atom::theta(th.index(), th.parity(), lower));
      r = apply_derivation(below, 0, Parity::even, [dir](Atom a) -> GradedForm {
        switch (a.kind()) {
          case AtomKind::coord: return a.index() == dir ? GradedForm(1) : GradedForm();
          case AtomKind::jet:
          case AtomKind::contact: return GradedForm(a.shifted(dir));
          case AtomKind::horizontal: return {};
        }
        return {};
      });
    }
    std::lock_guard<std::mutex> lock(memo_->mutex);
    memo_->table.emplace(th.code(), r);
    return r;
  }

  void settle_parity() {
    std::optional<Parity> p;
    auto see = [&](const GradedForm& f, Parity shift) {
      if (!f.is_scalar()) throw std::invalid_argument("derivation components must be graded functions");
      if (f.is_zero()) return;
      auto fp = f.parity();
      if (!fp) throw std::invalid_argument("parity-inhomogeneous derivation component");
      Parity q = *fp + shift;
      if (p && *p != q) throw std::invalid_argument("parity-inhomogeneous derivation");
      p = q;
    };
    for (const auto& h : horizontal_) see(h, Parity::even);
    for (std::size_t a = 0; a < chars_.size(); ++a) see(chars_[a], field_parity_[a]);
    for (const auto& [code, c] : raw_components_) see(c, atom_of(code).parity());
    parity_ = p.value_or(Parity::even);
  }

  std::vector<GradedForm> horizontal_;
  std::vector<GradedForm> chars_;
  std::vector<Parity> field_parity_;
  std::map<std::uint64_t, GradedForm> raw_components_;
  bool raw_ = false;
  Parity parity_ = Parity::even;
  std::shared_ptr<Memo> memo_ = std::make_shared<Memo>();
};

/// Graded interior product v _| a; lowers form degree by one and shifts
/// parity by [v].
inline GradedForm contract(const Derivation& v, const GradedForm& a) {
  return apply_derivation(a, 1, v.parity(), [&v](Atom g) { return v.contract_generator(g); });
}

/// Lie derivative along the prolongation, by Cartan's formula
/// L_v = v _| d + d (v _| .).
inline GradedForm lie(const Model& m, const Derivation& v, const GradedForm& a) {
  return contract(v, d_total(m, a)) + d_total(m, contract(v, a));
}

struct ContactCheck {
  bool preserving = true;
  /// Offending contact generators with the horizontal part of their Lie derivative.
  std::vector<std::pair<Atom, GradedForm>> witnesses;
};

/// Checks h_0(L_v theta^a_Lambda) = 0 for every field and every multi-index
/// up to one past the highest order the derivation's data reaches.
inline ContactCheck is_contact_preserving(const Model& m, const Derivation& v) {
  ContactCheck out;
  const int order = std::max({v.jet_order(), v.raw_order(), 0}) + 1;
  for (FieldId a = 0; a < m.num_fields(); ++a)
    for (const MultiIndex& mi : MultiIndex::up_to_order(m.dim(), order)) {
      GradedForm defect = h0(lie(m, v, theta(m, a, mi)));
      if (!defect.is_zero()) {
        out.preserving = false;
        out.witnesses.emplace_back(Atom::theta(m, a, mi), defect);
      }
    }
  return out;
}

// ---------------------------------------------------------------------------
// Interior Euler operator and variational operator
// ---------------------------------------------------------------------------

inline std::set<Atom> atoms_of_kind(const GradedForm& f, AtomKind kind) {
  std::set<Atom> s;
  for (const Term& t : f.terms())
    for (const Factor& fa : t.mono)
      if (fa.atom.kind() == kind) s.insert(fa.atom);
  return s;
}

/// rho = sum_{k>0} (1/k) rho_bar h_k h^n, with
/// rho_bar(phi) = sum_Lambda (-1)^|Lambda| theta^a ^ d_Lambda(partial^Lambda_a _| phi).
inline GradedForm interior_euler(const Model& m, const GradedForm& a) {
  const auto n = static_cast<unsigned>(m.dim());
  GradedForm top = h_horizontal(a, n);
  GradedForm out;
  for (auto& [deg, piece] : bidegree_split(top)) {
    const unsigned k = deg.first;
    if (k == 0) continue;
    GradedForm acc;
    for (Atom th : atoms_of_kind(piece, AtomKind::contact)) {
      const MultiIndex mi = th.multi_index(m.dim());
      GradedForm inner = total_derivative(m, mi, contract_dual(th, piece));
      GradedForm base = theta(m, th.index());
      GradedForm term = base * inner;
      acc += (mi.order() % 2 == 0) ? term : -term;
    }
    out += Rational(1, k) * acc;
  }
  return out;
}

/// delta = rho o d on n-horizontal forms.
inline GradedForm variational(const Model& m, const GradedForm& a) {
  return interior_euler(m, d_total(m, h_horizontal(a, static_cast<unsigned>(m.dim()))));
}

}  // namespace jetvar
