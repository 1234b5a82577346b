#pragma once

// Canonical-normal-form arithmetic for the bigraded, Grassmann-graded
// algebra of polynomial forms of finite jet order.
//
// Every element is a finite sum of terms (rational coefficient times a
// canonical monomial). A monomial is an ordered product of atoms:
//   coordinate x^l          form degree 0, even
//   jet variable s^a_L      form degree 0, parity of field a
//   horizontal dx^l         form degree 1, even
//   contact theta^a_L       form degree 1, parity of field a
// Swapping neighbours u, w costs (-1)^(|u||w| + [u][w]). An atom with
// (-1)^(|u||u| + [u][u]) = -1 squares to zero; the others (coordinates,
// even jets, contact forms of odd fields) may carry exponents > 1.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "model.hpp"
#include "multi_index.hpp"

namespace jetvar {

using Rational = mpq_class;

enum class AtomKind : std::uint8_t { coord = 0, jet = 1, horizontal = 2, contact = 3 };

/// Packed generator. The integer order of the code is the canonical order:
/// kind, then field (or coordinate) index, then multi-index lexicographic.
class Atom {
  static constexpr int kind_shift = 62;
  static constexpr int index_shift = 48;
  static constexpr int mi_shift = 6;
  static constexpr int mi_bits = 7;
  static constexpr std::uint64_t mi_mask = (1u << mi_bits) - 1;
  static constexpr int slots = 6;

 public:
  static constexpr int max_exponent = static_cast<int>(mi_mask);

  constexpr Atom() = default;

  static Atom coord(std::size_t lambda) { return Atom(AtomKind::coord, lambda, Parity::even, nullptr); }
  static Atom dx(std::size_t lambda) { return Atom(AtomKind::horizontal, lambda, Parity::even, nullptr); }
  static Atom jet(FieldId a, Parity p, const MultiIndex& mi) { return Atom(AtomKind::jet, a, p, &mi); }
  static Atom theta(FieldId a, Parity p, const MultiIndex& mi) { return Atom(AtomKind::contact, a, p, &mi); }
  static Atom jet(const Model& m, FieldId a, const MultiIndex& mi) {
    check_dim(m, mi);
    return jet(a, m.field(a).parity, mi);
  }
  static Atom theta(const Model& m, FieldId a, const MultiIndex& mi) {
    check_dim(m, mi);
    return theta(a, m.field(a).parity, mi);
  }

  AtomKind kind() const { return static_cast<AtomKind>(code_ >> kind_shift); }
  /// Field id for jets and contact forms, coordinate index otherwise.
  std::size_t index() const { return (code_ >> index_shift) & ((1u << 14) - 1); }
  Parity parity() const { return static_cast<Parity>(code_ & 1u); }
  unsigned form_degree() const { return kind() == AtomKind::horizontal || kind() == AtomKind::contact ? 1u : 0u; }
  bool is_field_atom() const { return kind() == AtomKind::jet || kind() == AtomKind::contact; }

  int exponent(std::size_t direction) const {
    return static_cast<int>((code_ >> (mi_shift + mi_bits * (slots - 1 - direction))) & mi_mask);
  }
  MultiIndex multi_index(std::size_t dim) const {
    std::vector<int> e(dim);
    for (std::size_t i = 0; i < dim; ++i) e[i] = exponent(i);
    return MultiIndex(std::move(e));
  }
  int order() const {
    int s = 0;
    for (int i = 0; i < slots; ++i) s += exponent(i);
    return s;
  }

  /// Same field, multi-index raised by one along `direction`.
  Atom shifted(std::size_t direction) const {
    if (exponent(direction) >= max_exponent) throw std::overflow_error("jet order overflow");
    Atom r = *this;
    r.code_ += std::uint64_t{1} << (mi_shift + mi_bits * (slots - 1 - direction));
    return r;
  }
  Atom as_contact() const {
    Atom r = *this;
    r.code_ = (r.code_ & ~(std::uint64_t{3} << kind_shift)) | (std::uint64_t{3} << kind_shift);
    return r;
  }
  Atom as_jet() const {
    Atom r = *this;
    r.code_ = (r.code_ & ~(std::uint64_t{3} << kind_shift)) | (std::uint64_t{1} << kind_shift);
    return r;
  }

  /// (-1)^(|u||u| + [u][u]) = -1: the atom squares to zero.
  bool nilpotent() const { return ((form_degree() + bit(parity())) & 1u) != 0; }
  /// Whether moving this atom past `o` flips the sign.
  bool swap_flips(Atom o) const { return ((form_degree() & o.form_degree()) ^ (bit(parity()) & bit(o.parity()))) != 0; }

  std::uint64_t code() const { return code_; }
  static Atom from_code(std::uint64_t code) {
    Atom a;
    a.code_ = code;
    return a;
  }
  auto operator<=>(const Atom&) const = default;

 private:
  Atom(AtomKind k, std::size_t index, Parity p, const MultiIndex* mi) {
    if (index >= (1u << 14)) throw std::invalid_argument("atom index out of range");
    code_ = (std::uint64_t(k) << kind_shift) | (std::uint64_t(index) << index_shift) | bit(p);
    if (mi) {
      if (mi->dim() > slots) throw std::invalid_argument("multi-index dimension exceeds 6");
      for (std::size_t i = 0; i < mi->dim(); ++i) {
        if ((*mi)[i] > max_exponent) throw std::overflow_error("jet order overflow");
        code_ |= std::uint64_t((*mi)[i]) << (mi_shift + mi_bits * (slots - 1 - i));
      }
    }
  }
  static void check_dim(const Model& m, const MultiIndex& mi) {
    if (mi.dim() != m.dim()) throw std::invalid_argument("multi-index length differs from base dimension");
  }

  std::uint64_t code_ = 0;
};

struct Factor {
  Atom atom;
  std::uint32_t exp = 1;
  auto operator<=>(const Factor&) const = default;
};

/// Canonically ordered product of atoms (strictly increasing atoms).
using Monomial = std::vector<Factor>;

namespace detail {

/// Product of canonical monomials. Returns nullopt when the product vanishes,
/// otherwise whether the sign flips.
inline std::optional<bool> multiply(const Monomial& a, const Monomial& b, Monomial& out) {
  out.clear();
  bool flip = false;
  // Each atom of b travels leftwards past every strictly larger atom of a.
  for (const Factor& y : b) {
    if (y.atom.form_degree() == 0 && y.atom.parity() == Parity::even) continue;
    for (auto it = a.rbegin(); it != a.rend() && it->atom > y.atom; ++it)
      if (y.atom.swap_flips(it->atom) && (it->exp & y.exp & 1u)) flip = !flip;
  }
  out.reserve(a.size() + b.size());
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() || j != b.end()) {
    if (j == b.end() || (i != a.end() && i->atom < j->atom)) {
      out.push_back(*i++);
    } else if (i == a.end() || j->atom < i->atom) {
      out.push_back(*j++);
    } else {
      if (i->atom.nilpotent()) return std::nullopt;
      out.push_back({i->atom, i->exp + j->exp});
      ++i;
      ++j;
    }
  }
  return flip;
}

inline unsigned monomial_form_degree(const Monomial& m) {
  unsigned d = 0;
  for (const Factor& f : m) d += f.atom.form_degree() * f.exp;
  return d;
}
inline Parity monomial_parity(const Monomial& m) {
  unsigned p = 0;
  for (const Factor& f : m) p ^= bit(f.atom.parity()) & f.exp;
  return static_cast<Parity>(p & 1u);
}

}  // namespace detail

struct Term {
  Monomial mono;
  Rational coeff;
};

/// Element of the graded algebra in canonical normal form. Immutable in
/// practice: every operation returns a fresh normalized value.
class GradedForm {
 public:
  GradedForm() = default;
  GradedForm(int c) : GradedForm(Rational(c)) {}  // NOLINT(google-explicit-constructor)
  GradedForm(const Rational& c) {                 // NOLINT(google-explicit-constructor)
    if (c != 0) terms_.push_back({{}, c});
    if (!terms_.empty()) terms_.back().coeff.canonicalize();
  }
  explicit GradedForm(Atom a, std::uint32_t exp = 1) {
    if (exp == 0) {
      terms_.push_back({{}, 1});
    } else if (!(exp > 1 && a.nilpotent())) {
      terms_.push_back({{{a, exp}}, 1});
    }
  }

  /// Builds from terms whose monomials are already canonical; equal
  /// monomials are merged and zero coefficients dropped.
  static GradedForm from_canonical(std::vector<Term> terms) {
    GradedForm f;
    f.terms_ = std::move(terms);
    f.combine();
    return f;
  }

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  GradedForm operator-() const {
    GradedForm r = *this;
    for (Term& t : r.terms_) t.coeff = -t.coeff;
    return r;
  }
  GradedForm& operator+=(const GradedForm& o) {
    *this = *this + o;
    return *this;
  }
  GradedForm& operator-=(const GradedForm& o) {
    *this = *this - o;
    return *this;
  }
  friend GradedForm operator+(const GradedForm& a, const GradedForm& b) {
    std::vector<Term> out;
    out.reserve(a.terms_.size() + b.terms_.size());
    auto i = a.terms_.begin();
    auto j = b.terms_.begin();
    while (i != a.terms_.end() || j != b.terms_.end()) {
      if (j == b.terms_.end() || (i != a.terms_.end() && i->mono < j->mono)) {
        out.push_back(*i++);
      } else if (i == a.terms_.end() || j->mono < i->mono) {
        out.push_back(*j++);
      } else {
        Rational c = i->coeff + j->coeff;
        if (c != 0) out.push_back({i->mono, c});
        ++i;
        ++j;
      }
    }
    GradedForm r;
    r.terms_ = std::move(out);
    return r;
  }
  friend GradedForm operator-(const GradedForm& a, const GradedForm& b) { return a + (-b); }

  /// Graded wedge product.
  friend GradedForm operator*(const GradedForm& a, const GradedForm& b) {
    std::vector<Term> out;
    out.reserve(a.terms_.size() * b.terms_.size());
    Monomial m;
    for (const Term& s : a.terms_)
      for (const Term& t : b.terms_) {
        auto flip = detail::multiply(s.mono, t.mono, m);
        if (!flip) continue;
        Rational c = s.coeff * t.coeff;
        if (*flip) c = -c;
        out.push_back({m, std::move(c)});
      }
    return from_canonical(std::move(out));
  }
  friend GradedForm operator*(const Rational& c, const GradedForm& f) {
    if (c == 0) return {};
    Rational k = c;
    k.canonicalize();
    GradedForm r = f;
    for (Term& t : r.terms_) t.coeff *= k;
    return r;
  }
  friend GradedForm operator*(int c, const GradedForm& f) { return Rational(c) * f; }
  GradedForm& operator*=(const GradedForm& o) {
    *this = *this * o;
    return *this;
  }

  friend bool operator==(const GradedForm& a, const GradedForm& b) {
    if (a.terms_.size() != b.terms_.size()) return false;
    for (std::size_t i = 0; i < a.terms_.size(); ++i)
      if (a.terms_[i].mono != b.terms_[i].mono || a.terms_[i].coeff != b.terms_[i].coeff) return false;
    return true;
  }

  /// Form degree and parity when every term agrees; nullopt otherwise (and
  /// for zero, which is homogeneous of every degree).
  std::optional<unsigned> form_degree() const {
    if (terms_.empty()) return std::nullopt;
    unsigned d = detail::monomial_form_degree(terms_.front().mono);
    for (const Term& t : terms_)
      if (detail::monomial_form_degree(t.mono) != d) return std::nullopt;
    return d;
  }
  std::optional<Parity> parity() const {
    if (terms_.empty()) return std::nullopt;
    Parity p = detail::monomial_parity(terms_.front().mono);
    for (const Term& t : terms_)
      if (detail::monomial_parity(t.mono) != p) return std::nullopt;
    return p;
  }
  bool is_scalar() const {
    return std::all_of(terms_.begin(), terms_.end(),
                       [](const Term& t) { return detail::monomial_form_degree(t.mono) == 0; });
  }
  /// Largest multi-index order among jet variables and contact forms; -1 when
  /// no field atom occurs.
  int jet_order() const {
    int r = -1;
    for (const Term& t : terms_)
      for (const Factor& f : t.mono)
        if (f.atom.is_field_atom()) r = std::max(r, f.atom.order());
    return r;
  }
  /// Coefficient of the monomial `m` (zero when absent).
  Rational coefficient(const Monomial& m) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                               [](const Term& t, const Monomial& k) { return t.mono < k; });
    return it != terms_.end() && it->mono == m ? it->coeff : Rational(0);
  }

  /// Keeps the terms satisfying `pred`.
  template <class Pred>
  GradedForm filter(Pred pred) const {
    GradedForm r;
    for (const Term& t : terms_)
      if (pred(t)) r.terms_.push_back(t);
    return r;
  }

 private:
  void combine() {
    std::sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) { return a.mono < b.mono; });
    std::vector<Term> out;
    out.reserve(terms_.size());
    for (Term& t : terms_) {
      if (!out.empty() && out.back().mono == t.mono) {
        out.back().coeff += t.coeff;
      } else {
        if (!out.empty() && out.back().coeff == 0) out.pop_back();
        out.push_back(std::move(t));
      }
    }
    if (!out.empty() && out.back().coeff == 0) out.pop_back();
    terms_ = std::move(out);
  }

  std::vector<Term> terms_;
};

// ---------------------------------------------------------------------------
// Bigrading
// ---------------------------------------------------------------------------

inline unsigned contact_degree(const Monomial& m) {
  unsigned k = 0;
  for (const Factor& f : m)
    if (f.atom.kind() == AtomKind::contact) k += f.exp;
  return k;
}
inline unsigned horizontal_degree(const Monomial& m) {
  unsigned k = 0;
  for (const Factor& f : m)
    if (f.atom.kind() == AtomKind::horizontal) k += f.exp;
  return k;
}

/// h_k: the k-contact part.
inline GradedForm h_contact(const GradedForm& a, unsigned k) {
  return a.filter([k](const Term& t) { return contact_degree(t.mono) == k; });
}
/// h^m: the m-horizontal part.
inline GradedForm h_horizontal(const GradedForm& a, unsigned m) {
  return a.filter([m](const Term& t) { return horizontal_degree(t.mono) == m; });
}
inline GradedForm h0(const GradedForm& a) { return h_contact(a, 0); }

inline std::map<std::pair<unsigned, unsigned>, GradedForm> bidegree_split(const GradedForm& a) {
  std::map<std::pair<unsigned, unsigned>, std::vector<Term>> parts;
  for (const Term& t : a.terms()) parts[{contact_degree(t.mono), horizontal_degree(t.mono)}].push_back(t);
  std::map<std::pair<unsigned, unsigned>, GradedForm> out;
  for (auto& [key, terms] : parts) out.emplace(key, GradedForm::from_canonical(std::move(terms)));
  return out;
}

/// Normal form of an arbitrary word list: each raw term is a coefficient and
/// a sequence of atoms in any order, multiplied out left to right.
struct RawTerm {
  Rational coeff;
  std::vector<Atom> word;
};
inline GradedForm normalize(const std::vector<RawTerm>& raw) {
  std::vector<Term> out;
  Monomial acc, next;
  for (const RawTerm& r : raw) {
    if (r.coeff == 0) continue;
    acc.clear();
    bool flip = false;
    bool zero = false;
    for (Atom a : r.word) {
      auto f = detail::multiply(acc, Monomial{{a, 1}}, next);
      if (!f) {
        zero = true;
        break;
      }
      flip ^= *f;
      std::swap(acc, next);
    }
    if (zero) continue;
    out.push_back({acc, flip ? Rational(-r.coeff) : r.coeff});
  }
  return GradedForm::from_canonical(std::move(out));
}
/// Idempotent: re-normalizing a canonical form returns it unchanged.
inline GradedForm normalize(const GradedForm& a) {
  std::vector<RawTerm> raw;
  for (const Term& t : a.terms()) {
    RawTerm r{t.coeff, {}};
    for (const Factor& f : t.mono)
      for (std::uint32_t e = 0; e < f.exp; ++e) r.word.push_back(f.atom);
    raw.push_back(std::move(r));
  }
  return normalize(raw);
}

// ---------------------------------------------------------------------------
// Graded derivations acting atom by atom
// ---------------------------------------------------------------------------

/// Applies the graded derivation D with the given degree (mod 2) and
/// Grassmann parity, specified on atoms by `on_atom`, to `a` through the
/// graded Leibniz rule
///   D(u w) = D(u) w + (-1)^(|D||u| + [D][u]) u D(w).
/// Covers d, d_H, d_V (degree 1, even), contractions (degree -1, parity of
/// the vector), total and partial derivatives and Lie derivatives (degree 0).
template <class OnAtom>
GradedForm apply_derivation(const GradedForm& a, unsigned degree, Parity parity, OnAtom&& on_atom) {
  const unsigned dpar = degree & 1u;
  const unsigned gpar = bit(parity);
  std::vector<Term> out;
  std::map<Atom, GradedForm> cache;
  Monomial prefix, suffix, tmp, tmp2;
  for (const Term& t : a.terms()) {
    const Monomial& m = t.mono;
    unsigned sign = 0;
    for (std::size_t i = 0; i < m.size(); ++i) {
      const Atom at = m[i].atom;
      auto it = cache.find(at);
      if (it == cache.end()) it = cache.emplace(at, on_atom(at)).first;
      const GradedForm& img = it->second;
      const unsigned step = (dpar & at.form_degree()) ^ (gpar & bit(at.parity()));
      for (std::uint32_t copy = 0; copy < m[i].exp; ++copy) {
        if (!img.is_zero()) {
          prefix.assign(m.begin(), m.begin() + static_cast<std::ptrdiff_t>(i));
          if (copy > 0) prefix.push_back({at, copy});
          suffix.clear();
          if (m[i].exp - 1 - copy > 0) suffix.push_back({at, m[i].exp - 1 - copy});
          suffix.insert(suffix.end(), m.begin() + static_cast<std::ptrdiff_t>(i) + 1, m.end());
          for (const Term& s : img.terms()) {
            auto f1 = detail::multiply(prefix, s.mono, tmp);
            if (!f1) continue;
            auto f2 = detail::multiply(tmp, suffix, tmp2);
            if (!f2) continue;
            Rational c = t.coeff * s.coeff;
            if ((sign & 1u) ^ unsigned(*f1) ^ unsigned(*f2)) c = -c;
            out.push_back({tmp2, std::move(c)});
          }
        }
        sign ^= step;
      }
    }
  }
  return GradedForm::from_canonical(std::move(out));
}

}  // namespace jetvar
