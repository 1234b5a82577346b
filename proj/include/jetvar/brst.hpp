#pragma once

// Nilpotent odd symmetries: the BRST generator of a Lie algebra, the
// nilpotency test, the operator s_v and truncated relative cohomology of
// s_v modulo d_H on horizontal forms.

#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "calculus.hpp"
#include "linalg.hpp"
#include "refusal.hpp"

namespace jetvar {

class LieStructure {
 public:
  /// constants[(r * dim + p) * dim + q] = c^r_pq.
  LieStructure(std::size_t dim, std::vector<Rational> constants) : dim_(dim), c_(std::move(constants)) {
    if (c_.size() != dim * dim * dim) throw std::invalid_argument("structure constants: expected dim^3 entries");
    for (Rational& x : c_) x.canonicalize();
    for (std::size_t r = 0; r < dim; ++r)
      for (std::size_t p = 0; p < dim; ++p)
        for (std::size_t q = 0; q < dim; ++q)
          if (c(r, p, q) != -c(r, q, p))
            throw std::invalid_argument("structure constants are not antisymmetric in the lower indices");
    jacobi_verified_ = jacobi_violations().empty();
  }

  static LieStructure abelian(std::size_t dim) { return {dim, std::vector<Rational>(dim * dim * dim)}; }
  static LieStructure su2() {
    std::vector<Rational> c(27);
    auto set = [&](int r, int p, int q, int v) { c[static_cast<std::size_t>((r * 3 + p) * 3 + q)] = v; };
    for (int r = 0; r < 3; ++r) {
      const int p = (r + 1) % 3, q = (r + 2) % 3;
      set(r, p, q, 1);
      set(r, q, p, -1);
    }
    return {3, std::move(c)};
  }

  std::size_t dim() const { return dim_; }
  const Rational& c(std::size_t r, std::size_t p, std::size_t q) const { return c_[(r * dim_ + p) * dim_ + q]; }
  const std::vector<Rational>& constants() const { return c_; }
  bool jacobi_verified() const { return jacobi_verified_; }

  struct JacobiViolation {
    std::size_t r, p, q, t;
    Rational value;
  };
  /// sum_s c^r_ps c^s_qt + c^r_qs c^s_tp + c^r_ts c^s_pq for p < q < t.
  std::vector<JacobiViolation> jacobi_violations() const {
    std::vector<JacobiViolation> out;
    for (std::size_t r = 0; r < dim_; ++r)
      for (std::size_t p = 0; p < dim_; ++p)
        for (std::size_t q = p + 1; q < dim_; ++q)
          for (std::size_t t = q + 1; t < dim_; ++t) {
            Rational v;
            for (std::size_t s = 0; s < dim_; ++s) v += c(r, p, s) * c(s, q, t) + c(r, q, s) * c(s, t, p) + c(r, t, s) * c(s, p, q);
            if (v != 0) out.push_back({r, p, q, t, v});
          }
    return out;
  }

 private:
  std::size_t dim_;
  std::vector<Rational> c_;
  bool jacobi_verified_ = false;
};

/// Integer charge per field; charges add over products.
class ChargeGrading {
 public:
  explicit ChargeGrading(const Model& m) {
    for (const FieldSpec& f : m.fields()) charges_.push_back(f.charge);
  }
  explicit ChargeGrading(std::vector<int> charges) : charges_(std::move(charges)) {}

  int field(FieldId a) const { return charges_.at(a); }
  int of(const Monomial& mono) const {
    int q = 0;
    for (const Factor& f : mono)
      if (f.atom.is_field_atom()) q += charges_.at(f.atom.index()) * static_cast<int>(f.exp);
    return q;
  }
  /// Charge of a homogeneous form; nullopt for zero or mixed charge.
  std::optional<int> of(const GradedForm& f) const {
    std::optional<int> q;
    for (const Term& t : f.terms()) {
      const int c = of(t.mono);
      if (q && *q != c) return std::nullopt;
      q = c;
    }
    return q;
  }

 private:
  std::vector<int> charges_;
};

struct CochainTruncation {
  int max_jet = 1;
  int max_degree = 2;  // polynomial degree in jet variables
  int max_base = 0;    // polynomial degree in base coordinates
  int charge = 0;
  unsigned form_degree = 0;
};

/// Monomials x^B s_{Lambda_1} ... s_{Lambda_d} dx^{mu_1} ... dx^{mu_m} within
/// the bounds and of the requested charge, in canonical order.
inline std::vector<Monomial> truncation_basis(const Model& m, const ChargeGrading& grading, const CochainTruncation& t) {
  if (t.max_jet < 0 || t.max_degree < 0 || t.max_base < 0) throw std::invalid_argument("truncation bounds must be non-negative");
  if (t.form_degree > m.dim()) return {};
  std::vector<Atom> jets;
  for (FieldId a = 0; a < m.num_fields(); ++a)
    for (const MultiIndex& mi : MultiIndex::up_to_order(m.dim(), t.max_jet)) jets.push_back(Atom::jet(m, a, mi));
  std::sort(jets.begin(), jets.end());

  std::vector<Monomial> jet_monos;
  Monomial cur;
  auto grow = [&](auto&& self, std::size_t from, int budget) -> void {
    jet_monos.push_back(cur);
    if (budget == 0) return;
    for (std::size_t i = from; i < jets.size(); ++i) {
      const std::uint32_t cap = jets[i].nilpotent() ? 1u : static_cast<std::uint32_t>(budget);
      for (std::uint32_t e = 1; e <= cap; ++e) {
        cur.push_back({jets[i], e});
        self(self, i + 1, budget - static_cast<int>(e));
        cur.pop_back();
      }
    }
  };
  grow(grow, 0, t.max_degree);

  std::vector<Monomial> base_monos;
  auto grow_base = [&](auto&& self, std::size_t from, int budget) -> void {
    base_monos.push_back(cur);
    if (budget == 0) return;
    for (std::size_t l = from; l < m.dim(); ++l)
      for (int e = 1; e <= budget; ++e) {
        cur.push_back({Atom::coord(l), static_cast<std::uint32_t>(e)});
        self(self, l + 1, budget - e);
        cur.pop_back();
      }
  };
  cur.clear();
  grow_base(grow_base, 0, t.max_base);

  std::vector<Monomial> dx_monos;
  auto grow_dx = [&](auto&& self, std::size_t from) -> void {
    if (cur.size() == t.form_degree) {
      dx_monos.push_back(cur);
      return;
    }
    for (std::size_t l = from; l < m.dim(); ++l) {
      cur.push_back({Atom::dx(l), 1});
      self(self, l + 1);
      cur.pop_back();
    }
  };
  cur.clear();
  grow_dx(grow_dx, 0);

  std::vector<Monomial> out;
  for (const Monomial& j : jet_monos) {
    if (grading.of(j) != t.charge) continue;
    for (const Monomial& b : base_monos)
      for (const Monomial& d : dx_monos) {
        Monomial mono = b;
        mono.insert(mono.end(), j.begin(), j.end());
        mono.insert(mono.end(), d.begin(), d.end());
        out.push_back(std::move(mono));
      }
  }
  std::sort(out.begin(), out.end());
  return out;
}

struct BrstSystem {
  Model model;
  LieStructure algebra;
  std::vector<std::vector<FieldId>> gauge;  // gauge[r][lambda] = a^r_lambda
  std::vector<FieldId> ghosts;              // C^r
  Derivation generator;
};

/// Fields a^r_lambda (even, charge 0) and ghosts C^r (odd, charge 1) with
/// v^r_lambda = C^r_lambda + c^r_pq a^p_lambda C^q and v^r = -1/2 c^r_pq C^p C^q.
/// With derivations acting from the left the ghost sign must be negative
/// for v to be nilpotent; +1/2 corresponds to right action.
inline BrstSystem brst_generator(const LieStructure& g, std::vector<std::string> coords) {
  if (g.dim() == 0) throw std::invalid_argument("BRST generator of the zero algebra");
  BrstSystem sys{Model(coords), g, {}, {}, {}};
  Model& m = sys.model;
  const std::size_t n = m.dim();
  sys.gauge.resize(g.dim());
  for (std::size_t r = 0; r < g.dim(); ++r)
    for (std::size_t l = 0; l < n; ++l)
      sys.gauge[r].push_back(m.add_field("A" + std::to_string(r + 1) + "_" + m.coords()[l], Parity::even, 0));
  for (std::size_t r = 0; r < g.dim(); ++r) sys.ghosts.push_back(m.add_field("C" + std::to_string(r + 1), Parity::odd, 1));

  std::vector<GradedForm> chars(m.num_fields());
  for (std::size_t r = 0; r < g.dim(); ++r) {
    for (std::size_t l = 0; l < n; ++l) {
      GradedForm u = jet(m, sys.ghosts[r], MultiIndex::unit(n, l));
      for (std::size_t p = 0; p < g.dim(); ++p)
        for (std::size_t q = 0; q < g.dim(); ++q)
          if (g.c(r, p, q) != 0) u += g.c(r, p, q) * jet(m, sys.gauge[p][l]) * jet(m, sys.ghosts[q]);
      chars[sys.gauge[r][l]] = u;
    }
    GradedForm u;
    for (std::size_t p = 0; p < g.dim(); ++p)
      for (std::size_t q = 0; q < g.dim(); ++q)
        if (g.c(r, p, q) != 0) u += Rational(-1, 2) * g.c(r, p, q) * jet(m, sys.ghosts[p]) * jet(m, sys.ghosts[q]);
    chars[sys.ghosts[r]] = u;
  }
  sys.generator = Derivation::vertical(m, std::move(chars));
  return sys;
}

/// Seed of the randomized falsification probe in nilpotency_check.
inline constexpr unsigned nilpotency_probe_seed = 20240601u;

struct NilpotencyReport {
  bool nilpotent = false;
  std::string criterion;  // "parity", "sufficient condition", "probe"
  std::vector<GradedForm> lie_of_characteristics;  // L_v(v^a) per field
  GradedForm witness;
  std::string witness_label;
  int probes = 0;
};

namespace detail {

inline std::vector<GradedForm> horizontal_probe_forms(const Model& m, int count, int max_jet) {
  std::mt19937 rng(nilpotency_probe_seed);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  std::vector<GradedForm> out;
  while (static_cast<int>(out.size()) < count) {
    GradedForm f;
    for (int t = pick(1, 3); t > 0; --t) {
      GradedForm w(Rational(pick(1, 5)));
      for (int e = pick(1, 3); e > 0 && m.num_fields() > 0; --e) {
        const auto a = static_cast<FieldId>(pick(0, static_cast<int>(m.num_fields()) - 1));
        const auto all = MultiIndex::up_to_order(m.dim(), max_jet);
        w = w * jet(m, a, all[static_cast<std::size_t>(pick(0, static_cast<int>(all.size()) - 1))]);
      }
      if (pick(0, 1)) w = w * coord(static_cast<std::size_t>(pick(0, static_cast<int>(m.dim()) - 1)));
      f += w;
    }
    if (pick(0, 1)) f = f * dx(static_cast<std::size_t>(pick(0, static_cast<int>(m.dim()) - 1)));
    if (!f.is_zero()) out.push_back(f);
  }
  return out;
}

}  // namespace detail

/// Nilpotency of a vertical symmetry on horizontal forms. Even symmetries
/// fail by parity. Since L_v(L_v s^a) = L_v(v^a), the sufficient condition
/// L_v(v^a) = 0 is also necessary on the generators; a seeded probe of
/// L_v(L_v phi) on random horizontal forms is run as falsification.
inline NilpotencyReport nilpotency_check(const Model& m, const Derivation& v, int probes = 16) {
  if (v.is_raw() || !v.is_vertical()) throw std::invalid_argument("nilpotency check needs a vertical generalized symmetry");
  NilpotencyReport rep;
  if (v.parity() == Parity::even) {
    rep.criterion = "parity";
    rep.witness_label = "even symmetry";
    return rep;
  }
  for (FieldId a = 0; a < m.num_fields(); ++a) {
    rep.lie_of_characteristics.push_back(lie(m, v, v.characteristic(a)));
    if (rep.witness.is_zero() && !rep.lie_of_characteristics.back().is_zero()) {
      rep.witness = rep.lie_of_characteristics.back();
      rep.witness_label = "L_v(v^" + m.field(a).name + ")";
    }
  }
  rep.criterion = "sufficient condition";
  if (!rep.witness.is_zero()) return rep;
  for (const GradedForm& phi : detail::horizontal_probe_forms(m, probes, std::max(v.jet_order(), 0) + 1)) {
    ++rep.probes;
    GradedForm twice = lie(m, v, lie(m, v, phi));
    if (!twice.is_zero()) {
      rep.criterion = "probe";
      rep.witness = twice;
      rep.witness_label = "L_v(L_v phi)";
      return rep;
    }
  }
  rep.nilpotent = true;
  return rep;
}

/// s_v phi = (-1)^|phi| L_v phi on horizontal forms.
inline GradedForm s_operator(const Model& m, const Derivation& v, const GradedForm& phi) {
  if (v.is_raw() || !v.is_vertical() || v.parity() != Parity::odd)
    throw std::invalid_argument("s operator needs an odd vertical symmetry");
  GradedForm out;
  for (const auto& [deg, piece] : bidegree_split(phi)) {
    if (deg.first != 0) throw std::invalid_argument("s operator is defined on horizontal forms only");
    const GradedForm l = lie(m, v, piece);
    out += deg.second % 2 ? -l : l;
  }
  return out;
}

/// Charge shift of s_v: charge(v^a) - charge(a), required to be the same for
/// every nonzero characteristic term.
inline int charge_step(const Model& m, const ChargeGrading& grading, const Derivation& v) {
  std::optional<int> step;
  for (FieldId a = 0; a < m.num_fields(); ++a)
    for (const Term& t : v.characteristic(a).terms()) {
      const int s = grading.of(t.mono) - grading.field(a);
      if (step && *step != s) throw std::invalid_argument("symmetry does not shift the charge homogeneously");
      step = s;
    }
  if (!step) throw std::invalid_argument("charge step undefined for the zero symmetry");
  return *step;
}

struct CohomologyReport {
  int step = 0;
  std::size_t cochains = 0;  // dim of the truncated space C
  std::size_t closed = 0;    // dim Z
  std::size_t exact = 0;     // dim B
  std::size_t dimension = 0;
  std::vector<GradedForm> representatives;
};

/// Relative cohomology of s_v modulo d_H on the truncated space
/// C = V(k, m). Closed: phi in C with s phi in d_H V'(k + step, m - 1).
/// Exact: s xi + d_H sigma lying in C, xi in V'(k - step, m), sigma in
/// V'(k, m - 1). V uses the bounds (J, D, B); the primitive spaces V' use
/// (J, D + 1, B + 1), so that e.g. dt = d_H(t) counts as exact at B = 0.
/// Refuses when the exact part is not contained in the closed part.
namespace detail {

struct RelativeComplex {
  CohomologyReport report;
  linalg::MonomialIndex index;
  linalg::Span exact{0};
  linalg::Span closed{0};
};

inline RelativeComplex relative_complex(const Model& m, const Derivation& v, const ChargeGrading& grading,
                                        const CochainTruncation& trunc) {
  if (v.is_raw() || !v.is_vertical() || v.parity() != Parity::odd)
    throw std::invalid_argument("relative cohomology needs an odd vertical symmetry");
  RelativeComplex out;
  CohomologyReport& rep = out.report;
  linalg::MonomialIndex& index = out.index;
  rep.step = charge_step(m, grading, v);
  auto space = [&](int charge, int form_degree, bool relaxed) {
    if (form_degree < 0) return std::vector<Monomial>{};
    CochainTruncation t = trunc;
    if (relaxed) {
      ++t.max_degree;
      ++t.max_base;
    }
    t.charge = charge;
    t.form_degree = static_cast<unsigned>(form_degree);
    return truncation_basis(m, grading, t);
  };
  auto as_form = [](const Monomial& mono) { return GradedForm::from_canonical({{mono, Rational(1)}}); };
  const int k = trunc.charge, deg = static_cast<int>(trunc.form_degree);
  const std::vector<Monomial> cochains = space(k, deg, false);
  const std::vector<Monomial> pre_s = space(k - rep.step, deg, true);
  const std::vector<Monomial> pre_d = space(k, deg - 1, true);
  const std::vector<Monomial> closing = space(k + rep.step, deg - 1, true);
  rep.cochains = cochains.size();

  // ambient coordinates: C first, then everything the operators produce
  for (const Monomial& mono : cochains) index.intern(mono);
  std::vector<GradedForm> s_pre, d_pre, s_c, d_close;
  for (const Monomial& mono : pre_s) s_pre.push_back(s_operator(m, v, as_form(mono)));
  for (const Monomial& mono : pre_d) d_pre.push_back(d_horizontal(m, as_form(mono)));
  for (const Monomial& mono : cochains) s_c.push_back(s_operator(m, v, as_form(mono)));
  for (const Monomial& mono : closing) d_close.push_back(d_horizontal(m, as_form(mono)));
  for (const auto* group : {&s_pre, &d_pre, &s_c, &d_close})
    for (const GradedForm& f : *group) index.intern_all(f);
  const std::size_t width = index.size(), nc = cochains.size();

  // Exact: echelonize the images with the coordinates outside C ordered
  // first; rows led inside C span (image) intersected with C.
  const std::size_t outside = width - nc;
  auto key = [&](std::size_t i) { return i < nc ? outside + i : i - nc; };
  linalg::SparseEchelon images;
  for (const auto* group : {&s_pre, &d_pre})
    for (const GradedForm& f : *group) {
      linalg::SparseVector v;
      for (const Term& t : f.terms()) v.emplace(key(*index.find(t.mono)), t.coeff);
      images.insert(v);
    }
  out.exact = linalg::Span(nc);
  linalg::Span& exact = out.exact;
  for (const auto& [lead, row] : images.rows()) {
    if (lead < outside) continue;
    linalg::Vector dense(nc);
    for (const auto& [j, x] : row) dense[j - outside] = x;
    exact.insert(dense);
  }
  rep.exact = exact.dim();

  // Closed: reduce s(b_j) modulo d_H of the closing space and track the
  // combination in coordinates width + j; rows led by a tracking coordinate
  // are the y with sum y_j s(b_j) in d_H V'.
  linalg::SparseEchelon boundary;
  for (const GradedForm& f : d_close) boundary.insert(index.sparse(f));
  linalg::SparseEchelon tracked;
  for (std::size_t j = 0; j < nc; ++j) {
    linalg::SparseVector v = boundary.reduce(index.sparse(s_c[j]));
    v.emplace(width + j, Rational(1));
    tracked.insert(v);
  }
  out.closed = linalg::Span(nc);
  linalg::Span& closed = out.closed;
  for (const auto& [lead, row] : tracked.rows()) {
    if (lead < width) continue;
    linalg::Vector dense(nc);
    for (const auto& [j, x] : row) dense[j - width] = x;
    closed.insert(dense);
  }
  rep.closed = closed.dim();

  // every exact cochain must be closed inside the truncation
  for (const linalg::Vector& e : exact.basis())
    if (!closed.contains(e))
      throw Refusal("truncation is not closed under s and d_H: an exact cochain is not closed", index.form(e));

  linalg::Span quotient = exact;
  for (const linalg::Vector& z : closed.basis())
    if (quotient.insert(z)) rep.representatives.push_back(index.form(z));
  rep.dimension = rep.closed - rep.exact;
  return out;
}

}  // namespace detail

inline CohomologyReport relative_cohomology(const Model& m, const Derivation& v, const ChargeGrading& grading,
                                            const CochainTruncation& trunc) {
  return detail::relative_complex(m, v, grading, trunc).report;
}

/// Whether phi (inside the truncated space) is s-exact plus d_H-exact there.
inline bool relatively_exact(const Model& m, const Derivation& v, const ChargeGrading& grading,
                             const CochainTruncation& trunc, const GradedForm& phi) {
  auto cx = detail::relative_complex(m, v, grading, trunc);
  const std::size_t nc = cx.report.cochains;
  for (const Term& t : phi.terms()) {
    auto i = cx.index.find(t.mono);
    if (!i || *i >= nc) throw std::invalid_argument("form lies outside the truncated cochain space");
  }
  const linalg::Vector full = cx.index.coordinates(phi, cx.index.size());
  return cx.exact.contains(linalg::Vector(full.begin(), full.begin() + static_cast<std::ptrdiff_t>(nc)));
}

}  // namespace jetvar
