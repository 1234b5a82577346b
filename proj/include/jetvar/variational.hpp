#pragma once

// Lagrangian-level algorithms: Euler-Lagrange operators, Lepagean
// equivalents, the first variational formula, Noether currents and
// variational triviality.

#include <map>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "calculus.hpp"
#include "refusal.hpp"

namespace jetvar {

/// L = density * omega; the density is a graded function.
struct Lagrangian {
  GradedForm density;
};

inline GradedForm lagrangian_form(const Model& m, const Lagrangian& l) {
  if (!l.density.is_scalar()) throw std::invalid_argument("Lagrangian density must be a graded function");
  return l.density * volume(m);
}

/// Inverse of f -> f * omega on S^{0,n}.
inline GradedForm density_of(const Model& m, const GradedForm& top) {
  std::vector<Term> out;
  for (const Term& t : top.terms()) {
    if (horizontal_degree(t.mono) != m.dim() || contact_degree(t.mono) != 0)
      throw std::invalid_argument("expected a horizontal density");
    Term s{{}, t.coeff};
    for (const Factor& f : t.mono)
      if (f.atom.kind() != AtomKind::horizontal) s.mono.push_back(f);
    out.push_back(std::move(s));
  }
  return GradedForm::from_canonical(std::move(out));
}

struct EulerLagrangeForm {
  std::vector<GradedForm> components;  // E_a per field
  GradedForm form;                     // sum_a theta^a ^ E_a ^ omega
};

/// E_a = sum_Lambda (-1)^|Lambda| d_Lambda(partial^Lambda_a density).
inline EulerLagrangeForm euler_lagrange(const Model& m, const Lagrangian& l) {
  EulerLagrangeForm out;
  out.components.resize(m.num_fields());
  for (Atom var : atoms_of_kind(l.density, AtomKind::jet)) {
    const MultiIndex mi = var.multi_index(m.dim());
    GradedForm term = total_derivative(m, mi, partial(var, l.density));
    out.components[var.index()] += mi.order() % 2 ? -term : term;
  }
  const GradedForm omega = volume(m);
  for (FieldId a = 0; a < m.num_fields(); ++a)
    if (!out.components[a].is_zero()) out.form += theta(m, a) * out.components[a] * omega;
  return out;
}

namespace detail {

/// Solves  sum_{l in N} G^{N-l,l} + sum_l d_l G^{N,l} = P^N  (|N| >= 1) by
/// the downward recursion F^N = P^N - sum_l d_l(w F^{N+l}) with the weight
/// w = (N+l)_l / |N+l| splitting F^K symmetrically over its entries, and
/// assembles sum theta^a_{N-l} ^ w F^N ^ omega_l. The weights along all
/// lattice paths from 0 to N multiply to 1/#paths, which makes the order-0
/// remainder the Euler-Lagrange expression.
struct ContactPrimitive {
  std::map<std::pair<FieldId, MultiIndex>, GradedForm> coefficients;
  GradedForm form;
};

inline ContactPrimitive contact_primitive(const Model& m, const std::map<std::pair<FieldId, MultiIndex>, GradedForm>& rhs) {
  ContactPrimitive out;
  std::map<FieldId, int> top;
  for (const auto& [key, value] : rhs)
    if (!value.is_zero() && key.second.order() >= 1) top[key.first] = std::max(top[key.first], key.second.order());
  const std::size_t n = m.dim();
  for (const auto& [a, r] : top) {
    for (int k = r; k >= 1; --k)
      for (const MultiIndex& mi : MultiIndex::of_order(n, k)) {
        GradedForm f;
        if (auto it = rhs.find({a, mi}); it != rhs.end()) f = it->second;
        if (k < r)
          for (std::size_t l = 0; l < n; ++l) {
            const MultiIndex up = mi.plus(l);
            auto it = out.coefficients.find({a, up});
            if (it == out.coefficients.end() || it->second.is_zero()) continue;
            f -= Rational(up[l], up.order()) * total_derivative(m, l, it->second);
          }
        if (!f.is_zero()) out.coefficients[{a, mi}] = f;
      }
  }
  for (const auto& [key, f] : out.coefficients) {
    const auto& [a, mi] = key;
    for (std::size_t l = 0; l < n; ++l) {
      if (mi[l] == 0) continue;
      const MultiIndex below = mi - MultiIndex::unit(n, l);
      out.form += Rational(mi[l], mi.order()) * theta(m, a, below) * f * volume_minor(m, l);
    }
  }
  return out;
}

}  // namespace detail

struct LepageanForm {
  /// F_a^Lambda for 1 <= |Lambda| <= r, all h-functions zero.
  std::map<std::pair<FieldId, MultiIndex>, GradedForm> coefficients;
  GradedForm xi;             // in S^{1,n-1}
  GradedForm xi_lagrangian;  // xi + L
};

/// Lepagean equivalent with d_V L = delta L - d_H xi. For first-order
/// Lagrangians this is the Poincare-Cartan form.
inline LepageanForm lepagean(const Model& m, const Lagrangian& l) {
  std::map<std::pair<FieldId, MultiIndex>, GradedForm> derivs;
  for (Atom var : atoms_of_kind(l.density, AtomKind::jet))
    if (var.order() >= 1) derivs[{var.index(), var.multi_index(m.dim())}] = partial(var, l.density);
  auto prim = detail::contact_primitive(m, derivs);
  LepageanForm out;
  out.coefficients = std::move(prim.coefficients);
  out.xi = std::move(prim.form);
  out.xi_lagrangian = out.xi + lagrangian_form(m, l);
  return out;
}

/// L_v L - [v_V _| delta L + d_H h_0(v _| Xi_L) + density d_V(v_H _| omega)].
/// Identically zero for every Lagrangian and generalized (super)symmetry.
inline GradedForm fvf_residual(const Model& m, const Lagrangian& l, const Derivation& v) {
  if (v.is_raw()) throw std::invalid_argument("first variational formula needs a generalized symmetry");
  const GradedForm lf = lagrangian_form(m, l);
  const GradedForm delta = euler_lagrange(m, l).form;
  const GradedForm xi_l = lepagean(m, l).xi_lagrangian;
  GradedForm rhs = contract(v.vertical_part(), delta) + d_horizontal(m, h0(contract(v, xi_l))) +
                   l.density * d_vertical(contract(v.horizontal_part(), volume(m)));
  return lie(m, v, lf) - rhs;
}

/// Degree in jet variables of each term (base coordinates excluded).
inline std::map<unsigned, GradedForm> split_by_jet_degree(const GradedForm& f) {
  std::map<unsigned, std::vector<Term>> parts;
  for (const Term& t : f.terms()) {
    unsigned d = 0;
    for (const Factor& fa : t.mono)
      if (fa.atom.kind() == AtomKind::jet) d += fa.exp;
    parts[d].push_back(t);
  }
  std::map<unsigned, GradedForm> out;
  for (auto& [d, terms] : parts) out.emplace(d, GradedForm::from_canonical(std::move(terms)));
  return out;
}

/// Antiderivative along the base coordinate x^lambda of a polynomial in
/// base coordinates only.
inline GradedForm base_antiderivative(const GradedForm& f, std::size_t lambda) {
  std::vector<Term> out;
  for (const Term& t : f.terms()) {
    Term s{{}, t.coeff};
    std::uint32_t e = 0;
    for (const Factor& fa : t.mono) {
      if (fa.atom.kind() != AtomKind::coord) throw std::invalid_argument("antiderivative of a non-base polynomial");
      if (fa.atom.index() == lambda) e = fa.exp;
    }
    for (const Factor& fa : t.mono)
      if (fa.atom.index() != lambda) s.mono.push_back(fa);
    s.mono.push_back({Atom::coord(lambda), e + 1});
    std::sort(s.mono.begin(), s.mono.end());
    s.coeff /= Rational(e + 1);
    out.push_back(std::move(s));
  }
  return GradedForm::from_canonical(std::move(out));
}

/// xi in S^{0,n-1} with d_H xi = L, for variationally trivial L. Splits the
/// density by degree in jet variables; each piece of degree d >= 1 is
/// trivialized by the first variational formula for the scaling symmetry
/// (theta^a = s^a, whose Lie derivative multiplies it by d), and the pure
/// base part by an antiderivative along the first coordinate.
inline GradedForm trivialize(const Model& m, const Lagrangian& l) {
  const EulerLagrangeForm el = euler_lagrange(m, l);
  if (!el.form.is_zero()) {
    std::vector<std::pair<std::string, GradedForm>> w;
    for (FieldId a = 0; a < m.num_fields(); ++a)
      if (!el.components[a].is_zero()) w.emplace_back("E[" + m.field(a).name + "]", el.components[a]);
    throw Refusal("Lagrangian is not variationally trivial", std::move(w));
  }
  std::vector<GradedForm> scaling(m.num_fields());
  for (FieldId a = 0; a < m.num_fields(); ++a) scaling[a] = jet(m, a);
  const Derivation scale = Derivation::vertical(m, scaling);
  GradedForm xi;
  for (const auto& [d, piece] : split_by_jet_degree(l.density)) {
    if (d == 0) {
      xi += base_antiderivative(piece, 0) * volume_minor(m, 0);
    } else {
      xi += Rational(1, d) * h0(contract(scale, lepagean(m, {piece}).xi_lagrangian));
    }
  }
  if (d_horizontal(m, xi) != lagrangian_form(m, l)) throw std::logic_error("trivialize: roundtrip d_H xi = L failed");
  return xi;
}

/// psi in S^{1,n-1} with d_H psi = phi, for phi in S^{1,n} with rho(phi) = 0.
inline GradedForm contact_homotopy(const Model& m, const GradedForm& phi) {
  for (const Term& t : phi.terms())
    if (contact_degree(t.mono) != 1 || horizontal_degree(t.mono) != m.dim())
      throw std::invalid_argument("contact homotopy expects a 1-contact n-horizontal form");
  const GradedForm r = interior_euler(m, phi);
  if (!r.is_zero()) throw Refusal("form is not d_H-exact: rho(phi) != 0", r);
  std::map<std::pair<FieldId, MultiIndex>, GradedForm> rhs;
  for (Atom th : atoms_of_kind(phi, AtomKind::contact))
    if (th.order() >= 1) rhs[{th.index(), th.multi_index(m.dim())}] = -density_of(m, contract_dual(th, phi));
  GradedForm psi = detail::contact_primitive(m, rhs).form;
  if (d_horizontal(m, psi) != phi) throw std::logic_error("contact_homotopy: roundtrip d_H psi = phi failed");
  return psi;
}

struct NoetherCurrent {
  GradedForm current;  // J in S^{0,n-1}
  GradedForm sigma;    // L_v L = d_H sigma
  GradedForm defect;   // d_H J + v_V _| delta L, identically zero
};

struct DivergenceSymmetry {
  bool is_symmetry = false;
  GradedForm lie_lagrangian;  // L_v L
  GradedForm witness;         // delta(L_v L) when not a divergence symmetry
  NoetherCurrent noether;
};

/// Decides whether v (projected onto X) is a divergence symmetry of L and,
/// if so, returns the Noether current J = h_0(v _| Xi_L) - sigma.
inline DivergenceSymmetry divergence_symmetry(const Model& m, const Lagrangian& l, const Derivation& v) {
  if (v.is_raw() || !v.is_projected())
    throw std::invalid_argument("divergence symmetry needs a generalized symmetry projected onto the base");
  DivergenceSymmetry out;
  out.lie_lagrangian = lie(m, v, lagrangian_form(m, l));
  out.witness = variational(m, out.lie_lagrangian);
  if (!out.witness.is_zero()) return out;
  out.is_symmetry = true;
  out.noether.sigma = trivialize(m, {density_of(m, out.lie_lagrangian)});
  out.noether.current = h0(contract(v, lepagean(m, l).xi_lagrangian)) - out.noether.sigma;
  out.noether.defect = d_horizontal(m, out.noether.current) + contract(v.vertical_part(), euler_lagrange(m, l).form);
  if (!out.noether.defect.is_zero()) throw std::logic_error("divergence_symmetry: Noether identity failed");
  return out;
}

}  // namespace jetvar
