#pragma once

// Renderings of forms: parser-compatible text, LaTeX, and JSON term lists.

#include <string>

#include <json.hpp>

#include "../calculus.hpp"

namespace jetvar::io {

inline std::string multi_index_text(const MultiIndex& mi) {
  std::string s = "(";
  for (std::size_t i = 0; i < mi.dim(); ++i) s += (i ? "," : "") + std::to_string(mi[i]);
  return s + ")";
}

/// Field or coordinate name of an atom with its multi-index, as the parser
/// reads it: y, y(1,0), theta(y(1,0)), dx(t), t.
inline std::string atom_text(const Model& m, Atom a) {
  switch (a.kind()) {
    case AtomKind::coord: return m.coords().at(a.index());
    case AtomKind::horizontal: return "dx(" + m.coords().at(a.index()) + ")";
    case AtomKind::jet:
    case AtomKind::contact: {
      std::string s = m.field(a.index()).name;
      const MultiIndex mi = a.multi_index(m.dim());
      if (mi.order() > 0) s += multi_index_text(mi);
      return a.kind() == AtomKind::jet ? s : "theta(" + s + ")";
    }
  }
  return "?";
}

inline std::string to_text(const Model& m, const GradedForm& f) {
  if (f.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const Term& t : f.terms()) {
    const bool neg = t.coeff < 0;
    const Rational mag = neg ? Rational(-t.coeff) : t.coeff;
    out += first ? (neg ? "-" : "") : (neg ? " - " : " + ");
    first = false;
    if (t.mono.empty()) {
      out += mag.get_str();
      continue;
    }
    std::string body;
    if (mag != 1) body = mag.get_str();
    for (const Factor& fa : t.mono) {
      if (!body.empty()) body += "*";
      body += atom_text(m, fa.atom);
      if (fa.exp > 1) body += "^" + std::to_string(fa.exp);
    }
    out += body;
  }
  return out;
}

inline std::string latex_name(const std::string& name) {
  std::string s;
  for (char c : name) {
    if (c == '_') s += "\\_";
    else s += c;
  }
  return s.size() > 1 ? "\\mathrm{" + s + "}" : s;
}

inline std::string to_latex(const Model& m, const GradedForm& f) {
  if (f.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const Term& t : f.terms()) {
    const bool neg = t.coeff < 0;
    const Rational mag = neg ? Rational(-t.coeff) : t.coeff;
    out += first ? (neg ? "-" : "") : (neg ? " - " : " + ");
    first = false;
    std::string coeff;
    if (mag.get_den() != 1) {
      coeff = "\\frac{" + mag.get_num().get_str() + "}{" + mag.get_den().get_str() + "}";
    } else if (mag != 1 || t.mono.empty()) {
      coeff = mag.get_str();
    }
    std::vector<std::string> scalars, forms;
    unsigned dxs = 0;
    for (const Factor& fa : t.mono)
      if (fa.atom.kind() == AtomKind::horizontal) ++dxs;
    const bool omega = dxs == m.dim();
    for (const Factor& fa : t.mono) {
      const Atom a = fa.atom;
      const std::string pow = fa.exp > 1 ? "^{" + std::to_string(fa.exp) + "}" : "";
      if (a.kind() == AtomKind::coord) {
        scalars.push_back(latex_name(m.coords().at(a.index())) + pow);
      } else if (a.kind() == AtomKind::jet) {
        const MultiIndex mi = a.multi_index(m.dim());
        std::string s = latex_name(m.field(a.index()).name);
        if (mi.order() > 0) s = "{" + s + "}_{" + multi_index_text(mi) + "}";
        scalars.push_back(s + pow);
      } else if (a.kind() == AtomKind::contact) {
        const MultiIndex mi = a.multi_index(m.dim());
        std::string s = "\\theta^{" + latex_name(m.field(a.index()).name) + "}";
        if (mi.order() > 0) s += "_{" + multi_index_text(mi) + "}";
        if (fa.exp > 1) s = "(" + s + ")" + pow;
        forms.push_back(s);
      } else if (!omega) {
        forms.push_back("d" + latex_name(m.coords().at(a.index())));
      }
    }
    if (omega) forms.push_back("\\omega");
    std::string body = coeff;
    for (const std::string& s : scalars) body += (body.empty() ? "" : " ") + s;
    std::string wedge;
    for (const std::string& s : forms) wedge += (wedge.empty() ? "" : " \\wedge ") + s;
    if (!wedge.empty()) body += (body.empty() ? "" : "\\, ") + wedge;
    out += body;
  }
  return out;
}

inline nlohmann::ordered_json to_json(const Model& m, const GradedForm& f) {
  static const char* kinds[] = {"coord", "jet", "dx", "theta"};
  nlohmann::ordered_json terms = nlohmann::ordered_json::array();
  for (const Term& t : f.terms()) {
    nlohmann::ordered_json factors = nlohmann::ordered_json::array();
    for (const Factor& fa : t.mono) {
      nlohmann::ordered_json j;
      j["kind"] = kinds[static_cast<int>(fa.atom.kind())];
      const bool field = fa.atom.is_field_atom();
      j["name"] = field ? m.field(fa.atom.index()).name : m.coords().at(fa.atom.index());
      if (field) {
        const MultiIndex mi = fa.atom.multi_index(m.dim());
        nlohmann::ordered_json e = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < mi.dim(); ++i) e.push_back(mi[i]);
        j["multi_index"] = e;
      }
      j["exponent"] = fa.exp;
      factors.push_back(j);
    }
    terms.push_back({{"coefficient", t.coeff.get_str()}, {"factors", factors}});
  }
  nlohmann::ordered_json out;
  out["text"] = to_text(m, f);
  out["terms"] = terms;
  return out;
}

}  // namespace jetvar::io
