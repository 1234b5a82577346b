#pragma once

// Command dispatch for the jetvar tool: each command resolves its arguments
// against a parsed model file, calls one library operation and collects the
// results, optional identity checks and refusals into a Report.

#include <chrono>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "../brst.hpp"
#include "../variational.hpp"
#include "parser.hpp"
#include "printer.hpp"

namespace jetvar::io {

/// Bad command line or arguments that do not resolve (exit code 1).
class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Format { text, json, latex };

inline Format parse_format(const std::string& s) {
  if (s == "text") return Format::text;
  if (s == "json") return Format::json;
  if (s == "latex") return Format::latex;
  throw UsageError("unknown format '" + s + "' (expected text, json or latex)");
}

struct Report {
  using Value = std::variant<std::string, bool, long long, GradedForm>;
  struct Check {
    std::string identity;
    GradedForm residual;
  };

  Model model;
  std::string command;
  std::vector<std::pair<std::string, Value>> result;
  bool verified = false;
  std::vector<Check> checks;
  std::optional<std::string> refusal;
  std::vector<std::pair<std::string, GradedForm>> witnesses;
  double seconds = 0;

  int exit_code() const { return refusal ? 2 : 0; }
  void add(std::string key, Value v) { result.emplace_back(std::move(key), std::move(v)); }
  void check(std::string identity, GradedForm residual) { checks.push_back({std::move(identity), std::move(residual)}); }
  bool all_checks_zero() const {
    for (const Check& c : checks)
      if (!c.residual.is_zero()) return false;
    return true;
  }
};

struct CommandOptions {
  bool verify = false;
  int order = 1;
  std::string algebra;
  int charge = 0;
  int form_degree = 0;
  int max_jet = 1;
  int max_degree = 2;
  int max_base = 0;
};

namespace detail {

/// A symmetry together with the model it lives on: either declared in the
/// file or generated as brst(<algebra>) over the file's base.
struct ResolvedSymmetry {
  Model model;
  Derivation v;
  bool generated = false;
};

inline ResolvedSymmetry resolve_symmetry(const ModelFile& mf, const std::string& name) {
  if (auto it = mf.symmetries.find(name); it != mf.symmetries.end()) return {mf.model, it->second, false};
  if (name.rfind("brst(", 0) == 0 && name.size() > 6 && name.back() == ')') {
    const std::string g = name.substr(5, name.size() - 6);
    auto alg = mf.algebras.find(g);
    if (alg == mf.algebras.end()) throw UsageError("unknown algebra '" + g + "'");
    BrstSystem sys = brst_generator(alg->second, mf.model.coords());
    return {sys.model, sys.generator, true};
  }
  throw UsageError("unknown symmetry '" + name + "'");
}

inline GradedForm resolve_expression(const Model& m, const std::string& text, const std::string& what) {
  try {
    return parse_expression(m, text);
  } catch (const ParseError& e) {
    throw UsageError(what + " '" + text + "': " + e.what());
  }
}

inline Lagrangian resolve_lagrangian(const ModelFile& mf, const std::string& name) {
  if (auto it = mf.lagrangians.find(name); it != mf.lagrangians.end()) return {it->second};
  GradedForm f = resolve_expression(mf.model, name, "Lagrangian");
  if (!f.is_scalar() || f.parity() == Parity::odd) throw UsageError("Lagrangian '" + name + "' must be an even function");
  return {f};
}

inline void same_context(const ResolvedSymmetry& s) {
  if (s.generated) throw UsageError("mismatched contexts: a generated BRST symmetry lives on its own field roster");
}

inline std::string field_key(const Model& m, FieldId a, const MultiIndex& mi) {
  std::string s = m.field(a).name;
  if (mi.order() > 0) s += multi_index_text(mi);
  return s;
}

inline void add_refusal(Report& r, const Refusal& e) {
  r.refusal = e.what();
  r.witnesses = e.witnesses();
}

}  // namespace detail

inline Report run(const ModelFile& mf, const std::string& command, const std::vector<std::string>& args, const CommandOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  Report r{mf.model, command, {}, opt.verify, {}, {}, {}, 0};
  for (const std::string& a : args) r.command += " " + a;
  auto arity = [&](std::size_t n, const char* usage) {
    if (args.size() != n) throw UsageError(std::string("usage: ") + usage);
  };
  const Model& m = mf.model;

  if (command == "el") {
    arity(1, "el <lagrangian>");
    const Lagrangian l = detail::resolve_lagrangian(mf, args[0]);
    const EulerLagrangeForm el = euler_lagrange(m, l);
    for (FieldId a = 0; a < m.num_fields(); ++a) r.add("E[" + m.field(a).name + "]", el.components[a]);
    r.add("delta L", el.form);
    if (opt.verify) r.check("delta L - rho(d L)", el.form - variational(m, lagrangian_form(m, l)));
  } else if (command == "lepagean") {
    arity(1, "lepagean <lagrangian>");
    const Lagrangian l = detail::resolve_lagrangian(mf, args[0]);
    const LepageanForm lep = lepagean(m, l);
    for (const auto& [key, f] : lep.coefficients) r.add("F[" + detail::field_key(m, key.first, key.second) + "]", f);
    r.add("xi", lep.xi);
    r.add("xi + L", lep.xi_lagrangian);
    if (opt.verify)
      r.check("d_V L - delta L + d_H xi", d_vertical(lagrangian_form(m, l)) - euler_lagrange(m, l).form + d_horizontal(m, lep.xi));
  } else if (command == "fvf") {
    arity(2, "fvf <lagrangian> <symmetry>");
    const Lagrangian l = detail::resolve_lagrangian(mf, args[0]);
    const auto s = detail::resolve_symmetry(mf, args[1]);
    detail::same_context(s);
    const GradedForm res = fvf_residual(m, l, s.v);
    r.add("residual", res);
    r.add("holds", res.is_zero());
    if (opt.verify) r.check("L_v L - v_V _| delta L - d_H h_0(v _| Xi_L) - L d_V(v_H _| omega)", res);
  } else if (command == "noether") {
    arity(2, "noether <lagrangian> <symmetry>");
    const Lagrangian l = detail::resolve_lagrangian(mf, args[0]);
    const auto s = detail::resolve_symmetry(mf, args[1]);
    detail::same_context(s);
    const DivergenceSymmetry ds = divergence_symmetry(m, l, s.v);
    r.add("lie L", ds.lie_lagrangian);
    r.add("divergence symmetry", ds.is_symmetry);
    if (!ds.is_symmetry) {
      r.refusal = "not a divergence symmetry: delta(L_v L) != 0";
      r.witnesses = {{"delta(L_v L)", ds.witness}};
    } else {
      r.add("sigma", ds.noether.sigma);
      r.add("J", ds.noether.current);
      if (opt.verify) {
        r.check("d_H J + v_V _| delta L", ds.noether.defect);
        r.check("d_H sigma - L_v L", d_horizontal(m, ds.noether.sigma) - ds.lie_lagrangian);
      }
    }
  } else if (command == "trivialize") {
    arity(1, "trivialize <lagrangian>");
    const Lagrangian l = detail::resolve_lagrangian(mf, args[0]);
    try {
      const GradedForm xi = trivialize(m, l);
      r.add("xi", xi);
      if (opt.verify) r.check("d_H xi - L", d_horizontal(m, xi) - lagrangian_form(m, l));
    } catch (const Refusal& e) {
      detail::add_refusal(r, e);
    }
  } else if (command == "lie") {
    arity(2, "lie <symmetry> <form>");
    const auto s = detail::resolve_symmetry(mf, args[0]);
    r.model = s.model;
    GradedForm phi;
    if (auto it = mf.forms.find(args[1]); it != mf.forms.end()) {
      detail::same_context(s);
      phi = it->second;
    } else {
      phi = detail::resolve_expression(s.model, args[1], "form");
    }
    const GradedForm l = lie(s.model, s.v, phi);
    r.add("form", phi);
    r.add("lie", l);
    if (opt.verify && !s.v.is_raw()) r.check("L_v d_H phi - d_H L_v phi", lie(s.model, s.v, d_horizontal(s.model, phi)) - d_horizontal(s.model, l));
  } else if (command == "prolong") {
    arity(1, "prolong <symmetry> --order k");
    if (opt.order < 0 || opt.order > 8) throw UsageError("--order must be between 0 and 8");
    const auto s = detail::resolve_symmetry(mf, args[0]);
    r.model = s.model;
    r.add("parity", std::string(s.v.parity() == Parity::odd ? "odd" : "even"));
    for (std::size_t l = 0; l < s.model.dim(); ++l) r.add("horizontal[" + s.model.coords()[l] + "]", s.v.horizontal(l));
    for (FieldId a = 0; a < s.model.num_fields(); ++a)
      for (const MultiIndex& mi : MultiIndex::up_to_order(s.model.dim(), opt.order))
        r.add("vertical[" + detail::field_key(s.model, a, mi) + "]", s.v.component(a, mi));
    if (opt.verify) {
      const ContactCheck cc = is_contact_preserving(s.model, s.v);
      for (const auto& [atom, defect] : cc.witnesses) r.check("h_0(L_v " + atom_text(s.model, atom) + ")", defect);
      if (cc.witnesses.empty()) r.check("h_0(L_v theta) for all theta up to the checked order", GradedForm());
    }
  } else if (command == "brst") {
    arity(0, "brst --algebra <name>");
    auto alg = mf.algebras.find(opt.algebra);
    if (alg == mf.algebras.end()) throw UsageError("unknown algebra '" + opt.algebra + "'");
    const BrstSystem sys = brst_generator(alg->second, m.coords());
    r.model = sys.model;
    r.add("algebra", opt.algebra);
    r.add("jacobi", alg->second.jacobi_verified());
    for (FieldId a = 0; a < sys.model.num_fields(); ++a) r.add("v[" + sys.model.field(a).name + "]", sys.generator.characteristic(a));
    if (opt.verify)
      for (FieldId a = 0; a < sys.model.num_fields(); ++a)
        r.check("L_v(v^" + sys.model.field(a).name + ")", lie(sys.model, sys.generator, sys.generator.characteristic(a)));
  } else if (command == "nilpotent") {
    arity(1, "nilpotent <symmetry>");
    const auto s = detail::resolve_symmetry(mf, args[0]);
    r.model = s.model;
    NilpotencyReport rep;
    try {
      rep = nilpotency_check(s.model, s.v);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    r.add("status", std::string(rep.nilpotent ? "nilpotent" : "not nilpotent") + " (" + rep.criterion + ")");
    r.add("probes", static_cast<long long>(rep.probes));
    r.add("probe seed", static_cast<long long>(nilpotency_probe_seed));
    if (!rep.nilpotent) {
      r.refusal = "symmetry is not nilpotent";
      if (!rep.witness.is_zero()) r.witnesses = {{rep.witness_label, rep.witness}};
    }
    if (opt.verify)
      for (FieldId a = 0; a < s.model.num_fields(); ++a)
        r.check("L_v(v^" + s.model.field(a).name + ")", lie(s.model, s.v, s.v.characteristic(a)));
  } else if (command == "cohomology") {
    arity(1, "cohomology <symmetry> --charge k --formdeg m --max-jet J --max-deg D --max-base B");
    const auto s = detail::resolve_symmetry(mf, args[0]);
    r.model = s.model;
    if (opt.form_degree < 0 || opt.max_jet < 0 || opt.max_degree < 0 || opt.max_base < 0)
      throw UsageError("truncation bounds must be non-negative");
    if (opt.max_jet > 4 || opt.max_degree > 6 || opt.max_base > 4) throw UsageError("truncation bounds too large (J <= 4, D <= 6, B <= 4)");
    const CochainTruncation t{opt.max_jet, opt.max_degree, opt.max_base, opt.charge, static_cast<unsigned>(opt.form_degree)};
    try {
      const CohomologyReport rep = relative_cohomology(s.model, s.v, ChargeGrading(s.model), t);
      r.add("step", static_cast<long long>(rep.step));
      r.add("cochains", static_cast<long long>(rep.cochains));
      r.add("closed", static_cast<long long>(rep.closed));
      r.add("exact", static_cast<long long>(rep.exact));
      r.add("dimension", static_cast<long long>(rep.dimension));
      for (std::size_t i = 0; i < rep.representatives.size(); ++i) r.add("representative[" + std::to_string(i) + "]", rep.representatives[i]);
      if (opt.verify)
        for (std::size_t i = 0; i < rep.representatives.size(); ++i) {
          const GradedForm sr = s_operator(s.model, s.v, rep.representatives[i]);
          r.check("s s representative[" + std::to_string(i) + "]", s_operator(s.model, s.v, sr));
        }
    } catch (const Refusal& e) {
      detail::add_refusal(r, e);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  } else {
    throw UsageError("unknown command '" + command + "'");
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

/// Renders a report. Timing is only emitted on request so that identical
/// inputs give identical output.
inline std::string render(const Report& r, Format fmt, bool timing) {
  const Model& m = r.model;
  if (fmt == Format::json) {
    nlohmann::ordered_json j;
    j["command"] = r.command;
    nlohmann::ordered_json res = nlohmann::ordered_json::object();
    for (const auto& [key, v] : r.result)
      std::visit([&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, GradedForm>) res[key] = to_json(m, x);
        else res[key] = x;
      }, v);
    j["result"] = res;
    if (r.refusal) {
      nlohmann::ordered_json w = nlohmann::ordered_json::object();
      for (const auto& [label, f] : r.witnesses) w[label] = to_json(m, f);
      j["refusal"] = {{"reason", *r.refusal}, {"witnesses", w}};
    }
    if (r.verified) {
      nlohmann::ordered_json checks = nlohmann::ordered_json::array();
      for (const auto& c : r.checks) checks.push_back({{"identity", c.identity}, {"residual", to_json(m, c.residual)}, {"zero", c.residual.is_zero()}});
      j["verification"] = checks;
    }
    if (timing) j["seconds"] = r.seconds;
    return j.dump(2) + "\n";
  }
  const bool tex = fmt == Format::latex;
  auto form = [&](const GradedForm& f) { return tex ? "$" + to_latex(m, f) + "$" : to_text(m, f); };
  std::string out = (tex ? "% " : "# ") + r.command + "\n";
  for (const auto& [key, v] : r.result)
    std::visit([&](const auto& x) {
      using T = std::decay_t<decltype(x)>;
      if constexpr (std::is_same_v<T, GradedForm>) out += key + " = " + form(x) + "\n";
      else if constexpr (std::is_same_v<T, bool>) out += key + ": " + (x ? "true" : "false") + "\n";
      else if constexpr (std::is_same_v<T, long long>) out += key + ": " + std::to_string(x) + "\n";
      else out += key + ": " + x + "\n";
    }, v);
  if (r.refusal) {
    out += "refused: " + *r.refusal + "\n";
    for (const auto& [label, f] : r.witnesses) out += "  " + label + " = " + form(f) + "\n";
  }
  if (r.verified) {
    out += "verification:\n";
    for (const auto& c : r.checks) out += "  " + c.identity + " = " + form(c.residual) + (c.residual.is_zero() ? "  [ok]\n" : "  [FAILED]\n");
  }
  if (timing) out += "time: " + std::to_string(r.seconds) + " s\n";
  return out;
}

}  // namespace jetvar::io
