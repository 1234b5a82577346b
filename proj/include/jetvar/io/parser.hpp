#pragma once

// Model files and expressions.
//
//   base dim 2 coords t x;
//   even field u;
//   odd field c charge 1;
//   algebra g constants su2;              # or abelian(3), or
//   algebra h constants table dim 3 (3,1,2)=1, (1,2,3)=1/2;
//   lagrangian L = 1/2*u(1,0)^2 - 1/2*u(0,1)^2;
//   symmetry v: horizontal (1, 0) vertical (u -> -u(1,0));
//   form phi = u*theta(u(0,1))*dx(t);
//
// Expressions: + - * / ^ with rational literals; * is the graded product.
// Jets are written u(1,0) (exponent vector, bare u for order zero),
// contact forms theta(u(1,0)), horizontal generators dx(t), and omega is the
// volume form.

#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "../brst.hpp"
#include "../calculus.hpp"

namespace jetvar::io {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, const std::string& msg)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg), line_(line), column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_, column_;
};

struct Token {
  enum Kind { ident, number, punct, end } kind = end;
  std::string text;
  int line = 1, column = 1;
};

inline std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t k) {
    for (std::size_t j = 0; j < k; ++j, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    const char ch = src[i];
    if (ch == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(ch))) {
      advance(1);
      continue;
    }
    Token t{Token::end, "", line, col};
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      t.kind = Token::ident;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(ch))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      t.kind = Token::number;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (ch == '-' && i + 1 < src.size() && src[i + 1] == '>') {
      t.kind = Token::punct;
      t.text = "->";
      advance(2);
    } else if (std::string_view("+-*/^(),;:=").find(ch) != std::string_view::npos) {
      t.kind = Token::punct;
      t.text = std::string(1, ch);
      advance(1);
    } else {
      throw ParseError(line, col, std::string("unexpected character '") + ch + "'");
    }
    out.push_back(std::move(t));
  }
  out.push_back({Token::end, "", line, col});
  return out;
}

class TokenStream {
 public:
  explicit TokenStream(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  Token next() {
    Token t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  bool at_end() const { return peek().kind == Token::end; }
  bool is(std::string_view punct) const { return peek().kind == Token::punct && peek().text == punct; }
  bool is_word(std::string_view word) const { return peek().kind == Token::ident && peek().text == word; }
  bool accept(std::string_view punct) {
    if (!is(punct)) return false;
    next();
    return true;
  }
  [[noreturn]] void fail(const std::string& msg) const { fail_at(peek(), msg); }
  [[noreturn]] static void fail_at(const Token& t, const std::string& msg) { throw ParseError(t.line, t.column, msg); }
  Token expect(std::string_view punct) {
    if (!is(punct)) fail("expected '" + std::string(punct) + "'" + found());
    return next();
  }
  Token expect_word(std::string_view word) {
    if (!is_word(word)) fail("expected '" + std::string(word) + "'" + found());
    return next();
  }
  Token expect_ident() {
    if (peek().kind != Token::ident) fail("expected an identifier" + found());
    return next();
  }
  long long expect_integer() {
    const bool neg = accept("-");
    if (peek().kind != Token::number) fail("expected an integer" + found());
    const Token t = next();
    if (t.text.size() > 9) fail_at(t, "integer literal too large");
    const long long v = std::stoll(t.text);
    return neg ? -v : v;
  }

 private:
  std::string found() const {
    if (peek().kind == Token::end) return ", found end of input";
    return ", found '" + peek().text + "'";
  }
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

inline bool is_reserved(std::string_view name) {
  static const std::set<std::string, std::less<>> words = {"dx", "theta", "omega", "brst"};
  return words.count(name) > 0;
}

/// Recursive-descent expression parser over a fixed model.
class ExpressionParser {
 public:
  ExpressionParser(const Model& m, TokenStream& ts) : m_(m), ts_(ts) {}

  GradedForm expression() {
    GradedForm acc = term();
    while (true) {
      if (ts_.accept("+")) {
        acc += term();
      } else if (ts_.accept("-")) {
        acc -= term();
      } else {
        return acc;
      }
    }
  }

 private:
  GradedForm term() {
    GradedForm acc = unary();
    while (true) {
      if (ts_.accept("*")) {
        acc = acc * unary();
      } else if (ts_.is("/")) {
        const Token op = ts_.next();
        const GradedForm d = unary();
        if (d.is_zero()) ts_.fail_at(op, "division by zero");
        if (d.terms().size() != 1 || !d.terms().front().mono.empty()) ts_.fail_at(op, "division by a non-constant");
        acc = Rational(1 / d.terms().front().coeff) * acc;
      } else {
        return acc;
      }
    }
  }
  GradedForm unary() {
    if (ts_.accept("-")) return -unary();
    if (ts_.accept("+")) return unary();
    return power();
  }
  GradedForm power() {
    GradedForm base = primary();
    if (!ts_.is("^")) return base;
    ts_.next();
    if (ts_.peek().kind != Token::number) ts_.fail("exponent must be a non-negative integer literal");
    const Token e = ts_.next();
    if (e.text.size() > 4) ts_.fail_at(e, "exponent too large");
    GradedForm out(1);
    for (int k = std::stoi(e.text); k > 0; --k) out = out * base;
    return out;
  }
  GradedForm primary() {
    const Token t = ts_.peek();
    if (t.kind == Token::number) {
      ts_.next();
      return GradedForm(Rational(t.text));
    }
    if (ts_.accept("(")) {
      GradedForm e = expression();
      ts_.expect(")");
      return e;
    }
    if (t.kind != Token::ident) ts_.fail(t.kind == Token::end ? "unexpected end of expression" : "unexpected '" + t.text + "'");
    ts_.next();
    if (t.text == "omega") return volume(m_);
    if (t.text == "dx") {
      ts_.expect("(");
      const Token c = ts_.expect_ident();
      auto idx = m_.find_coord(c.text);
      if (!idx) ts_.fail_at(c, "unknown coordinate '" + c.text + "'");
      ts_.expect(")");
      return dx(*idx);
    }
    if (t.text == "theta") {
      ts_.expect("(");
      const Token f = ts_.expect_ident();
      auto [a, mi] = field_jet(f);
      ts_.expect(")");
      return theta(m_, a, mi);
    }
    if (auto c = m_.find_coord(t.text)) {
      if (ts_.is("(")) ts_.fail("coordinate '" + t.text + "' takes no multi-index");
      return coord(*c);
    }
    auto [a, mi] = field_jet(t);
    return jet(m_, a, mi);
  }
  std::pair<FieldId, MultiIndex> field_jet(const Token& name) {
    auto a = m_.find_field(name.text);
    if (!a) ts_.fail_at(name, "unknown identifier '" + name.text + "'");
    if (!ts_.is("(")) return {*a, MultiIndex(m_.dim())};
    const Token open = ts_.next();
    std::vector<int> exps;
    do {
      if (ts_.peek().kind != Token::number) ts_.fail("multi-index entries must be non-negative integers");
      const Token e = ts_.next();
      if (e.text.size() > 3 || std::stoi(e.text) > 127) ts_.fail_at(e, "derivative order too large");
      exps.push_back(std::stoi(e.text));
    } while (ts_.accept(","));
    ts_.expect(")");
    if (exps.size() != m_.dim())
      ts_.fail_at(open, "multi-index of length " + std::to_string(exps.size()) + " for base dimension " + std::to_string(m_.dim()));
    return {*a, MultiIndex(std::move(exps))};
  }

  const Model& m_;
  TokenStream& ts_;
};

inline GradedForm parse_expression(const Model& m, std::string_view text) {
  TokenStream ts(tokenize(text));
  GradedForm f = ExpressionParser(m, ts).expression();
  if (!ts.at_end()) ts.fail("unexpected '" + ts.peek().text + "' after expression");
  return f;
}

struct ModelFile {
  Model model;
  std::map<std::string, LieStructure> algebras;
  std::map<std::string, GradedForm> lagrangians;  // densities
  std::map<std::string, Derivation> symmetries;
  std::map<std::string, GradedForm> forms;
};

namespace detail {

class ModelParser {
 public:
  explicit ModelParser(std::string_view text) : ts_(tokenize(text)) {}

  ModelFile parse() {
    while (!ts_.at_end()) statement();
    if (!has_base_) throw ParseError(1, 1, "missing 'base dim <n> coords <names>;' declaration");
    return std::move(*out_);
  }

 private:
  void statement() {
    const Token kw = ts_.expect_ident();
    if (kw.text == "base") {
      base(kw);
    } else if (kw.text == "even" || kw.text == "odd") {
      field(kw);
    } else if (kw.text == "algebra") {
      algebra(kw);
    } else if (kw.text == "lagrangian") {
      lagrangian(kw);
    } else if (kw.text == "symmetry") {
      symmetry(kw);
    } else if (kw.text == "form") {
      form(kw);
    } else {
      TokenStream::fail_at(kw, "unknown statement '" + kw.text + "'");
    }
    ts_.expect(";");
  }

  void need_base(const Token& at) {
    if (!has_base_) TokenStream::fail_at(at, "'base' must be declared first");
  }
  void claim(const Token& name) {
    if (is_reserved(name.text)) TokenStream::fail_at(name, "'" + name.text + "' is reserved");
    if (!names_.insert(name.text).second) TokenStream::fail_at(name, "duplicate identifier '" + name.text + "'");
  }

  void base(const Token& kw) {
    if (has_base_) TokenStream::fail_at(kw, "duplicate base declaration");
    ts_.expect_word("dim");
    const Token nt = ts_.peek();
    const long long n = ts_.expect_integer();
    if (n < 1 || n > static_cast<long long>(Model::max_dim))
      TokenStream::fail_at(nt, "base dimension must be between 1 and " + std::to_string(Model::max_dim));
    ts_.expect_word("coords");
    std::vector<std::string> coords;
    do {
      const Token c = ts_.expect_ident();
      claim(c);
      coords.push_back(c.text);
    } while (ts_.accept(",") || ts_.peek().kind == Token::ident);
    if (static_cast<long long>(coords.size()) != n)
      TokenStream::fail_at(kw, "base dim " + std::to_string(n) + " needs " + std::to_string(n) + " coordinate names");
    out_.emplace(ModelFile{Model(coords), {}, {}, {}, {}});
    has_base_ = true;
  }

  void field(const Token& kw) {
    need_base(kw);
    if (declared_items_) TokenStream::fail_at(kw, "fields must be declared before lagrangians, symmetries and forms");
    const Parity p = kw.text == "odd" ? Parity::odd : Parity::even;
    ts_.expect_word("field");
    std::vector<Token> names;
    do names.push_back(ts_.expect_ident());
    while (ts_.accept(","));
    int charge = 0;
    if (ts_.is_word("charge")) {
      ts_.next();
      charge = static_cast<int>(ts_.expect_integer());
    }
    for (const Token& n : names) {
      claim(n);
      out_->model.add_field(n.text, p, charge);
    }
  }

  void algebra(const Token& kw) {
    need_base(kw);
    const Token name = ts_.expect_ident();
    claim(name);
    ts_.expect_word("constants");
    const Token kind = ts_.expect_ident();
    try {
      if (kind.text == "su2") {
        out_->algebras.emplace(name.text, LieStructure::su2());
      } else if (kind.text == "abelian") {
        ts_.expect("(");
        const Token dt = ts_.peek();
        const long long d = ts_.expect_integer();
        if (d < 1 || d > 64) TokenStream::fail_at(dt, "algebra dimension must be between 1 and 64");
        ts_.expect(")");
        out_->algebras.emplace(name.text, LieStructure::abelian(static_cast<std::size_t>(d)));
      } else if (kind.text == "table") {
        ts_.expect_word("dim");
        const Token dt = ts_.peek();
        const long long d = ts_.expect_integer();
        if (d < 1 || d > 64) TokenStream::fail_at(dt, "algebra dimension must be between 1 and 64");
        const auto du = static_cast<std::size_t>(d);
        std::vector<Rational> c(du * du * du);
        std::vector<bool> given(c.size(), false);
        do {
          const Token open = ts_.expect("(");
          std::size_t idx[3];
          for (int k = 0; k < 3; ++k) {
            if (k) ts_.expect(",");
            const Token it = ts_.peek();
            const long long v = ts_.expect_integer();
            if (v < 1 || v > d) TokenStream::fail_at(it, "structure-constant index out of range 1.." + std::to_string(d));
            idx[k] = static_cast<std::size_t>(v - 1);
          }
          ts_.expect(")");
          ts_.expect("=");
          const GradedForm val = ExpressionParser(out_->model, ts_).expression();
          if (!(val.is_zero() || (val.terms().size() == 1 && val.terms().front().mono.empty())))
            TokenStream::fail_at(open, "structure constants must be rational numbers");
          const Rational v = val.is_zero() ? Rational(0) : val.terms().front().coeff;
          const std::size_t pq = (idx[0] * du + idx[1]) * du + idx[2], qp = (idx[0] * du + idx[2]) * du + idx[1];
          if (idx[1] == idx[2] && v != 0) TokenStream::fail_at(open, "c^r_pp must vanish");
          if ((given[pq] && c[pq] != v) || (given[qp] && c[qp] != -v))
            TokenStream::fail_at(open, "structure constants are not antisymmetric in the lower indices");
          c[pq] = v;
          c[qp] = -v;
          given[pq] = given[qp] = true;
        } while (ts_.accept(","));
        out_->algebras.emplace(name.text, LieStructure(du, std::move(c)));
      } else {
        TokenStream::fail_at(kind, "unknown structure constants '" + kind.text + "' (expected su2, abelian(d) or table)");
      }
    } catch (const std::invalid_argument& e) {
      TokenStream::fail_at(kind, e.what());
    }
  }

  void lagrangian(const Token& kw) {
    need_base(kw);
    declared_items_ = true;
    const Token name = ts_.expect_ident();
    claim(name);
    ts_.expect("=");
    const Token at = ts_.peek();
    GradedForm f = ExpressionParser(out_->model, ts_).expression();
    if (!f.is_scalar()) TokenStream::fail_at(at, "a Lagrangian density must be a function (no dx or theta)");
    if (f.parity() == Parity::odd) TokenStream::fail_at(at, "a Lagrangian density must be even");
    out_->lagrangians.emplace(name.text, std::move(f));
  }

  void form(const Token& kw) {
    need_base(kw);
    declared_items_ = true;
    const Token name = ts_.expect_ident();
    claim(name);
    ts_.expect("=");
    out_->forms.emplace(name.text, ExpressionParser(out_->model, ts_).expression());
  }

  void symmetry(const Token& kw) {
    need_base(kw);
    declared_items_ = true;
    const Token name = ts_.expect_ident();
    claim(name);
    ts_.expect(":");
    const Model& m = out_->model;
    std::vector<GradedForm> h(m.dim());
    std::vector<GradedForm> chars(m.num_fields());
    bool any = false;
    if (ts_.is_word("horizontal")) {
      any = true;
      const Token at = ts_.next();
      ts_.expect("(");
      std::vector<GradedForm> comps;
      do comps.push_back(ExpressionParser(m, ts_).expression());
      while (ts_.accept(","));
      ts_.expect(")");
      if (comps.size() != m.dim())
        TokenStream::fail_at(at, "horizontal part needs " + std::to_string(m.dim()) + " components");
      h = std::move(comps);
    }
    if (ts_.is_word("vertical")) {
      any = true;
      ts_.next();
      ts_.expect("(");
      std::set<FieldId> seen;
      do {
        const Token f = ts_.expect_ident();
        auto a = m.find_field(f.text);
        if (!a) TokenStream::fail_at(f, "unknown field '" + f.text + "'");
        if (!seen.insert(*a).second) TokenStream::fail_at(f, "duplicate characteristic for '" + f.text + "'");
        ts_.expect("->");
        chars[*a] = ExpressionParser(m, ts_).expression();
      } while (ts_.accept(","));
      ts_.expect(")");
    }
    if (!any) ts_.fail("expected 'horizontal' or 'vertical'");
    try {
      out_->symmetries.emplace(name.text, Derivation::generalized(m, std::move(h), std::move(chars)));
    } catch (const std::invalid_argument& e) {
      TokenStream::fail_at(name, std::string("symmetry '") + name.text + "': " + e.what());
    }
  }

  TokenStream ts_;
  std::optional<ModelFile> out_;
  std::set<std::string> names_;
  bool has_base_ = false;
  bool declared_items_ = false;
};

}  // namespace detail

inline ModelFile parse_model(std::string_view text) { return detail::ModelParser(text).parse(); }

}  // namespace jetvar::io
