// Copyright 2026 The Casecons Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Bounded linear integer arithmetic frontend.
//
// Input is a small SMT-LIB flavoured s-expression language:
//
//   (declare-int start_A 0 10)                  ; bounded integer variable
//   (assert (<= (+ start_A 2) end_A))           ; auto-named assert_<k>
//   (assert (! (distinct x y) :named x_ne_y))   ; named assertion
//   (define-atom a_first (< end_A start_B))     ; reified query atom
//
// Boolean connectives: and, or, not, =>, true, false. Relations: <=, <, =,
// >=, >, distinct. Terms: integer literals, variables, +, -, and * where at
// least one factor is constant. set-logic, set-info, set-option, check-sat
// and exit are accepted and ignored.
//
// Grounding uses the order encoding: one propositional variable per
// threshold `x <= k` for k in [lower, upper). Every clause lands in exactly
// one named group: "domain" for the threshold ladder, the assertion name for
// each assertion, and "atom:<name>" for each reified atom definition.

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "casecons/logic.hpp"

namespace casecons::lia {

struct IntVar {
  std::string name;
  std::int64_t lower = 0;
  std::int64_t upper = 0;

  std::int64_t width() const { return upper - lower + 1; }
  friend bool operator==(const IntVar&, const IntVar&) = default;
};

enum class Relation { kLe, kLt, kEq, kGe, kGt, kNe };

inline const char* to_string(Relation r) {
  switch (r) {
    case Relation::kLe: return "<=";
    case Relation::kLt: return "<";
    case Relation::kEq: return "=";
    case Relation::kGe: return ">=";
    case Relation::kGt: return ">";
    case Relation::kNe: return "distinct";
  }
  return "?";
}

inline Relation negate(Relation r) {
  switch (r) {
    case Relation::kLe: return Relation::kGt;
    case Relation::kLt: return Relation::kGe;
    case Relation::kEq: return Relation::kNe;
    case Relation::kGe: return Relation::kLt;
    case Relation::kGt: return Relation::kLe;
    case Relation::kNe: return Relation::kEq;
  }
  return r;
}

struct LinTerm {
  std::int64_t coefficient = 0;
  int var = -1;  // index into Theory::vars
  friend bool operator==(const LinTerm&, const LinTerm&) = default;
};

// sum(terms) <relation> constant, terms merged per variable, nonzero
// coefficients, at least one term.
struct LinConstraint {
  std::vector<LinTerm> terms;
  Relation relation = Relation::kLe;
  std::int64_t constant = 0;
  friend bool operator==(const LinConstraint&, const LinConstraint&) = default;
};

struct Expr {
  enum class Kind { kAtom, kAnd, kOr, kNot, kTrue, kFalse };
  Kind kind = Kind::kTrue;
  int constraint = -1;  // kAtom: index into Theory::constraints
  std::vector<Expr> children;
  friend bool operator==(const Expr&, const Expr&) = default;
};

struct Assertion {
  std::string name;
  Expr body;
  friend bool operator==(const Assertion&, const Assertion&) = default;
};

struct Theory {
  std::vector<IntVar> vars;
  std::vector<LinConstraint> constraints;
  std::vector<Assertion> assertions;
  std::vector<Assertion> atoms;  // reified definitions

  int find_var(std::string_view name) const {
    for (std::size_t i = 0; i < vars.size(); ++i)
      if (vars[i].name == name) return static_cast<int>(i);
    return -1;
  }

  const Assertion* find_atom(std::string_view name) const {
    for (const auto& a : atoms)
      if (a.name == name) return &a;
    return nullptr;
  }
};

class GroundingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

struct SExpr {
  bool is_list = false;
  std::string atom;
  std::vector<SExpr> items;
  std::size_t line = 0;
};

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  std::optional<SExpr> next() {
    skip();
    if (pos_ >= text_.size()) return std::nullopt;
    return read();
  }

 private:
  void skip() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '\n') {
        ++line_;
        ++pos_;
      } else if (c == ' ' || c == '\t' || c == '\r') {
        ++pos_;
      } else if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  SExpr read() {
    skip();
    if (pos_ >= text_.size()) throw ParseError(line_, "unexpected end of input");
    SExpr e;
    e.line = line_;
    char c = text_[pos_];
    if (c == ')') throw ParseError(line_, "unexpected ')'");
    if (c == '(') {
      ++pos_;
      e.is_list = true;
      for (;;) {
        skip();
        if (pos_ >= text_.size()) throw ParseError(e.line, "unbalanced '('");
        if (text_[pos_] == ')') {
          ++pos_;
          break;
        }
        e.items.push_back(read());
      }
      return e;
    }
    std::size_t start = pos_;
    while (pos_ < text_.size()) {
      char d = text_[pos_];
      if (d == '(' || d == ')' || d == ' ' || d == '\t' || d == '\n' || d == '\r' || d == ';')
        break;
      ++pos_;
    }
    e.atom = std::string(text_.substr(start, pos_ - start));
    return e;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

inline std::optional<std::int64_t> as_int(const SExpr& e) {
  if (e.is_list || e.atom.empty()) return std::nullopt;
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(e.atom.data(), e.atom.data() + e.atom.size(), v);
  if (ec != std::errc() || p != e.atom.data() + e.atom.size()) return std::nullopt;
  return v;
}

// Linear form: sum(coeff[var] * var) + constant.
struct Linear {
  std::map<int, std::int64_t> coeffs;
  std::int64_t constant = 0;

  bool is_constant() const {
    for (auto& [v, c] : coeffs)
      if (c != 0) return false;
    return true;
  }

  Linear& add(const Linear& o, std::int64_t scale) {
    for (auto& [v, c] : o.coeffs) coeffs[v] += scale * c;
    constant += scale * o.constant;
    return *this;
  }
};

class TheoryBuilder {
 public:
  Theory theory;

  void statement(const SExpr& s) {
    if (!s.is_list || s.items.empty() || s.items[0].is_list)
      throw ParseError(s.line, "expected a command like (assert ...)");
    const std::string& head = s.items[0].atom;
    if (head == "set-logic" || head == "set-info" || head == "set-option" ||
        head == "check-sat" || head == "exit" || head == "get-model") {
      return;
    }
    if (head == "declare-int") return declare_int(s);
    if (head == "declare-const" || head == "declare-fun") {
      std::string name = s.items.size() > 1 ? s.items[1].atom : "?";
      throw ParseError(s.line, "unbounded variable '" + name +
                                   "': use (declare-int name lower upper)");
    }
    if (head == "assert") return assert_cmd(s);
    if (head == "define-atom") return define_atom(s);
    throw ParseError(s.line, "unsupported command '" + head + "'");
  }

 private:
  void check_fresh(const std::string& name, std::size_t line) {
    if (used_names_.count(name)) throw ParseError(line, "duplicate name '" + name + "'");
    used_names_[name] = true;
  }

  void declare_int(const SExpr& s) {
    if (s.items.size() != 4 || s.items[1].is_list)
      throw ParseError(s.line, "expected (declare-int name lower upper)");
    auto lo = as_int(s.items[2]);
    auto hi = as_int(s.items[3]);
    if (!lo || !hi) throw ParseError(s.line, "bounds must be integer literals");
    if (*lo > *hi)
      throw ParseError(s.line, "empty domain for '" + s.items[1].atom + "'");
    if (theory.find_var(s.items[1].atom) >= 0)
      throw ParseError(s.line, "variable '" + s.items[1].atom + "' declared twice");
    theory.vars.push_back({s.items[1].atom, *lo, *hi});
  }

  void assert_cmd(const SExpr& s) {
    if (s.items.size() != 2) throw ParseError(s.line, "expected (assert <expr>)");
    const SExpr* body = &s.items[1];
    std::string name;
    if (body->is_list && !body->items.empty() && !body->items[0].is_list &&
        body->items[0].atom == "!") {
      const auto& ann = body->items;
      if (ann.size() != 4 || ann[2].atom != ":named" || ann[3].is_list)
        throw ParseError(body->line, "expected (! <expr> :named <name>)");
      name = ann[3].atom;
      body = &ann[1];
    } else {
      name = "assert_" + std::to_string(theory.assertions.size() + 1);
    }
    check_fresh(name, s.line);
    theory.assertions.push_back({name, expr(*body)});
  }

  void define_atom(const SExpr& s) {
    if (s.items.size() != 3 || s.items[1].is_list)
      throw ParseError(s.line, "expected (define-atom name <expr>)");
    check_fresh(s.items[1].atom, s.line);
    theory.atoms.push_back({s.items[1].atom, expr(s.items[2])});
  }

 public:
  Expr expr(const SExpr& e) {
    if (!e.is_list) {
      if (e.atom == "true") return Expr{Expr::Kind::kTrue, -1, {}};
      if (e.atom == "false") return Expr{Expr::Kind::kFalse, -1, {}};
      throw ParseError(e.line, "expected a boolean expression, got '" + e.atom + "'");
    }
    if (e.items.empty() || e.items[0].is_list)
      throw ParseError(e.line, "malformed expression");
    const std::string& op = e.items[0].atom;
    if (op == "and" || op == "or") {
      Expr out{op == "and" ? Expr::Kind::kAnd : Expr::Kind::kOr, -1, {}};
      for (std::size_t i = 1; i < e.items.size(); ++i) out.children.push_back(expr(e.items[i]));
      return out;
    }
    if (op == "not") {
      if (e.items.size() != 2) throw ParseError(e.line, "not takes one argument");
      return Expr{Expr::Kind::kNot, -1, {expr(e.items[1])}};
    }
    if (op == "=>") {
      if (e.items.size() != 3) throw ParseError(e.line, "=> takes two arguments");
      Expr lhs{Expr::Kind::kNot, -1, {expr(e.items[1])}};
      return Expr{Expr::Kind::kOr, -1, {lhs, expr(e.items[2])}};
    }
    std::optional<Relation> rel;
    if (op == "<=") rel = Relation::kLe;
    else if (op == "<") rel = Relation::kLt;
    else if (op == "=") rel = Relation::kEq;
    else if (op == ">=") rel = Relation::kGe;
    else if (op == ">") rel = Relation::kGt;
    else if (op == "distinct") rel = Relation::kNe;
    if (!rel) throw ParseError(e.line, "unknown operator '" + op + "'");
    if (e.items.size() != 3) throw ParseError(e.line, op + " takes two arguments");
    Linear lhs = term(e.items[1]);
    lhs.add(term(e.items[2]), -1);
    LinConstraint c;
    c.relation = *rel;
    c.constant = -lhs.constant;
    for (auto& [v, k] : lhs.coeffs)
      if (k != 0) c.terms.push_back({k, v});
    if (c.terms.empty()) {
      bool holds = false;
      switch (c.relation) {
        case Relation::kLe: holds = 0 <= c.constant; break;
        case Relation::kLt: holds = 0 < c.constant; break;
        case Relation::kEq: holds = 0 == c.constant; break;
        case Relation::kGe: holds = 0 >= c.constant; break;
        case Relation::kGt: holds = 0 > c.constant; break;
        case Relation::kNe: holds = 0 != c.constant; break;
      }
      return Expr{holds ? Expr::Kind::kTrue : Expr::Kind::kFalse, -1, {}};
    }
    theory.constraints.push_back(std::move(c));
    return Expr{Expr::Kind::kAtom, static_cast<int>(theory.constraints.size() - 1), {}};
  }

  Linear term(const SExpr& e) {
    Linear out;
    if (!e.is_list) {
      if (auto v = as_int(e)) {
        out.constant = *v;
        return out;
      }
      int idx = theory.find_var(e.atom);
      if (idx < 0) throw ParseError(e.line, "undeclared variable '" + e.atom + "'");
      out.coeffs[idx] = 1;
      return out;
    }
    if (e.items.empty() || e.items[0].is_list) throw ParseError(e.line, "malformed term");
    const std::string& op = e.items[0].atom;
    if (op == "+") {
      for (std::size_t i = 1; i < e.items.size(); ++i) out.add(term(e.items[i]), 1);
      return out;
    }
    if (op == "-") {
      if (e.items.size() == 2) return out.add(term(e.items[1]), -1);
      if (e.items.size() < 2) throw ParseError(e.line, "- needs an argument");
      out = term(e.items[1]);
      for (std::size_t i = 2; i < e.items.size(); ++i) out.add(term(e.items[i]), -1);
      return out;
    }
    if (op == "*") {
      out.constant = 1;
      for (std::size_t i = 1; i < e.items.size(); ++i) {
        Linear f = term(e.items[i]);
        if (out.is_constant()) {
          std::int64_t k = out.constant;
          out = Linear{};
          out.add(f, k);
        } else if (f.is_constant()) {
          Linear scaled;
          scaled.add(out, f.constant);
          out = scaled;
        } else {
          throw ParseError(e.line, "nonlinear term: product of two variables");
        }
      }
      return out;
    }
    throw ParseError(e.line, "unsupported term operator '" + op + "'");
  }

 private:
  std::map<std::string, bool> used_names_;
};

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

inline std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

}  // namespace detail

inline Theory parse_theory(std::string_view text) {
  detail::Reader reader(text);
  detail::TheoryBuilder builder;
  while (auto s = reader.next()) builder.statement(*s);
  return std::move(builder.theory);
}

struct GroundOptions {
  std::int64_t max_domain_width = 64;
};

struct GroundedTheory {
  Formula formula;
  std::vector<IntVar> vars;
  // order_base[i] is the propositional variable of `vars[i] <= lower`;
  // `vars[i] <= lower + j` is order_base[i] + j for j < width - 1.
  std::vector<int> order_base;
  std::map<std::string, int> atom_vars;  // reified atom name -> variable
  std::map<std::string, std::string> group_of_assertion;

  // Literal for `vars[var] <= k`; nullopt when the threshold is constant
  // (then `constant_value` holds its truth value).
  std::optional<Literal> order_literal(int var, std::int64_t k, bool* constant_value = nullptr) const {
    const auto& x = vars.at(var);
    if (k < x.lower) {
      if (constant_value) *constant_value = false;
      return std::nullopt;
    }
    if (k >= x.upper) {
      if (constant_value) *constant_value = true;
      return std::nullopt;
    }
    return Literal(order_base[var] + static_cast<int>(k - x.lower), true);
  }

  std::optional<Literal> atom_literal(std::string_view name) const {
    auto it = atom_vars.find(std::string(name));
    if (it == atom_vars.end()) return std::nullopt;
    return Literal(it->second, true);
  }

  // Integer value of each variable under a propositional model.
  std::vector<std::int64_t> decode(const Assignment& model) const {
    std::vector<std::int64_t> out;
    for (std::size_t i = 0; i < vars.size(); ++i) {
      std::int64_t v = vars[i].upper;
      for (std::int64_t k = vars[i].lower; k < vars[i].upper; ++k) {
        if (model.value(order_base[i] + static_cast<int>(k - vars[i].lower))) {
          v = k;
          break;
        }
      }
      out.push_back(v);
    }
    return out;
  }
};

namespace detail {

// Three-valued literal produced by threshold lookups.
struct MaybeLit {
  enum class Kind { kFalse, kTrue, kLit } kind = Kind::kFalse;
  Literal lit;

  static MaybeLit from(const GroundedTheory& g, int var, std::int64_t k, bool positive) {
    bool c = false;
    auto l = g.order_literal(var, k, &c);
    MaybeLit m;
    if (l) {
      m.kind = Kind::kLit;
      m.lit = positive ? *l : ~*l;
    } else {
      m.kind = (c == positive) ? Kind::kTrue : Kind::kFalse;
    }
    return m;
  }
};

class Grounder {
 public:
  Grounder(const Theory& t, GroundedTheory& g) : theory_(t), g_(g) {}

  // Encodes expr (or its negation) under the guard: every emitted clause is
  // ¬guard_1 ∨ … ∨ ¬guard_k ∨ body.
  void encode(const Expr& e, bool positive, std::vector<Literal>& guard) {
    using K = Expr::Kind;
    switch (e.kind) {
      case K::kTrue:
        if (!positive) emit(guard, {});
        return;
      case K::kFalse:
        if (positive) emit(guard, {});
        return;
      case K::kNot:
        encode(e.children.at(0), !positive, guard);
        return;
      case K::kAtom: {
        const auto& c = theory_.constraints.at(e.constraint);
        Relation r = positive ? c.relation : negate(c.relation);
        encode_relation(c.terms, r, c.constant, guard);
        return;
      }
      case K::kAnd:
      case K::kOr: {
        bool conj = (e.kind == K::kAnd) == positive;
        if (conj) {
          for (const auto& child : e.children) encode(child, positive, guard);
          return;
        }
        if (e.children.empty()) {
          emit(guard, {});
          return;
        }
        if (e.children.size() == 1) {
          encode(e.children[0], positive, guard);
          return;
        }
        std::vector<Literal> selectors;
        for (std::size_t i = 0; i < e.children.size(); ++i)
          selectors.emplace_back(g_.formula.new_variable(), true);
        emit(guard, selectors);
        for (std::size_t i = 0; i < e.children.size(); ++i) {
          guard.push_back(selectors[i]);
          encode(e.children[i], positive, guard);
          guard.pop_back();
        }
        return;
      }
    }
  }

 private:
  void emit(const std::vector<Literal>& guard, const std::vector<Literal>& body) {
    Clause c;
    for (Literal l : guard) c.push_back(~l);
    c.insert(c.end(), body.begin(), body.end());
    g_.formula.add_clause(c);
  }

  void encode_relation(const std::vector<LinTerm>& terms, Relation r, std::int64_t c,
                       std::vector<Literal>& guard) {
    std::vector<LinTerm> neg = terms;
    for (auto& t : neg) t.coefficient = -t.coefficient;
    switch (r) {
      case Relation::kLe: return encode_le(terms, c, guard);
      case Relation::kLt: return encode_le(terms, c - 1, guard);
      case Relation::kGe: return encode_le(neg, -c, guard);
      case Relation::kGt: return encode_le(neg, -c - 1, guard);
      case Relation::kEq:
        encode_le(terms, c, guard);
        encode_le(neg, -c, guard);
        return;
      case Relation::kNe: {
        Literal below(g_.formula.new_variable(), true);
        guard.push_back(below);
        encode_le(terms, c - 1, guard);
        guard.back() = ~below;
        encode_le(neg, -c - 1, guard);
        guard.pop_back();
        return;
      }
    }
  }

  std::int64_t term_min(const LinTerm& t) const {
    const auto& x = g_.vars[t.var];
    return t.coefficient > 0 ? t.coefficient * x.lower : t.coefficient * x.upper;
  }
  std::int64_t term_max(const LinTerm& t) const {
    const auto& x = g_.vars[t.var];
    return t.coefficient > 0 ? t.coefficient * x.upper : t.coefficient * x.lower;
  }

  // sum(terms) <= c. For the leading term a*x and each achievable b = a*v:
  //   (a*x >= b) -> sum(rest) <= c - b.
  void encode_le(const std::vector<LinTerm>& terms, std::int64_t c, std::vector<Literal>& guard) {
    std::vector<Literal> prefix;
    le_rec(terms, 0, c, prefix, guard);
  }

  void le_rec(const std::vector<LinTerm>& terms, std::size_t i, std::int64_t c,
              std::vector<Literal>& prefix, const std::vector<Literal>& guard) {
    const LinTerm& t = terms[i];
    const auto& x = g_.vars[t.var];
    if (i + 1 == terms.size()) {
      MaybeLit m = t.coefficient > 0
                       ? MaybeLit::from(g_, t.var, floor_div(c, t.coefficient), true)
                       : MaybeLit::from(g_, t.var, ceil_div(c, t.coefficient) - 1, false);
      if (m.kind == MaybeLit::Kind::kTrue) return;
      if (m.kind == MaybeLit::Kind::kLit) prefix.push_back(m.lit);
      emit(guard, prefix);
      if (m.kind == MaybeLit::Kind::kLit) prefix.pop_back();
      return;
    }
    std::int64_t rest_min = 0, rest_max = 0;
    for (std::size_t j = i + 1; j < terms.size(); ++j) {
      rest_min += term_min(terms[j]);
      rest_max += term_max(terms[j]);
    }
    for (std::int64_t v = x.lower; v <= x.upper; ++v) {
      std::int64_t b = t.coefficient * v;
      if (rest_max <= c - b) continue;
      // ¬(a*x >= b): a > 0 gives x <= v-1, a < 0 gives x > v.
      MaybeLit m = t.coefficient > 0 ? MaybeLit::from(g_, t.var, v - 1, true)
                                     : MaybeLit::from(g_, t.var, v, false);
      if (m.kind == MaybeLit::Kind::kTrue) continue;
      if (m.kind == MaybeLit::Kind::kLit) prefix.push_back(m.lit);
      if (rest_min > c - b) emit(guard, prefix);
      else le_rec(terms, i + 1, c - b, prefix, guard);
      if (m.kind == MaybeLit::Kind::kLit) prefix.pop_back();
    }
  }

  const Theory& theory_;
  GroundedTheory& g_;
};

}  // namespace detail

inline GroundedTheory ground(const Theory& theory, const GroundOptions& options = {}) {
  GroundedTheory g;
  g.vars = theory.vars;
  for (const auto& x : theory.vars) {
    if (x.lower > x.upper) throw GroundingError("empty domain for '" + x.name + "'");
    if (x.width() > options.max_domain_width)
      throw GroundingError("domain of '" + x.name + "' has " + std::to_string(x.width()) +
                           " values, above the limit of " +
                           std::to_string(options.max_domain_width));
  }
  int next = 1;
  for (const auto& x : theory.vars) {
    g.order_base.push_back(next);
    next += static_cast<int>(x.width() - 1);
  }
  g.formula.declare_variables(next - 1);
  for (const auto& a : theory.atoms) g.atom_vars[a.name] = g.formula.new_variable();

  g.formula.begin_group("domain");
  for (std::size_t i = 0; i < theory.vars.size(); ++i) {
    for (std::int64_t j = 0; j + 2 < theory.vars[i].width(); ++j) {
      int y = g.order_base[i] + static_cast<int>(j);
      g.formula.add_clause({Literal(y, false), Literal(y + 1, true)});
    }
  }

  detail::Grounder grounder(theory, g);
  std::vector<Literal> guard;
  for (const auto& a : theory.assertions) {
    g.formula.begin_group(a.name);
    g.group_of_assertion[a.name] = a.name;
    grounder.encode(a.body, true, guard);
  }
  for (const auto& a : theory.atoms) {
    g.formula.begin_group("atom:" + a.name);
    Literal lit(g.atom_vars[a.name], true);
    guard.assign(1, lit);
    grounder.encode(a.body, true, guard);
    guard.assign(1, ~lit);
    grounder.encode(a.body, false, guard);
    guard.clear();
  }
  g.formula.close_group();
  return g;
}

// Direct integer evaluation, used by tests and diagnostics.
inline bool holds(const Theory& t, const Expr& e, const std::vector<std::int64_t>& values) {
  using K = Expr::Kind;
  switch (e.kind) {
    case K::kTrue: return true;
    case K::kFalse: return false;
    case K::kNot: return !holds(t, e.children[0], values);
    case K::kAnd:
      for (const auto& c : e.children)
        if (!holds(t, c, values)) return false;
      return true;
    case K::kOr:
      for (const auto& c : e.children)
        if (holds(t, c, values)) return true;
      return false;
    case K::kAtom: {
      const auto& c = t.constraints[e.constraint];
      std::int64_t lhs = 0;
      for (const auto& term : c.terms) lhs += term.coefficient * values[term.var];
      switch (c.relation) {
        case Relation::kLe: return lhs <= c.constant;
        case Relation::kLt: return lhs < c.constant;
        case Relation::kEq: return lhs == c.constant;
        case Relation::kGe: return lhs >= c.constant;
        case Relation::kGt: return lhs > c.constant;
        case Relation::kNe: return lhs != c.constant;
      }
    }
  }
  return false;
}

}  // namespace casecons::lia
