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

// Propositional vocabulary shared by every module: literals, clauses,
// group-tagged CNF formulas, DIMACS I/O and a small-instance model enumerator.

#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace casecons {

// A propositional literal in DIMACS convention: variable ids start at 1 and
// the sign carries the polarity.
class Literal {
 public:
  constexpr Literal() = default;
  constexpr Literal(int variable, bool positive)
      : code_(positive ? variable : -variable) {}

  static Literal from_dimacs(int code) {
    if (code == 0) throw std::invalid_argument("literal 0 is not a literal");
    Literal l;
    l.code_ = code;
    return l;
  }

  constexpr int variable() const { return code_ < 0 ? -code_ : code_; }
  constexpr bool positive() const { return code_ > 0; }
  constexpr int dimacs() const { return code_; }
  constexpr bool valid() const { return code_ != 0; }

  constexpr Literal operator~() const {
    Literal l;
    l.code_ = -code_;
    return l;
  }

  friend constexpr bool operator==(Literal, Literal) = default;
  friend constexpr auto operator<=>(Literal a, Literal b) {
    // Orders by variable first, negative before positive.
    if (a.variable() != b.variable()) return a.variable() <=> b.variable();
    return a.code_ <=> b.code_;
  }

 private:
  int code_ = 0;
};

inline std::string to_string(Literal l) { return std::to_string(l.dimacs()); }

using Clause = std::vector<Literal>;

// Removes duplicate literals (keeping first occurrences) and reports
// tautologies as nullopt.
inline std::optional<Clause> normalize_clause(const Clause& clause) {
  Clause out;
  out.reserve(clause.size());
  for (Literal l : clause) {
    if (std::find(out.begin(), out.end(), ~l) != out.end()) return std::nullopt;
    if (std::find(out.begin(), out.end(), l) == out.end()) out.push_back(l);
  }
  return out;
}

// A named, contiguous range of clauses.
struct ClauseGroup {
  std::string name;
  std::size_t begin = 0;
  std::size_t end = 0;

  friend bool operator==(const ClauseGroup&, const ClauseGroup&) = default;
};

// CNF formula. Groups, when present, partition the clause list in order.
class Formula {
 public:
  Formula() = default;
  explicit Formula(int variable_count) : variable_count_(variable_count) {}

  int variable_count() const { return variable_count_; }
  const std::vector<Clause>& clauses() const { return clauses_; }
  const std::vector<ClauseGroup>& groups() const { return groups_; }

  // Grows the declared vocabulary; never shrinks it.
  void declare_variables(int count) {
    variable_count_ = std::max(variable_count_, count);
  }

  int new_variable() { return ++variable_count_; }

  // Appends a clause after normalization. Tautologies are dropped and the
  // return value says whether the clause was kept.
  bool add_clause(const Clause& clause) {
    for (Literal l : clause) {
      if (!l.valid() || l.variable() > variable_count_) {
        throw std::out_of_range("literal " + to_string(l) +
                                " outside declared variable range");
      }
    }
    auto normalized = normalize_clause(clause);
    if (!normalized) return false;
    clauses_.push_back(std::move(*normalized));
    return true;
  }

  // Opens a new group; clauses added until the next begin_group() belong to
  // it. Clauses added before the first group form an implicit unnamed prefix
  // which callers should avoid when they want a full partition.
  void begin_group(std::string name) {
    close_group();
    groups_.push_back({std::move(name), clauses_.size(), clauses_.size()});
    open_ = true;
  }

  void close_group() {
    if (open_) groups_.back().end = clauses_.size();
    open_ = false;
  }

  // Group containing clause index `i`, or nullptr.
  const ClauseGroup* group_of(std::size_t i) const {
    for (const auto& g : groups_) {
      std::size_t end = (&g == &groups_.back() && open_) ? clauses_.size() : g.end;
      if (i >= g.begin && i < end) return &g;
    }
    return nullptr;
  }

  const ClauseGroup* find_group(std::string_view name) const {
    for (const auto& g : groups_)
      if (g.name == name) return &g;
    return nullptr;
  }

  // True when the groups tile [0, clauses().size()) without gaps.
  bool groups_partition() const {
    if (groups_.empty()) return clauses_.empty();
    std::size_t expect = 0;
    for (std::size_t i = 0; i < groups_.size(); ++i) {
      const auto& g = groups_[i];
      std::size_t end = (i + 1 == groups_.size() && open_) ? clauses_.size() : g.end;
      if (g.begin != expect) return false;
      expect = end;
    }
    return expect == clauses_.size();
  }

  friend bool operator==(const Formula& a, const Formula& b) {
    return a.variable_count_ == b.variable_count_ && a.clauses_ == b.clauses_ &&
           a.sealed_groups() == b.sealed_groups();
  }

  std::vector<ClauseGroup> sealed_groups() const {
    auto gs = groups_;
    if (open_ && !gs.empty()) gs.back().end = clauses_.size();
    return gs;
  }

 private:
  int variable_count_ = 0;
  std::vector<Clause> clauses_;
  std::vector<ClauseGroup> groups_;
  bool open_ = false;
};

// Total assignment over variables 1..n (index 0 unused).
class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(int variable_count) : values_(variable_count + 1, 0) {}

  int variable_count() const { return static_cast<int>(values_.size()) - 1; }
  bool value(int variable) const { return values_.at(variable) != 0; }
  void set(int variable, bool v) { values_.at(variable) = v ? 1 : 0; }
  bool satisfies(Literal l) const { return value(l.variable()) == l.positive(); }

  bool satisfies(const Clause& c) const {
    return std::any_of(c.begin(), c.end(), [&](Literal l) { return satisfies(l); });
  }

  bool satisfies(const Formula& f) const {
    return std::all_of(f.clauses().begin(), f.clauses().end(),
                       [&](const Clause& c) { return satisfies(c); });
  }

  friend bool operator==(const Assignment&, const Assignment&) = default;

 private:
  std::vector<std::uint8_t> values_;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::optional<long long> parse_int(std::string_view tok) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) return std::nullopt;
  return v;
}

}  // namespace detail

// Parses DIMACS CNF. Comment lines of the form `c group <name> <begin> <end>`
// restore clause groups written by emit_dimacs(); all other comments are
// ignored. Clauses may span lines and must be terminated by 0. Clauses are
// normalized on the way in, so tautologies are dropped.
inline Formula parse_dimacs(std::string_view text) {
  bool have_header = false;
  long long declared_vars = 0;
  long long declared_clauses = 0;
  std::vector<ClauseGroup> groups;
  std::vector<Clause> raw;
  Clause current;
  std::size_t line_no = 0;
  std::size_t clause_start_line = 0;
  std::size_t pos = 0;
  bool done = false;
  while (!done && pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    auto toks = detail::split_ws(line);
    if (toks.empty()) continue;
    if (toks[0].front() == 'c') {
      if (toks.size() == 5 && toks[0] == "c" && toks[1] == "group") {
        auto b = detail::parse_int(toks[3]);
        auto e = detail::parse_int(toks[4]);
        if (!b || !e || *b < 0 || *e < *b)
          throw ParseError(line_no, "malformed group comment");
        groups.push_back({std::string(toks[2]), static_cast<std::size_t>(*b),
                          static_cast<std::size_t>(*e)});
      }
      continue;
    }
    if (toks[0] == "p") {
      if (have_header) throw ParseError(line_no, "duplicate problem header");
      if (toks.size() != 4 || toks[1] != "cnf")
        throw ParseError(line_no, "malformed header, expected 'p cnf <vars> <clauses>'");
      auto v = detail::parse_int(toks[2]);
      auto c = detail::parse_int(toks[3]);
      if (!v || !c || *v < 0 || *c < 0)
        throw ParseError(line_no, "malformed header counts");
      have_header = true;
      declared_vars = *v;
      declared_clauses = *c;
      continue;
    }
    if (!have_header) throw ParseError(line_no, "clause before problem header");
    for (auto tok : toks) {
      if (tok == "%") {  // SATLIB trailer
        done = true;
        break;
      }
      auto v = detail::parse_int(tok);
      if (!v) throw ParseError(line_no, "bad literal '" + std::string(tok) + "'");
      if (*v == 0) {
        raw.push_back(std::move(current));
        current.clear();
        continue;
      }
      if (current.empty()) clause_start_line = line_no;
      if (std::llabs(*v) > declared_vars)
        throw ParseError(line_no, "literal " + std::string(tok) +
                                      " out of declared range 1.." +
                                      std::to_string(declared_vars));
      current.push_back(Literal::from_dimacs(static_cast<int>(*v)));
    }
  }
  if (!have_header) throw ParseError(line_no, "missing problem header");
  if (!current.empty())
    throw ParseError(clause_start_line, "missing terminating 0");
  if (static_cast<long long>(raw.size()) != declared_clauses)
    throw ParseError(line_no, "header declares " + std::to_string(declared_clauses) +
                                  " clauses, found " + std::to_string(raw.size()));

  Formula formula(static_cast<int>(declared_vars));
  if (groups.empty()) {
    for (const auto& c : raw) formula.add_clause(c);
    return formula;
  }
  std::size_t next = 0;
  for (const auto& g : groups) {
    if (g.begin != next || g.end > raw.size())
      throw ParseError(line_no, "group '" + g.name + "' does not tile the clause list");
    formula.begin_group(g.name);
    for (std::size_t i = g.begin; i < g.end; ++i) formula.add_clause(raw[i]);
    next = g.end;
  }
  formula.close_group();
  if (next != raw.size()) throw ParseError(line_no, "groups do not cover every clause");
  return formula;
}

// Writes DIMACS CNF, preceded by a comment block describing clause groups.
inline std::string emit_dimacs(const Formula& f) {
  std::ostringstream out;
  for (const auto& g : f.sealed_groups())
    out << "c group " << g.name << ' ' << g.begin << ' ' << g.end << '\n';
  out << "p cnf " << f.variable_count() << ' ' << f.clauses().size() << '\n';
  for (const auto& c : f.clauses()) {
    for (Literal l : c) out << l.dimacs() << ' ';
    out << "0\n";
  }
  return out.str();
}

struct ModelEnumeration {
  std::vector<Assignment> models;
  bool overflow = false;
};

inline constexpr int kEnumerationVariableLimit = 24;

// Enumerates satisfying total assignments in lexicographic order (variable 1
// most significant, false before true) by backtracking with clause checks at
// each clause's highest variable. Stops after `cap` models and sets overflow
// when more exist.
inline ModelEnumeration enumerate_models(const Formula& f, std::size_t cap) {
  const int n = f.variable_count();
  if (n > kEnumerationVariableLimit)
    throw std::length_error("enumerate_models: " + std::to_string(n) +
                            " variables exceeds the guard of " +
                            std::to_string(kEnumerationVariableLimit));
  ModelEnumeration result;
  std::vector<std::vector<const Clause*>> closing(n + 1);
  for (const auto& c : f.clauses()) {
    if (c.empty()) return result;
    int top = 0;
    for (Literal l : c) top = std::max(top, l.variable());
    closing[top].push_back(&c);
  }
  Assignment a(n);
  auto consistent = [&](int v) {
    for (const Clause* c : closing[v])
      if (!a.satisfies(*c)) return false;
    return true;
  };
  // Iterative DFS over variables 1..n.
  std::vector<int> state(n + 2, -1);  // -1 untried, 0 tried false, 1 tried true
  int v = 1;
  if (n == 0) {
    if (cap == 0) result.overflow = true;
    else result.models.push_back(a);
    return result;
  }
  while (v >= 1) {
    if (state[v] == 1) {
      state[v] = -1;
      --v;
      continue;
    }
    state[v] += 1;
    a.set(v, state[v] == 1);
    if (!consistent(v)) continue;
    if (v == n) {
      if (result.models.size() == cap) {
        result.overflow = true;
        return result;
      }
      result.models.push_back(a);
      continue;
    }
    ++v;
  }
  return result;
}

}  // namespace casecons
