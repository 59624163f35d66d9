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


#include "casecons/lia.hpp"

#include <gtest/gtest.h>

#include <functional>
#include <random>
#include <sstream>

#include "casecons/solver.hpp"

using namespace casecons;

namespace {

SolveStatus solve_text(const std::string& text) {
  auto g = lia::ground(lia::parse_theory(text));
  Solver s(g.formula, SolverOptions::test_mode());
  return s.solve().status;
}

TEST(LiaParseTest, Declarations) {
  auto t = lia::parse_theory("(declare-int x 0 3)\n(declare-int y -2 2)\n");
  ASSERT_EQ(t.vars.size(), 2u);
  EXPECT_EQ(t.vars[1].lower, -2);
  EXPECT_EQ(t.find_var("y"), 1);
  EXPECT_EQ(t.find_var("z"), -1);
}

TEST(LiaParseTest, RejectsBadInput) {
  EXPECT_THROW(lia::parse_theory("(declare-const x Int)"), ParseError);
  EXPECT_THROW(lia::parse_theory("(declare-int x 0 3)\n(assert (<= y 2))"), ParseError);
  EXPECT_THROW(lia::parse_theory("(declare-int x 0 3)\n(assert (<= (* x x) 2))"), ParseError);
  EXPECT_THROW(lia::parse_theory("(declare-int x 3 0)"), ParseError);
  EXPECT_THROW(lia::parse_theory("(declare-int x 0 3)\n(assert (<= x 2)"), ParseError);
  EXPECT_THROW(lia::parse_theory("(declare-int x 0 3)\n(assert (! (<= x 2) :named a))\n"
                                 "(define-atom a (>= x 1))"),
               ParseError);
  try {
    lia::parse_theory("(declare-int x 0 3)\n\n(assert (<= w 1))");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(LiaParseTest, LinearNormalization) {
  auto t = lia::parse_theory(
      "(declare-int x 0 5)(declare-int y 0 5)\n"
      "(assert (<= (+ x (* 2 y) 3) (- y 1)))");
  ASSERT_EQ(t.constraints.size(), 1u);
  const auto& c = t.constraints[0];
  ASSERT_EQ(c.terms.size(), 2u);
  EXPECT_EQ(c.terms[0].coefficient, 1);
  EXPECT_EQ(c.terms[1].coefficient, 1);
  EXPECT_EQ(c.constant, -4);
}

TEST(LiaGroundTest, ContradictoryEqualities) {
  EXPECT_EQ(solve_text("(declare-int x 0 1)\n(assert (= x 0))\n(assert (= x 1))"),
            SolveStatus::kUnsat);
  EXPECT_EQ(solve_text("(declare-int x 0 1)\n(assert (= x 0))"), SolveStatus::kSat);
}

TEST(LiaGroundTest, SumBound) {
  const char* base = "(declare-int x 0 3)(declare-int y 0 3)(assert (<= (+ x y) 4))";
  EXPECT_EQ(solve_text(std::string(base) + "(assert (>= x 2))(assert (>= y 2))"),
            SolveStatus::kSat);
  EXPECT_EQ(solve_text(std::string(base) + "(assert (>= x 3))(assert (>= y 2))"),
            SolveStatus::kUnsat);
}

TEST(LiaGroundTest, GroupsAreNamed) {
  auto g = lia::ground(lia::parse_theory(
      "(declare-int x 0 3)\n(assert (! (<= x 2) :named cap))\n(assert (>= x 1))\n"
      "(define-atom big (>= x 3))"));
  EXPECT_TRUE(g.formula.groups_partition());
  EXPECT_NE(g.formula.find_group("domain"), nullptr);
  EXPECT_NE(g.formula.find_group("cap"), nullptr);
  EXPECT_NE(g.formula.find_group("assert_2"), nullptr);
  EXPECT_NE(g.formula.find_group("atom:big"), nullptr);
  ASSERT_TRUE(g.atom_literal("big").has_value());
  Solver s(g.formula, SolverOptions::test_mode());
  EXPECT_EQ(s.solve({*g.atom_literal("big")}).status, SolveStatus::kUnsat);
  EXPECT_EQ(s.solve({~*g.atom_literal("big")}).status, SolveStatus::kSat);
}

TEST(LiaGroundTest, DomainWidthGuard) {
  auto t = lia::parse_theory("(declare-int x 0 100)");
  EXPECT_THROW(lia::ground(t), lia::GroundingError);
  lia::GroundOptions wide;
  wide.max_domain_width = 128;
  EXPECT_NO_THROW(lia::ground(t, wide));
}

TEST(LiaGroundTest, RoundTripsThroughDimacs) {
  auto g = lia::ground(lia::parse_theory(
      "(declare-int x 0 4)(declare-int y 0 4)(assert (! (distinct x y) :named ne))"));
  Formula back = parse_dimacs(emit_dimacs(g.formula));
  EXPECT_EQ(back, g.formula);
}

// Random instances described as plain data, printed to text and checked
// against brute force over the integer domains.
struct RandomConstraint {
  std::vector<std::pair<int, int>> terms;  // (coefficient, var)
  std::string rel;
  int constant;
};

struct RandomTheory {
  std::vector<std::pair<int, int>> domains;
  std::vector<RandomConstraint> constraints;
  // Each assertion: either a single constraint, or a disjunction/negation.
  std::vector<std::pair<std::string, std::vector<int>>> assertions;
};

bool eval(const RandomConstraint& c, const std::vector<int>& v) {
  long lhs = 0;
  for (auto [a, x] : c.terms) lhs += static_cast<long>(a) * v[x];
  if (c.rel == "<=") return lhs <= c.constant;
  if (c.rel == "<") return lhs < c.constant;
  if (c.rel == "=") return lhs == c.constant;
  if (c.rel == ">=") return lhs >= c.constant;
  if (c.rel == ">") return lhs > c.constant;
  return lhs != c.constant;
}

bool eval(const RandomTheory& t, const std::vector<int>& v) {
  for (const auto& [op, cs] : t.assertions) {
    bool val;
    if (op == "or") {
      val = false;
      for (int i : cs) val = val || eval(t.constraints[i], v);
    } else if (op == "not") {
      val = !eval(t.constraints[cs[0]], v);
    } else {
      val = true;
      for (int i : cs) val = val && eval(t.constraints[i], v);
    }
    if (!val) return false;
  }
  return true;
}

std::string render(const RandomConstraint& c) {
  std::ostringstream out;
  std::string rel = c.rel == "!=" ? "distinct" : c.rel;
  out << "(" << rel << " (+";
  for (auto [a, x] : c.terms) out << " (* " << a << " x" << x << ")";
  out << ") " << c.constant << ")";
  return out.str();
}

std::string render(const RandomTheory& t) {
  std::ostringstream out;
  for (std::size_t i = 0; i < t.domains.size(); ++i)
    out << "(declare-int x" << i << " " << t.domains[i].first << " " << t.domains[i].second
        << ")\n";
  for (const auto& [op, cs] : t.assertions) {
    out << "(assert (" << op;
    for (int i : cs) out << " " << render(t.constraints[i]);
    out << "))\n";
  }
  return out.str();
}

RandomTheory random_theory(std::mt19937_64& rng) {
  static const char* rels[] = {"<=", "<", "=", ">=", ">", "!="};
  RandomTheory t;
  int vars = 1 + static_cast<int>(rng() % 3);
  for (int i = 0; i < vars; ++i) {
    int lo = static_cast<int>(rng() % 7) - 3;
    t.domains.push_back({lo, lo + static_cast<int>(rng() % 6)});
  }
  int constraints = 1 + static_cast<int>(rng() % 4);
  for (int i = 0; i < constraints; ++i) {
    RandomConstraint c;
    for (int x = 0; x < vars; ++x) {
      if (x > 0 && rng() % 3 == 0) continue;
      int a = static_cast<int>(rng() % 7) - 3;
      if (a == 0) a = 1;
      c.terms.push_back({a, x});
    }
    c.rel = rels[rng() % 6];
    c.constant = static_cast<int>(rng() % 15) - 7;
    t.constraints.push_back(c);
  }
  for (int i = 0; i < constraints;) {
    int kind = static_cast<int>(rng() % 4);
    if (kind == 0 && i + 1 < constraints) {
      t.assertions.push_back({"or", {i, i + 1}});
      i += 2;
    } else if (kind == 1) {
      t.assertions.push_back({"not", {i}});
      ++i;
    } else {
      t.assertions.push_back({"and", {i}});
      ++i;
    }
  }
  return t;
}

void for_each_point(const RandomTheory& t, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> v;
  for (auto [lo, hi] : t.domains) v.push_back(lo);
  for (;;) {
    fn(v);
    std::size_t i = 0;
    while (i < v.size() && v[i] == t.domains[i].second) {
      v[i] = t.domains[i].first;
      ++i;
    }
    if (i == v.size()) return;
    ++v[i];
  }
}

TEST(LiaGroundTest, RandomAgainstBruteForce) {
  std::mt19937_64 rng(17);
  for (int round = 0; round < 300; ++round) {
    RandomTheory rt = random_theory(rng);
    std::string text = render(rt);
    auto g = lia::ground(lia::parse_theory(text));
    Solver s(g.formula, SolverOptions::test_mode());
    bool expected = false;
    for_each_point(rt, [&](const std::vector<int>& v) {
      bool holds = eval(rt, v);
      expected = expected || holds;
      // Pin every variable to v via its order literals.
      std::vector<Literal> pin;
      for (std::size_t x = 0; x < v.size(); ++x) {
        if (auto l = g.order_literal(static_cast<int>(x), v[x])) pin.push_back(*l);
        if (auto l = g.order_literal(static_cast<int>(x), v[x] - 1)) pin.push_back(~*l);
      }
      EXPECT_EQ(s.solve(pin).status == SolveStatus::kSat, holds) << text;
    });
    auto r = s.solve();
    ASSERT_EQ(r.status == SolveStatus::kSat, expected) << text;
    if (expected) {
      auto decoded = g.decode(r.model);
      std::vector<int> v(decoded.begin(), decoded.end());
      EXPECT_TRUE(eval(rt, v)) << text;
    }
  }
}

TEST(LiaGroundTest, ReifiedAtomsMatchEvaluation) {
  std::mt19937_64 rng(23);
  for (int round = 0; round < 100; ++round) {
    RandomTheory rt = random_theory(rng);
    std::ostringstream text;
    for (std::size_t i = 0; i < rt.domains.size(); ++i)
      text << "(declare-int x" << i << " " << rt.domains[i].first << " "
           << rt.domains[i].second << ")\n";
    text << "(define-atom q " << render(rt.constraints[0]) << ")\n";
    auto g = lia::ground(lia::parse_theory(text.str()));
    Solver s(g.formula, SolverOptions::test_mode());
    Literal q = *g.atom_literal("q");
    for_each_point(rt, [&](const std::vector<int>& v) {
      std::vector<Literal> pin;
      for (std::size_t x = 0; x < v.size(); ++x) {
        if (auto l = g.order_literal(static_cast<int>(x), v[x])) pin.push_back(*l);
        if (auto l = g.order_literal(static_cast<int>(x), v[x] - 1)) pin.push_back(~*l);
      }
      pin.push_back(eval(rt.constraints[0], v) ? q : ~q);
      EXPECT_EQ(s.solve(pin).status, SolveStatus::kSat) << text.str();
      pin.back() = ~pin.back();
      EXPECT_EQ(s.solve(pin).status, SolveStatus::kUnsat) << text.str();
    });
  }
}

}  // namespace
