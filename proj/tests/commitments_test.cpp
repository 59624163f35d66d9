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


#include "casecons/commitments.hpp"

#include <gtest/gtest.h>

#include <random>

#include "test_util.hpp"

using namespace casecons;

namespace {

SolverOptions opts() { return SolverOptions::test_mode(); }

Commitment entail(const std::string& id, Literal chi, std::vector<Literal> derived = {}) {
  return extract_commitment(id, chi, Label::kEntailed, derived);
}

TEST(ExtractTest, LabelMapping) {
  Literal x3(3, true);
  auto e = extract_commitment("q", x3, Label::kEntailed);
  EXPECT_EQ(e.literals, std::vector<Literal>{x3});
  auto c = extract_commitment("q", x3, Label::kContradicted);
  EXPECT_EQ(c.literals, std::vector<Literal>{~x3});
  auto u = extract_commitment("q", x3, Label::kUnknown, {Literal(5, true)});
  EXPECT_TRUE(u.asserts_nothing());
  EXPECT_EQ(u.undetermined, x3);
  auto d = extract_commitment("q", x3, Label::kEntailed, {Literal(5, true), x3, Literal(5, true)});
  EXPECT_EQ(d.literals, (std::vector<Literal>{x3, Literal(5, true)}));
  EXPECT_EQ(d.derived_count(), 1u);
}

TEST(ExtractTest, DropsOutOfVocabularyAtoms) {
  CaseFile cf;
  cf.id = "c";
  cf.premises.text = "p cnf 5 0\n";
  cf.premises.atom_names = {{"x3", 3}, {"x5", 5}};
  cf.queries.push_back({"q1", "", "x3", Label::kUnknown, {}, Json::object()});
  CompiledCase cc = compile(cf);
  std::vector<std::string> warnings;
  auto c = extract_commitment(cf, cc, 0, Label::kEntailed, {"x5", "martian", "-x5"},
                              Origin::kReplay, &warnings);
  EXPECT_EQ(c.literals, (std::vector<Literal>{Literal(3, true), Literal(5, true), Literal(5, false)}));
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_NE(warnings[0].find("martian"), std::string::npos);
}

TEST(BeliefStateTest, AcceptAndViolate) {
  Formula base = parse_dimacs("p cnf 1 1\n1 0\n");
  BeliefState s(base, opts());
  EXPECT_EQ(s.append_and_check(entail("q1", Literal(1, true))), BeliefState::Outcome::kAccepted);
  EXPECT_EQ(s.solver_calls(), 1u);
  EXPECT_EQ(s.append_and_check(entail("q2", Literal(1, false))), BeliefState::Outcome::kViolation);
  EXPECT_EQ(s.solver_calls(), 2u);
  EXPECT_EQ(s.size(), 1u);
  ASSERT_TRUE(s.pending().has_value());
  EXPECT_EQ(s.pending()->query_id, "q2");
}

TEST(BeliefStateTest, TimeoutFallsBackToUnknown) {
  // Pigeonhole 7 into 6 behind one literal: refuting it needs many conflicts.
  const int holes = 6, pigeons = 7, g = pigeons * holes + 1;
  Formula f(g);
  auto v = [&](int p, int h) { return p * holes + h + 1; };
  for (int p = 0; p < pigeons; ++p) {
    Clause c{Literal(g, false)};
    for (int h = 0; h < holes; ++h) c.emplace_back(v(p, h), true);
    f.add_clause(c);
  }
  for (int h = 0; h < holes; ++h)
    for (int p = 0; p < pigeons; ++p)
      for (int q = p + 1; q < pigeons; ++q)
        f.add_clause({Literal(g, false), Literal(v(p, h), false), Literal(v(q, h), false)});
  BeliefState s(f, SolverOptions::test_mode(10));
  EXPECT_EQ(s.append_and_check(entail("q1", Literal(g, true))),
            BeliefState::Outcome::kTimeoutFallback);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_TRUE(s.entries()[0].commitment.asserts_nothing());
  EXPECT_EQ(s.events().size(), 1u);
}

TEST(BeliefStateTest, SchedulingViolation) {
  auto cases = load_corpus(std::string(CASECONS_DATA_DIR) + "/scheduling_case.jsonl");
  const CaseFile& cf = cases.at(0);
  CompiledCase cc = compile(cf);
  BeliefState s(cc.base, opts());
  auto q = [&](std::size_t i, Label l) { return extract_commitment(cf, cc, i, l); };
  EXPECT_EQ(s.append_and_check(q(0, Label::kEntailed)), BeliefState::Outcome::kAccepted);
  EXPECT_EQ(s.append_and_check(q(1, Label::kEntailed)), BeliefState::Outcome::kAccepted);
  EXPECT_EQ(s.append_and_check(q(2, Label::kContradicted)), BeliefState::Outcome::kAccepted);
  EXPECT_EQ(s.append_and_check(q(3, Label::kUnknown)), BeliefState::Outcome::kAccepted);
  auto q5 = q(4, Label::kEntailed);
  EXPECT_EQ(s.append_and_check(q5), BeliefState::Outcome::kViolation);
  CallBudget budget;
  auto core = s.unsat_core(q5, budget);
  EXPECT_TRUE(core.minimal);
  EXPECT_EQ(core.members, (std::vector<std::size_t>{1, UnsatCore::kCurrent}));
}

TEST(UnsatCoreTest, PairwiseConflict) {
  BeliefState s(Formula(2), opts());
  s.append_and_check(entail("q1", Literal(1, true)));
  s.append_and_check(entail("q2", Literal(2, true)));
  auto psi = entail("q3", Literal(1, false));
  ASSERT_EQ(s.append_and_check(psi), BeliefState::Outcome::kViolation);
  CallBudget budget;
  auto core = s.unsat_core(psi, budget);
  EXPECT_EQ(core.members, (std::vector<std::size_t>{0, UnsatCore::kCurrent}));
  EXPECT_TRUE(core.minimal);
}

TEST(UnsatCoreTest, BudgetExhaustionIsFlagged) {
  // Every member of a 3-way conflict needs a deletion test.
  Formula base = parse_dimacs("p cnf 3 1\n-1 -2 -3 0\n");
  BeliefState s(base, opts());
  s.append_and_check(entail("q0", Literal(3, true)));
  s.append_and_check(entail("q1", Literal(1, true)));
  auto psi = entail("q2", Literal(2, true));
  ASSERT_EQ(s.append_and_check(psi), BeliefState::Outcome::kViolation);
  CallBudget none{0, 0};
  auto core = s.unsat_core(psi, none);
  EXPECT_FALSE(core.minimal);
  EXPECT_TRUE(core.includes_current());
}

// Builds the conjunction of base and a subset of commitments for the oracle.
bool conj_sat(const Formula& base, const std::vector<const Commitment*>& cs) {
  Formula f = base;
  for (const auto* c : cs)
    for (Literal l : c->literals) f.add_clause({l});
  return oracle::truth_table_sat(f);
}

TEST(UnsatCoreTest, RandomCoresAreMinimalAndPrefixMatchesRebuild) {
  std::mt19937_64 rng(41);
  int violations = 0;
  for (int round = 0; round < 300; ++round) {
    Formula base = oracle::random_cnf(rng, 8, 6, 3);
    if (!oracle::truth_table_sat(base)) continue;
    BeliefState s(base, opts());
    std::vector<Commitment> log;
    bool unsat_seen = false;
    for (int t = 0; t < 8; ++t) {
      std::vector<Literal> derived;
      if (rng() % 3 == 0) derived.emplace_back(1 + static_cast<int>(rng() % 8), (rng() & 1) != 0);
      Label l = static_cast<Label>(rng() % 3);
      auto psi = extract_commitment("q" + std::to_string(t), Literal(1 + static_cast<int>(rng() % 8), true),
                                    l, derived);
      auto outcome = s.append_and_check(psi);
      // Incremental verdict equals a fresh rebuild.
      std::vector<const Commitment*> all;
      for (const auto& e : s.entries()) all.push_back(&e.commitment);
      all.push_back(&psi);
      ASSERT_EQ(outcome == BeliefState::Outcome::kAccepted, conj_sat(base, all));
      if (outcome != BeliefState::Outcome::kViolation) continue;
      unsat_seen = true;
      ++violations;
      CallBudget budget;
      auto core = s.unsat_core(psi, budget);
      std::vector<const Commitment*> members;
      for (auto m : core.members)
        members.push_back(m == UnsatCore::kCurrent ? &psi : &s.entries()[m].commitment);
      ASSERT_FALSE(conj_sat(base, members));
      for (const auto* c : members) EXPECT_FALSE(c->asserts_nothing());
      if (core.minimal) {
        for (std::size_t i = 0; i < members.size(); ++i) {
          auto rest = members;
          rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
          EXPECT_TRUE(conj_sat(base, rest));
        }
      }
      // Without repair the caller reverts to Unknown and continues.
      Commitment unk = psi;
      unk.label = Label::kUnknown;
      unk.literals.clear();
      s.push(unk);
    }
    (void)unsat_seen;
  }
  EXPECT_GT(violations, 50);
}

TEST(BeliefStateTest, MonotonePrefixWithoutRepair) {
  std::mt19937_64 rng(8);
  for (int round = 0; round < 100; ++round) {
    Formula base = oracle::random_cnf(rng, 6, 4, 3);
    if (!oracle::truth_table_sat(base)) continue;
    BeliefState s(base, opts());
    bool unsat = false;
    for (int t = 0; t < 8; ++t) {
      s.push(extract_commitment("q", Literal(1 + static_cast<int>(rng() % 6), true),
                                static_cast<Label>(rng() % 3)));
      bool sat = s.check().status == SolveStatus::kSat;
      if (unsat) {
        EXPECT_FALSE(sat);
      }
      unsat = unsat || !sat;
    }
  }
}

TEST(BeliefStateTest, RetractionMatchesFreshState) {
  BeliefState s(Formula(2), opts());
  s.append_and_check(entail("q1", Literal(1, true)));
  s.append_and_check(entail("q2", Literal(2, true)));
  s.retract(0);
  auto r = s.check(nullptr);
  ASSERT_EQ(r.status, SolveStatus::kSat);
  Formula retained = s.retained_formula();
  EXPECT_EQ(retained.clauses().size(), 1u);
  auto fresh = enumerate_models(retained, 16);
  EXPECT_EQ(fresh.models.size(), 2u);
  auto other = entail("q3", Literal(1, false));
  EXPECT_EQ(s.append_and_check(other), BeliefState::Outcome::kAccepted);
}

}  // namespace
