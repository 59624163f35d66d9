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


#include "casecons/repair.hpp"

#include <gtest/gtest.h>

#include <random>

#include "test_util.hpp"

using namespace casecons;

namespace {

SolverOptions opts() { return SolverOptions::test_mode(); }

Commitment commit(const std::string& id, Label l, Literal chi, std::vector<Literal> derived = {}) {
  return extract_commitment(id, chi, l, derived);
}

bool conj_sat(const Formula& base, const std::vector<const Commitment*>& cs) {
  Formula f = base;
  for (const auto* c : cs)
    for (Literal l : c->literals) f.add_clause({l});
  return oracle::truth_table_sat(f);
}

// Brute-force minimum retraction over all subsets.
int brute_revision(const Formula& base, const std::vector<Commitment>& cs) {
  int best = static_cast<int>(cs.size());
  for (std::uint32_t mask = 0; mask < (1u << cs.size()); ++mask) {
    std::vector<const Commitment*> kept;
    int removed = 0;
    for (std::size_t i = 0; i < cs.size(); ++i) {
      if (mask & (1u << i)) ++removed;
      else kept.push_back(&cs[i]);
    }
    if (removed < best && conj_sat(base, kept)) best = removed;
  }
  return best;
}

TEST(ProposeTest, CandidateOrder) {
  BeliefState s(Formula(5), opts());
  s.append_and_check(commit("q1", Label::kEntailed, Literal(1, true)));
  s.append_and_check(commit("q2", Label::kEntailed, Literal(2, true)));
  auto psi = commit("q3", Label::kEntailed, Literal(3, true), {Literal(1, false), Literal(5, true)});
  UnsatCore core{{0, UnsatCore::kCurrent}, true};
  auto c = propose_repairs(s, psi, core);
  ASSERT_EQ(c.size(), 5u);
  EXPECT_EQ(c[0].kind, RepairKind::kFlip);
  EXPECT_EQ(c[0].revised.label, Label::kUnknown);
  EXPECT_EQ(c[0].cost, (CostTriple{0, 1, 0}));
  EXPECT_EQ(c[1].revised.label, Label::kContradicted);
  EXPECT_EQ(c[1].revised.literals, std::vector<Literal>{Literal(3, false)});
  EXPECT_EQ(c[2].kind, RepairKind::kSoften);
  EXPECT_EQ(c[2].dropped, std::vector<Literal>{Literal(5, true)});
  EXPECT_EQ(c[3].dropped, (std::vector<Literal>{Literal(5, true), Literal(1, false)}));
  EXPECT_EQ(c[3].revised.literals, std::vector<Literal>{Literal(3, true)});
  EXPECT_EQ(c[3].cost, (CostTriple{0, 0, 1}));
  EXPECT_EQ(c[4].kind, RepairKind::kRetract);
  EXPECT_EQ(c[4].retracted, std::vector<std::size_t>{0});
  EXPECT_EQ(c[4].cost, (CostTriple{1, 0, 3}));
}

TEST(ProposeTest, NoSoftenWithoutDerivedAtoms) {
  BeliefState s(Formula(2), opts());
  s.append_and_check(commit("q1", Label::kEntailed, Literal(1, true)));
  auto psi = commit("q2", Label::kEntailed, Literal(1, false));
  UnsatCore core{{0, UnsatCore::kCurrent}, true};
  auto c = propose_repairs(s, psi, core);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c[0].revised.label, Label::kUnknown);
  EXPECT_EQ(c[1].revised.label, Label::kContradicted);
  EXPECT_EQ(c[2].kind, RepairKind::kRetract);
}

TEST(AttemptRepairTest, ForcedFlipToUnknown) {
  BeliefState s(parse_dimacs("p cnf 1 1\n1 0\n"), opts());
  auto psi = commit("q1", Label::kEntailed, Literal(1, false));
  ASSERT_EQ(s.append_and_check(psi), BeliefState::Outcome::kViolation);
  CallBudget calls;
  auto core = s.unsat_core(psi, calls);
  auto out = attempt_repair(s, psi, core, RepairBudget{}, calls);
  ASSERT_EQ(out.result, RepairOutcome::Result::kRepaired);
  EXPECT_EQ(out.accepted->cost, (CostTriple{0, 1, 0}));
  EXPECT_EQ(s.entries().back().commitment.label, Label::kUnknown);
  EXPECT_EQ(Solver(s.retained_formula(), opts()).solve().status, SolveStatus::kSat);
}

TEST(AttemptRepairTest, SoftenKeepsQueriedAtom) {
  BeliefState s(parse_dimacs("p cnf 5 1\n-5 0\n"), opts());
  auto psi = commit("q1", Label::kEntailed, Literal(3, true), {Literal(5, true)});
  ASSERT_EQ(s.append_and_check(psi), BeliefState::Outcome::kViolation);
  CallBudget calls;
  auto core = s.unsat_core(psi, calls);
  auto out = attempt_repair(s, psi, core, RepairBudget{}, calls);
  ASSERT_EQ(out.result, RepairOutcome::Result::kRepaired);
  EXPECT_EQ(out.accepted->kind, RepairKind::kSoften);
  EXPECT_EQ(out.committed.literals, std::vector<Literal>{Literal(3, true)});
  EXPECT_EQ(out.committed.label, Label::kEntailed);
}

TEST(AttemptRepairTest, RetractionWhenFlipsDisabled) {
  BeliefState s(Formula(3), opts());
  s.append_and_check(commit("q1", Label::kEntailed, Literal(1, true)));
  s.append_and_check(commit("q2", Label::kEntailed, Literal(2, true)));
  auto psi = commit("q3", Label::kContradicted, Literal(2, true));
  ASSERT_EQ(s.append_and_check(psi), BeliefState::Outcome::kViolation);
  CallBudget calls;
  auto core = s.unsat_core(psi, calls);
  RepairPolicy retract_only{false, false, true};
  auto out = attempt_repair(s, psi, core, RepairBudget{}, calls, retract_only);
  ASSERT_EQ(out.result, RepairOutcome::Result::kRepaired);
  EXPECT_EQ(out.accepted->cost.delta_past, 1);
  EXPECT_EQ(out.accepted->retracted, std::vector<std::size_t>{1});
  EXPECT_FALSE(s.entries()[1].active);
  EXPECT_EQ(Solver(s.retained_formula(), opts()).solve().status, SolveStatus::kSat);
}

TEST(AttemptRepairTest, LargeRetractionIsPartial) {
  // x1..x4 each committed, premises say at most zero of them: a conflict
  // that needs all four past commitments retracted once flips are off.
  Formula base = parse_dimacs("p cnf 5 4\n-1 -5 0\n-2 -5 0\n-3 -5 0\n-4 -5 0\n");
  BeliefState s(base, opts());
  for (int v = 1; v <= 4; ++v)
    s.append_and_check(commit("q" + std::to_string(v), Label::kEntailed, Literal(v, true)));
  auto psi = commit("q5", Label::kEntailed, Literal(5, true));
  ASSERT_EQ(s.append_and_check(psi), BeliefState::Outcome::kViolation);
  CallBudget calls;
  auto core = s.unsat_core(psi, calls);
  EXPECT_EQ(core.members.size(), 2u);
  RepairBudget budget;
  budget.r_max = 100;
  auto out = attempt_repair(s, psi, core, budget, calls, RepairPolicy{false, false, true});
  EXPECT_EQ(out.result, RepairOutcome::Result::kPartial);
  EXPECT_EQ(out.tried.back().cost.delta_past, 4);
  EXPECT_EQ(s.entries().back().commitment.label, Label::kUnknown);
  EXPECT_EQ(Solver(s.retained_formula(), opts()).solve().status, SolveStatus::kSat);
}

TEST(AttemptRepairTest, RespectsVerificationLimit) {
  Formula base = parse_dimacs("p cnf 5 4\n-1 -5 0\n-2 -5 0\n-3 -5 0\n-4 -5 0\n");
  BeliefState s(base, opts());
  for (int v = 1; v <= 4; ++v)
    s.append_and_check(commit("q" + std::to_string(v), Label::kEntailed, Literal(v, true)));
  auto psi = commit("q5", Label::kEntailed, Literal(5, true));
  s.append_and_check(psi);
  CallBudget calls;
  auto core = s.unsat_core(psi, calls);
  auto out = attempt_repair(s, psi, core, RepairBudget{}, calls, RepairPolicy{false, false, true});
  EXPECT_EQ(out.result, RepairOutcome::Result::kFallback);
  EXPECT_EQ(out.tried.size(), 2u);
}

TEST(AttemptRepairTest, CallBudgetStopsRepair) {
  BeliefState s(Formula(3), opts());
  s.append_and_check(commit("q1", Label::kEntailed, Literal(1, true)));
  auto psi = commit("q2", Label::kEntailed, Literal(1, false));
  s.append_and_check(psi);
  CallBudget calls{0, 0};
  auto core = s.unsat_core(psi, calls);
  auto out = attempt_repair(s, psi, core, RepairBudget{}, calls, RepairPolicy{false, false, true});
  EXPECT_EQ(out.result, RepairOutcome::Result::kFallback);
  EXPECT_EQ(out.solver_calls, 0u);
  EXPECT_EQ(s.entries().back().commitment.label, Label::kUnknown);
}

// With a large verification budget the accepted repair is no more costly
// than any satisfiable enumerated candidate.
TEST(AttemptRepairTest, ObjectiveOptimality) {
  std::mt19937_64 rng(77);
  int repaired = 0;
  for (int round = 0; round < 300; ++round) {
    Formula base = oracle::random_cnf(rng, 6, 5, 3);
    if (!oracle::truth_table_sat(base)) continue;
    BeliefState s(base, opts());
    RepairPolicy policy{rng() % 4 != 0, rng() % 2 == 0, true};
    for (int t = 0; t < 6; ++t) {
      std::vector<Literal> derived;
      if (rng() % 2 == 0) derived.emplace_back(1 + static_cast<int>(rng() % 6), (rng() & 1) != 0);
      auto psi = commit("q" + std::to_string(t), static_cast<Label>(rng() % 2),
                        Literal(1 + static_cast<int>(rng() % 6), true), derived);
      if (s.append_and_check(psi) != BeliefState::Outcome::kViolation) continue;
      CallBudget calls;
      auto core = s.unsat_core(psi, calls);
      auto candidates = propose_repairs(s, psi, core, policy);
      std::optional<CostTriple> best;
      for (const auto& c : candidates) {
        std::vector<const Commitment*> kept;
        for (std::size_t i = 0; i < s.size(); ++i)
          if (s.entries()[i].active &&
              std::find(c.retracted.begin(), c.retracted.end(), i) == c.retracted.end())
            kept.push_back(&s.entries()[i].commitment);
        kept.push_back(&c.revised);
        if (conj_sat(base, kept) && (!best || c.cost < *best)) best = c.cost;
      }
      RepairBudget budget;
      budget.r_max = 1000;
      budget.delta_past_max = 1000;
      auto out = attempt_repair(s, psi, core, budget, calls, policy);
      if (best) {
        ASSERT_EQ(out.result, RepairOutcome::Result::kRepaired);
        EXPECT_LE(out.accepted->cost, *best);
        ++repaired;
      } else {
        EXPECT_NE(out.result, RepairOutcome::Result::kPartial);
      }
      std::vector<const Commitment*> retained;
      for (const auto& e : s.entries())
        if (e.active) retained.push_back(&e.commitment);
      EXPECT_TRUE(conj_sat(base, retained));
    }
  }
  EXPECT_GT(repaired, 30);
}

TEST(FilteredVoteTest, PlainMajority) {
  BeliefState s(Formula(2), opts());
  Literal x(1, true);
  auto v = logic_filtered_vote(s, {commit("q", Label::kEntailed, x), commit("q", Label::kEntailed, x),
                                   commit("q", Label::kContradicted, x)});
  EXPECT_EQ(v.label, Label::kEntailed);
  EXPECT_EQ(v.solver_calls, 2u);
}

TEST(FilteredVoteTest, ViolatingSamplesAreFiltered) {
  BeliefState s(parse_dimacs("p cnf 1 1\n-1 0\n"), opts());
  Literal x(1, true);
  auto v = logic_filtered_vote(s, {commit("q", Label::kEntailed, x), commit("q", Label::kEntailed, x),
                                   commit("q", Label::kContradicted, x)});
  EXPECT_EQ(v.label, Label::kContradicted);
  EXPECT_EQ(v.commitment.literals, std::vector<Literal>{~x});
}

TEST(FilteredVoteTest, TiesAndEmptySurvivorsGiveUnknown) {
  BeliefState s(parse_dimacs("p cnf 2 1\n-1 0\n"), opts());
  Literal x(2, true);
  EXPECT_EQ(logic_filtered_vote(s, {commit("q", Label::kEntailed, x),
                                    commit("q", Label::kContradicted, x)})
                .label,
            Label::kUnknown);
  EXPECT_EQ(logic_filtered_vote(s, {commit("q", Label::kEntailed, Literal(1, true))}).label,
            Label::kUnknown);
}

TEST(RevisionCostTest, SmallCases) {
  Formula base(3);
  EXPECT_EQ(min_revision_cost(base, {commit("a", Label::kEntailed, Literal(1, true))}).cost, 0);
  std::vector<Commitment> pair = {commit("a", Label::kEntailed, Literal(1, true)),
                                  commit("b", Label::kEntailed, Literal(2, true)),
                                  commit("c", Label::kContradicted, Literal(1, true))};
  auto r = min_revision_cost(base, pair);
  EXPECT_EQ(r.cost, 1);
  EXPECT_TRUE(r.exact);
}

TEST(RevisionCostTest, MatchesBruteForce) {
  std::mt19937_64 rng(101);
  int nonzero = 0;
  for (int round = 0; round < 300; ++round) {
    Formula base = oracle::random_cnf(rng, 6, 4, 3);
    if (!oracle::truth_table_sat(base)) continue;
    std::vector<Commitment> cs;
    int n = 1 + static_cast<int>(rng() % 8);
    for (int i = 0; i < n; ++i) {
      std::vector<Literal> derived;
      if (rng() % 3 == 0) derived.emplace_back(1 + static_cast<int>(rng() % 6), (rng() & 1) != 0);
      cs.push_back(commit("q", static_cast<Label>(rng() % 3),
                          Literal(1 + static_cast<int>(rng() % 6), true), derived));
    }
    auto r = min_revision_cost(base, cs);
    ASSERT_TRUE(r.exact);
    EXPECT_EQ(r.cost, brute_revision(base, cs));
    nonzero += r.cost > 0;
  }
  EXPECT_GT(nonzero, 50);
}

TEST(RevisionCostTest, ApproximateAboveGuard) {
  std::vector<Commitment> cs;
  for (int i = 0; i < 14; ++i) cs.push_back(commit("q", Label::kEntailed, Literal(1, i % 2 == 0)));
  auto r = min_revision_cost(Formula(1), cs);
  EXPECT_FALSE(r.exact);
  EXPECT_GE(r.cost, 7);
}

}  // namespace
