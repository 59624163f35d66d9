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


// Counterexample-guided repair of a violating commitment, the minimum
// revision cost of a belief state, and logic-filtered voting.
//
// Candidates are enumerated in a fixed order (flip to Unknown, flip to the
// opposite label, soften, retract single core members most recent first,
// retract pairs, retract the whole past core) and then tried in order of the
// lexicographic cost (retracted past commitments, current label changed,
// size of the revised commitment), ties broken by enumeration order.

#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "casecons/commitments.hpp"

namespace casecons {

enum class RepairKind { kFlip, kSoften, kRetract };

inline const char* to_string(RepairKind k) {
  switch (k) {
    case RepairKind::kFlip: return "flip";
    case RepairKind::kSoften: return "soften";
    case RepairKind::kRetract: return "retract";
  }
  return "?";
}

struct CostTriple {
  int delta_past = 0;
  int label_changed = 0;
  int size = 0;

  friend auto operator<=>(const CostTriple&, const CostTriple&) = default;
};

struct RepairAction {
  RepairKind kind = RepairKind::kFlip;
  Commitment revised;                  // replacement for the current commitment
  std::vector<Literal> dropped;        // soften
  std::vector<std::size_t> retracted;  // entry indices, most recent first
  CostTriple cost;
  std::size_t order = 0;  // enumeration index
};

struct RepairBudget {
  int r_max = 2;             // candidate verifications per query
  int call_cap_factor = 3;   // total counted solver calls per bundle ≤ factor·n
  int delta_past_max = 3;    // larger retractions make the bundle PARTIAL

  void validate() const {
    if (r_max <= 0 || call_cap_factor <= 0 || delta_past_max <= 0)
      throw std::invalid_argument("repair budgets must be positive");
  }
};

// Which action families the enumerator may propose (used by ablations).
struct RepairPolicy {
  bool flip = true;
  bool soften = true;
  bool retract = true;
};

inline Commitment unknown_commitment(const Commitment& c, Origin origin = Origin::kRepair) {
  Commitment u;
  u.query_id = c.query_id;
  u.label = Label::kUnknown;
  u.origin = origin;
  if (!c.literals.empty())
    u.undetermined = c.label == Label::kContradicted ? ~c.literals[0] : c.literals[0];
  else
    u.undetermined = c.undetermined;
  return u;
}

inline std::vector<RepairAction> propose_repairs(const BeliefState& state, const Commitment& current,
                                                 const UnsatCore& core,
                                                 const RepairPolicy& policy = {}) {
  std::vector<RepairAction> out;
  auto add = [&](RepairAction a) {
    a.order = out.size();
    out.push_back(std::move(a));
  };
  const int size = static_cast<int>(current.literals.size());
  if (policy.flip && current.label != Label::kUnknown) {
    RepairAction unk;
    unk.kind = RepairKind::kFlip;
    unk.revised = unknown_commitment(current);
    unk.cost = {0, 1, 0};
    add(unk);
    RepairAction opp;
    opp.kind = RepairKind::kFlip;
    opp.revised.query_id = current.query_id;
    opp.revised.label = opposite(current.label);
    opp.revised.literals = {~current.literals.at(0)};
    opp.revised.origin = Origin::kRepair;
    opp.cost = {0, 1, 1};
    add(opp);
  }
  if (policy.soften) {
    for (std::size_t k = 1; k <= current.derived_count(); ++k) {
      RepairAction s;
      s.kind = RepairKind::kSoften;
      s.revised = current;
      s.revised.origin = Origin::kRepair;
      s.revised.literals.resize(current.literals.size() - k);
      s.dropped.assign(current.literals.end() - static_cast<std::ptrdiff_t>(k), current.literals.end());
      std::reverse(s.dropped.begin(), s.dropped.end());
      s.cost = {0, 0, size - static_cast<int>(k)};
      add(s);
    }
  }
  if (policy.retract) {
    std::vector<std::size_t> past;
    for (auto m : core.past())
      if (m < state.size() && state.entries()[m].active) past.push_back(m);
    std::sort(past.rbegin(), past.rend());
    auto retract = [&](std::vector<std::size_t> set) {
      RepairAction r;
      r.kind = RepairKind::kRetract;
      r.revised = current;
      r.retracted = std::move(set);
      r.cost = {static_cast<int>(r.retracted.size()), 0, size};
      add(r);
    };
    for (auto m : past) retract({m});
    for (std::size_t i = 0; i < past.size(); ++i)
      for (std::size_t j = i + 1; j < past.size(); ++j) retract({past[i], past[j]});
    if (past.size() > 2) retract(past);
  }
  return out;
}

struct RepairTrial {
  std::size_t order = 0;
  RepairKind kind = RepairKind::kFlip;
  CostTriple cost;
  SolveStatus status = SolveStatus::kTimeout;
  bool solver_call = true;
};

struct RepairOutcome {
  enum class Result { kRepaired, kFallback, kPartial };
  Result result = Result::kFallback;
  std::optional<RepairAction> accepted;
  std::vector<RepairTrial> tried;
  Commitment committed;  // what the state now holds for the current query
  std::uint64_t solver_calls = 0;
};

inline const char* to_string(RepairOutcome::Result r) {
  switch (r) {
    case RepairOutcome::Result::kRepaired: return "repaired";
    case RepairOutcome::Result::kFallback: return "fallback";
    case RepairOutcome::Result::kPartial: return "partial";
  }
  return "?";
}

// Tries candidates in objective order with at most r_max verifications,
// charging solver calls to `calls`. A candidate that leaves only Unknown
// over a prefix already known SAT is verified without a solver call. When a
// retraction candidate is still UNSAT, the past members of its new core are
// added to it and the grown set joins the queue (core-guided retraction). On
// success the state is updated; otherwise the current commitment reverts to
// Unknown. A satisfiable candidate retracting more than delta_past_max past
// commitments yields PARTIAL and is not applied.
inline RepairOutcome attempt_repair(BeliefState& state, const Commitment& current,
                                    const UnsatCore& core, const RepairBudget& budget,
                                    CallBudget& calls, const RepairPolicy& policy = {}) {
  RepairOutcome out;
  auto candidates = propose_repairs(state, current, core, policy);
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const RepairAction& a, const RepairAction& b) { return a.cost < b.cost; });
  std::set<std::vector<std::size_t>> retraction_sets;
  for (const auto& c : candidates)
    if (!c.retracted.empty()) {
      auto key = c.retracted;
      std::sort(key.begin(), key.end());
      retraction_sets.insert(key);
    }
  int verifications = 0;
  for (std::size_t next = 0; next < candidates.size(); ++next) {
    RepairAction& cand = candidates[next];
    if (verifications >= budget.r_max) break;
    RepairTrial trial{cand.order, cand.kind, cand.cost, SolveStatus::kTimeout, true};
    bool trivially_sat = cand.revised.asserts_nothing() && cand.retracted.empty() &&
                         state.prefix_known_sat();
    if (trivially_sat) {
      trial.status = SolveStatus::kSat;
      trial.solver_call = false;
    } else {
      if (!calls.take()) break;
      ++out.solver_calls;
      auto r = state.check(&cand.revised, cand.retracted);
      trial.status = r.status;
      if (r.status == SolveStatus::kUnsat && !cand.retracted.empty()) {
        std::vector<std::size_t> grown = cand.retracted;
        for (auto m : state.members_of(r.failed, &cand.revised))
          if (m != UnsatCore::kCurrent) grown.push_back(m);
        std::vector<std::size_t> key = grown;
        std::sort(key.begin(), key.end());
        if (grown.size() > cand.retracted.size() && retraction_sets.insert(key).second) {
          RepairAction g = cand;
          g.retracted = grown;
          g.cost.delta_past = static_cast<int>(grown.size());
          g.order = candidates.size();
          candidates.push_back(std::move(g));
          std::stable_sort(candidates.begin() + static_cast<std::ptrdiff_t>(next) + 1, candidates.end(),
                           [](const RepairAction& a, const RepairAction& b) { return a.cost < b.cost; });
        }
      }
    }
    ++verifications;
    out.tried.push_back(trial);
    RepairAction& chosen = candidates[next];
    if (trial.status != SolveStatus::kSat) continue;
    if (chosen.cost.delta_past > budget.delta_past_max) {
      out.result = RepairOutcome::Result::kPartial;
      break;
    }
    for (auto idx : chosen.retracted) state.retract(idx);
    if (!chosen.retracted.empty()) state.set_prefix_sat(true);
    state.clear_pending();
    state.push(chosen.revised, true);
    out.committed = chosen.revised;
    out.accepted = std::move(chosen);
    out.result = RepairOutcome::Result::kRepaired;
    return out;
  }
  state.clear_pending();
  out.committed = unknown_commitment(current);
  state.push(out.committed);
  if (out.result != RepairOutcome::Result::kPartial) out.result = RepairOutcome::Result::kFallback;
  return out;
}

// ---------------------------------------------------------------------------
// Logic-filtered self-consistency.

struct VoteResult {
  Label label = Label::kUnknown;
  Commitment commitment;
  std::array<int, 3> survivor_votes{};
  std::uint64_t solver_calls = 0;
};

// Keeps the samples whose commitment leaves the state satisfiable (one
// trial check per distinct commitment; Unknown needs none), then takes the
// plurality label among survivors. Ties and empty survivor sets give
// Unknown. The returned commitment is a surviving sample's.
inline VoteResult logic_filtered_vote(BeliefState& state, const std::vector<Commitment>& samples,
                                      CallBudget* budget = nullptr) {
  if (samples.empty()) throw std::invalid_argument("logic_filtered_vote needs at least one sample");
  VoteResult out;
  std::map<std::pair<int, std::vector<int>>, bool> verdict;
  std::vector<const Commitment*> survivors;
  for (const auto& s : samples) {
    if (s.asserts_nothing()) {
      survivors.push_back(&s);
      continue;
    }
    std::vector<int> key;
    for (Literal l : s.literals) key.push_back(l.dimacs());
    auto k = std::make_pair(label_index(s.label), key);
    auto it = verdict.find(k);
    if (it == verdict.end()) {
      bool ok = false;
      if (!budget || budget->take()) {
        ++out.solver_calls;
        ok = state.check(&s).status == SolveStatus::kSat;
      }
      it = verdict.emplace(k, ok).first;
    }
    if (it->second) survivors.push_back(&s);
  }
  for (const auto* s : survivors) ++out.survivor_votes[label_index(s->label)];
  int best = -1, best_votes = 0;
  bool tie = false;
  for (int l = 0; l < 3; ++l) {
    if (out.survivor_votes[l] > best_votes) {
      best = l;
      best_votes = out.survivor_votes[l];
      tie = false;
    } else if (out.survivor_votes[l] == best_votes && best_votes > 0) {
      tie = true;
    }
  }
  if (best < 0 || tie) {
    out.label = Label::kUnknown;
  } else {
    out.label = static_cast<Label>(best);
  }
  for (const auto* s : survivors) {
    if (s->label == out.label) {
      out.commitment = *s;
      return out;
    }
  }
  out.commitment = unknown_commitment(samples.front(), samples.front().origin);
  return out;
}

// ---------------------------------------------------------------------------
// Minimum revision cost.

struct RevisionCost {
  int cost = 0;
  bool exact = true;
  std::vector<std::size_t> retract;  // indices into the input list
};

inline constexpr std::size_t kExactRevisionLimit = 12;

namespace detail {

// Smallest subset of `universe` meeting every core; by increasing size.
inline std::vector<std::size_t> min_hitting_set(const std::vector<std::vector<std::size_t>>& cores) {
  std::set<std::size_t> u;
  for (const auto& c : cores) u.insert(c.begin(), c.end());
  std::vector<std::size_t> universe(u.begin(), u.end());
  std::vector<std::size_t> pick;
  std::vector<std::size_t> best;
  auto hits_all = [&](const std::vector<std::size_t>& h) {
    for (const auto& c : cores) {
      bool hit = false;
      for (auto x : c)
        if (std::find(h.begin(), h.end(), x) != h.end()) hit = true;
      if (!hit) return false;
    }
    return true;
  };
  for (std::size_t k = 0; k <= universe.size(); ++k) {
    std::function<bool(std::size_t)> rec = [&](std::size_t from) -> bool {
      if (pick.size() == k) return hits_all(pick);
      for (std::size_t i = from; i < universe.size(); ++i) {
        pick.push_back(universe[i]);
        if (rec(i + 1)) return true;
        pick.pop_back();
      }
      return false;
    };
    pick.clear();
    if (rec(0)) return pick;
  }
  return universe;
}

inline std::vector<std::size_t> greedy_hitting_set(const std::vector<std::vector<std::size_t>>& cores) {
  std::vector<std::size_t> h;
  std::vector<bool> hit(cores.size(), false);
  for (;;) {
    std::map<std::size_t, int> count;
    for (std::size_t i = 0; i < cores.size(); ++i)
      if (!hit[i])
        for (auto x : cores[i]) ++count[x];
    if (count.empty()) return h;
    auto best = std::max_element(count.begin(), count.end(),
                                 [](const auto& a, const auto& b) { return a.second < b.second; });
    h.push_back(best->first);
    for (std::size_t i = 0; i < cores.size(); ++i)
      if (std::find(cores[i].begin(), cores[i].end(), best->first) != cores[i].end()) hit[i] = true;
  }
}

}  // namespace detail

// Minimum number of commitments whose retraction makes base ∧ ⋀ commitments
// satisfiable, by implicit hitting sets over unsat cores: a minimum hitting
// set of the cores found so far is retracted, and if the rest is still UNSAT
// its core joins the collection. Exact up to kExactRevisionLimit asserting
// commitments; above that a greedy hitting set gives an upper bound flagged
// exact=false. Uses its own solver; calls are not charged to any bundle.
inline RevisionCost min_revision_cost(const Formula& base, const std::vector<Commitment>& commitments,
                                      const SolverOptions& options = SolverOptions::test_mode()) {
  RevisionCost out;
  Solver s(base, options);
  std::vector<std::optional<Literal>> sel(commitments.size());
  std::size_t asserting = 0;
  for (std::size_t i = 0; i < commitments.size(); ++i) {
    if (commitments[i].asserts_nothing()) continue;
    std::vector<Clause> cl;
    for (Literal l : commitments[i].literals) cl.push_back({l});
    sel[i] = s.add_group(cl);
    ++asserting;
  }
  out.exact = asserting <= kExactRevisionLimit;
  std::vector<std::vector<std::size_t>> cores;
  for (;;) {
    std::vector<std::size_t> h = out.exact ? detail::min_hitting_set(cores)
                                           : detail::greedy_hitting_set(cores);
    std::vector<Literal> assumptions;
    for (std::size_t i = 0; i < commitments.size(); ++i)
      if (sel[i] && std::find(h.begin(), h.end(), i) == h.end()) assumptions.push_back(*sel[i]);
    auto r = s.solve(assumptions);
    if (r.status == SolveStatus::kSat) {
      std::sort(h.begin(), h.end());
      out.cost = static_cast<int>(h.size());
      out.retract = h;
      return out;
    }
    if (r.status == SolveStatus::kTimeout) {
      // Without a verdict the best available bound is retracting everything.
      out.exact = false;
      out.retract.clear();
      for (std::size_t i = 0; i < commitments.size(); ++i)
        if (sel[i]) out.retract.push_back(i);
      out.cost = static_cast<int>(out.retract.size());
      return out;
    }
    std::vector<std::size_t> core;
    for (Literal f : r.failed)
      for (std::size_t i = 0; i < commitments.size(); ++i)
        if (sel[i] && *sel[i] == f) core.push_back(i);
    if (core.empty()) throw std::invalid_argument("base formula is unsatisfiable");
    cores.push_back(core);
  }
}

}  // namespace casecons
