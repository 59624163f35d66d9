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


// Commitments and the accumulated belief state.
//
// Answering a query with Entailed commits to χ, with Contradicted to ¬χ, and
// with Unknown to nothing. Derived atoms reported alongside the answer are
// conjoined after the queried literal. Each distinct commitment enters the
// solver once as a selector-guarded clause group; the belief state is the
// base formula plus the selectors of its active entries, so retraction and
// trial checks are assumption changes rather than rebuilds.

#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "casecons/casefile.hpp"
#include "casecons/logic.hpp"
#include "casecons/solver.hpp"

namespace casecons {

enum class Origin { kExtract, kReplay, kRepair };

inline const char* to_string(Origin o) {
  switch (o) {
    case Origin::kExtract: return "extract";
    case Origin::kReplay: return "replay";
    case Origin::kRepair: return "repair";
  }
  return "?";
}

struct Commitment {
  std::string query_id;
  Label label = Label::kUnknown;
  std::vector<Literal> literals;  // queried literal first, derived after
  Origin origin = Origin::kExtract;
  // Analysis-only marker for Unknown answers: recorded, never asserted.
  std::optional<Literal> undetermined;

  bool asserts_nothing() const { return literals.empty(); }
  std::size_t derived_count() const { return literals.empty() ? 0 : literals.size() - 1; }

  friend bool operator==(const Commitment&, const Commitment&) = default;
};

inline Commitment extract_commitment(std::string query_id, Literal chi, Label label,
                                     const std::vector<Literal>& derived = {},
                                     Origin origin = Origin::kExtract) {
  Commitment c;
  c.query_id = std::move(query_id);
  c.label = label;
  c.origin = origin;
  if (label == Label::kUnknown) {
    c.undetermined = chi;
    return c;
  }
  c.literals.push_back(label == Label::kEntailed ? chi : ~chi);
  for (Literal d : derived)
    if (std::find(c.literals.begin(), c.literals.end(), d) == c.literals.end())
      c.literals.push_back(d);
  return c;
}

// Resolves derived atom names against the case vocabulary. Names outside
// the vocabulary are dropped and reported through `warnings`.
inline Commitment extract_commitment(const CaseFile& cf, const CompiledCase& cc, std::size_t query,
                                     Label label, const std::vector<std::string>& derived = {},
                                     Origin origin = Origin::kExtract,
                                     std::vector<std::string>* warnings = nullptr) {
  std::vector<Literal> lits;
  for (const auto& name : derived) {
    auto l = cc.resolve(name);
    if (!l) {
      if (warnings)
        warnings->push_back(cf.id + "/" + cf.queries.at(query).id +
                            ": dropped derived atom outside the vocabulary: " + name);
      continue;
    }
    lits.push_back(*l);
  }
  return extract_commitment(cf.queries.at(query).id, cc.query_atoms.at(query), label, lits,
                            origin);
}

// Caller-owned budget of counted solver calls.
struct CallBudget {
  std::uint64_t limit = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t used = 0;

  std::uint64_t remaining() const { return used >= limit ? 0 : limit - used; }
  bool take() {
    if (used >= limit) return false;
    ++used;
    return true;
  }
};

struct UnsatCore {
  static constexpr std::size_t kCurrent = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> members;  // entry indices ascending, kCurrent last
  bool minimal = false;

  bool contains(std::size_t m) const {
    return std::find(members.begin(), members.end(), m) != members.end();
  }
  bool includes_current() const { return contains(kCurrent); }
  std::vector<std::size_t> past() const {
    std::vector<std::size_t> out;
    for (auto m : members)
      if (m != kCurrent) out.push_back(m);
    return out;
  }
};

class BeliefState {
 public:
  struct Entry {
    Commitment commitment;
    std::optional<Literal> selector;  // none for commitments asserting nothing
    bool active = true;
  };

  enum class Outcome { kAccepted, kViolation, kTimeoutFallback };

  explicit BeliefState(const Formula& base, SolverOptions options = {})
      : base_(base), solver_(base, options) {}

  const Formula& base() const { return base_; }
  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  std::uint64_t solver_calls() const { return calls_; }
  const SolverStats& solver_stats() const { return solver_.stats(); }
  const std::optional<Commitment>& pending() const { return pending_; }
  const std::vector<std::string>& events() const { return events_; }
  // Model of the most recent satisfiable check, used as the counterexample
  // hint for repair proposers when the current state is UNSAT.
  const Assignment& last_model() const { return last_model_; }
  bool prefix_known_sat() const { return prefix_sat_; }

  // One counted solve over the active entries, minus `exclude`, plus
  // `extra` when given.
  SolveResult check(const Commitment* extra = nullptr, const std::vector<std::size_t>& exclude = {}) {
    std::vector<Literal> assumptions;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      const auto& e = entries_[i];
      if (!e.active || !e.selector) continue;
      if (std::find(exclude.begin(), exclude.end(), i) != exclude.end()) continue;
      assumptions.push_back(*e.selector);
    }
    if (extra && !extra->asserts_nothing()) assumptions.push_back(selector_for(*extra));
    ++calls_;
    auto r = solver_.solve(assumptions);
    if (r.status == SolveStatus::kSat) last_model_ = r.model;
    return r;
  }

  // Checks B_{t-1} ∧ ψ and appends ψ when satisfiable. On UNSAT the state is
  // unchanged and ψ is held as pending for core extraction and repair. On
  // TIMEOUT ψ is replaced by the Unknown commitment and accepted.
  Outcome append_and_check(Commitment psi) {
    pending_.reset();
    auto r = check(&psi);
    if (r.status == SolveStatus::kSat) {
      push(std::move(psi), true);
      return Outcome::kAccepted;
    }
    if (r.status == SolveStatus::kTimeout) {
      events_.push_back(psi.query_id + ": solver timeout, commitment reverted to Unknown");
      push(unknown_of(psi));
      return Outcome::kTimeoutFallback;
    }
    last_failed_ = r.failed;
    pending_ = std::move(psi);
    return Outcome::kViolation;
  }

  // Appends without checking (baseline runs, set mode, accepted repairs).
  // `known_sat` records that the caller verified the extended state.
  void push(Commitment psi, bool known_sat = false) {
    if (!psi.asserts_nothing()) prefix_sat_ = known_sat;
    Entry e;
    if (!psi.asserts_nothing()) e.selector = selector_for(psi);
    e.commitment = std::move(psi);
    entries_.push_back(std::move(e));
    if (pending_ && pending_->query_id == entries_.back().commitment.query_id) pending_.reset();
  }

  void clear_pending() { pending_.reset(); }
  void set_prefix_sat(bool sat) { prefix_sat_ = sat; }

  // Retraction is a selector flip: the entry stays in the log but its group
  // is no longer assumed.
  void retract(std::size_t index) { entries_.at(index).active = false; }

  void replace(std::size_t index, Commitment psi) {
    Entry& e = entries_.at(index);
    e.selector.reset();
    if (!psi.asserts_nothing()) e.selector = selector_for(psi);
    e.commitment = std::move(psi);
  }

  void note(std::string event) { events_.push_back(std::move(event)); }

  std::vector<const Commitment*> active_commitments() const {
    std::vector<const Commitment*> out;
    for (const auto& e : entries_)
      if (e.active) out.push_back(&e.commitment);
    return out;
  }

  // φ(P) ∧ ⋀ active ψ as a plain formula, for fresh re-verification.
  Formula retained_formula(const Commitment* extra = nullptr) const {
    Formula f = base_;
    int max_var = f.variable_count();
    auto add = [&](const Commitment& c) {
      for (Literal l : c.literals) max_var = std::max(max_var, l.variable());
    };
    for (const auto& e : entries_)
      if (e.active) add(e.commitment);
    if (extra) add(*extra);
    f.declare_variables(max_var);
    f.begin_group("commitments");
    for (const auto& e : entries_)
      if (e.active)
        for (Literal l : e.commitment.literals) f.add_clause({l});
    if (extra)
      for (Literal l : extra->literals) f.add_clause({l});
    return f;
  }

  // Core over the active entries and `current`, which must be jointly UNSAT
  // with the base. The first pass reuses the failed-assumption set of the
  // violating check; deletion then scans most-recent-first, charging every
  // solve to `budget`. If the budget runs out or a solve times out the core
  // is returned with minimal=false.
  UnsatCore unsat_core(const Commitment& current, CallBudget& budget) {
    UnsatCore core;
    core.minimal = true;
    std::vector<Literal> failed;
    if (pending_ && pending_->literals == current.literals) {
      failed = last_failed_;
    } else {
      if (!budget.take()) return everything(current);
      auto r = check(&current);
      if (r.status != SolveStatus::kUnsat) return everything(current);
      failed = r.failed;
    }
    core.members = members_of(failed, &current);

    // Members still to test, most recent first. The current commitment is
    // necessary whenever the retained prefix is known SAT.
    std::vector<std::size_t> order(core.members.rbegin(), core.members.rend());
    for (std::size_t m : order) {
      if (!core.contains(m)) continue;
      if (m == UnsatCore::kCurrent && prefix_sat_) continue;
      if (!budget.take()) {
        core.minimal = false;
        break;
      }
      auto r = solve_subset(core.members, m, current);
      if (r.status == SolveStatus::kUnsat) {
        std::vector<std::size_t> without;
        for (auto x : core.members)
          if (x != m) without.push_back(x);
        auto refined = members_of(r.failed, &current);
        std::vector<std::size_t> next;
        for (auto x : without)
          if (std::find(refined.begin(), refined.end(), x) != refined.end()) next.push_back(x);
        core.members = next;
      } else if (r.status == SolveStatus::kTimeout) {
        core.minimal = false;
      }
    }
    return core;
  }

 private:
  static Commitment unknown_of(const Commitment& c) {
    Commitment u;
    u.query_id = c.query_id;
    u.label = Label::kUnknown;
    u.origin = c.origin;
    if (!c.literals.empty()) u.undetermined = c.label == Label::kContradicted ? ~c.literals[0] : c.literals[0];
    return u;
  }

  Literal selector_for(const Commitment& c) {
    std::vector<int> key;
    for (Literal l : c.literals) key.push_back(l.dimacs());
    std::sort(key.begin(), key.end());
    auto it = groups_.find(key);
    if (it != groups_.end()) return it->second;
    std::vector<Clause> clauses;
    for (Literal l : c.literals) clauses.push_back({l});
    Literal sel = solver_.add_group(clauses);
    groups_.emplace(std::move(key), sel);
    return sel;
  }

 public:
  // Maps a failed-assumption set back to members, preferring the current
  // commitment, then the most recent active entry sharing a selector.
  std::vector<std::size_t> members_of(const std::vector<Literal>& failed, const Commitment* current) {
    std::vector<std::size_t> out;
    std::optional<Literal> cur_sel;
    if (current && !current->asserts_nothing()) cur_sel = selector_for(*current);
    bool has_current = false;
    for (Literal f : failed) {
      if (cur_sel && f == *cur_sel) {
        has_current = true;
        continue;
      }
      for (std::size_t i = entries_.size(); i-- > 0;) {
        const auto& e = entries_[i];
        if (e.active && e.selector && *e.selector == f) {
          out.push_back(i);
          break;
        }
      }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    if (has_current) out.push_back(UnsatCore::kCurrent);
    return out;
  }

 private:

  SolveResult solve_subset(const std::vector<std::size_t>& members, std::size_t skip,
                           const Commitment& current) {
    std::vector<Literal> assumptions;
    for (auto m : members) {
      if (m == skip) continue;
      if (m == UnsatCore::kCurrent) {
        if (!current.asserts_nothing()) assumptions.push_back(selector_for(current));
      } else if (entries_[m].selector) {
        assumptions.push_back(*entries_[m].selector);
      }
    }
    ++calls_;
    return solver_.solve(assumptions);
  }

  UnsatCore everything(const Commitment& current) {
    UnsatCore core;
    for (std::size_t i = 0; i < entries_.size(); ++i)
      if (entries_[i].active && entries_[i].selector) core.members.push_back(i);
    if (!current.asserts_nothing()) core.members.push_back(UnsatCore::kCurrent);
    core.minimal = false;
    return core;
  }

  Formula base_;
  Solver solver_;
  std::vector<Entry> entries_;
  std::map<std::vector<int>, Literal> groups_;
  std::optional<Commitment> pending_;
  std::vector<Literal> last_failed_;
  Assignment last_model_;
  std::vector<std::string> events_;
  std::uint64_t calls_ = 0;
  bool prefix_sat_ = true;
};

}  // namespace casecons
