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

// Incremental CDCL solver: two watched literals, first-UIP learning with
// clause minimization, VSIDS, phase saving, Luby restarts and LBD-based
// learnt clause reduction. Assumptions are decided on the first decision
// levels; on UNSAT the solver reports the assumptions used by the refutation.
//
// Clauses can be added between solve() calls. Removal is expressed through
// selector literals: add_group() guards a clause set with a fresh selector and
// retract() disables it permanently.

#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "casecons/logic.hpp"

namespace casecons {

enum class SolveStatus { kSat, kUnsat, kTimeout };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kSat: return "SAT";
    case SolveStatus::kUnsat: return "UNSAT";
    case SolveStatus::kTimeout: return "TIMEOUT";
  }
  return "?";
}

// Budget for a single solve() call. A negative conflict limit disables it; a
// non-positive timeout disables the wall clock. Test mode uses conflicts only
// so that TIMEOUT paths are reproducible.
struct SolverOptions {
  std::int64_t conflict_limit = -1;
  double timeout_seconds = 30.0;
  std::uint64_t seed = 0;
  double random_decision_freq = 0.0;

  static SolverOptions test_mode(std::int64_t conflicts = 100000, std::uint64_t seed = 0) {
    SolverOptions o;
    o.conflict_limit = conflicts;
    o.timeout_seconds = 0.0;
    o.seed = seed;
    return o;
  }
};

struct SolverStats {
  std::uint64_t solver_calls = 0;
  std::uint64_t decisions = 0;
  std::uint64_t conflicts = 0;
  std::uint64_t propagations = 0;
  std::uint64_t restarts = 0;
  std::uint64_t learnt_clauses = 0;

  friend bool operator==(const SolverStats&, const SolverStats&) = default;
};

struct SolveResult {
  SolveStatus status = SolveStatus::kTimeout;
  Assignment model;             // total assignment when SAT
  std::vector<Literal> failed;  // assumptions used by the refutation when UNSAT
};

class Solver {
 public:
  explicit Solver(SolverOptions options = {}) : options_(options), rng_(options.seed) {}

  explicit Solver(const Formula& f, SolverOptions options = {}) : Solver(options) {
    load(f);
  }

  int num_vars() const { return num_vars_; }
  const SolverStats& stats() const { return stats_; }
  const SolverOptions& options() const { return options_; }
  void set_options(const SolverOptions& o) { options_ = o; }

  // False once a conflict has been derived without assumptions.
  bool okay() const { return ok_; }

  void reserve_vars(int n) {
    while (num_vars_ < n) new_var();
  }

  int new_var() {
    int v = num_vars_++;
    assigns_.push_back(kUndef);
    level_.push_back(0);
    reason_.push_back(kNoReason);
    polarity_.push_back(1);  // prefer false
    activity_.push_back(0.0);
    seen_.push_back(0);
    heap_index_.push_back(-1);
    watches_.emplace_back();
    watches_.emplace_back();
    heap_insert(v);
    return v + 1;
  }

  void load(const Formula& f) {
    reserve_vars(f.variable_count());
    for (const auto& c : f.clauses()) add_clause(c);
  }

  // Adds a permanent clause. Returns false if the clause set became
  // unsatisfiable at the root.
  bool add_clause(std::span<const Literal> clause) {
    if (!ok_) return false;
    cancel_until(0);
    std::vector<int> lits;
    lits.reserve(clause.size());
    for (Literal l : clause) {
      if (!l.valid()) throw std::invalid_argument("invalid literal in clause");
      reserve_vars(l.variable());
      lits.push_back(encode(l));
    }
    std::sort(lits.begin(), lits.end());
    std::vector<int> kept;
    int prev = -1;
    for (int p : lits) {
      if (p == prev) continue;
      if (prev >= 0 && p == (prev ^ 1)) return true;  // tautology
      if (value(p) == kTrue && level_[var(p)] == 0) return true;
      if (!(value(p) == kFalse && level_[var(p)] == 0)) kept.push_back(p);
      prev = p;
    }
    if (kept.empty()) {
      ok_ = false;
      return false;
    }
    if (kept.size() == 1) {
      enqueue(kept[0], kNoReason);
      if (propagate() != kNoReason) ok_ = false;
      return ok_;
    }
    std::uint32_t cref = alloc_clause(std::move(kept), false);
    attach(cref);
    return true;
  }

  bool add_clause(std::initializer_list<Literal> clause) {
    return add_clause(std::span<const Literal>(clause.begin(), clause.size()));
  }

  // Guards `clauses` with a fresh selector variable s (each clause c becomes
  // ¬s ∨ c). Assuming s activates the group.
  Literal add_group(const std::vector<Clause>& clauses) {
    Literal sel(new_var(), true);
    for (const auto& c : clauses) {
      Clause guarded;
      guarded.reserve(c.size() + 1);
      guarded.push_back(~sel);
      guarded.insert(guarded.end(), c.begin(), c.end());
      add_clause(guarded);
    }
    return sel;
  }

  // Permanently disables the group behind `selector`.
  void retract(Literal selector) { add_clause({~selector}); }

  SolveResult solve(std::span<const Literal> assumptions = {}) {
    ++stats_.solver_calls;
    SolveResult result;
    for (Literal l : assumptions) {
      if (!l.valid() || l.variable() > num_vars_)
        throw std::invalid_argument("assumption references unknown variable " +
                                    to_string(l));
    }
    if (!ok_) {
      result.status = SolveStatus::kUnsat;
      return result;
    }
    assumptions_.clear();
    for (Literal l : assumptions) assumptions_.push_back(encode(l));
    conflict_.clear();

    call_conflicts_ = 0;
    start_ = std::chrono::steady_clock::now();
    int status = kUndef;
    for (int restarts = 0; status == kUndef; ++restarts) {
      double rest_base = luby(2.0, restarts);
      status = search(static_cast<std::int64_t>(rest_base * 100));
      if (status == kUndef && budget_exhausted()) break;
      if (status == kUndef) ++stats_.restarts;
    }

    if (status == kTrue) {
      result.status = SolveStatus::kSat;
      result.model = Assignment(num_vars_);
      for (int v = 0; v < num_vars_; ++v) result.model.set(v + 1, assigns_[v] == kTrue);
    } else if (status == kFalse) {
      result.status = SolveStatus::kUnsat;
      for (int p : conflict_) result.failed.push_back(decode(p ^ 1));
      std::sort(result.failed.begin(), result.failed.end());
      result.failed.erase(std::unique(result.failed.begin(), result.failed.end()),
                          result.failed.end());
    } else {
      result.status = SolveStatus::kTimeout;
    }
    cancel_until(0);
    return result;
  }

  SolveResult solve(std::initializer_list<Literal> assumptions) {
    return solve(std::span<const Literal>(assumptions.begin(), assumptions.size()));
  }

 private:
  static constexpr int kTrue = 0;
  static constexpr int kFalse = 1;
  static constexpr int kUndef = 2;
  static constexpr std::uint32_t kNoReason = std::numeric_limits<std::uint32_t>::max();

  struct ClauseData {
    std::vector<int> lits;
    bool learnt = false;
    bool deleted = false;
    int lbd = 0;
    double activity = 0.0;
  };

  struct Watcher {
    std::uint32_t cref;
    int blocker;
  };

  static int encode(Literal l) { return 2 * (l.variable() - 1) + (l.positive() ? 0 : 1); }
  static Literal decode(int p) { return Literal((p >> 1) + 1, (p & 1) == 0); }
  static int var(int p) { return p >> 1; }

  int value(int p) const {
    int a = assigns_[var(p)];
    return a == kUndef ? kUndef : (a ^ (p & 1));
  }

  int decision_level() const { return static_cast<int>(trail_lim_.size()); }

  void enqueue(int p, std::uint32_t from) {
    int v = var(p);
    assigns_[v] = (p & 1) ? kFalse : kTrue;
    level_[v] = decision_level();
    reason_[v] = from;
    trail_.push_back(p);
  }

  std::uint32_t alloc_clause(std::vector<int> lits, bool learnt) {
    ClauseData c;
    c.lits = std::move(lits);
    c.learnt = learnt;
    clauses_.push_back(std::move(c));
    return static_cast<std::uint32_t>(clauses_.size() - 1);
  }

  void attach(std::uint32_t cref) {
    const auto& c = clauses_[cref];
    watches_[c.lits[0]].push_back({cref, c.lits[1]});
    watches_[c.lits[1]].push_back({cref, c.lits[0]});
  }

  void cancel_until(int lvl) {
    if (decision_level() <= lvl) return;
    for (std::size_t i = trail_.size(); i-- > static_cast<std::size_t>(trail_lim_[lvl]);) {
      int v = var(trail_[i]);
      assigns_[v] = kUndef;
      reason_[v] = kNoReason;
      polarity_[v] = trail_[i] & 1;
      if (heap_index_[v] < 0) heap_insert(v);
    }
    trail_.resize(trail_lim_[lvl]);
    trail_lim_.resize(lvl);
    qhead_ = std::min(qhead_, trail_.size());
  }

  // Watches of literal q hold the clauses in which q is one of the first two
  // literals; they are visited when q becomes false.
  std::uint32_t propagate() {
    std::uint32_t confl = kNoReason;
    while (qhead_ < trail_.size()) {
      int p = trail_[qhead_++];
      int false_lit = p ^ 1;
      auto& ws = watches_[false_lit];
      ++stats_.propagations;
      std::size_t i = 0, j = 0;
      while (i < ws.size()) {
        Watcher w = ws[i];
        if (value(w.blocker) == kTrue) {
          ws[j++] = ws[i++];
          continue;
        }
        auto& c = clauses_[w.cref];
        if (c.deleted) {
          ++i;
          continue;
        }
        if (c.lits[0] == false_lit) std::swap(c.lits[0], c.lits[1]);
        ++i;
        int first = c.lits[0];
        Watcher nw{w.cref, first};
        if (first != w.blocker && value(first) == kTrue) {
          ws[j++] = nw;
          continue;
        }
        bool moved = false;
        for (std::size_t k = 2; k < c.lits.size(); ++k) {
          if (value(c.lits[k]) != kFalse) {
            std::swap(c.lits[1], c.lits[k]);
            watches_[c.lits[1]].push_back(nw);
            moved = true;
            break;
          }
        }
        if (moved) continue;
        ws[j++] = nw;
        if (value(first) == kFalse) {
          confl = w.cref;
          qhead_ = trail_.size();
          while (i < ws.size()) ws[j++] = ws[i++];
        } else {
          enqueue(first, w.cref);
        }
      }
      ws.resize(j);
      if (confl != kNoReason) break;
    }
    return confl;
  }

  void analyze(std::uint32_t confl, std::vector<int>& learnt, int& bt_level) {
    int path = 0;
    int p = -1;
    learnt.clear();
    learnt.push_back(-1);
    std::size_t index = trail_.size();
    do {
      auto& c = clauses_[confl];
      if (c.learnt) bump_clause(c);
      for (std::size_t k = (p == -1 ? 0 : 1); k < c.lits.size(); ++k) {
        int q = c.lits[k];
        int v = var(q);
        if (!seen_[v] && level_[v] > 0) {
          bump_var(v);
          seen_[v] = 1;
          if (level_[v] >= decision_level()) ++path;
          else learnt.push_back(q);
        }
      }
      while (!seen_[var(trail_[--index])]) {
      }
      p = trail_[index];
      confl = reason_[var(p)];
      seen_[var(p)] = 0;
      --path;
    } while (path > 0);
    learnt[0] = p ^ 1;

    // Drop literals implied by the rest of the clause (local minimization).
    std::vector<int> removed;
    std::size_t keep = 1;
    for (std::size_t k = 1; k < learnt.size(); ++k) {
      int v = var(learnt[k]);
      std::uint32_t r = reason_[v];
      bool redundant = r != kNoReason;
      if (redundant) {
        const auto& rc = clauses_[r];
        for (std::size_t m = 1; m < rc.lits.size(); ++m) {
          int u = var(rc.lits[m]);
          if (!seen_[u] && level_[u] > 0) {
            redundant = false;
            break;
          }
        }
      }
      if (redundant) removed.push_back(learnt[k]);
      else learnt[keep++] = learnt[k];
    }
    for (int q : removed) seen_[var(q)] = 0;
    learnt.resize(keep);

    bt_level = 0;
    if (learnt.size() > 1) {
      std::size_t max_i = 1;
      for (std::size_t k = 2; k < learnt.size(); ++k)
        if (level_[var(learnt[k])] > level_[var(learnt[max_i])]) max_i = k;
      std::swap(learnt[1], learnt[max_i]);
      bt_level = level_[var(learnt[1])];
    }
    for (int q : learnt) seen_[var(q)] = 0;
  }

  // Collects the assumptions responsible for `p` being false (p is the
  // negation of a failed assumption). conflict_ receives negated assumptions.
  void analyze_final(int p) {
    conflict_.clear();
    conflict_.push_back(p);
    if (decision_level() == 0) return;
    seen_[var(p)] = 1;
    for (std::size_t i = trail_.size(); i-- > static_cast<std::size_t>(trail_lim_[0]);) {
      int v = var(trail_[i]);
      if (!seen_[v]) continue;
      if (reason_[v] == kNoReason) {
        conflict_.push_back(trail_[i] ^ 1);
      } else {
        const auto& c = clauses_[reason_[v]];
        for (std::size_t k = 1; k < c.lits.size(); ++k)
          if (level_[var(c.lits[k])] > 0) seen_[var(c.lits[k])] = 1;
      }
      seen_[v] = 0;
    }
    seen_[var(p)] = 0;
  }

  int compute_lbd(const std::vector<int>& lits) {
    std::vector<int> levels;
    levels.reserve(lits.size());
    for (int q : lits) levels.push_back(level_[var(q)]);
    std::sort(levels.begin(), levels.end());
    return static_cast<int>(std::unique(levels.begin(), levels.end()) - levels.begin());
  }

  bool budget_exhausted() {
    if (options_.conflict_limit >= 0 && call_conflicts_ >= options_.conflict_limit) return true;
    if (options_.timeout_seconds > 0) {
      auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_);
      if (elapsed.count() >= options_.timeout_seconds) return true;
    }
    return false;
  }

  int search(std::int64_t nof_conflicts) {
    std::int64_t conflicts_here = 0;
    std::vector<int> learnt;
    for (;;) {
      std::uint32_t confl = propagate();
      if (confl != kNoReason) {
        ++stats_.conflicts;
        ++conflicts_here;
        ++call_conflicts_;
        if (decision_level() == 0) {
          ok_ = false;
          return kFalse;
        }
        int bt = 0;
        analyze(confl, learnt, bt);
        cancel_until(bt);
        if (learnt.size() == 1) {
          enqueue(learnt[0], kNoReason);
        } else {
          int lbd = compute_lbd(learnt);
          std::uint32_t cref = alloc_clause(learnt, true);
          clauses_[cref].lbd = lbd;
          attach(cref);
          learnts_.push_back(cref);
          bump_clause(clauses_[cref]);
          enqueue(learnt[0], cref);
          ++stats_.learnt_clauses;
        }
        var_inc_ /= kVarDecay;
        cla_inc_ /= kClauseDecay;
        continue;
      }

      if (conflicts_here >= nof_conflicts || budget_exhausted()) {
        cancel_until(0);
        return kUndef;
      }
      if (static_cast<double>(learnts_.size()) - static_cast<double>(trail_.size()) >=
          max_learnts_)
        reduce_db();

      int next = -1;
      while (decision_level() < static_cast<int>(assumptions_.size())) {
        int a = assumptions_[decision_level()];
        if (value(a) == kTrue) {
          trail_lim_.push_back(static_cast<int>(trail_.size()));
        } else if (value(a) == kFalse) {
          analyze_final(a ^ 1);
          return kFalse;
        } else {
          next = a;
          break;
        }
      }
      if (next < 0) {
        next = pick_branch();
        if (next < 0) return kTrue;
        ++stats_.decisions;
      }
      trail_lim_.push_back(static_cast<int>(trail_.size()));
      enqueue(next, kNoReason);
    }
  }

  int pick_branch() {
    int v = -1;
    if (options_.random_decision_freq > 0 && !heap_.empty()) {
      double r = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
      if (r < options_.random_decision_freq) {
        int cand = heap_[rng_() % heap_.size()];
        if (assigns_[cand] == kUndef) v = cand;
      }
    }
    while (v < 0 || assigns_[v] != kUndef) {
      if (heap_.empty()) return -1;
      v = heap_pop();
    }
    return 2 * v + polarity_[v];
  }

  bool locked(std::uint32_t cref) const {
    const auto& c = clauses_[cref];
    int v = var(c.lits[0]);
    return reason_[v] == cref && value(c.lits[0]) == kTrue;
  }

  void reduce_db() {
    std::sort(learnts_.begin(), learnts_.end(), [&](std::uint32_t a, std::uint32_t b) {
      const auto& ca = clauses_[a];
      const auto& cb = clauses_[b];
      if (ca.lbd != cb.lbd) return ca.lbd > cb.lbd;
      if (ca.activity != cb.activity) return ca.activity < cb.activity;
      return a < b;
    });
    std::size_t half = learnts_.size() / 2;
    std::vector<std::uint32_t> kept;
    for (std::size_t i = 0; i < learnts_.size(); ++i) {
      auto& c = clauses_[learnts_[i]];
      if (i < half && c.lbd > 2 && c.lits.size() > 2 && !locked(learnts_[i])) {
        c.deleted = true;
        c.lits.shrink_to_fit();
      } else {
        kept.push_back(learnts_[i]);
      }
    }
    learnts_ = std::move(kept);
    max_learnts_ *= 1.1;
  }

  void bump_var(int v) {
    activity_[v] += var_inc_;
    if (activity_[v] > 1e100) {
      for (auto& a : activity_) a *= 1e-100;
      var_inc_ *= 1e-100;
    }
    if (heap_index_[v] >= 0) heap_up(heap_index_[v]);
  }

  void bump_clause(ClauseData& c) {
    c.activity += cla_inc_;
    if (c.activity > 1e20) {
      for (auto cref : learnts_) clauses_[cref].activity *= 1e-20;
      cla_inc_ *= 1e-20;
    }
  }

  static double luby(double y, int x) {
    int size = 1, seq = 0;
    while (size < x + 1) {
      ++seq;
      size = 2 * size + 1;
    }
    while (size - 1 != x) {
      size = (size - 1) >> 1;
      --seq;
      x = x % size;
    }
    double r = 1;
    for (int i = 0; i < seq; ++i) r *= y;
    return r;
  }

  // Binary max-heap over variable activity; ties broken by lower index.
  bool heap_less(int a, int b) const {
    if (activity_[a] != activity_[b]) return activity_[a] > activity_[b];
    return a < b;
  }

  void heap_insert(int v) {
    heap_index_[v] = static_cast<int>(heap_.size());
    heap_.push_back(v);
    heap_up(heap_index_[v]);
  }

  void heap_up(int i) {
    int v = heap_[i];
    while (i > 0) {
      int parent = (i - 1) / 2;
      if (!heap_less(v, heap_[parent])) break;
      heap_[i] = heap_[parent];
      heap_index_[heap_[i]] = i;
      i = parent;
    }
    heap_[i] = v;
    heap_index_[v] = i;
  }

  void heap_down(int i) {
    int v = heap_[i];
    int n = static_cast<int>(heap_.size());
    for (;;) {
      int child = 2 * i + 1;
      if (child >= n) break;
      if (child + 1 < n && heap_less(heap_[child + 1], heap_[child])) ++child;
      if (!heap_less(heap_[child], v)) break;
      heap_[i] = heap_[child];
      heap_index_[heap_[i]] = i;
      i = child;
    }
    heap_[i] = v;
    heap_index_[v] = i;
  }

  int heap_pop() {
    int top = heap_[0];
    heap_index_[top] = -1;
    int last = heap_.back();
    heap_.pop_back();
    if (!heap_.empty()) {
      heap_[0] = last;
      heap_index_[last] = 0;
      heap_down(0);
    }
    return top;
  }

  static constexpr double kVarDecay = 0.95;
  static constexpr double kClauseDecay = 0.999;

  SolverOptions options_;
  std::mt19937_64 rng_;
  SolverStats stats_;
  bool ok_ = true;
  int num_vars_ = 0;

  std::vector<ClauseData> clauses_;
  std::vector<std::uint32_t> learnts_;
  std::vector<std::vector<Watcher>> watches_;
  std::vector<int> assigns_;
  std::vector<int> level_;
  std::vector<std::uint32_t> reason_;
  std::vector<int> polarity_;
  std::vector<double> activity_;
  std::vector<char> seen_;
  std::vector<int> heap_;
  std::vector<int> heap_index_;

  std::vector<int> trail_;
  std::vector<int> trail_lim_;
  std::size_t qhead_ = 0;

  std::vector<int> assumptions_;
  std::vector<int> conflict_;

  double var_inc_ = 1.0;
  double cla_inc_ = 1.0;
  double max_learnts_ = 2000.0;
  std::int64_t call_conflicts_ = 0;
  std::chrono::steady_clock::time_point start_{};
};

}  // namespace casecons
