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


// Runs answer policies over case files under one of three methods and
// records a BundleReport per case.
//
//   baseline      commitments are appended unchecked; statuses are measured
//                 on a separate, uncounted solver
//   check         every commitment is checked before it is kept; a violating
//                 one is replaced by Unknown (its core is still computed for
//                 the log)
//   check+repair  a violating commitment goes through core extraction and
//                 counterexample-guided repair
//
// Counted solver calls per bundle are capped at call_cap_factor·n, with one
// call reserved for every remaining query's check. Engine invariants are
// verified on every bundle; failures are recorded in the report and make the
// run exit nonzero.

#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "casecons/answerers.hpp"
#include "casecons/casefile.hpp"
#include "casecons/commitments.hpp"
#include "casecons/metrics.hpp"
#include "casecons/repair.hpp"

namespace casecons {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string policy = "oracle";
  Method method = Method::kCheck;
  Mode mode = Mode::kSequential;
  RepairBudget budget;
  RepairPolicy repair_policy;
  bool filtered_vote = false;
  std::optional<std::uint64_t> seed;
  SolverOptions solver = SolverOptions::test_mode();
  std::optional<Split> split;  // nullopt runs every case
  int jobs = 1;

  void validate() const {
    budget.validate();
    if (jobs < 1) throw ConfigError("--jobs must be at least 1");
  }

  std::string label() const {
    std::string s = policy + "/" + to_string(method) + "/" + to_string(mode);
    if (filtered_vote) s += "/filtered";
    return s;
  }
};

// Applies the run seed and checks that stochastic policies are seeded.
inline Policy configure_policy(Policy p, const RunConfig& cfg) {
  if (cfg.seed) p = with_seed(std::move(p), *cfg.seed);
  std::function<bool(const Policy&)> unseeded = [&](const Policy& q) {
    if (q.kind == Policy::Kind::kNoisy && q.seed == 0) return true;
    if (q.kind == Policy::Kind::kHistory && q.history_bias > 0 && q.seed == 0) return true;
    return q.inner && unseeded(*q.inner);
  };
  if (unseeded(p)) throw ConfigError("policy '" + p.name + "' is stochastic and needs a seed");
  if (cfg.filtered_vote && p.kind != Policy::Kind::kSelfConsistency)
    throw ConfigError("the logic filter needs a self-consistency policy");
  p.validate();
  return p;
}

struct BundleRun {
  BundleReport report;
  double seconds = 0;
};

namespace detail {

inline StepStatus step_status(SolveStatus s) {
  switch (s) {
    case SolveStatus::kSat: return StepStatus::kSat;
    case SolveStatus::kUnsat: return StepStatus::kUnsat;
    case SolveStatus::kTimeout: return StepStatus::kTimeout;
  }
  return StepStatus::kTimeout;
}

inline std::vector<std::string> core_queries(const BeliefState& state, const UnsatCore& core) {
  std::vector<std::string> out;
  for (auto m : core.members)
    out.push_back(m == UnsatCore::kCurrent ? "*" : state.entries()[m].commitment.query_id);
  return out;
}

inline SolveStatus fresh_status(const Formula& f, const SolverOptions& options) {
  Solver s(f, options);
  return s.solve().status;
}

}  // namespace detail

inline BundleRun run_bundle(const CaseFile& cf, const Policy& policy, const RunConfig& cfg) {
  using Clock = std::chrono::steady_clock;
  auto started = Clock::now();
  BundleRun run;
  BundleReport& rep = run.report;
  rep.case_id = cf.id;
  rep.domain = cf.domain;
  rep.split = cf.split;
  rep.mode = cfg.mode;
  rep.method = cfg.method;
  rep.policy = policy.name;
  rep.filtered_vote = cfg.filtered_vote;

  CompiledCase cc = compile(cf);
  AnswerContext ctx = make_answer_context(cf, cc, cfg.solver);
  const std::size_t n = cf.queries.size();
  const bool checking = cfg.method != Method::kBaseline;
  const std::uint64_t cap = checking ? static_cast<std::uint64_t>(cfg.budget.call_cap_factor) * n
                                     : std::numeric_limits<std::uint64_t>::max();
  const Origin origin = policy.kind == Policy::Kind::kReplay ? Origin::kReplay : Origin::kExtract;

  BeliefState state(cc.base, cfg.solver);
  BeliefState measured(cc.base, cfg.solver);  // baseline statuses, uncounted
  std::vector<Answer> given;
  const std::vector<Answer> none;
  // Calls available beyond the checks still owed to queries t..n-1.
  auto spare = [&](std::size_t t) -> std::uint64_t {
    std::uint64_t reserved = n - t;
    std::uint64_t used = state.solver_calls();
    return used + reserved >= cap ? 0 : cap - used - reserved;
  };
  StepStatus prev_after = StepStatus::kSat;

  for (std::size_t t = 0; t < n; ++t) {
    const Query& q = cf.queries[t];
    StepRecord st;
    st.query = q.id;
    st.gold = q.gold;
    const auto& history = cfg.mode == Mode::kSequential ? given : none;
    std::uint64_t calls_before = state.solver_calls();
    Answer a;
    Commitment psi;
    if (cfg.filtered_vote) {
      auto draws = sample_answers(policy, ctx, t, history);
      std::vector<Commitment> samples;
      a.calls = 0;
      for (const auto& d : draws) {
        a.calls += d.calls;
        rep.warnings.insert(rep.warnings.end(), d.warnings.begin(), d.warnings.end());
        samples.push_back(extract_commitment(cf, cc, t, d.label, d.derived, origin, &rep.warnings));
      }
      CallBudget vote_budget{spare(t), 0};
      auto vote = logic_filtered_vote(state, samples, checking ? &vote_budget : nullptr);
      a.label = vote.label;
      psi = vote.commitment;
      psi.label = vote.label;
    } else {
      a = answer(policy, ctx, t, history);
      rep.warnings.insert(rep.warnings.end(), a.warnings.begin(), a.warnings.end());
      psi = extract_commitment(cf, cc, t, a.label, a.derived, origin, &rep.warnings);
    }
    st.predicted = a.label;
    st.answerer_calls = a.calls;
    st.derived = static_cast<int>(psi.derived_count());

    if (!checking) {
      measured.push(psi);
      StepStatus s = detail::step_status(measured.check().status);
      state.push(std::move(psi));
      st.before = st.after = s;
    } else {
      auto outcome = state.append_and_check(psi);
      if (outcome == BeliefState::Outcome::kAccepted) {
        st.before = st.after = StepStatus::kSat;
      } else if (outcome == BeliefState::Outcome::kTimeoutFallback) {
        st.before = StepStatus::kTimeout;
        st.after = prev_after;
      } else {
        st.before = StepStatus::kUnsat;
        CallBudget calls{spare(t + 1), 0};
        UnsatCore core = state.unsat_core(psi, calls);
        RepairRecord rr;
        rr.core = detail::core_queries(state, core);
        rr.core_minimal = core.minimal;
        if (cfg.method == Method::kCheck) {
          state.clear_pending();
          state.push(unknown_commitment(psi));
          rr.result = "detected";
        } else {
          auto out = attempt_repair(state, psi, core, cfg.budget, calls, cfg.repair_policy);
          rr.result = to_string(out.result);
          rr.verifications = static_cast<int>(out.tried.size());
          if (out.accepted) {
            rr.kind = to_string(out.accepted->kind);
            rr.cost = {out.accepted->cost.delta_past, out.accepted->cost.label_changed,
                       out.accepted->cost.size};
            for (auto idx : out.accepted->retracted) {
              rr.retracted.push_back(state.entries()[idx].commitment.query_id);
              rep.steps[idx].retracted_later = true;
              rep.steps[idx].final_label = Label::kUnknown;
              given[idx].label = Label::kUnknown;
              given[idx].derived.clear();
            }
            rep.delta_past += out.accepted->cost.delta_past;
            if (detail::fresh_status(state.retained_formula(), cfg.solver) == SolveStatus::kUnsat)
              rep.invariant_failures.push_back(q.id + ": accepted repair fails fresh re-verification");
          }
          if (out.result == RepairOutcome::Result::kPartial) rep.partial = true;
          if (rr.verifications > cfg.budget.r_max)
            rep.invariant_failures.push_back(q.id + ": more than R_max repair verifications");
        }
        st.after = prev_after == StepStatus::kTimeout ? StepStatus::kTimeout : StepStatus::kSat;
        st.repair = std::move(rr);
      }
    }
    st.final_label = state.entries().at(t).commitment.label;
    st.solver_calls = state.solver_calls() - calls_before;
    prev_after = st.after;
    Answer seen;
    seen.label = st.final_label;
    if (st.final_label == a.label) seen.derived = a.derived;
    given.push_back(std::move(seen));
    rep.steps.push_back(std::move(st));
  }

  rep.solver_calls = state.solver_calls();
  for (const auto& s : rep.steps) rep.answerer_calls += s.answerer_calls;
  if (checking) {
    rep.final_status = detail::step_status(detail::fresh_status(state.retained_formula(), cfg.solver));
  } else {
    rep.final_status = n == 0 ? StepStatus::kSat : rep.steps.back().after;
  }
  std::vector<Commitment> active;
  for (const auto* c : state.active_commitments()) active.push_back(*c);
  auto rc = min_revision_cost(cc.base, active, cfg.solver);
  rep.revision_cost = rc.cost;
  rep.revision_exact = rc.exact;

  // Invariants.
  if (rep.steps.size() != n) rep.invariant_failures.push_back("step count differs from bundle length");
  if (checking && rep.final_status == StepStatus::kUnsat)
    rep.invariant_failures.push_back("retained state fails fresh re-verification");
  if (checking && rep.solver_calls > cap)
    rep.invariant_failures.push_back("solver calls " + std::to_string(rep.solver_calls) + " exceed cap " +
                                     std::to_string(cap));
  bool clean = std::none_of(rep.steps.begin(), rep.steps.end(),
                            [](const StepRecord& s) { return s.before != StepStatus::kSat; });
  if (checking && clean && !cfg.filtered_vote && rep.solver_calls != n)
    rep.invariant_failures.push_back("clean bundle used " + std::to_string(rep.solver_calls) +
                                     " solver calls instead of " + std::to_string(n));
  if (cfg.method != Method::kCheckRepair) {
    bool seen_unsat = false;
    for (const auto& s : rep.steps) {
      if (s.after == StepStatus::kUnsat) seen_unsat = true;
      else if (seen_unsat && s.after == StepStatus::kSat)
        rep.invariant_failures.push_back(s.query + ": SAT status after UNSAT without repair");
    }
    if (n > 0 && contradiction_density(rep) * static_cast<double>(n) > 1.0 + 1e-9 &&
        cfg.method == Method::kBaseline)
      rep.invariant_failures.push_back("more than one contradiction without repair");
  }
  if (rep.final_status == StepStatus::kSat && rep.revision_cost != 0)
    rep.invariant_failures.push_back("satisfiable final state with nonzero revision cost");

  run.seconds = std::chrono::duration<double>(Clock::now() - started).count();
  return run;
}

struct RunResult {
  std::vector<BundleReport> reports;  // sorted by case id
  std::vector<double> seconds;        // aligned with reports

  std::size_t invariant_failures() const {
    std::size_t n = 0;
    for (const auto& r : reports) n += r.invariant_failures.size();
    return n;
  }
};

inline RunResult run_corpus(const std::vector<CaseFile>& corpus, const Policy& policy,
                            const RunConfig& cfg) {
  cfg.validate();
  Policy p = configure_policy(policy, cfg);
  std::vector<const CaseFile*> cases;
  for (const auto& c : corpus)
    if (!cfg.split || c.split == *cfg.split) cases.push_back(&c);
  std::vector<BundleRun> runs(cases.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= cases.size()) return;
      try {
        runs[i] = run_bundle(*cases[i], p, cfg);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        next = cases.size();
      }
    }
  };
  int jobs = std::min<int>(cfg.jobs, std::max<int>(1, static_cast<int>(cases.size())));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
  std::vector<std::size_t> order(runs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return runs[a].report.case_id < runs[b].report.case_id;
  });
  RunResult out;
  for (auto i : order) {
    out.reports.push_back(std::move(runs[i].report));
    out.seconds.push_back(runs[i].seconds);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Run directories: reports.jsonl and manifest.json are deterministic;
// wall-clock lives in timing.jsonl.

inline Json run_manifest(const RunConfig& cfg, const Policy& policy, const RunResult& result,
                         const std::string& corpus) {
  Json m = Json::object();
  m["corpus"] = corpus;
  m["policy"] = policy.name;
  m["policy_kind"] = to_string(policy.kind);
  m["method"] = to_string(cfg.method);
  m["mode"] = to_string(cfg.mode);
  m["filtered_vote"] = cfg.filtered_vote;
  m["seed"] = cfg.seed ? Json(*cfg.seed) : Json(nullptr);
  m["split"] = cfg.split ? Json(to_string(*cfg.split)) : Json("all");
  m["r_max"] = cfg.budget.r_max;
  m["call_cap_factor"] = cfg.budget.call_cap_factor;
  m["delta_past_max"] = cfg.budget.delta_past_max;
  m["solver_conflict_limit"] = cfg.solver.conflict_limit;
  m["solver_timeout_seconds"] = cfg.solver.timeout_seconds;
  m["repair_actions"] = {{"flip", cfg.repair_policy.flip},
                         {"soften", cfg.repair_policy.soften},
                         {"retract", cfg.repair_policy.retract}};
  m["bundles"] = result.reports.size();
  std::size_t q = 0;
  for (const auto& r : result.reports) q += r.steps.size();
  m["queries"] = q;
  m["invariant_failures"] = result.invariant_failures();
  m["files"] = {"reports.jsonl", "timing.jsonl", "manifest.json"};
  return m;
}

inline std::string serialize_timing(const RunResult& result) {
  std::string out;
  for (std::size_t i = 0; i < result.reports.size(); ++i) {
    Json j = Json::object();
    j["case"] = result.reports[i].case_id;
    j["seconds"] = result.seconds[i];
    out += j.dump() + "\n";
  }
  return out;
}

inline std::vector<double> parse_timing(std::string_view text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    pos = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    out.push_back(Json::parse(line).at("seconds").get<double>());
  }
  return out;
}

inline void write_run(const std::string& dir, const RunConfig& cfg, const Policy& policy,
                      const RunResult& result, const std::string& corpus) {
  std::filesystem::create_directories(dir);
  write_file(dir + "/reports.jsonl", serialize_reports(result.reports));
  write_file(dir + "/timing.jsonl", serialize_timing(result));
  write_file(dir + "/manifest.json", run_manifest(cfg, policy, result, corpus).dump(2) + "\n");
}

}  // namespace casecons
