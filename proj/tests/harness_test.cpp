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


#include "casecons/harness.hpp"

#include <gtest/gtest.h>

#include "casecons/generator.hpp"

using namespace casecons;

namespace {

const std::vector<CaseFile>& smoke() {
  static const std::vector<CaseFile> c = generate_corpus(GeneratorSpec::with_total(24, 5));
  return c;
}

Policy preset(const std::string& name) { return load_policy(load_presets(), name); }

RunConfig config(Method m, const std::string& policy = "nocot") {
  RunConfig cfg;
  cfg.policy = policy;
  cfg.method = m;
  return cfg;
}

CaseFile scheduling_case() {
  return load_corpus(std::string(CASECONS_DATA_DIR) + "/scheduling_case.jsonl").at(0);
}

Policy scheduling_replay() {
  auto trace = std::make_shared<ReplayTrace>(parse_replay_trace(
      R"({"case":"sched-room1","query":"q1","label":"Entailed"}
{"case":"sched-room1","query":"q2","label":"Entailed"}
{"case":"sched-room1","query":"q3","label":"Contradicted"}
{"case":"sched-room1","query":"q4","label":"Unknown"}
{"case":"sched-room1","query":"q5","label":"Entailed"}
)"));
  Policy p;
  p.name = "replay";
  p.kind = Policy::Kind::kReplay;
  p.trace = trace;
  return p;
}

}  // namespace

TEST(Harness, OracleCheckIsConsistentWithOneCallPerQuery) {
  auto run = run_corpus(smoke(), Policy{}, config(Method::kCheck, "oracle"));
  ASSERT_EQ(run.reports.size(), smoke().size());
  for (const auto& r : run.reports) {
    EXPECT_TRUE(r.consistent()) << r.case_id;
    EXPECT_EQ(r.solver_calls, r.steps.size()) << r.case_id;
    EXPECT_TRUE(r.invariant_failures.empty()) << r.case_id;
    for (const auto& s : r.steps) EXPECT_EQ(s.final_label, *s.gold);
  }
  auto m = compute_metrics(run.reports);
  EXPECT_EQ(m.set_cons, 1.0);
  EXPECT_EQ(m.accuracy, 1.0);
  EXPECT_EQ(m.contradiction_density, 0.0);
  EXPECT_EQ(m.revision_cost, 0.0);
}

TEST(Harness, NoisyBaselineBreaksAndRepairRestores) {
  Policy p = preset("nocot");
  auto base = run_corpus(smoke(), p, config(Method::kBaseline));
  auto fixed = run_corpus(smoke(), p, config(Method::kCheckRepair));
  auto mb = compute_metrics(base.reports), mr = compute_metrics(fixed.reports);
  EXPECT_LT(mb.set_cons, 1.0);
  EXPECT_GT(mr.set_cons, mb.set_cons);
  EXPECT_GT(mb.revision_cost, 0.0);
  EXPECT_EQ(base.invariant_failures(), 0u);
  EXPECT_EQ(fixed.invariant_failures(), 0u);
  EXPECT_EQ(mb.solver_calls, 0u);
}

TEST(Harness, BaselineStatusesAreMonotone) {
  auto run = run_corpus(smoke(), preset("history"), config(Method::kBaseline));
  int broken = 0;
  for (const auto& r : run.reports) {
    std::size_t first_unsat = r.steps.size() + 1;
    for (std::size_t i = 0; i < r.steps.size(); ++i)
      if (r.steps[i].after != StepStatus::kSat) {
        first_unsat = i + 1;
        break;
      }
    for (std::size_t i = first_unsat; i < r.steps.size(); ++i) EXPECT_NE(r.steps[i].after, StepStatus::kSat);
    double n = static_cast<double>(r.steps.size());
    EXPECT_DOUBLE_EQ(*auc_prefix_cons(r), (std::min<double>(first_unsat, n + 1) - 1) / n);
    EXPECT_LE(contradiction_density(r), 1.0 / n + 1e-12);
    broken += first_unsat <= r.steps.size();
    if (r.final_status == StepStatus::kSat) {
      EXPECT_EQ(r.revision_cost, 0);
    } else {
      EXPECT_GE(r.revision_cost, 1);
    }
  }
  EXPECT_GT(broken, 0);
}

TEST(Harness, RepairRespectsBudgets) {
  RunConfig cfg = config(Method::kCheckRepair, "history");
  auto run = run_corpus(smoke(), preset("history"), cfg);
  for (const auto& r : run.reports) {
    EXPECT_LE(r.solver_calls, 3 * r.steps.size());
    std::uint64_t sum = 0;
    for (const auto& s : r.steps) {
      sum += s.solver_calls;
      if (s.repair) {
        EXPECT_LE(s.repair->verifications, cfg.budget.r_max);
      }
    }
    EXPECT_EQ(sum, r.solver_calls);
    EXPECT_TRUE(r.invariant_failures.empty());
  }
}

TEST(Harness, DeterministicAcrossRunsAndJobs) {
  Policy p = preset("nocot");
  RunConfig one = config(Method::kCheckRepair);
  RunConfig many = one;
  many.jobs = 4;
  auto a = run_corpus(smoke(), p, one);
  auto b = run_corpus(smoke(), p, one);
  auto c = run_corpus(smoke(), p, many);
  EXPECT_EQ(serialize_reports(a.reports), serialize_reports(b.reports));
  EXPECT_EQ(serialize_reports(a.reports), serialize_reports(c.reports));
  EXPECT_TRUE(std::is_sorted(a.reports.begin(), a.reports.end(),
                             [](const auto& x, const auto& y) { return x.case_id < y.case_id; }));
  RunConfig reseeded = one;
  reseeded.seed = 99;
  EXPECT_NE(serialize_reports(run_corpus(smoke(), p, reseeded).reports), serialize_reports(a.reports));
}

TEST(Harness, SplitFilterAndSetMode) {
  RunConfig cfg = config(Method::kCheck, "oracle");
  cfg.split = Split::kTrain;
  cfg.mode = Mode::kSet;
  auto run = run_corpus(smoke(), Policy{}, cfg);
  std::size_t train = 0;
  for (const auto& c : smoke()) train += c.split == Split::kTrain;
  EXPECT_EQ(run.reports.size(), train);
  EXPECT_FALSE(compute_metrics(run.reports).auc);
}

TEST(Harness, SchedulingViolationIsRepairedByRevisingTheLatestAnswer) {
  std::vector<CaseFile> corpus = {scheduling_case()};
  Policy p = scheduling_replay();
  auto base = run_corpus(corpus, p, config(Method::kBaseline));
  EXPECT_EQ(base.reports[0].final_status, StepStatus::kUnsat);
  EXPECT_EQ(base.reports[0].steps[4].before, StepStatus::kUnsat);
  EXPECT_EQ(base.reports[0].revision_cost, 1);

  auto run = run_corpus(corpus, p, config(Method::kCheckRepair));
  const auto& r = run.reports[0];
  EXPECT_TRUE(r.consistent());
  ASSERT_TRUE(r.steps[4].repair);
  const auto& rr = *r.steps[4].repair;
  EXPECT_EQ(rr.core, (std::vector<std::string>{"q2", "*"}));
  EXPECT_TRUE(rr.core_minimal);
  EXPECT_EQ(rr.result, "repaired");
  EXPECT_EQ(rr.kind, "flip");
  EXPECT_EQ(rr.cost, (std::array<int, 3>{0, 1, 0}));
  EXPECT_EQ(r.steps[4].final_label, Label::kUnknown);
  EXPECT_EQ(r.steps[1].final_label, Label::kEntailed);

  RunConfig retract_only = config(Method::kCheckRepair);
  retract_only.repair_policy = {false, false, true};
  auto rr2 = run_corpus(corpus, p, retract_only).reports[0];
  EXPECT_TRUE(rr2.consistent());
  EXPECT_EQ(rr2.steps[4].repair->retracted, std::vector<std::string>{"q2"});
  EXPECT_EQ(rr2.steps[1].final_label, Label::kUnknown);
  EXPECT_TRUE(rr2.steps[1].retracted_later);
  EXPECT_EQ(rr2.steps[4].final_label, Label::kEntailed);
  EXPECT_EQ(rr2.delta_past, 1);
}

TEST(Harness, ReplayMissesWarn) {
  std::vector<CaseFile> corpus = {scheduling_case()};
  Policy p = scheduling_replay();
  p.trace = std::make_shared<ReplayTrace>(
      parse_replay_trace("{\"case\":\"sched-room1\",\"query\":\"q1\",\"label\":\"E\"}\n"));
  auto r = run_corpus(corpus, p, config(Method::kCheck)).reports[0];
  EXPECT_EQ(r.warnings.size(), 4u);
  EXPECT_EQ(r.steps[1].predicted, Label::kUnknown);
}

TEST(Harness, FilteredVoteNeverKeepsAViolatingLabel) {
  RunConfig cfg = config(Method::kCheck, "sc20");
  cfg.filtered_vote = true;
  auto run = run_corpus(smoke(), preset("sc20"), cfg);
  for (const auto& r : run.reports) {
    EXPECT_TRUE(r.consistent());
    for (const auto& s : r.steps) EXPECT_EQ(s.before, StepStatus::kSat) << r.case_id << "/" << s.query;
    EXPECT_LE(r.solver_calls, 3 * r.steps.size());
  }
}

TEST(Harness, ConfigValidation) {
  Policy unseeded = preset("nocot");
  unseeded.seed = 0;
  EXPECT_THROW(run_corpus(smoke(), unseeded, config(Method::kBaseline)), ConfigError);
  RunConfig seeded = config(Method::kBaseline);
  seeded.seed = 4;
  EXPECT_NO_THROW(configure_policy(unseeded, seeded));
  RunConfig vote = config(Method::kCheck);
  vote.filtered_vote = true;
  EXPECT_THROW(configure_policy(preset("nocot"), vote), ConfigError);
  RunConfig bad = config(Method::kCheckRepair);
  bad.budget.r_max = 0;
  EXPECT_THROW(run_corpus(smoke(), preset("nocot"), bad), std::invalid_argument);
}

TEST(Harness, RunDirectoryFiles) {
  auto dir = std::filesystem::temp_directory_path() / "casecons_harness_test";
  std::filesystem::remove_all(dir);
  RunConfig cfg = config(Method::kCheck, "oracle");
  auto run = run_corpus(smoke(), Policy{}, cfg);
  write_run(dir.string(), cfg, Policy{}, run, "smoke");
  auto reports = parse_reports(read_file((dir / "reports.jsonl").string()));
  EXPECT_EQ(reports, run.reports);
  EXPECT_EQ(parse_timing(read_file((dir / "timing.jsonl").string())).size(), run.reports.size());
  Json manifest = Json::parse(read_file((dir / "manifest.json").string()));
  EXPECT_EQ(manifest["bundles"], run.reports.size());
  EXPECT_EQ(manifest["invariant_failures"], 0);
  std::filesystem::remove_all(dir);
}
