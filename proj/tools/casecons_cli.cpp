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


#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "casecons/answerers.hpp"
#include "casecons/casefile.hpp"
#include "casecons/generator.hpp"
#include "casecons/harness.hpp"
#include "casecons/metrics.hpp"

namespace {

using namespace casecons;

constexpr int kInvariantFailure = 1;
constexpr int kUsageError = 2;

std::string corpus_dir() {
  const char* dir = std::getenv("CASECONS_CORPUS_DIR");
  return dir && *dir ? dir : ".";
}

std::string default_corpus() { return corpus_dir() + "/corpus.jsonl"; }

std::array<double, 3> parse_ratios(const std::string& text) {
  std::array<double, 3> r{};
  std::stringstream ss(text);
  std::string part;
  std::size_t i = 0;
  while (std::getline(ss, part, ',')) {
    if (i >= 3) throw ConfigError("--split-ratios needs three comma-separated values");
    r[i++] = std::stod(part);
  }
  if (i != 3) throw ConfigError("--split-ratios needs three comma-separated values");
  return r;
}

int cmd_generate(int cases, std::uint64_t seed, const std::string& ratios, std::string out) {
  GeneratorSpec spec = cases >= 0 ? GeneratorSpec::with_total(cases, seed) : GeneratorSpec{};
  spec.seed = seed;
  spec.split = parse_ratios(ratios);
  auto corpus = generate_corpus(spec);
  if (out.empty()) out = default_corpus();
  save_corpus(out, corpus);
  std::cout << composition_table(corpus);
  std::cout << "wrote " << corpus.size() << " cases to " << out << "\n";
  return 0;
}

int cmd_label(const std::string& in, std::string out, bool validate_only, const SolverOptions& solver) {
  auto corpus = load_corpus(in);
  int failures = 0;
  for (auto& c : corpus) {
    try {
      if (validate_only) {
        validate_case(c, solver);
      } else if (!label_case(c, solver)) {
        std::cerr << c.id << ": premises unsatisfiable or a label check timed out\n";
        ++failures;
      }
    } catch (const CaseError& e) {
      std::cerr << e.what() << "\n";
      ++failures;
    }
  }
  if (!validate_only) {
    if (out.empty()) out = in;
    save_corpus(out, corpus);
    std::cout << "labelled " << corpus.size() - failures << " of " << corpus.size() << " cases into " << out
              << "\n";
  } else {
    std::cout << "validated " << corpus.size() - failures << " of " << corpus.size() << " cases\n";
  }
  return failures == 0 ? 0 : kInvariantFailure;
}

struct RunArgs {
  std::string corpus;
  std::string presets;
  std::string replay;
  std::string method = "check";
  std::string mode = "sequential";
  std::string split = "all";
  std::string actions = "flip,soften,retract";
  std::string out;
  std::uint64_t seed = 0;
  bool seed_given = false;
  double timeout = 0;
  std::int64_t conflicts = 100000;
};

int cmd_run(RunConfig cfg, RunArgs a) {
  auto m = parse_method(a.method);
  if (!m) throw ConfigError("unknown method '" + a.method + "'");
  cfg.method = *m;
  auto mode = parse_mode(a.mode);
  if (!mode) throw ConfigError("unknown mode '" + a.mode + "'");
  cfg.mode = *mode;
  if (a.split != "all") {
    auto s = parse_split(a.split);
    if (!s || *s == Split::kNone) throw ConfigError("unknown split '" + a.split + "'");
    cfg.split = *s;
  }
  cfg.repair_policy = {a.actions.find("flip") != std::string::npos,
                       a.actions.find("soften") != std::string::npos,
                       a.actions.find("retract") != std::string::npos};
  if (a.seed_given) cfg.seed = a.seed;
  cfg.solver = SolverOptions::test_mode(a.conflicts);
  cfg.solver.timeout_seconds = a.timeout;
  if (a.corpus.empty()) a.corpus = default_corpus();
  if (a.presets.empty()) a.presets = default_presets_path();
  std::shared_ptr<const ReplayTrace> trace;
  if (!a.replay.empty()) trace = std::make_shared<ReplayTrace>(parse_replay_trace(read_file(a.replay)));
  Policy policy = configure_policy(load_policy(load_presets(a.presets), cfg.policy, trace), cfg);
  auto corpus = load_corpus(a.corpus);
  auto result = run_corpus(corpus, policy, cfg);
  if (a.out.empty()) a.out = "runs/" + cfg.policy + "-" + to_string(cfg.method) + "-" + to_string(cfg.mode);
  write_run(a.out, cfg, policy, result, a.corpus);
  auto metrics = compute_metrics(result.reports);
  std::cout << result.reports.size() << " bundles, SetCons " << metrics.set_cons << ", Acc " << metrics.accuracy
            << ", solver calls " << metrics.solver_calls << "; reports in " << a.out << "\n";
  std::size_t failures = result.invariant_failures();
  if (failures > 0) {
    for (const auto& r : result.reports)
      for (const auto& f : r.invariant_failures) std::cerr << "invariant: " << r.case_id << ": " << f << "\n";
    return kInvariantFailure;
  }
  return 0;
}

std::string run_label(const std::string& dir) {
  auto path = dir + "/manifest.json";
  if (!std::filesystem::exists(path)) return std::filesystem::path(dir).filename().string();
  Json m = Json::parse(read_file(path));
  std::string label = m.value("policy", "?") + "/" + m.value("method", "?") + "/" + m.value("mode", "?");
  if (m.value("filtered_vote", false)) label += "/filtered";
  return label;
}

std::optional<double> wall_overhead(const std::string& run, const std::string& baseline) {
  if (baseline.empty()) return std::nullopt;
  auto a = parse_timing(read_file(run + "/timing.jsonl"));
  auto b = parse_timing(read_file(baseline + "/timing.jsonl"));
  return overhead(a, b).ratio;
}

int cmd_score(const std::string& run, const std::string& baseline) {
  auto reports = parse_reports(read_file(run + "/reports.jsonl"));
  if (!baseline.empty()) {
    auto base = parse_reports(read_file(baseline + "/reports.jsonl"));
    if (base.size() != reports.size())
      throw SchemaError(baseline, "baseline run covers a different set of bundles");
    for (std::size_t i = 0; i < base.size(); ++i)
      if (base[i].case_id != reports[i].case_id)
        throw SchemaError(baseline, "baseline run covers a different set of bundles");
  }
  auto rows = metrics_by_domain(reports);
  Json j = Json::object();
  j["all"] = to_json(rows.back().second);
  Json by = Json::object();
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) by[rows[i].first] = to_json(rows[i].second);
  j["by_domain"] = std::move(by);
  write_file(run + "/metrics.json", j.dump(2) + "\n");
  auto oh = wall_overhead(run, baseline);
  if (oh) {
    Overhead o = overhead(parse_timing(read_file(run + "/timing.jsonl")),
                          parse_timing(read_file(baseline + "/timing.jsonl")));
    Json w = {{"seconds_per_bundle", o.seconds},
              {"baseline_seconds_per_bundle", o.baseline_seconds},
              {"ratio", o.ratio},
              {"baseline", baseline}};
    write_file(run + "/overhead.json", w.dump(2) + "\n");
  }
  std::string table = metrics_table(run_label(run), rows, oh);
  write_file(run + "/table.txt", table);
  std::cout << table;
  return 0;
}

int cmd_report(const std::vector<std::string>& runs, const std::string& baseline, const std::string& out) {
  std::string text;
  bool header = true;
  for (const auto& run : runs) {
    auto reports = parse_reports(read_file(run + "/reports.jsonl"));
    std::string t = metrics_table(run_label(run), metrics_by_domain(reports), wall_overhead(run, baseline));
    text += header ? t : t.substr(t.find('\n') + 1);
    header = false;
  }
  if (!out.empty()) write_file(out, text);
  std::cout << text;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Case-file consistency engine: generate corpora, run answer policies with solver-checked "
               "commitments, and score the results."};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("generate", "Generate a labelled corpus");
  int cases = -1;
  std::uint64_t gen_seed = 7;
  std::string ratios = "0.8,0.1,0.1", gen_out;
  gen->add_option("--cases", cases, "Total cases (default: the 390-case domain mix)");
  gen->add_option("--seed", gen_seed, "Generator seed");
  gen->add_option("--split-ratios", ratios, "train,dev,test ratios");
  gen->add_option("-o,--out", gen_out, "Output JSONL (default: $CASECONS_CORPUS_DIR/corpus.jsonl)");

  auto* lab = app.add_subcommand("label", "Derive (or validate) gold labels with the solver");
  std::string lab_in, lab_out;
  bool validate_only = false;
  double lab_timeout = 30;
  lab->add_option("corpus", lab_in, "Corpus JSONL")->required();
  lab->add_option("-o,--out", lab_out, "Output JSONL (default: in place)");
  lab->add_flag("--validate", validate_only, "Check stored labels instead of writing new ones");
  lab->add_option("--timeout", lab_timeout, "Solver timeout per check, seconds");

  auto* run = app.add_subcommand("run", "Run a policy/method/mode over a corpus");
  RunConfig cfg;
  RunArgs ra;
  run->add_option("--corpus", ra.corpus, "Corpus JSONL (default: $CASECONS_CORPUS_DIR/corpus.jsonl)");
  run->add_option("--policy", cfg.policy, "Policy preset name")->capture_default_str();
  run->add_option("--presets", ra.presets, "Policy presets JSON");
  run->add_option("--replay", ra.replay, "Replay trace JSONL for replay presets");
  run->add_option("--method", ra.method, "baseline | check | check+repair")->capture_default_str();
  run->add_option("--mode", ra.mode, "sequential | set")->capture_default_str();
  run->add_flag("--filter", cfg.filtered_vote, "Logic-filtered self-consistency vote");
  auto* seed_opt = run->add_option("--seed", ra.seed, "Seed for stochastic policies");
  run->add_option("--r-max", cfg.budget.r_max, "Repair verifications per query")->capture_default_str();
  run->add_option("--call-cap", cfg.budget.call_cap_factor, "Solver calls per bundle, times n")
      ->capture_default_str();
  run->add_option("--delta-past-max", cfg.budget.delta_past_max, "Largest retraction before PARTIAL")
      ->capture_default_str();
  run->add_option("--actions", ra.actions, "Repair action families")->capture_default_str();
  run->add_option("--conflicts", ra.conflicts, "Conflict budget per solver call")->capture_default_str();
  run->add_option("--timeout", ra.timeout, "Wall-clock limit per solver call, seconds (0: none)");
  run->add_option("--split", ra.split, "all | train | dev | test")->capture_default_str();
  run->add_option("-j,--jobs", cfg.jobs, "Bundles in parallel")->capture_default_str();
  run->add_option("-o,--out", ra.out, "Run directory");

  auto* score = app.add_subcommand("score", "Compute metrics for a run directory");
  std::string score_run, score_base;
  score->add_option("run", score_run, "Run directory")->required();
  score->add_option("--baseline", score_base, "Matched baseline run directory (fills OH)");

  auto* rep = app.add_subcommand("report", "Table over several run directories");
  std::vector<std::string> rep_runs;
  std::string rep_base, rep_out;
  rep->add_option("runs", rep_runs, "Run directories")->required();
  rep->add_option("--baseline", rep_base, "Baseline run directory for OH");
  rep->add_option("-o,--out", rep_out, "Write the table here as well");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*gen) return cmd_generate(cases, gen_seed, ratios, gen_out);
    if (*lab) {
      SolverOptions o;
      o.timeout_seconds = lab_timeout;
      return cmd_label(lab_in, lab_out, validate_only, o);
    }
    if (*run) {
      ra.seed_given = seed_opt->count() > 0;
      return cmd_run(cfg, ra);
    }
    if (*score) return cmd_score(score_run, score_base);
    if (*rep) return cmd_report(rep_runs, rep_base, rep_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  }
  return 0;
}
