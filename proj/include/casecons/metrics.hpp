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


// Per-bundle run reports and the metric suite computed from them.
//
// Step statuses: `before` is the status of the retained state conjoined with
// the answer's commitment, `after` the status of the state retained once the
// step is processed (after any repair). Rates are pooled over queries for the
// per-query metrics and averaged over bundles for the set-level ones.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "casecons/casefile.hpp"

namespace casecons {

enum class StepStatus { kSat, kUnsat, kTimeout };

inline const char* to_string(StepStatus s) {
  switch (s) {
    case StepStatus::kSat: return "sat";
    case StepStatus::kUnsat: return "unsat";
    case StepStatus::kTimeout: return "timeout";
  }
  return "?";
}

inline std::optional<StepStatus> parse_step_status(std::string_view s) {
  if (s == "sat") return StepStatus::kSat;
  if (s == "unsat") return StepStatus::kUnsat;
  if (s == "timeout") return StepStatus::kTimeout;
  return std::nullopt;
}

enum class Mode { kSequential, kSet };
enum class Method { kBaseline, kCheck, kCheckRepair };

inline const char* to_string(Mode m) { return m == Mode::kSet ? "set" : "sequential"; }

inline const char* to_string(Method m) {
  switch (m) {
    case Method::kBaseline: return "baseline";
    case Method::kCheck: return "check";
    case Method::kCheckRepair: return "check+repair";
  }
  return "?";
}

inline std::optional<Mode> parse_mode(std::string_view s) {
  std::string l = lowercase(s);
  if (l == "sequential" || l == "seq") return Mode::kSequential;
  if (l == "set") return Mode::kSet;
  return std::nullopt;
}

inline std::optional<Method> parse_method(std::string_view s) {
  std::string l = lowercase(s);
  if (l == "baseline" || l == "none") return Method::kBaseline;
  if (l == "check" || l == "check-only") return Method::kCheck;
  if (l == "check+repair" || l == "repair" || l == "check-repair") return Method::kCheckRepair;
  return std::nullopt;
}

struct RepairRecord {
  std::string result;  // repaired, fallback, partial, or detected (check-only)
  std::string kind;    // accepted action family, empty unless repaired
  std::array<int, 3> cost{};
  int verifications = 0;
  std::vector<std::string> core;       // query ids in the core, "*" for the current one
  bool core_minimal = false;
  std::vector<std::string> retracted;  // query ids

  friend bool operator==(const RepairRecord&, const RepairRecord&) = default;
};

struct StepRecord {
  std::string query;
  std::optional<Label> gold;
  Label predicted = Label::kUnknown;
  Label final_label = Label::kUnknown;
  StepStatus before = StepStatus::kSat;
  StepStatus after = StepStatus::kSat;
  bool retracted_later = false;
  int derived = 0;
  std::uint64_t solver_calls = 0;
  std::uint64_t answerer_calls = 0;
  std::optional<RepairRecord> repair;

  friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

struct BundleReport {
  std::string case_id;
  Domain domain = Domain::kRelational;
  Split split = Split::kNone;
  Mode mode = Mode::kSequential;
  Method method = Method::kBaseline;
  std::string policy;
  bool filtered_vote = false;
  std::vector<StepRecord> steps;
  StepStatus final_status = StepStatus::kSat;
  bool partial = false;
  int revision_cost = 0;
  bool revision_exact = true;
  int delta_past = 0;
  std::uint64_t solver_calls = 0;
  std::uint64_t answerer_calls = 0;
  std::vector<std::string> invariant_failures;
  std::vector<std::string> warnings;

  std::size_t size() const { return steps.size(); }
  bool consistent() const { return final_status == StepStatus::kSat && !partial; }

  friend bool operator==(const BundleReport&, const BundleReport&) = default;
};

// ---------------------------------------------------------------------------
// Serialization.

inline Json to_json(const RepairRecord& r) {
  Json j = Json::object();
  j["result"] = r.result;
  if (!r.kind.empty()) j["kind"] = r.kind;
  j["cost"] = r.cost;
  j["verifications"] = r.verifications;
  j["core"] = r.core;
  j["core_minimal"] = r.core_minimal;
  j["retracted"] = r.retracted;
  return j;
}

inline Json to_json(const StepRecord& s) {
  Json j = Json::object();
  j["query"] = s.query;
  j["gold"] = s.gold ? Json(lowercase(to_string(*s.gold))) : Json(nullptr);
  j["predicted"] = lowercase(to_string(s.predicted));
  j["final"] = lowercase(to_string(s.final_label));
  j["before"] = to_string(s.before);
  j["after"] = to_string(s.after);
  j["retracted_later"] = s.retracted_later;
  j["derived"] = s.derived;
  j["solver_calls"] = s.solver_calls;
  j["answerer_calls"] = s.answerer_calls;
  if (s.repair) j["repair"] = to_json(*s.repair);
  return j;
}

inline Json to_json(const BundleReport& r) {
  Json j = Json::object();
  j["case"] = r.case_id;
  j["domain"] = to_string(r.domain);
  j["split"] = to_string(r.split);
  j["mode"] = to_string(r.mode);
  j["method"] = to_string(r.method);
  j["policy"] = r.policy;
  j["filtered_vote"] = r.filtered_vote;
  Json steps = Json::array();
  for (const auto& s : r.steps) steps.push_back(to_json(s));
  j["steps"] = std::move(steps);
  j["final_status"] = to_string(r.final_status);
  j["partial"] = r.partial;
  j["revision_cost"] = r.revision_cost;
  j["revision_exact"] = r.revision_exact;
  j["delta_past"] = r.delta_past;
  j["solver_calls"] = r.solver_calls;
  j["answerer_calls"] = r.answerer_calls;
  j["invariant_failures"] = r.invariant_failures;
  j["warnings"] = r.warnings;
  return j;
}

namespace detail {

inline const Json& need(const Json& j, const char* key, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(path, std::string("missing field '") + key + "'");
  return *it;
}

template <typename T>
T get_as(const Json& j, const char* key, const std::string& path) {
  try {
    return need(j, key, path).get<T>();
  } catch (const Json::type_error&) {
    throw SchemaError(path + "." + key, "wrong type");
  }
}

inline Label label_field(const Json& j, const char* key, const std::string& path) {
  auto l = parse_label(get_as<std::string>(j, key, path));
  if (!l) throw SchemaError(path + "." + key, "unrecognised label");
  return *l;
}

inline StepStatus status_field(const Json& j, const char* key, const std::string& path) {
  auto s = parse_step_status(get_as<std::string>(j, key, path));
  if (!s) throw SchemaError(path + "." + key, "unrecognised status");
  return *s;
}

}  // namespace detail

inline BundleReport report_from_json(const Json& j, const std::string& path = "report") {
  using detail::get_as;
  if (!j.is_object()) throw SchemaError(path, "expected an object");
  BundleReport r;
  r.case_id = get_as<std::string>(j, "case", path);
  auto d = parse_domain(get_as<std::string>(j, "domain", path));
  if (!d) throw SchemaError(path + ".domain", "unrecognised domain");
  r.domain = *d;
  auto sp = parse_split(get_as<std::string>(j, "split", path));
  if (!sp) throw SchemaError(path + ".split", "unrecognised split");
  r.split = *sp;
  auto m = parse_mode(get_as<std::string>(j, "mode", path));
  if (!m) throw SchemaError(path + ".mode", "unrecognised mode");
  r.mode = *m;
  auto me = parse_method(get_as<std::string>(j, "method", path));
  if (!me) throw SchemaError(path + ".method", "unrecognised method");
  r.method = *me;
  r.policy = get_as<std::string>(j, "policy", path);
  r.filtered_vote = get_as<bool>(j, "filtered_vote", path);
  const Json& steps = detail::need(j, "steps", path);
  if (!steps.is_array()) throw SchemaError(path + ".steps", "expected an array");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    std::string sp_path = path + ".steps[" + std::to_string(i) + "]";
    const Json& s = steps[i];
    if (!s.is_object()) throw SchemaError(sp_path, "expected an object");
    StepRecord st;
    st.query = get_as<std::string>(s, "query", sp_path);
    if (!detail::need(s, "gold", sp_path).is_null()) st.gold = detail::label_field(s, "gold", sp_path);
    st.predicted = detail::label_field(s, "predicted", sp_path);
    st.final_label = detail::label_field(s, "final", sp_path);
    st.before = detail::status_field(s, "before", sp_path);
    st.after = detail::status_field(s, "after", sp_path);
    st.retracted_later = get_as<bool>(s, "retracted_later", sp_path);
    st.derived = get_as<int>(s, "derived", sp_path);
    st.solver_calls = get_as<std::uint64_t>(s, "solver_calls", sp_path);
    st.answerer_calls = get_as<std::uint64_t>(s, "answerer_calls", sp_path);
    if (auto it = s.find("repair"); it != s.end()) {
      std::string rp = sp_path + ".repair";
      RepairRecord rr;
      rr.result = get_as<std::string>(*it, "result", rp);
      if (it->contains("kind")) rr.kind = get_as<std::string>(*it, "kind", rp);
      rr.cost = get_as<std::array<int, 3>>(*it, "cost", rp);
      rr.verifications = get_as<int>(*it, "verifications", rp);
      rr.core = get_as<std::vector<std::string>>(*it, "core", rp);
      rr.core_minimal = get_as<bool>(*it, "core_minimal", rp);
      rr.retracted = get_as<std::vector<std::string>>(*it, "retracted", rp);
      st.repair = std::move(rr);
    }
    r.steps.push_back(std::move(st));
  }
  r.final_status = detail::status_field(j, "final_status", path);
  r.partial = get_as<bool>(j, "partial", path);
  r.revision_cost = get_as<int>(j, "revision_cost", path);
  r.revision_exact = get_as<bool>(j, "revision_exact", path);
  r.delta_past = get_as<int>(j, "delta_past", path);
  r.solver_calls = get_as<std::uint64_t>(j, "solver_calls", path);
  r.answerer_calls = get_as<std::uint64_t>(j, "answerer_calls", path);
  r.invariant_failures = get_as<std::vector<std::string>>(j, "invariant_failures", path);
  r.warnings = get_as<std::vector<std::string>>(j, "warnings", path);
  return r;
}

inline std::string serialize_reports(const std::vector<BundleReport>& reports) {
  std::string out;
  for (const auto& r : reports) {
    out += to_json(r).dump();
    out += '\n';
  }
  return out;
}

inline std::vector<BundleReport> parse_reports(std::string_view text) {
  std::vector<BundleReport> out;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    std::string where = "line " + std::to_string(line_no);
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw SchemaError(where, e.what());
    }
    out.push_back(report_from_json(j, where));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Metrics.

struct PerQueryMetrics {
  double accuracy = 0;
  double macro_f1 = 0;
  double unknown_f1 = 0;
  std::array<double, 3> f1{};
};

// A class absent from both gold and predictions scores F1 = 1.
inline double f1_score(std::uint64_t tp, std::uint64_t fp, std::uint64_t fn) {
  if (tp + fp + fn == 0) return 1.0;
  return 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
}

inline PerQueryMetrics per_query_metrics(const std::vector<std::pair<Label, Label>>& gold_pred) {
  PerQueryMetrics m;
  std::array<std::uint64_t, 3> tp{}, fp{}, fn{};
  std::uint64_t correct = 0;
  for (const auto& [g, p] : gold_pred) {
    if (g == p) {
      ++correct;
      ++tp[label_index(g)];
    } else {
      ++fp[label_index(p)];
      ++fn[label_index(g)];
    }
  }
  m.accuracy = gold_pred.empty() ? 0.0 : static_cast<double>(correct) / gold_pred.size();
  for (int c = 0; c < 3; ++c) m.f1[c] = f1_score(tp[c], fp[c], fn[c]);
  m.macro_f1 = (m.f1[0] + m.f1[1] + m.f1[2]) / 3.0;
  m.unknown_f1 = m.f1[label_index(Label::kUnknown)];
  return m;
}

inline std::vector<std::pair<Label, Label>> labelled_pairs(const std::vector<BundleReport>& reports,
                                                          bool final_labels = true) {
  std::vector<std::pair<Label, Label>> out;
  for (const auto& r : reports)
    for (const auto& s : r.steps)
      if (s.gold) out.emplace_back(*s.gold, final_labels ? s.final_label : s.predicted);
  return out;
}

inline PerQueryMetrics per_query_metrics(const std::vector<BundleReport>& reports) {
  return per_query_metrics(labelled_pairs(reports));
}

inline double set_cons_rate(const std::vector<BundleReport>& reports) {
  if (reports.empty()) return 0.0;
  std::size_t ok = 0;
  for (const auto& r : reports) ok += r.consistent();
  return static_cast<double>(ok) / reports.size();
}

// (1/n) Σ_t 1[B_t SAT] over the post-step statuses; undefined in set mode.
inline std::optional<double> auc_prefix_cons(const BundleReport& r) {
  if (r.mode == Mode::kSet || r.steps.empty()) return std::nullopt;
  std::size_t sat = 0;
  for (const auto& s : r.steps) sat += s.after == StepStatus::kSat;
  return static_cast<double>(sat) / r.steps.size();
}

// Fraction of steps where the retained state was SAT and the step's
// commitment made it not SAT.
inline double contradiction_density(const BundleReport& r) {
  if (r.steps.empty()) return 0.0;
  bool prev_sat = true;
  std::size_t transitions = 0;
  for (const auto& s : r.steps) {
    if (prev_sat && s.before != StepStatus::kSat) ++transitions;
    prev_sat = s.after == StepStatus::kSat;
  }
  return static_cast<double>(transitions) / r.steps.size();
}

struct MetricsReport {
  std::size_t bundles = 0;
  std::size_t queries = 0;
  double accuracy = 0;
  double macro_f1 = 0;
  double unknown_f1 = 0;
  double set_cons = 0;
  std::optional<double> auc;
  double revision_cost = 0;
  bool revision_exact = true;
  double contradiction_density = 0;
  double unknown_rate = 0;            // final labels
  double predicted_unknown_rate = 0;  // answers before any repair
  std::uint64_t delta_past_total = 0;
  std::uint64_t violations = 0;
  std::uint64_t repaired = 0;
  std::uint64_t fallbacks = 0;
  std::uint64_t partial = 0;
  std::uint64_t solver_calls = 0;
  std::uint64_t answerer_calls = 0;
  std::uint64_t invariant_failures = 0;
};

inline MetricsReport compute_metrics(const std::vector<BundleReport>& reports) {
  MetricsReport m;
  m.bundles = reports.size();
  auto pq = per_query_metrics(reports);
  m.accuracy = pq.accuracy;
  m.macro_f1 = pq.macro_f1;
  m.unknown_f1 = pq.unknown_f1;
  m.set_cons = set_cons_rate(reports);
  double auc_sum = 0, cd_sum = 0, rc_sum = 0;
  std::size_t auc_n = 0, unk = 0, unk_pred = 0;
  for (const auto& r : reports) {
    m.queries += r.steps.size();
    if (auto a = auc_prefix_cons(r)) {
      auc_sum += *a;
      ++auc_n;
    }
    cd_sum += contradiction_density(r);
    rc_sum += r.revision_cost;
    m.revision_exact = m.revision_exact && r.revision_exact;
    m.delta_past_total += static_cast<std::uint64_t>(r.delta_past);
    m.partial += r.partial;
    m.solver_calls += r.solver_calls;
    m.answerer_calls += r.answerer_calls;
    m.invariant_failures += r.invariant_failures.size();
    for (const auto& s : r.steps) {
      unk += s.final_label == Label::kUnknown;
      unk_pred += s.predicted == Label::kUnknown;
      if (s.before == StepStatus::kUnsat && r.method != Method::kBaseline) ++m.violations;
      if (s.repair) {
        if (s.repair->result == "repaired") ++m.repaired;
        if (s.repair->result == "fallback") ++m.fallbacks;
      }
    }
  }
  if (auc_n > 0 && auc_n == reports.size()) m.auc = auc_sum / auc_n;
  if (!reports.empty()) {
    m.contradiction_density = cd_sum / reports.size();
    m.revision_cost = rc_sum / reports.size();
  }
  if (m.queries > 0) {
    m.unknown_rate = static_cast<double>(unk) / m.queries;
    m.predicted_unknown_rate = static_cast<double>(unk_pred) / m.queries;
  }
  return m;
}

inline Json to_json(const MetricsReport& m) {
  Json j = Json::object();
  j["bundles"] = m.bundles;
  j["queries"] = m.queries;
  j["accuracy"] = m.accuracy;
  j["macro_f1"] = m.macro_f1;
  j["unknown_f1"] = m.unknown_f1;
  j["set_cons"] = m.set_cons;
  j["auc_prefix_cons"] = m.auc ? Json(*m.auc) : Json(nullptr);
  j["revision_cost"] = m.revision_cost;
  j["revision_cost_exact"] = m.revision_exact;
  j["contradiction_density"] = m.contradiction_density;
  j["unknown_rate"] = m.unknown_rate;
  j["predicted_unknown_rate"] = m.predicted_unknown_rate;
  j["delta_past_total"] = m.delta_past_total;
  j["violations"] = m.violations;
  j["repaired"] = m.repaired;
  j["fallbacks"] = m.fallbacks;
  j["partial"] = m.partial;
  j["solver_calls"] = m.solver_calls;
  j["answerer_calls"] = m.answerer_calls;
  j["solver_calls_per_query"] = m.queries ? static_cast<double>(m.solver_calls) / m.queries : 0.0;
  j["answerer_calls_per_query"] = m.queries ? static_cast<double>(m.answerer_calls) / m.queries : 0.0;
  j["invariant_failures"] = m.invariant_failures;
  return j;
}

// Wall-clock overhead against a matched baseline run.
struct Overhead {
  double seconds = 0;           // mean per bundle
  double baseline_seconds = 0;  // mean per bundle
  double ratio = 1.0;
};

inline Overhead overhead(const std::vector<double>& seconds, const std::vector<double>& baseline) {
  auto mean = [](const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / v.size();
  };
  Overhead o;
  o.seconds = mean(seconds);
  o.baseline_seconds = mean(baseline);
  o.ratio = o.baseline_seconds > 0 ? o.seconds / o.baseline_seconds : 1.0;
  return o;
}

// Metrics per domain plus an "all" row.
inline std::vector<std::pair<std::string, MetricsReport>> metrics_by_domain(
    const std::vector<BundleReport>& reports) {
  std::vector<std::pair<std::string, MetricsReport>> out;
  for (Domain d : kAllDomains) {
    std::vector<BundleReport> sub;
    for (const auto& r : reports)
      if (r.domain == d) sub.push_back(r);
    if (!sub.empty()) out.emplace_back(to_string(d), compute_metrics(sub));
  }
  out.emplace_back("all", compute_metrics(reports));
  return out;
}

// Flat table in the column order Acc, F1, Unk-F1, SetCons, AUC, RevCost, OH.
inline std::string metrics_table(const std::string& label,
                                 const std::vector<std::pair<std::string, MetricsReport>>& rows,
                                 std::optional<double> oh = std::nullopt) {
  std::ostringstream out;
  char line[200];
  std::snprintf(line, sizeof line, "%-36s %-11s %6s %6s %6s %7s %6s %7s %6s\n", "Run", "Domain", "Acc",
                "F1", "Unk-F1", "SetCons", "AUC", "RevCost", "OH");
  out << line;
  for (const auto& [domain, m] : rows) {
    char auc[16] = "-", ohs[16] = "-";
    if (m.auc) std::snprintf(auc, sizeof auc, "%.3f", *m.auc);
    if (oh) std::snprintf(ohs, sizeof ohs, "%.2f", *oh);
    std::snprintf(line, sizeof line, "%-36s %-11s %6.3f %6.3f %6.3f %7.3f %6s %7.2f %6s\n", label.c_str(),
                  domain.c_str(), m.accuracy, m.macro_f1, m.unknown_f1, m.set_cons, auc, m.revision_cost, ohs);
    out << line;
  }
  return out.str();
}

}  // namespace casecons
