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


// Simulated answer policies.
//
// A policy maps (case, query, prior answers, draw index) to a label and an
// optional list of derived atoms, deterministically in its seed. The noisy
// policy samples the label from the gold row of a confusion matrix and, for
// committed answers, reports facts the premises entail as derived atoms; with
// a small probability one reported fact is the negation of an entailed one.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "casecons/casefile.hpp"
#include "casecons/rng.hpp"

namespace casecons {

class PolicyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Row-stochastic, gold label (row) to predicted label (column).
struct ConfusionMatrix {
  std::array<std::array<double, 3>, 3> p{};

  static ConfusionMatrix identity() {
    ConfusionMatrix m;
    for (int i = 0; i < 3; ++i) m.p[i][i] = 1.0;
    return m;
  }

  // `accuracy` on the diagonal, the remainder split evenly.
  static ConfusionMatrix diagonal(double accuracy) {
    ConfusionMatrix m;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m.p[i][j] = i == j ? accuracy : (1.0 - accuracy) / 2.0;
    return m;
  }

  void validate() const {
    for (int i = 0; i < 3; ++i) {
      double sum = 0;
      for (int j = 0; j < 3; ++j) {
        if (!(p[i][j] >= 0.0) || p[i][j] > 1.0)
          throw PolicyError("confusion matrix entry out of [0,1] in row " +
                            std::string(to_string(static_cast<Label>(i))));
        sum += p[i][j];
      }
      if (std::fabs(sum - 1.0) > 1e-9)
        throw PolicyError("confusion matrix row " + std::string(to_string(static_cast<Label>(i))) +
                          " sums to " + std::to_string(sum));
    }
  }

  Label sample(Label gold, Rng& rng) const {
    const auto& row = p[label_index(gold)];
    return static_cast<Label>(rng.categorical({row[0], row[1], row[2]}));
  }
};

struct ReplayRecord {
  std::string case_id;
  std::string query_id;
  Label label = Label::kUnknown;
  std::vector<std::string> derived;
  std::vector<Label> samples;
};

class ReplayTrace {
 public:
  void add(ReplayRecord r) {
    auto key = std::make_pair(r.case_id, r.query_id);
    records_[key] = std::move(r);
  }
  const ReplayRecord* find(const std::string& case_id, const std::string& query_id) const {
    auto it = records_.find({case_id, query_id});
    return it == records_.end() ? nullptr : &it->second;
  }
  std::size_t size() const { return records_.size(); }

 private:
  std::map<std::pair<std::string, std::string>, ReplayRecord> records_;
};

// One record per line: {"case", "query", "label", "derived"?, "samples"?}.
inline ReplayTrace parse_replay_trace(std::string_view text) {
  ReplayTrace trace;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
      if (end == text.size()) break;
      continue;
    }
    std::string where = "trace line " + std::to_string(line_no);
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw SchemaError(where, e.what());
    }
    if (!j.is_object()) throw SchemaError(where, "expected an object");
    ReplayRecord r;
    const Json* c = detail::field(j, {"case", "case_id"});
    const Json* q = detail::field(j, {"query", "query_id"});
    const Json* l = detail::field(j, {"label", "answer"});
    if (!c || !q || !l) throw SchemaError(where, "needs case, query and label");
    r.case_id = detail::scalar_string(*c, where + ".case");
    r.query_id = detail::scalar_string(*q, where + ".query");
    auto label = parse_label(detail::scalar_string(*l, where + ".label"));
    if (!label) throw SchemaError(where + ".label", "unrecognised label");
    r.label = *label;
    if (const Json* d = detail::field(j, {"derived"})) {
      if (!d->is_array()) throw SchemaError(where + ".derived", "expected an array");
      for (const auto& a : *d) r.derived.push_back(detail::scalar_string(a, where + ".derived"));
    }
    if (const Json* s = detail::field(j, {"samples"})) {
      if (!s->is_array()) throw SchemaError(where + ".samples", "expected an array");
      for (const auto& a : *s) {
        auto sl = parse_label(detail::scalar_string(a, where + ".samples"));
        if (!sl) throw SchemaError(where + ".samples", "unrecognised label");
        r.samples.push_back(*sl);
      }
    }
    trace.add(std::move(r));
    if (end == text.size()) break;
  }
  return trace;
}

struct Policy {
  enum class Kind { kOracle, kNoisy, kReplay, kSelfConsistency, kHistory };

  std::string name;
  Kind kind = Kind::kOracle;
  std::uint64_t seed = 0;
  ConfusionMatrix matrix = ConfusionMatrix::identity();
  // Probability that a committed answer reports derived atoms, how many at
  // most, and the probability that one negated entailed fact is added.
  double derived_rate = 0.0;
  int max_derived = 2;
  double hallucination = 0.0;
  int k = 1;                      // self-consistency draws
  double history_bias = 0.0;      // h
  std::shared_ptr<const Policy> inner;
  std::shared_ptr<const ReplayTrace> trace;

  void validate() const {
    matrix.validate();
    auto unit = [&](double v, const char* what) {
      if (!(v >= 0.0 && v <= 1.0)) throw PolicyError(name + ": " + what + " must lie in [0,1]");
    };
    unit(derived_rate, "derived_rate");
    unit(hallucination, "hallucination");
    unit(history_bias, "history bias");
    if (max_derived < 0) throw PolicyError(name + ": max_derived must be non-negative");
    if ((kind == Kind::kSelfConsistency || kind == Kind::kHistory) && !inner)
      throw PolicyError(name + ": needs an inner policy");
    if (kind == Kind::kSelfConsistency && k < 1) throw PolicyError(name + ": K must be at least 1");
    if (kind == Kind::kReplay && !trace) throw PolicyError(name + ": replay policy without a trace");
    if (inner) inner->validate();
  }

  bool stochastic() const {
    switch (kind) {
      case Kind::kOracle: return false;
      case Kind::kReplay: return false;
      case Kind::kNoisy: return true;
      default: return inner && (inner->stochastic() || history_bias > 0);
    }
  }

  // Number of answers drawn per query (K for self-consistency).
  int draws() const { return kind == Kind::kSelfConsistency ? k : 1; }
};

inline const char* to_string(Policy::Kind k) {
  switch (k) {
    case Policy::Kind::kOracle: return "oracle";
    case Policy::Kind::kNoisy: return "noisy";
    case Policy::Kind::kReplay: return "replay";
    case Policy::Kind::kSelfConsistency: return "self-consistency";
    case Policy::Kind::kHistory: return "history";
  }
  return "?";
}

struct Answer {
  Label label = Label::kUnknown;
  std::vector<std::string> derived;  // vocabulary names, "-name" for negation
  std::uint64_t calls = 1;           // simulated answerer invocations
  std::vector<std::string> warnings;
};

// Per-case inputs of the simulated policies: facts the premises fix, as
// names with polarity, keyed by atom name.
struct AnswerContext {
  const CaseFile* casefile = nullptr;
  std::vector<std::string> facts;

  const Query& query(std::size_t i) const { return casefile->queries.at(i); }
};

inline std::string atom_base_name(std::string_view atom) {
  std::string s(atom);
  if (!s.empty() && (s[0] == '-' || s[0] == '!' || s[0] == '~')) s.erase(0, 1);
  return s;
}

inline AnswerContext make_answer_context(const CaseFile& cf, const CompiledCase& cc,
                                         const SolverOptions& options = SolverOptions::test_mode()) {
  AnswerContext ctx;
  ctx.casefile = &cf;
  for (const auto& [name, label] : analyze_vocabulary(cc, options)) {
    if (name.rfind("q:", 0) == 0) continue;
    if (label == Label::kEntailed) ctx.facts.push_back(name);
    if (label == Label::kContradicted) ctx.facts.push_back("-" + name);
  }
  return ctx;
}

inline std::string negate_name(const std::string& n) {
  return !n.empty() && n[0] == '-' ? n.substr(1) : "-" + n;
}

namespace detail {

inline void draw_derived(const Policy& p, const AnswerContext& ctx, std::size_t qi, Rng& rng,
                         Answer& a) {
  if (a.label == Label::kUnknown || ctx.facts.empty()) return;
  std::string own = atom_base_name(ctx.query(qi).atom);
  std::vector<std::string> pool;
  for (const auto& f : ctx.facts)
    if (atom_base_name(f) != own) pool.push_back(f);
  if (pool.empty()) return;
  if (p.max_derived > 0 && rng.bernoulli(p.derived_rate)) {
    rng.shuffle(pool);
    int n = rng.range(1, std::min<int>(p.max_derived, static_cast<int>(pool.size())));
    a.derived.assign(pool.begin(), pool.begin() + n);
  }
  if (rng.bernoulli(p.hallucination)) {
    const std::string& f = pool[rng.below(pool.size())];
    a.derived.push_back(negate_name(f));
  }
}

}  // namespace detail

// Mode of the drawn labels; ties (and an empty list) give Unknown. The
// winner's derived atoms come from its first draw.
inline Answer self_consistency(const std::vector<Answer>& draws) {
  Answer out;
  out.calls = 0;
  std::array<int, 3> votes{};
  for (const auto& d : draws) {
    ++votes[label_index(d.label)];
    out.calls += d.calls;
    out.warnings.insert(out.warnings.end(), d.warnings.begin(), d.warnings.end());
  }
  int best = 0;
  for (int l = 1; l < 3; ++l)
    if (votes[l] > votes[best]) best = l;
  int top = 0;
  for (int l = 0; l < 3; ++l) top += votes[l] == votes[best];
  out.label = top == 1 && votes[best] > 0 ? static_cast<Label>(best) : Label::kUnknown;
  for (const auto& d : draws)
    if (d.label == out.label) {
      out.derived = d.derived;
      break;
    }
  return out;
}

inline Answer answer(const Policy& p, const AnswerContext& ctx, std::size_t qi,
                     const std::vector<Answer>& history = {}, std::uint64_t draw = 0);

namespace detail {

// Recorded samples when the inner policy replays a trace that has them,
// otherwise K fresh draws of the inner policy.
inline std::vector<Answer> consistency_draws(const Policy& p, const AnswerContext& ctx, std::size_t qi,
                                             const std::vector<Answer>& history, std::uint64_t draw) {
  std::vector<Answer> out;
  const CaseFile& cf = *ctx.casefile;
  const Query& q = ctx.query(qi);
  const ReplayRecord* r =
      p.inner->kind == Policy::Kind::kReplay ? p.inner->trace->find(cf.id, q.id) : nullptr;
  if (r && !r->samples.empty()) {
    for (std::size_t i = 0; i < r->samples.size() && static_cast<int>(i) < p.k; ++i) {
      Answer d;
      d.label = r->samples[i];
      if (d.label == r->label) d.derived = r->derived;
      out.push_back(std::move(d));
    }
    return out;
  }
  auto k = static_cast<std::uint64_t>(p.k);
  for (std::uint64_t i = 0; i < k; ++i) out.push_back(answer(*p.inner, ctx, qi, history, draw * k + i));
  return out;
}

}  // namespace detail

// `history` holds the answers already given for queries 0..qi-1.
inline Answer answer(const Policy& p, const AnswerContext& ctx, std::size_t qi,
                     const std::vector<Answer>& history, std::uint64_t draw) {
  const CaseFile& cf = *ctx.casefile;
  const Query& q = ctx.query(qi);
  Answer a;
  switch (p.kind) {
    case Policy::Kind::kOracle:
      if (!q.gold) throw PolicyError(cf.id + "/" + q.id + ": oracle policy needs a gold label");
      a.label = *q.gold;
      return a;
    case Policy::Kind::kNoisy: {
      if (!q.gold) throw PolicyError(cf.id + "/" + q.id + ": noisy policy needs a gold label");
      Rng rng = Rng::derive(p.seed, "answer", cf.id, q.id, draw);
      a.label = p.matrix.sample(*q.gold, rng);
      Rng facts = Rng::derive(p.seed, "derived", cf.id, q.id, draw);
      detail::draw_derived(p, ctx, qi, facts, a);
      return a;
    }
    case Policy::Kind::kReplay: {
      const ReplayRecord* r = p.trace->find(cf.id, q.id);
      if (!r) {
        a.warnings.push_back(cf.id + "/" + q.id + ": no replay record, answering Unknown");
        return a;
      }
      a.label = r->label;
      a.derived = r->derived;
      return a;
    }
    case Policy::Kind::kSelfConsistency:
      return self_consistency(detail::consistency_draws(p, ctx, qi, history, draw));
    case Policy::Kind::kHistory: {
      a = answer(*p.inner, ctx, qi, history, draw);
      if (q.depends_on.empty() || history.empty()) return a;
      Rng rng = Rng::derive(p.seed, "history", cf.id, q.id, draw);
      if (!rng.bernoulli(p.history_bias)) return a;
      for (std::size_t j = std::min(qi, history.size()); j-- > 0;) {
        const std::string& prior = cf.queries[j].id;
        if (std::find(q.depends_on.begin(), q.depends_on.end(), prior) == q.depends_on.end()) continue;
        if (history[j].label != a.label) {
          a.label = history[j].label;
          if (a.label == Label::kUnknown) a.derived.clear();
        }
        break;
      }
      return a;
    }
  }
  return a;
}

// The K individual draws behind a self-consistency answer (a single draw
// for other policies), for logic-filtered voting.
inline std::vector<Answer> sample_answers(const Policy& p, const AnswerContext& ctx, std::size_t qi,
                                          const std::vector<Answer>& history = {}) {
  if (p.kind != Policy::Kind::kSelfConsistency) return {answer(p, ctx, qi, history)};
  return detail::consistency_draws(p, ctx, qi, history, 0);
}

// ---------------------------------------------------------------------------
// Presets: a JSON object mapping names to policy descriptions.

namespace detail {

inline ConfusionMatrix matrix_from_json(const Json& j, const std::string& where) {
  ConfusionMatrix m;
  if (j.is_array()) {
    if (j.size() != 3) throw PolicyError(where + ": matrix needs three rows");
    for (int i = 0; i < 3; ++i) {
      if (!j[i].is_array() || j[i].size() != 3) throw PolicyError(where + ": matrix rows need three entries");
      for (int k = 0; k < 3; ++k) m.p[i][k] = j[i][k].get<double>();
    }
  } else if (j.is_object()) {
    for (Label g : kAllLabels) {
      const Json* row = field(j, {to_string(g), lowercase(to_string(g)).c_str()});
      if (!row || !row->is_array() || row->size() != 3)
        throw PolicyError(where + ": matrix row '" + lowercase(to_string(g)) + "' missing");
      for (int k = 0; k < 3; ++k) m.p[label_index(g)][k] = (*row)[k].get<double>();
    }
  } else {
    throw PolicyError(where + ": matrix must be an array or object");
  }
  return m;
}

inline std::shared_ptr<const Policy> build_policy(const Json& presets, const std::string& name,
                                                  std::set<std::string>& visiting,
                                                  const std::shared_ptr<const ReplayTrace>& trace) {
  if (!presets.is_object() || !presets.contains(name)) throw PolicyError("unknown policy preset '" + name + "'");
  if (!visiting.insert(name).second) throw PolicyError("policy preset cycle through '" + name + "'");
  const Json& j = presets.at(name);
  auto p = std::make_shared<Policy>();
  p->name = name;
  std::string kind = lowercase(j.value("kind", "noisy"));
  if (kind == "oracle") p->kind = Policy::Kind::kOracle;
  else if (kind == "noisy") p->kind = Policy::Kind::kNoisy;
  else if (kind == "replay") p->kind = Policy::Kind::kReplay;
  else if (kind == "self-consistency" || kind == "sc") p->kind = Policy::Kind::kSelfConsistency;
  else if (kind == "history") p->kind = Policy::Kind::kHistory;
  else throw PolicyError(name + ": unknown kind '" + kind + "'");
  p->seed = j.value("seed", std::uint64_t{0});
  if (j.contains("matrix")) p->matrix = matrix_from_json(j.at("matrix"), name);
  p->derived_rate = j.value("derived_rate", 0.0);
  p->max_derived = j.value("max_derived", 2);
  p->hallucination = j.value("hallucination", 0.0);
  p->k = j.value("k", 1);
  p->history_bias = j.value("h", 0.0);
  if (j.contains("inner")) p->inner = build_policy(presets, j.at("inner").get<std::string>(), visiting, trace);
  if (p->kind == Policy::Kind::kReplay) p->trace = trace;
  visiting.erase(name);
  p->validate();
  return p;
}

}  // namespace detail

inline Policy load_policy(const Json& presets, const std::string& name,
                          std::shared_ptr<const ReplayTrace> trace = nullptr) {
  std::set<std::string> visiting;
  return *detail::build_policy(presets, name, visiting, trace);
}

// Re-keys every stochastic component of a policy tree to `seed`.
inline Policy with_seed(Policy p, std::uint64_t seed) {
  p.seed = seed;
  if (p.inner) p.inner = std::make_shared<Policy>(with_seed(*p.inner, seed));
  return p;
}

inline std::string default_presets_path() {
  if (const char* dir = std::getenv("CASECONS_DATA_DIR")) return std::string(dir) + "/presets.json";
#ifdef CASECONS_DATA_DIR
  return std::string(CASECONS_DATA_DIR) + "/presets.json";
#else
  return "data/presets.json";
#endif
}

inline Json load_presets(const std::string& path = default_presets_path()) {
  try {
    return Json::parse(read_file(path));
  } catch (const Json::parse_error& e) {
    throw PolicyError(path + ": " + e.what());
  }
}

}  // namespace casecons
