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


// Case files: premises in formal form plus an ordered bundle of queries with
// gold labels. Premises are either DIMACS (with an optional atom-name table)
// or theory text for the bounded integer frontend.
//
// On disk a corpus is JSON Lines, one case per line:
//
//   {"id": "rel-0001", "domain": "relational", "split": "train",
//    "premises": {"format": "dimacs", "text": "p cnf 2 1\n1 2 0\n",
//                 "atom_names": {"trusts_ana_ben": 1, "audits_ben": 2}},
//    "queries": [{"id": "q1", "text": "...", "atom": "-audits_ben",
//                 "gold": "Unknown", "depends_on": []}]}
//
// Query atoms are a DIMACS literal ("3", "-3"), an atom name optionally
// negated with '-', or, for theory premises, an inline expression such as
// "(< end_A start_B)" which is reified under the name "q:<query id>".
// Readers accept case_id, queried_atom, label/gold_label and dependencies as
// aliases, labels in any case, and keep unrecognised fields verbatim.

#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "casecons/lia.hpp"
#include "casecons/logic.hpp"
#include "casecons/rng.hpp"
#include "casecons/solver.hpp"
#include "json.hpp"

namespace casecons {

using Json = nlohmann::ordered_json;

enum class Label { kEntailed, kContradicted, kUnknown };

inline constexpr std::array<Label, 3> kAllLabels = {Label::kEntailed, Label::kContradicted,
                                                    Label::kUnknown};

inline const char* to_string(Label l) {
  switch (l) {
    case Label::kEntailed: return "Entailed";
    case Label::kContradicted: return "Contradicted";
    case Label::kUnknown: return "Unknown";
  }
  return "?";
}

inline int label_index(Label l) { return static_cast<int>(l); }

inline std::string lowercase(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline std::optional<Label> parse_label(std::string_view s) {
  std::string l = lowercase(s);
  if (l == "entailed" || l == "e" || l == "true" || l == "yes") return Label::kEntailed;
  if (l == "contradicted" || l == "c" || l == "false" || l == "no") return Label::kContradicted;
  if (l == "unknown" || l == "u" || l == "undetermined") return Label::kUnknown;
  return std::nullopt;
}

inline Label opposite(Label l) {
  if (l == Label::kEntailed) return Label::kContradicted;
  if (l == Label::kContradicted) return Label::kEntailed;
  return Label::kUnknown;
}

enum class Domain { kRelational, kTemporal, kPolicy, kAbductive };

inline constexpr std::array<Domain, 4> kAllDomains = {Domain::kRelational, Domain::kTemporal,
                                                      Domain::kPolicy, Domain::kAbductive};

inline const char* to_string(Domain d) {
  switch (d) {
    case Domain::kRelational: return "relational";
    case Domain::kTemporal: return "temporal";
    case Domain::kPolicy: return "policy";
    case Domain::kAbductive: return "abductive";
  }
  return "?";
}

inline std::optional<Domain> parse_domain(std::string_view s) {
  std::string l = lowercase(s);
  if (l == "relational") return Domain::kRelational;
  if (l == "temporal" || l == "temporal/capacity") return Domain::kTemporal;
  if (l == "policy" || l == "policy/rules" || l == "rules") return Domain::kPolicy;
  if (l == "abductive" || l == "underspecified") return Domain::kAbductive;
  return std::nullopt;
}

enum class Split { kNone, kTrain, kDev, kTest };

inline const char* to_string(Split s) {
  switch (s) {
    case Split::kNone: return "";
    case Split::kTrain: return "train";
    case Split::kDev: return "dev";
    case Split::kTest: return "test";
  }
  return "?";
}

inline std::optional<Split> parse_split(std::string_view s) {
  std::string l = lowercase(s);
  if (l.empty() || l == "none" || l == "all") return Split::kNone;
  if (l == "train") return Split::kTrain;
  if (l == "dev" || l == "val" || l == "validation") return Split::kDev;
  if (l == "test") return Split::kTest;
  return std::nullopt;
}

struct Premises {
  enum class Format { kDimacs, kTheory };
  Format format = Format::kDimacs;
  std::string text;
  std::map<std::string, int> atom_names;  // DIMACS only

  friend bool operator==(const Premises&, const Premises&) = default;
};

struct Query {
  std::string id;
  std::string text;
  std::string atom;
  std::optional<Label> gold;  // nullopt while unlabeled
  std::vector<std::string> depends_on;
  Json extra = Json::object();

  friend bool operator==(const Query&, const Query&) = default;
};

struct CaseFile {
  std::string id;
  Domain domain = Domain::kRelational;
  Split split = Split::kNone;
  Premises premises;
  std::vector<Query> queries;
  Json extra = Json::object();

  const Query* find_query(std::string_view qid) const {
    for (const auto& q : queries)
      if (q.id == qid) return &q;
    return nullptr;
  }

  friend bool operator==(const CaseFile&, const CaseFile&) = default;
};

class CaseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Premises and query atoms in solver form.
struct CompiledCase {
  Formula base;                             // φ(P) plus reified atom definitions
  std::vector<Literal> query_atoms;         // χ per query, in bundle order
  std::map<std::string, Literal> vocabulary;  // named atoms
  std::optional<lia::GroundedTheory> theory;

  // Resolves "3", "-3", "name", "-name" against the vocabulary.
  std::optional<Literal> resolve(std::string_view token) const {
    std::string t(token);
    t.erase(0, t.find_first_not_of(" \t"));
    t.erase(t.find_last_not_of(" \t") + 1);
    if (t.empty()) return std::nullopt;
    if (auto v = detail::parse_int(t)) {
      if (*v == 0 || std::llabs(*v) > base.variable_count()) return std::nullopt;
      return Literal::from_dimacs(static_cast<int>(*v));
    }
    bool negated = false;
    if (t[0] == '-' || t[0] == '!' || t[0] == '~') {
      negated = true;
      t.erase(0, 1);
    }
    auto it = vocabulary.find(t);
    if (it == vocabulary.end()) return std::nullopt;
    return negated ? ~it->second : it->second;
  }

  std::string name_of(Literal l) const {
    for (const auto& [name, lit] : vocabulary) {
      if (lit == l) return name;
      if (lit == ~l) return "-" + name;
    }
    return to_string(l);
  }
};

inline std::string inline_atom_name(const Query& q) { return "q:" + q.id; }

inline bool is_inline_expression(std::string_view atom) {
  auto p = atom.find_first_not_of(" \t");
  return p != std::string_view::npos && atom[p] == '(';
}

inline CompiledCase compile(const CaseFile& c, const lia::GroundOptions& options = {}) {
  CompiledCase out;
  if (c.premises.format == Premises::Format::kDimacs) {
    out.base = parse_dimacs(c.premises.text);
    for (const auto& [name, var] : c.premises.atom_names) {
      if (var < 1 || var > out.base.variable_count())
        throw CaseError(c.id + ": atom '" + name + "' maps to variable " + std::to_string(var) +
                        " outside the premises");
      out.vocabulary[name] = Literal(var, true);
    }
  } else {
    std::string text = c.premises.text;
    for (const auto& q : c.queries) {
      if (is_inline_expression(q.atom))
        text += "\n(define-atom " + inline_atom_name(q) + " " + q.atom + ")";
    }
    auto theory = lia::ground(lia::parse_theory(text), options);
    for (const auto& [name, var] : theory.atom_vars) out.vocabulary[name] = Literal(var, true);
    out.base = theory.formula;
    out.theory = std::move(theory);
  }
  for (const auto& q : c.queries) {
    std::optional<Literal> chi;
    if (is_inline_expression(q.atom)) {
      if (c.premises.format == Premises::Format::kDimacs)
        throw CaseError(c.id + "/" + q.id + ": inline expressions need theory premises");
      chi = out.resolve(inline_atom_name(q));
    } else {
      chi = out.resolve(q.atom);
    }
    if (!chi) throw CaseError(c.id + "/" + q.id + ": unknown queried atom '" + q.atom + "'");
    out.query_atoms.push_back(*chi);
  }
  return out;
}

// Entailed iff base ∧ ¬χ is UNSAT, Contradicted iff base ∧ χ is UNSAT.
// nullopt when either check times out. The solver must hold exactly the
// base formula; it is left reusable.
inline std::optional<Label> derive_gold_label(Solver& base, Literal chi) {
  auto neg = base.solve({~chi});
  if (neg.status == SolveStatus::kTimeout) return std::nullopt;
  if (neg.status == SolveStatus::kUnsat) {
    // The base is satisfiable by precondition, so χ itself must be SAT.
    return Label::kEntailed;
  }
  auto pos = base.solve({chi});
  if (pos.status == SolveStatus::kTimeout) return std::nullopt;
  return pos.status == SolveStatus::kUnsat ? Label::kContradicted : Label::kUnknown;
}

inline std::optional<Label> derive_gold_label(const Formula& base, Literal chi,
                                              const SolverOptions& options = {}) {
  Solver s(base, options);
  auto r = s.solve();
  if (r.status == SolveStatus::kUnsat)
    throw CaseError("premises are unsatisfiable; gold labels are undefined");
  if (r.status == SolveStatus::kTimeout) return std::nullopt;
  return derive_gold_label(s, chi);
}

// Label of every named atom (positive polarity), in vocabulary order.
inline std::map<std::string, Label> analyze_vocabulary(const CompiledCase& c,
                                                       const SolverOptions& options = {}) {
  Solver s(c.base, options);
  std::map<std::string, Label> out;
  for (const auto& [name, lit] : c.vocabulary) {
    auto l = derive_gold_label(s, lit);
    out[name] = l.value_or(Label::kUnknown);
  }
  return out;
}

// Fills in gold labels. Returns false (leaving the labels unset) when the
// premises are unsatisfiable or any check times out.
inline bool label_case(CaseFile& c, const SolverOptions& options = {}) {
  CompiledCase cc = compile(c);
  Solver s(cc.base, options);
  if (s.solve().status != SolveStatus::kSat) return false;
  std::vector<Label> labels;
  for (Literal chi : cc.query_atoms) {
    auto l = derive_gold_label(s, chi);
    if (!l) return false;
    labels.push_back(*l);
  }
  for (std::size_t i = 0; i < labels.size(); ++i) c.queries[i].gold = labels[i];
  return true;
}

// Throws CaseError if the premises are unsatisfiable or a stored gold label
// disagrees with the derived one.
inline void validate_case(const CaseFile& c, const SolverOptions& options = {}) {
  CompiledCase cc = compile(c);
  Solver s(cc.base, options);
  auto r = s.solve();
  if (r.status == SolveStatus::kUnsat) throw CaseError(c.id + ": premises are unsatisfiable");
  if (r.status == SolveStatus::kTimeout) throw CaseError(c.id + ": premise check timed out");
  for (std::size_t i = 0; i < c.queries.size(); ++i) {
    if (!c.queries[i].gold) continue;
    auto l = derive_gold_label(s, cc.query_atoms[i]);
    if (!l) throw CaseError(c.id + "/" + c.queries[i].id + ": label check timed out");
    if (*l != *c.queries[i].gold)
      throw CaseError(c.id + "/" + c.queries[i].id + ": stored label " +
                      to_string(*c.queries[i].gold) + " but premises give " + to_string(*l));
  }
}

// ---------------------------------------------------------------------------
// JSON Lines corpus format.

class SchemaError : public std::runtime_error {
 public:
  SchemaError(const std::string& path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

namespace detail {

inline const Json* field(const Json& obj, std::initializer_list<const char*> names) {
  for (const char* n : names) {
    auto it = obj.find(n);
    if (it != obj.end()) return &*it;
  }
  return nullptr;
}

inline std::string scalar_string(const Json& v, const std::string& path) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw SchemaError(path, "expected a string");
}

inline Json extras(const Json& obj, std::initializer_list<const char*> known) {
  Json out = Json::object();
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool is_known = std::any_of(known.begin(), known.end(),
                                [&](const char* k) { return it.key() == k; });
    if (!is_known) out[it.key()] = it.value();
  }
  return out;
}

}  // namespace detail

inline Json to_json(const Query& q) {
  Json j = Json::object();
  j["id"] = q.id;
  if (!q.text.empty()) j["text"] = q.text;
  j["atom"] = q.atom;
  j["gold"] = q.gold ? Json(to_string(*q.gold)) : Json(nullptr);
  j["depends_on"] = q.depends_on;
  for (auto it = q.extra.begin(); it != q.extra.end(); ++it) j[it.key()] = it.value();
  return j;
}

inline Json to_json(const CaseFile& c) {
  Json j = Json::object();
  j["id"] = c.id;
  j["domain"] = to_string(c.domain);
  j["split"] = to_string(c.split);
  Json p = Json::object();
  p["format"] = c.premises.format == Premises::Format::kDimacs ? "dimacs" : "theory";
  p["text"] = c.premises.text;
  if (c.premises.format == Premises::Format::kDimacs) {
    Json names = Json::object();
    std::vector<std::pair<int, std::string>> by_var;
    for (const auto& [n, v] : c.premises.atom_names) by_var.push_back({v, n});
    std::sort(by_var.begin(), by_var.end());
    for (const auto& [v, n] : by_var) names[n] = v;
    p["atom_names"] = names;
  }
  j["premises"] = p;
  Json qs = Json::array();
  for (const auto& q : c.queries) qs.push_back(to_json(q));
  j["queries"] = qs;
  for (auto it = c.extra.begin(); it != c.extra.end(); ++it) j[it.key()] = it.value();
  return j;
}

inline Query query_from_json(const Json& j, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path, "expected an object");
  Query q;
  const Json* id = detail::field(j, {"id", "query_id"});
  if (!id) throw SchemaError(path + ".id", "missing");
  q.id = detail::scalar_string(*id, path + ".id");
  if (const Json* t = detail::field(j, {"text", "question"})) {
    if (!t->is_string()) throw SchemaError(path + ".text", "expected a string");
    q.text = t->get<std::string>();
  }
  const Json* atom = detail::field(j, {"atom", "queried_atom"});
  if (!atom) throw SchemaError(path + ".atom", "missing");
  q.atom = detail::scalar_string(*atom, path + ".atom");
  if (const Json* g = detail::field(j, {"gold", "label", "gold_label"}); g && !g->is_null()) {
    if (!g->is_string()) throw SchemaError(path + ".gold", "expected a label string");
    q.gold = parse_label(g->get<std::string>());
    if (!q.gold) throw SchemaError(path + ".gold", "unknown label '" + g->get<std::string>() + "'");
  }
  if (const Json* d = detail::field(j, {"depends_on", "dependencies"}); d && !d->is_null()) {
    if (!d->is_array()) throw SchemaError(path + ".depends_on", "expected an array");
    for (std::size_t i = 0; i < d->size(); ++i)
      q.depends_on.push_back(
          detail::scalar_string((*d)[i], path + ".depends_on[" + std::to_string(i) + "]"));
  }
  q.extra = detail::extras(j, {"id", "query_id", "text", "question", "atom", "queried_atom",
                               "gold", "label", "gold_label", "depends_on", "dependencies"});
  return q;
}

inline CaseFile case_from_json(const Json& j, const std::string& path = "case") {
  if (!j.is_object()) throw SchemaError(path, "expected an object");
  CaseFile c;
  const Json* id = detail::field(j, {"id", "case_id"});
  if (!id) throw SchemaError(path + ".id", "missing");
  c.id = detail::scalar_string(*id, path + ".id");
  const Json* domain = detail::field(j, {"domain"});
  if (!domain || !domain->is_string()) throw SchemaError(path + ".domain", "missing or not a string");
  auto d = parse_domain(domain->get<std::string>());
  if (!d) throw SchemaError(path + ".domain", "unknown domain '" + domain->get<std::string>() + "'");
  c.domain = *d;
  if (const Json* s = detail::field(j, {"split"}); s && !s->is_null()) {
    if (!s->is_string()) throw SchemaError(path + ".split", "expected a string");
    auto sp = parse_split(s->get<std::string>());
    if (!sp) throw SchemaError(path + ".split", "unknown split '" + s->get<std::string>() + "'");
    c.split = *sp;
  }
  const Json* p = detail::field(j, {"premises"});
  if (!p) throw SchemaError(path + ".premises", "missing");
  if (p->is_string()) {
    c.premises.text = p->get<std::string>();
    auto first = c.premises.text.find_first_not_of(" \t\r\n");
    bool theory = first != std::string::npos &&
                  (c.premises.text[first] == '(' || c.premises.text[first] == ';');
    c.premises.format = theory ? Premises::Format::kTheory : Premises::Format::kDimacs;
  } else if (p->is_object()) {
    const Json* fmt = detail::field(*p, {"format"});
    std::string f = fmt && fmt->is_string() ? lowercase(fmt->get<std::string>()) : "dimacs";
    if (f == "dimacs" || f == "cnf") c.premises.format = Premises::Format::kDimacs;
    else if (f == "theory" || f == "smt" || f == "smtlib") c.premises.format = Premises::Format::kTheory;
    else throw SchemaError(path + ".premises.format", "unknown format '" + f + "'");
    const Json* text = detail::field(*p, {"text"});
    if (!text || !text->is_string()) throw SchemaError(path + ".premises.text", "missing or not a string");
    c.premises.text = text->get<std::string>();
    if (const Json* names = detail::field(*p, {"atom_names"}); names && !names->is_null()) {
      if (!names->is_object()) throw SchemaError(path + ".premises.atom_names", "expected an object");
      for (auto it = names->begin(); it != names->end(); ++it) {
        if (!it.value().is_number_integer())
          throw SchemaError(path + ".premises.atom_names." + it.key(), "expected an integer");
        c.premises.atom_names[it.key()] = it.value().get<int>();
      }
    }
  } else {
    throw SchemaError(path + ".premises", "expected an object or a string");
  }
  const Json* qs = detail::field(j, {"queries"});
  if (!qs || !qs->is_array()) throw SchemaError(path + ".queries", "missing or not an array");
  for (std::size_t i = 0; i < qs->size(); ++i)
    c.queries.push_back(query_from_json((*qs)[i], path + ".queries[" + std::to_string(i) + "]"));
  c.extra = detail::extras(j, {"id", "case_id", "domain", "split", "premises", "queries"});
  return c;
}

inline std::vector<CaseFile> parse_corpus(std::string_view text) {
  std::vector<CaseFile> out;
  std::size_t line_no = 0, pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw SchemaError("line " + std::to_string(line_no), e.what());
    }
    out.push_back(case_from_json(j, "line " + std::to_string(line_no)));
  }
  return out;
}

inline std::string serialize_corpus(const std::vector<CaseFile>& cases) {
  std::string out;
  for (const auto& c : cases) {
    out += to_json(c).dump();
    out += '\n';
  }
  return out;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << data;
  if (!out) throw std::runtime_error("write failed for " + path);
}

inline std::vector<CaseFile> load_corpus(const std::string& path) {
  return parse_corpus(read_file(path));
}

inline void save_corpus(const std::string& path, const std::vector<CaseFile>& cases) {
  write_file(path, serialize_corpus(cases));
}

// ---------------------------------------------------------------------------
// Case-level splits.

// Split sizes by largest remainder: floors first, leftover cases go to the
// largest fractional parts (earlier splits win ties).
inline std::array<std::size_t, 3> split_sizes(std::size_t n, const std::array<double, 3>& ratios) {
  double total = ratios[0] + ratios[1] + ratios[2];
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("split ratios must sum to 1");
  std::array<std::size_t, 3> sizes{};
  std::array<double, 3> rem{};
  std::size_t used = 0;
  for (int i = 0; i < 3; ++i) {
    if (ratios[i] < 0) throw std::invalid_argument("split ratios must be non-negative");
    double exact = ratios[i] * static_cast<double>(n);
    sizes[i] = static_cast<std::size_t>(std::floor(exact + 1e-9));
    rem[i] = exact - static_cast<double>(sizes[i]);
    used += sizes[i];
  }
  while (used < n) {
    int best = 0;
    for (int i = 1; i < 3; ++i)
      if (rem[i] > rem[best] + 1e-12) best = i;
    ++sizes[best];
    rem[best] = -1;
    ++used;
  }
  return sizes;
}

inline void split_cases(std::vector<CaseFile>& cases, const std::array<double, 3>& ratios,
                        std::uint64_t seed) {
  auto sizes = split_sizes(cases.size(), ratios);
  std::vector<std::size_t> order(cases.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng = Rng::derive(seed, "split");
  rng.shuffle(order);
  for (std::size_t k = 0; k < order.size(); ++k) {
    Split s = k < sizes[0] ? Split::kTrain : k < sizes[0] + sizes[1] ? Split::kDev : Split::kTest;
    cases[order[k]].split = s;
  }
}

}  // namespace casecons
