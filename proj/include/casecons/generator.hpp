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


// Seeded synthetic corpus generator. Each domain builds satisfiable premises
// around a planted model, labels every named atom with the solver, and then
// draws a bundle whose label mix and dependency structure follow the target
// shape: 5 + Binomial(3, p) queries per bundle with a per-domain mean, a fixed
// Unknown quota, at least one Entailed and one Contradicted query, and at
// least one dependency between queries over linked atoms.

#pragma once

#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "casecons/casefile.hpp"
#include "casecons/rng.hpp"

namespace casecons {

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DomainProfile {
  Domain domain;
  const char* prefix;
  const char* logic;
  int default_cases;
  int default_queries;  // total over the default corpus
};

inline constexpr std::array<DomainProfile, 4> kDomainProfiles = {{
    {Domain::kRelational, "rel", "SAT (CNF)", 120, 800},
    {Domain::kTemporal, "tmp", "bounded LIA", 100, 650},
    {Domain::kPolicy, "pol", "Horn rules (CNF)", 80, 450},
    {Domain::kAbductive, "abd", "SAT, underspecified", 90, 550},
}};

inline const DomainProfile& profile(Domain d) {
  for (const auto& p : kDomainProfiles)
    if (p.domain == d) return p;
  throw std::invalid_argument("unknown domain");
}

inline double mean_bundle_length(Domain d) {
  const auto& p = profile(d);
  return static_cast<double>(p.default_queries) / p.default_cases;
}

struct GeneratorOptions {
  int max_attempts = 200;
  SolverOptions solver = SolverOptions::test_mode();
};

struct GeneratorSpec {
  std::array<int, 4> cases = {120, 100, 80, 90};  // in kDomainProfiles order
  std::uint64_t seed = 7;
  std::array<double, 3> split = {0.8, 0.1, 0.1};
  GeneratorOptions options;

  int total() const { return cases[0] + cases[1] + cases[2] + cases[3]; }

  // Scales the default domain mix to `n` cases by largest remainder.
  static GeneratorSpec with_total(int n, std::uint64_t seed = 7) {
    GeneratorSpec s;
    s.seed = seed;
    if (n < 0) throw std::invalid_argument("case count must be non-negative");
    int base = 0;
    for (const auto& p : kDomainProfiles) base += p.default_cases;
    std::array<double, 4> rem{};
    int used = 0;
    for (std::size_t i = 0; i < 4; ++i) {
      double exact = static_cast<double>(n) * kDomainProfiles[i].default_cases / base;
      s.cases[i] = static_cast<int>(std::floor(exact));
      rem[i] = exact - s.cases[i];
      used += s.cases[i];
    }
    while (used < n) {
      std::size_t best = 0;
      for (std::size_t i = 1; i < 4; ++i)
        if (rem[i] > rem[best] + 1e-12) best = i;
      ++s.cases[best];
      rem[best] = -1;
      ++used;
    }
    return s;
  }
};

namespace detail {

// Premises plus, for every named atom, the set of "link keys" (premise
// clauses or integer variables) it touches; two queries are dependent when
// their atoms share a key.
struct DraftPremises {
  Premises premises;
  std::map<std::string, std::set<std::string>> links;
  std::map<std::string, std::string> phrasing;  // atom -> question stem
};

inline DraftPremises draft_relational(Rng& rng, bool underspecified) {
  static const char* kEntities[] = {"ana", "ben", "cho", "dev", "eli"};
  static const char* kRelations[] = {"trusts", "manages", "audits", "reports_to"};
  std::vector<std::string> pool;
  for (const char* r : kRelations)
    for (const char* a : kEntities)
      for (const char* b : kEntities)
        if (std::string(a) != b) pool.push_back(std::string(r) + "_" + a + "_" + b);
  rng.shuffle(pool);
  const int n = 12;
  std::vector<std::string> atoms(pool.begin(), pool.begin() + n);
  std::vector<bool> planted(n + 1);
  for (int v = 1; v <= n; ++v) planted[v] = rng.bernoulli(0.5);

  std::vector<Clause> clauses;
  std::set<Clause> seen;
  auto satisfied = [&](const Clause& c) {
    for (Literal l : c)
      if (planted[l.variable()] == l.positive()) return true;
    return false;
  };
  auto random_clause = [&](int len) {
    for (;;) {
      Clause c;
      std::set<int> vars;
      while (static_cast<int>(vars.size()) < len) vars.insert(rng.range(1, n));
      for (int v : vars) c.emplace_back(v, rng.bernoulli(0.5));
      if (satisfied(c) && seen.insert(c).second) return c;
    }
  };
  int units = rng.range(2, 3);
  for (int i = 0; i < units; ++i) {
    int v = rng.range(1, n);
    Clause c{Literal(v, planted[v])};
    if (seen.insert(c).second) clauses.push_back(c);
  }
  int binaries = rng.range(6, 8);
  for (int i = 0; i < binaries; ++i) clauses.push_back(random_clause(2));
  int ternaries = rng.range(3, 5);
  for (int i = 0; i < ternaries; ++i) clauses.push_back(random_clause(3));
  if (underspecified) {
    std::vector<Clause> kept;
    for (auto& c : clauses)
      if (!rng.bernoulli(0.3)) kept.push_back(std::move(c));
    clauses = std::move(kept);
  }

  DraftPremises d;
  Formula f(n);
  for (const auto& c : clauses) f.add_clause(c);
  d.premises.format = Premises::Format::kDimacs;
  d.premises.text = emit_dimacs(f);
  for (int v = 1; v <= n; ++v) d.premises.atom_names[atoms[v - 1]] = v;
  for (std::size_t i = 0; i < f.clauses().size(); ++i)
    for (Literal l : f.clauses()[i])
      d.links[atoms[l.variable() - 1]].insert("clause" + std::to_string(i));
  for (const auto& a : atoms) {
    auto p2 = a.rfind('_');
    auto p1 = a.rfind('_', p2 - 1);
    std::string rel = a.substr(0, p1);
    for (char& ch : rel)
      if (ch == '_') ch = ' ';
    d.phrasing[a] = a.substr(p1 + 1, p2 - p1 - 1) + " " + rel + " " + a.substr(p2 + 1);
  }
  return d;
}

inline DraftPremises draft_policy(Rng& rng) {
  static const char* kEntities[] = {"ana", "ben", "cho"};
  static const char* kFacts[] = {"manager", "contractor", "has_badge", "trained", "flagged"};
  struct Rule {
    std::vector<std::string> body;
    std::string head;
    bool negative;
    const char* name;
  };
  static const std::vector<Rule> kRules = {
      {{"manager"}, "employee", false, "managers are employees"},
      {{"contractor"}, "employee", true, "contractors are not employees"},
      {{"employee", "has_badge"}, "can_enter_lab", false, "badged employees may enter the lab"},
      {{"flagged"}, "can_enter_lab", true, "flagged people may not enter the lab"},
      {{"manager", "trained"}, "can_view_payroll", false, "trained managers may view payroll"},
      {{"contractor"}, "can_view_payroll", true, "contractors may not view payroll"},
      {{"can_enter_lab"}, "trained", false, "lab access requires training"},
  };
  std::vector<std::string> predicates = {"manager",  "contractor",    "has_badge",       "trained",
                                         "flagged",  "employee",      "can_enter_lab",   "can_view_payroll"};
  std::map<std::string, int> var;
  std::vector<std::string> atoms;
  for (const char* e : kEntities)
    for (const auto& p : predicates) {
      atoms.push_back(p + "_" + e);
      var[atoms.back()] = static_cast<int>(atoms.size());
    }
  Formula f(static_cast<int>(atoms.size()));
  DraftPremises d;
  std::size_t clause_index = 0;
  auto add = [&](const Clause& c, const std::string& entity) {
    f.add_clause(c);
    for (Literal l : c) d.links[atoms[l.variable() - 1]].insert(entity);
    ++clause_index;
  };
  for (const char* e : kEntities) {
    std::string ent = e;
    // Facts: each entity gets a couple of roles, never both manager and
    // contractor.
    bool manager = rng.bernoulli(0.4);
    bool contractor = !manager && rng.bernoulli(0.35);
    if (manager) add({Literal(var["manager_" + ent], true)}, ent);
    if (contractor) add({Literal(var["contractor_" + ent], true)}, ent);
    for (int k = 2; k < 5; ++k) {
      if (rng.bernoulli(0.4)) add({Literal(var[std::string(kFacts[k]) + "_" + ent], true)}, ent);
    }
    // Known negative facts occasionally close the world for one role.
    if (!manager && rng.bernoulli(0.3)) add({Literal(var["manager_" + ent], false)}, ent);
    for (const auto& r : kRules) {
      if (!rng.bernoulli(0.85)) continue;
      Clause c;
      for (const auto& b : r.body) c.emplace_back(var[b + "_" + ent], false);
      c.emplace_back(var[r.head + "_" + ent], !r.negative);
      add(c, ent);
    }
  }
  d.premises.format = Premises::Format::kDimacs;
  d.premises.text = emit_dimacs(f);
  for (const auto& [name, v] : var) d.premises.atom_names[name] = v;
  for (const auto& a : atoms) {
    auto p = a.rfind('_');
    std::string pred = a.substr(0, p);
    for (char& ch : pred)
      if (ch == '_') ch = ' ';
    d.phrasing[a] = a.substr(p + 1) + " satisfies '" + pred + "'";
  }
  return d;
}

inline DraftPremises draft_temporal(Rng& rng) {
  const int horizon = 12;
  std::vector<std::string> meetings = {"A", "B", "C"};
  if (rng.bernoulli(0.3)) meetings.push_back("D");
  std::map<std::string, int> dur, start;
  for (const auto& m : meetings) {
    dur[m] = rng.range(1, 3);
    start[m] = rng.range(0, horizon - dur[m]);
  }
  auto end = [&](const std::string& m) { return start[m] + dur[m]; };
  std::ostringstream t;
  DraftPremises d;
  for (const auto& m : meetings) {
    t << "(declare-int start_" << m << " 0 " << horizon << ")\n";
    t << "(declare-int end_" << m << " 0 " << horizon << ")\n";
  }
  for (const auto& m : meetings)
    t << "(assert (! (= end_" << m << " (+ start_" << m << " " << dur[m] << ")) :named dur_" << m
      << "))\n";
  // Constraints that the planted schedule satisfies.
  int extra = rng.range(3, 5);
  std::set<std::string> used;
  for (int i = 0; i < extra; ++i) {
    const std::string& x = meetings[rng.below(meetings.size())];
    const std::string& y = meetings[rng.below(meetings.size())];
    int kind = rng.range(0, 3);
    std::ostringstream a;
    std::string name;
    if (kind == 0 && x != y && end(x) <= start[y]) {
      name = "prec_" + x + "_" + y;
      a << "(<= end_" << x << " start_" << y << ")";
    } else if (kind == 1) {
      int r = rng.range(0, start[x]);
      name = "release_" + x;
      a << "(>= start_" << x << " " << r << ")";
    } else if (kind == 2) {
      int dl = rng.range(end(x), horizon);
      name = "deadline_" + x;
      a << "(<= end_" << x << " " << dl << ")";
    } else if (x != y && (end(x) <= start[y] || end(y) <= start[x])) {
      name = "room_" + std::min(x, y) + std::max(x, y);
      a << "(or (<= end_" << x << " start_" << y << ") (<= end_" << y << " start_" << x << "))";
    } else {
      continue;
    }
    if (!used.insert(name).second) continue;
    t << "(assert (! " << a.str() << " :named " << name << "))\n";
  }
  auto define = [&](const std::string& name, const std::string& body,
                    std::vector<std::string> touch, const std::string& phrase) {
    t << "(define-atom " << name << " " << body << ")\n";
    for (const auto& m : touch) d.links[name].insert(m);
    d.phrasing[name] = phrase;
  };
  for (const auto& x : meetings)
    for (const auto& y : meetings) {
      if (x == y) continue;
      define("before_" + x + "_" + y, "(<= end_" + x + " start_" + y + ")", {x, y},
             "meeting " + x + " ends before meeting " + y + " starts");
      if (x < y)
        define("overlap_" + x + "_" + y,
               "(and (< start_" + x + " end_" + y + ") (< start_" + y + " end_" + x + "))", {x, y},
               "meetings " + x + " and " + y + " overlap");
    }
  for (const auto& x : meetings) {
    int k = rng.range(1, horizon - 1);
    define("starts_by_" + x + "_" + std::to_string(k),
           "(<= start_" + x + " " + std::to_string(k) + ")", {x},
           "meeting " + x + " starts by " + std::to_string(k));
    int e = rng.range(2, horizon);
    define("ends_by_" + x + "_" + std::to_string(e), "(<= end_" + x + " " + std::to_string(e) + ")",
           {x}, "meeting " + x + " ends by " + std::to_string(e));
  }
  d.premises.format = Premises::Format::kTheory;
  d.premises.text = t.str();
  return d;
}

inline DraftPremises draft(Domain domain, Rng& rng) {
  switch (domain) {
    case Domain::kRelational: return draft_relational(rng, false);
    case Domain::kAbductive: return draft_relational(rng, true);
    case Domain::kPolicy: return draft_policy(rng);
    case Domain::kTemporal: return draft_temporal(rng);
  }
  throw std::invalid_argument("unknown domain");
}

struct Pick {
  std::string atom;
  bool negated;
  Label gold;
};

// Chooses n atoms with exactly `unknowns` Unknown labels, at least one
// Entailed and one Contradicted query, and at least one linked pair. Returns
// an empty vector when the premises cannot support such a bundle.
inline std::vector<Pick> pick_queries(Rng& rng, const std::map<std::string, Label>& labels,
                                      const DraftPremises& d, int n, int unknowns) {
  std::vector<std::string> open, fixed;
  for (const auto& [name, l] : labels) (l == Label::kUnknown ? open : fixed).push_back(name);
  if (static_cast<int>(open.size()) < unknowns || static_cast<int>(fixed.size()) < n - unknowns ||
      n - unknowns < 2)
    return {};
  auto linked = [&](const std::string& a, const std::string& b) {
    auto ia = d.links.find(a), ib = d.links.find(b);
    if (ia == d.links.end() || ib == d.links.end()) return false;
    for (const auto& k : ia->second)
      if (ib->second.count(k)) return true;
    return false;
  };
  for (int attempt = 0; attempt < 20; ++attempt) {
    rng.shuffle(open);
    rng.shuffle(fixed);
    std::vector<Pick> picks;
    for (int i = 0; i < n - unknowns; ++i) {
      // Polarity: the first two backbone queries are forced to one Entailed
      // and one Contradicted; the rest are free.
      Label base = labels.at(fixed[i]);
      bool negated = i < 2 ? (base == Label::kEntailed) == (i == 1) : rng.bernoulli(0.5);
      Label gold = negated ? opposite(base) : base;
      picks.push_back({fixed[i], negated, gold});
    }
    for (int i = 0; i < unknowns; ++i) picks.push_back({open[i], rng.bernoulli(0.5), Label::kUnknown});
    rng.shuffle(picks);
    bool any_link = false;
    for (std::size_t i = 0; i < picks.size() && !any_link; ++i)
      for (std::size_t j = i + 1; j < picks.size() && !any_link; ++j)
        any_link = linked(picks[i].atom, picks[j].atom);
    if (any_link) return picks;
  }
  return {};
}

}  // namespace detail

// Deterministic in (domain, seed, index).
inline CaseFile generate_casefile(Domain domain, std::uint64_t seed, int index,
                                  const GeneratorOptions& options = {}) {
  const auto& prof = profile(domain);
  char idbuf[32];
  std::snprintf(idbuf, sizeof idbuf, "%s-%04d", prof.prefix, index + 1);
  Rng rng = Rng::derive(seed, "case", to_string(domain), index);
  int n = 5 + rng.binomial(3, (mean_bundle_length(domain) - 5.0) / 3.0);
  int unknowns = 1 + (domain == Domain::kAbductive && rng.bernoulli(0.57) ? 1 : 0);
  for (int attempt = 0; attempt < options.max_attempts; ++attempt) {
    detail::DraftPremises d = detail::draft(domain, rng);
    CaseFile c;
    c.id = idbuf;
    c.domain = domain;
    c.premises = d.premises;
    CompiledCase cc = compile(c);
    Solver s(cc.base, options.solver);
    if (s.solve().status != SolveStatus::kSat) continue;
    std::map<std::string, Label> labels;
    bool timed_out = false;
    for (const auto& [name, lit] : cc.vocabulary) {
      auto l = derive_gold_label(s, lit);
      if (!l) {
        timed_out = true;
        break;
      }
      labels[name] = *l;
    }
    if (timed_out) continue;
    auto picks = detail::pick_queries(rng, labels, d, n, unknowns);
    if (picks.empty()) continue;
    for (std::size_t i = 0; i < picks.size(); ++i) {
      Query q;
      q.id = "q" + std::to_string(i + 1);
      q.atom = (picks[i].negated ? "-" : "") + picks[i].atom;
      std::string stem = d.phrasing.count(picks[i].atom) ? d.phrasing[picks[i].atom] : picks[i].atom;
      q.text = picks[i].negated ? "Is it false that " + stem + "?" : "Is it true that " + stem + "?";
      q.gold = picks[i].gold;
      for (std::size_t j = 0; j < i; ++j) {
        auto ia = d.links.find(picks[i].atom), ja = d.links.find(picks[j].atom);
        if (ia == d.links.end() || ja == d.links.end()) continue;
        bool shared = false;
        for (const auto& k : ia->second) shared = shared || ja->second.count(k) > 0;
        if (shared) q.depends_on.push_back("q" + std::to_string(j + 1));
      }
      c.queries.push_back(std::move(q));
    }
    return c;
  }
  throw GenerationError(std::string(idbuf) + ": no valid case after " +
                        std::to_string(options.max_attempts) + " attempts");
}

inline std::vector<CaseFile> generate_corpus(const GeneratorSpec& spec) {
  std::vector<CaseFile> out;
  for (std::size_t d = 0; d < 4; ++d)
    for (int i = 0; i < spec.cases[d]; ++i)
      out.push_back(generate_casefile(kDomainProfiles[d].domain, spec.seed, i, spec.options));
  split_cases(out, spec.split, spec.seed);
  return out;
}

// Per-domain composition: cases, queries, mean ± sd bundle length, Unknown
// share of gold labels.
inline std::string composition_table(const std::vector<CaseFile>& cases) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-11s %-20s %7s %9s %14s %8s\n", "Domain", "Logic", "#Cases",
                "#Queries", "Queries/bundle", "Unknown");
  out << line;
  auto row = [&](const char* name, const char* logic, const std::vector<const CaseFile*>& cs) {
    double sum = 0, sq = 0, unk = 0;
    for (const auto* c : cs) {
      double n = static_cast<double>(c->queries.size());
      sum += n;
      sq += n * n;
      for (const auto& q : c->queries) unk += q.gold == Label::kUnknown;
    }
    double k = static_cast<double>(cs.size());
    double mean = k > 0 ? sum / k : 0;
    double sd = k > 1 ? std::sqrt(std::max(0.0, (sq - k * mean * mean) / (k - 1))) : 0;
    char stats[32];
    std::snprintf(stats, sizeof stats, "%.2f ± %.2f", mean, sd);
    std::snprintf(line, sizeof line, "%-11s %-20s %7zu %9.0f %15s %7.1f%%\n", name, logic,
                  cs.size(), sum, stats, sum > 0 ? 100.0 * unk / sum : 0.0);
    out << line;
  };
  std::vector<const CaseFile*> all;
  for (const auto& p : kDomainProfiles) {
    std::vector<const CaseFile*> cs;
    for (const auto& c : cases)
      if (c.domain == p.domain) cs.push_back(&c);
    row(to_string(p.domain), p.logic, cs);
  }
  for (const auto& c : cases) all.push_back(&c);
  row("total", "", all);
  return out.str();
}

}  // namespace casecons
