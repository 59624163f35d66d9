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


#include "casecons/generator.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace casecons;

namespace {

TEST(GeneratorTest, DeterministicBySeed) {
  for (Domain d : kAllDomains) {
    auto a = to_json(generate_casefile(d, 7, 0)).dump();
    auto b = to_json(generate_casefile(d, 7, 0)).dump();
    EXPECT_EQ(a, b);
    EXPECT_NE(a, to_json(generate_casefile(d, 8, 0)).dump());
  }
}

TEST(GeneratorTest, CaseShape) {
  for (Domain d : kAllDomains) {
    for (int i = 0; i < 25; ++i) {
      CaseFile c = generate_casefile(d, 11, i);
      ASSERT_GE(c.queries.size(), 5u);
      ASSERT_LE(c.queries.size(), 8u);
      std::set<Label> labels;
      bool dependency = false;
      for (const auto& q : c.queries) {
        ASSERT_TRUE(q.gold.has_value());
        labels.insert(*q.gold);
        dependency = dependency || !q.depends_on.empty();
        for (const auto& dep : q.depends_on) EXPECT_NE(c.find_query(dep), nullptr);
      }
      EXPECT_EQ(labels.size(), 3u) << c.id;
      EXPECT_TRUE(dependency) << c.id;
      EXPECT_NO_THROW(validate_case(c, SolverOptions::test_mode())) << c.id;
    }
  }
}

TEST(GeneratorTest, RelationalLabelDistribution) {
  std::map<Label, int> counts;
  int total = 0;
  for (int i = 0; i < 60; ++i) {
    for (const auto& q : generate_casefile(Domain::kRelational, 5, i).queries) {
      ++counts[*q.gold];
      ++total;
    }
  }
  for (Label l : kAllLabels) EXPECT_GE(counts[l], total / 10) << to_string(l);
}

TEST(GeneratorTest, DefaultCorpusComposition) {
  auto spec = GeneratorSpec::with_total(390);
  EXPECT_EQ(spec.cases, (std::array<int, 4>{120, 100, 80, 90}));
  auto corpus = generate_corpus(spec);
  ASSERT_EQ(corpus.size(), 390u);
  std::size_t queries = 0, unknown = 0;
  std::map<Split, int> splits;
  for (const auto& c : corpus) {
    queries += c.queries.size();
    for (const auto& q : c.queries) unknown += q.gold == Label::kUnknown;
    ++splits[c.split];
  }
  EXPECT_GE(queries, 2205u);
  EXPECT_LE(queries, 2695u);
  double rate = static_cast<double>(unknown) / static_cast<double>(queries);
  EXPECT_GE(rate, 0.17);
  EXPECT_LE(rate, 0.19);
  EXPECT_EQ(splits[Split::kTrain], 312);
  EXPECT_EQ(splits[Split::kDev], 39);
  EXPECT_EQ(splits[Split::kTest], 39);
  std::string table = composition_table(corpus);
  EXPECT_NE(table.find("relational"), std::string::npos);
  EXPECT_NE(table.find("390"), std::string::npos);
}

TEST(GeneratorTest, ScaledSpecs) {
  EXPECT_EQ(GeneratorSpec::with_total(10).total(), 10);
  EXPECT_EQ(GeneratorSpec::with_total(10).cases, (std::array<int, 4>{3, 3, 2, 2}));
  EXPECT_EQ(GeneratorSpec::with_total(0).total(), 0);
}

TEST(GeneratorTest, RetryExhaustionIsReported) {
  GeneratorOptions impossible;
  impossible.max_attempts = 0;
  EXPECT_THROW(generate_casefile(Domain::kRelational, 1, 0, impossible), GenerationError);
}

}  // namespace
