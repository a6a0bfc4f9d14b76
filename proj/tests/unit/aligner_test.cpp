// Copyright 2026 The xsum-forge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "xsum_forge/aligner.hpp"
#include "xsum_forge/error.hpp"

namespace xsf {
namespace {

using testing::L;

SummaryRecord Rec(std::string id, const char* lang, std::vector<float> v) {
  return {std::move(id), L(lang), std::move(v)};
}

std::set<std::pair<std::string, std::string>> AsSet(const std::vector<MatchedPair>& pairs) {
  std::set<std::pair<std::string, std::string>> out;
  for (const auto& p : pairs) out.emplace(p.a_id, p.b_id);
  return out;
}

TEST(AlignTest, IdenticalSingletons) {
  const auto s = EmbeddingStore::FromRecords(2, {Rec("a1", "en", {1, 0}), Rec("b1", "ru", {1, 0})});
  const auto pairs = AlignLanguagePair(s, L("en"), L("ru"), {});
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_EQ(pairs[0].a_id, "a1");
  EXPECT_EQ(pairs[0].b_id, "b1");
  EXPECT_NEAR(pairs[0].similarity, 1.0, 1e-7);
  EXPECT_EQ(pairs[0].kind, PairKind::kDirect);
}

TEST(AlignTest, OnlyMutualNeighboursPair) {
  const auto s = EmbeddingStore::FromRecords(
      2, {Rec("a1", "en", {1, 0}), Rec("a2", "en", {0.6f, 0.8f}), Rec("b1", "ru", {0.8f, 0.6f})});
  const auto pairs = AlignLanguagePair(s, L("en"), L("ru"), {});
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_EQ(pairs[0].a_id, "a2");
  EXPECT_EQ(pairs[0].b_id, "b1");
  EXPECT_NEAR(pairs[0].similarity, 0.96, 1e-6);
}

TEST(AlignTest, MutualPairBelowThresholdDropped) {
  const float y = std::sqrt(1.0f - 0.7f * 0.7f);
  const auto s = EmbeddingStore::FromRecords(2, {Rec("a", "en", {1, 0}), Rec("b", "ru", {0.7f, y})});
  EXPECT_TRUE(AlignLanguagePair(s, L("en"), L("ru"), {}).empty());
}

TEST(AlignTest, OrientationFollowsLanguageOrder) {
  const auto s = EmbeddingStore::FromRecords(2, {Rec("a", "ru", {1, 0}), Rec("b", "en", {1, 0})});
  const auto pairs = AlignLanguagePair(s, L("ru"), L("en"), {});
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_EQ(pairs[0].lang_a, L("en"));
  EXPECT_EQ(pairs[0].a_id, "b");
}

TEST(AlignAllTest, SingleLanguageGivesNothing) {
  const auto s = EmbeddingStore::FromRecords(2, {Rec("a", "en", {1, 0}), Rec("b", "en", {1, 0})});
  EXPECT_TRUE(AlignAll(s, s.languages(), {}).empty());
}

TEST(AlignAllTest, ThreeIdenticalSummaries) {
  const auto s = EmbeddingStore::FromRecords(
      2, {Rec("a", "en", {1, 0}), Rec("b", "ru", {1, 0}), Rec("c", "zh", {1, 0})});
  EXPECT_EQ(AlignAll(s, s.languages(), {}).size(), 3u);
}

TEST(AlignConfigTest, RejectsOutOfRangeTau) {
  EXPECT_THROW((AlignConfig{0.0}.Validate()), Error);
  EXPECT_THROW((AlignConfig{1.0}.Validate()), Error);
  EXPECT_NO_THROW((AlignConfig{0.7437}.Validate()));
}

TEST(AlignPropertyTest, MatchesOracleAndHoldsInvariants) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const auto recs = testing::RandomRecords(rng, 2 + trial % 4, 40 + 15 * trial, 16);
    const auto store = EmbeddingStore::FromRecords(16, recs);
    const auto pairs = AlignAll(store, store.languages(), {});
    EXPECT_EQ(AsSet(pairs), testing::OracleDirectPairs(recs, kDefaultTau));
    std::map<std::tuple<LangCode, LangCode, std::string>, int> degree;
    for (const auto& p : pairs) {
      EXPECT_GE(p.similarity, kDefaultTau);
      EXPECT_EQ(store.NearestInLanguage(p.a_id, p.lang_b)->neighbor_id, p.b_id);
      EXPECT_EQ(store.NearestInLanguage(p.b_id, p.lang_a)->neighbor_id, p.a_id);
      EXPECT_EQ(++degree[std::make_tuple(p.lang_a, p.lang_b, p.a_id)], 1);
      EXPECT_EQ(++degree[std::make_tuple(p.lang_a, p.lang_b, p.b_id)], 1);
    }
    // Raising tau only removes pairs.
    const auto strict = AsSet(AlignAll(store, store.languages(), {0.9}));
    const auto loose = AsSet(pairs);
    EXPECT_TRUE(std::includes(loose.begin(), loose.end(), strict.begin(), strict.end()));
  }
}

}  // namespace
}  // namespace xsf
