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

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "xsum_forge/embedding_store.hpp"
#include "xsum_forge/error.hpp"
#include "xsum_forge/fsutil.hpp"

namespace xsf {
namespace {

using testing::L;
using testing::TempDir;

SummaryRecord Rec(std::string id, const char* lang, std::vector<float> v) {
  return {std::move(id), L(lang), std::move(v)};
}

Corpus CorpusOf(const std::vector<std::pair<std::string, const char*>>& docs) {
  std::vector<Document> out;
  for (const auto& [id, lang] : docs) out.push_back({id, L(lang), "t", "s"});
  return Corpus::FromDocuments(std::move(out));
}

TEST(XembTest, WriteReadRoundTripAndLayout) {
  TempDir dir;
  EmbeddingFile f;
  f.dimension = 2;
  f.ids = {"x", "yy"};
  f.values = {1.0f, 0.0f, 0.0f, 1.0f};
  WriteEmbeddingFile(f, dir / "v.xemb");
  const std::string bytes = ReadFile(dir / "v.xemb");
  EXPECT_EQ(bytes.substr(0, 4), "XEMB");
  EXPECT_EQ(bytes.size(), 16u + (2 + 1 + 8) + (2 + 2 + 8));
  const auto back = ReadEmbeddingFile(dir / "v.xemb");
  EXPECT_EQ(back.dimension, 2u);
  EXPECT_EQ(back.ids, f.ids);
  EXPECT_EQ(back.values, f.values);
}

TEST(XembTest, TruncatedAndTrailingBytesRejected) {
  TempDir dir;
  EmbeddingFile f;
  f.dimension = 2;
  f.ids = {"x"};
  f.values = {1.0f, 0.0f};
  WriteEmbeddingFile(f, dir / "v.xemb");
  const std::string bytes = ReadFile(dir / "v.xemb");
  WriteFileAtomic(dir / "short.xemb", bytes.substr(0, bytes.size() - 1));
  WriteFileAtomic(dir / "long.xemb", bytes + "!");
  WriteFileAtomic(dir / "magic.xemb", "XEMA" + bytes.substr(4));
  for (const char* name : {"short.xemb", "long.xemb", "magic.xemb"}) {
    try {
      ReadEmbeddingFile(dir / name);
      ADD_FAILURE() << name;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kFormat) << name;
    }
  }
}

TEST(ImportTest, ThreeMatchingVectors) {
  const Corpus c = CorpusOf({{"a", "en"}, {"b", "ru"}, {"c", "zh"}});
  EmbeddingFile f;
  f.dimension = 2;
  f.ids = {"a", "b", "c"};
  f.values = {1, 0, 0, 1, 0.6f, 0.8f};
  EXPECT_EQ(EmbeddingStore::Import(c, f).size(), 3u);
}

TEST(ImportTest, SlightlyOffNormIsRenormalized) {
  const Corpus c = CorpusOf({{"a", "en"}});
  EmbeddingFile f;
  f.dimension = 2;
  f.ids = {"a"};
  f.values = {1.0005f, 0.0f};
  const auto store = EmbeddingStore::Import(c, f);
  EXPECT_NEAR(store.Vector("a")[0], 1.0f, 1e-7);
}

TEST(ImportTest, FarOffNormRejected) {
  const Corpus c = CorpusOf({{"a", "en"}});
  EmbeddingFile f;
  f.dimension = 2;
  f.ids = {"a"};
  f.values = {0.9f, 0.0f};
  try {
    EmbeddingStore::Import(c, f);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNorm);
  }
}

TEST(ImportTest, MissingVectorAndStrayVectorRejected) {
  const Corpus c = CorpusOf({{"a", "en"}, {"b", "en"}});
  EmbeddingFile f;
  f.dimension = 1;
  f.ids = {"a"};
  f.values = {1.0f};
  EXPECT_THROW(EmbeddingStore::Import(c, f), Error);
  f.ids = {"a", "b", "z"};
  f.values = {1.0f, 1.0f, 1.0f};
  EXPECT_THROW(EmbeddingStore::Import(c, f), Error);
}

TEST(SimilarityTest, HandValues) {
  const std::vector<float> a = {0.6f, 0.8f};
  const std::vector<float> b = {0.8f, 0.6f};
  EXPECT_NEAR(Similarity(a, a), 1.0, 1e-6);
  EXPECT_EQ(Similarity(std::vector<float>{1, 0}, std::vector<float>{0, 1}), 0.0f);
  EXPECT_NEAR(Similarity(a, b), 0.96, 1e-6);
}

TEST(SimilarityTest, SymmetricBitExact) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const auto a = testing::RandomUnit(rng, 16);
    const auto b = testing::RandomUnit(rng, 16);
    EXPECT_EQ(Similarity(a, b), Similarity(b, a));
  }
}

TEST(SimilarityTest, DimensionMismatch) {
  EXPECT_THROW(Similarity(std::vector<float>{1}, std::vector<float>{1, 0}), Error);
}

TEST(NearestTest, SingleCandidate) {
  const auto s = EmbeddingStore::FromRecords(2, {Rec("q", "en", {1, 0}), Rec("b", "ru", {0, 1})});
  EXPECT_EQ(s.NearestInLanguage("q", L("ru"))->neighbor_id, "b");
}

TEST(NearestTest, PicksHighestSimilarity) {
  const auto s = EmbeddingStore::FromRecords(
      2, {Rec("q", "en", {1, 0}), Rec("b1", "ru", {0.8f, 0.6f}), Rec("b2", "ru", {0.6f, 0.8f})});
  const auto nn = s.NearestInLanguage("q", L("ru"));
  EXPECT_EQ(nn->neighbor_id, "b1");
  EXPECT_NEAR(nn->similarity, 0.8, 1e-6);
}

TEST(NearestTest, TieGoesToSmallerId) {
  const auto s = EmbeddingStore::FromRecords(
      2, {Rec("q", "en", {1, 0}), Rec("zz", "ru", {0.6f, 0.8f}), Rec("aa", "ru", {0.6f, 0.8f})});
  EXPECT_EQ(s.NearestInLanguage("q", L("ru"))->neighbor_id, "aa");
}

TEST(NearestTest, SameLanguageTargetRejected) {
  const auto s = EmbeddingStore::FromRecords(2, {Rec("q", "en", {1, 0})});
  EXPECT_THROW(s.NearestInLanguage("q", L("en")), Error);
  EXPECT_FALSE(s.NearestInLanguage("q", L("ru")).has_value());
}

TEST(AllNearestTest, OneRecordPerLanguage) {
  const auto s = EmbeddingStore::FromRecords(2, {Rec("a", "en", {1, 0}), Rec("b", "ru", {0, 1})});
  const auto nn = s.AllNearest(L("en"), L("ru"));
  EXPECT_EQ(nn.a_to_b.at("a")->neighbor_id, "b");
  EXPECT_EQ(nn.b_to_a.at("b")->neighbor_id, "a");
}

TEST(AllNearestTest, EmptySide) {
  const auto s = EmbeddingStore::FromRecords(2, {Rec("b", "ru", {0, 1})});
  const auto nn = s.AllNearest(L("en"), L("ru"));
  EXPECT_TRUE(nn.a_to_b.empty());
  ASSERT_EQ(nn.b_to_a.size(), 1u);
  EXPECT_FALSE(nn.b_to_a.at("b").has_value());
}

TEST(AllNearestTest, MatchesBruteForceOnRandomStores) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<SummaryRecord> recs;
    for (int i = 0; i < 50; ++i) recs.push_back(Rec("a" + std::to_string(i), "en", testing::RandomUnit(rng, 16)));
    // 300 candidates spans several candidate tiles.
    for (int i = 0; i < 300; ++i) recs.push_back(Rec("b" + std::to_string(i), "ru", testing::RandomUnit(rng, 16)));
    const auto store = EmbeddingStore::FromRecords(16, recs);
    const auto nn = store.AllNearest(L("en"), L("ru"));
    for (const auto& r : recs) {
      const LangCode other = r.lang == L("en") ? L("ru") : L("en");
      const auto oracle = testing::OracleNearest(recs, r, other);
      const auto& got = (r.lang == L("en") ? nn.a_to_b : nn.b_to_a).at(r.doc_id);
      ASSERT_TRUE(got.has_value());
      EXPECT_EQ(got->neighbor_id, oracle->id);
      EXPECT_NEAR(got->similarity, oracle->similarity, 1e-5);
      const auto scalar = store.NearestInLanguage(r.doc_id, other);
      EXPECT_EQ(scalar->neighbor_id, oracle->id);
    }
  }
}

TEST(AllNearestTest, ResultDominatesEveryCandidate) {
  std::mt19937_64 rng(9);
  const auto recs = testing::RandomRecords(rng, 3, 150, 16);
  const auto store = EmbeddingStore::FromRecords(16, recs);
  for (const auto& r : recs) {
    for (const auto& lang : store.languages()) {
      if (lang == r.lang) continue;
      const auto nn = store.NearestInLanguage(r.doc_id, lang);
      ASSERT_TRUE(nn.has_value());
      for (const auto& c : recs) {
        if (c.lang == lang) EXPECT_LE(testing::OracleDot(r.embedding, c.embedding), nn->similarity);
      }
    }
  }
}

TEST(StoreTest, ExportIsCanonical) {
  const auto s = EmbeddingStore::FromRecords(
      1, {Rec("z", "ru", {1}), Rec("b", "en", {1}), Rec("a", "ru", {1}), Rec("c", "en", {1})});
  EXPECT_EQ(s.ToFile().ids, (std::vector<std::string>{"b", "c", "a", "z"}));
}

}  // namespace
}  // namespace xsf
