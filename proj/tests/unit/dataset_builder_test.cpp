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
#include "xsum_forge/dataset_builder.hpp"
#include "xsum_forge/error.hpp"
#include "xsum_forge/fsutil.hpp"
#include "xsum_forge/pair_graph.hpp"

namespace xsf {
namespace {

using testing::L;
using testing::TempDir;

MatchedPair Pair(std::string a, const char* la, std::string b, const char* lb, double sim = 0.8,
                 PairKind kind = PairKind::kDirect) {
  MatchedPair p{std::move(a), std::move(b), L(la), L(lb), sim, kind};
  p.Canonicalize();
  return p;
}

Document Doc(std::string id, const char* lang) {
  return {id, L(lang), "article " + id, "summary " + id};
}

// ---------------------------------------------------------------------------
// Dedup

TEST(DedupTest, IdenticalVectorsFormOneGroup) {
  const auto store = EmbeddingStore::FromRecords(2, {{"b", L("en"), {1, 0}}, {"a", L("en"), {1, 0}}, {"c", L("en"), {0, 1}}});
  const auto groups = SemanticDedup(L("en"), store);
  ASSERT_EQ(groups.size(), 1u);
  EXPECT_EQ(groups[0].survivor, "a");
  EXPECT_EQ(groups[0].members, (std::vector<std::string>{"a", "b"}));
}

TEST(DedupTest, NothingAboveThreshold) {
  const auto store = EmbeddingStore::FromRecords(2, {{"a", L("en"), {1, 0}}, {"b", L("en"), {0.95f, std::sqrt(1 - 0.9025f)}}});
  EXPECT_LE(store.SimilarityOf("a", "b"), 0.95f + 1e-7f);
  EXPECT_TRUE(SemanticDedup(L("en"), store, 0.9500001).empty());
}

TEST(DedupTest, ChainedDuplicatesMatchOracle) {
  std::mt19937_64 rng(31);
  std::vector<SummaryRecord> recs;
  for (int i = 0; i < 17; ++i) recs.push_back({"r" + std::to_string(i), L("en"), testing::RandomUnit(rng, 16)});
  // a ~ b ~ c along a great circle: neighbours at cos 0.97, ends at cos 0.88.
  const auto e1 = testing::RandomUnit(rng, 16);
  auto e2 = testing::RandomUnit(rng, 16);
  const float d = testing::OracleDot(e1, e2);
  double n2 = 0.0;
  for (int k = 0; k < 16; ++k) {
    e2[k] -= d * e1[k];
    n2 += e2[k] * e2[k];
  }
  for (auto& x : e2) x /= static_cast<float>(std::sqrt(n2));
  const double step = std::acos(0.97);
  for (int i = 0; i < 3; ++i) {
    std::vector<float> v(16);
    for (int k = 0; k < 16; ++k) v[k] = static_cast<float>(std::cos(i * step) * e1[k] + std::sin(i * step) * e2[k]);
    recs.push_back({std::string(1, static_cast<char>('a' + i)), L("en"), v});
  }
  ASSERT_LT(testing::OracleDot(recs[17].embedding, recs[19].embedding), 0.95f);
  const auto store = EmbeddingStore::FromRecords(16, recs);
  const auto groups = SemanticDedup(L("en"), store);
  std::vector<std::vector<std::string>> got;
  for (const auto& g : groups) got.push_back(g.members);
  std::sort(got.begin(), got.end());
  EXPECT_EQ(got, testing::OracleDuplicateGroups(recs, L("en"), 0.95));
  bool found_chain = false;
  for (const auto& g : got) found_chain |= g == std::vector<std::string>{"a", "b", "c"};
  EXPECT_TRUE(found_chain);
}

TEST(DedupTest, RandomStoresMatchOracleAndSurvivorsAreDistinct) {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<SummaryRecord> recs;
    std::vector<std::vector<float>> seeds;
    for (int i = 0; i < 10; ++i) seeds.push_back(testing::RandomUnit(rng, 16));
    for (int i = 0; i < 60; ++i) {
      recs.push_back({"d" + std::to_string(i), L(i % 2 ? "en" : "ru"), testing::Jitter(rng, seeds[rng() % 10], 0.1 + 0.3 * (i % 3))});
    }
    const auto store = EmbeddingStore::FromRecords(16, recs);
    const auto groups = SemanticDedupAll(store);
    for (const char* lang : {"en", "ru"}) {
      std::vector<std::vector<std::string>> got;
      for (const auto& g : groups) {
        if (g.lang == L(lang)) got.push_back(g.members);
      }
      std::sort(got.begin(), got.end());
      EXPECT_EQ(got, testing::OracleDuplicateGroups(recs, L(lang), 0.95));
    }
    const auto dropped = SurvivorMap(groups);
    for (const auto& a : recs) {
      for (const auto& b : recs) {
        if (a.doc_id < b.doc_id && a.lang == b.lang && !dropped.count(a.doc_id) && !dropped.count(b.doc_id)) {
          EXPECT_LE(testing::OracleDot(a.embedding, b.embedding), 0.95f);
        }
      }
    }
  }
}

TEST(DedupTest, PairsRepointedToSurvivor) {
  std::vector<DuplicateGroup> groups = {{L("en"), "a1", {"a1", "a2"}}};
  const std::vector<MatchedPair> pairs = {Pair("a2", "en", "b", "ru", 0.9), Pair("a1", "en", "b", "ru", 0.8),
                                          Pair("a2", "en", "c", "zh", 0.77, PairKind::kInduced)};
  const auto out = ApplyDedup(pairs, groups);
  ASSERT_EQ(out.pairs.size(), 2u);
  EXPECT_EQ(out.pairs[0].a_id, "a1");
  EXPECT_EQ(out.pairs[0].b_id, "b");
  EXPECT_DOUBLE_EQ(out.pairs[0].similarity, 0.9);
  EXPECT_EQ(out.pairs[1].a_id, "a1");
  EXPECT_EQ(out.pairs[1].b_id, "c");
  EXPECT_EQ(out.duplicate_pairs_dropped, 1u);
}

TEST(DedupTest, GroupsFileRoundTrip) {
  TempDir dir;
  std::vector<DuplicateGroup> groups = {{L("en"), "a", {"a", "b"}}, {L("ru"), "c", {"c", "d", "e"}}};
  WriteFileAtomic(dir / "g.jsonl", RenderDedupGroups(groups));
  EXPECT_EQ(ReadDedupGroups(dir / "g.jsonl"), groups);
}

// ---------------------------------------------------------------------------
// Splits

TEST(SplitTest, TenEqualComponentsGoEightOneOne) {
  for (std::uint64_t seed : {1, 2, 3, 99}) {
    std::vector<ComponentLoad> loads;
    for (std::size_t i = 0; i < 10; ++i) loads.push_back({i, {{MakeLangPairKey(L("en"), L("ru")), 2}}});
    const auto m = AssignSplits(loads, {}, seed);
    std::array<int, 3> n{};
    for (const auto& c : m.components) ++n[static_cast<std::size_t>(c.split)];
    EXPECT_EQ(n, (std::array<int, 3>{8, 1, 1})) << "seed " << seed;
  }
}

TEST(SplitTest, SingleComponentGoesToTrainWithWarning) {
  const std::vector<ComponentLoad> loads = {{0, {{MakeLangPairKey(L("en"), L("ru")), 2}}}};
  const auto m = AssignSplits(loads, {}, 1);
  ASSERT_EQ(m.components.size(), 1u);
  EXPECT_EQ(m.components[0].split, Split::kTrain);
  EXPECT_FALSE(m.warnings.empty());
}

TEST(SplitTest, ManifestRoundTrip) {
  SplitManifest m;
  m.seed = 5;
  m.components = {{0, Split::kDev, {"a", "b"}}, {1, Split::kTrain, {"c"}}};
  m.warnings = {"w"};
  EXPECT_EQ(SplitManifest::FromJson(m.ToJson()), m);
}

TEST(SplitTest, RatiosValidated) {
  EXPECT_THROW((SplitRatios{{0.5, 0.1, 0.1}}.Validate()), Error);
  EXPECT_THROW((SplitRatios{{1.2, -0.1, -0.1}}.Validate()), Error);
  EXPECT_NO_THROW(SplitRatios{}.Validate());
}

TEST(SplitTest, ComponentsIncludeSingletonsAndSkipDropped) {
  const Corpus c = Corpus::FromDocuments({Doc("a", "en"), Doc("b", "ru"), Doc("c", "zh"), Doc("d", "zh")});
  const auto comps = SplitComponents(c, std::vector{Pair("a", "en", "b", "ru")}, {{"d", "c"}});
  EXPECT_EQ(comps, (std::vector<std::vector<std::string>>{{"a", "b"}, {"c"}}));
  const auto loads = ComponentLoads(comps, std::vector{Pair("a", "en", "b", "ru")}, c);
  EXPECT_EQ(loads[0].counts.at(MakeLangPairKey(L("en"), L("ru"))), 2u);
  EXPECT_EQ(loads[0].counts.at(MakeLangPairKey(L("en"), L("en"))), 1u);
  EXPECT_EQ(loads[1].total(), 1u);
}

// ---------------------------------------------------------------------------
// Materialization and statistics

SplitManifest OneComponent(std::vector<std::string> members, Split s = Split::kTrain) {
  SplitManifest m;
  m.components = {{0, s, std::move(members)}};
  return m;
}

TEST(MaterializeTest, OnePairTwoMirroredSamples) {
  const Corpus c = Corpus::FromDocuments({Doc("a", "en"), Doc("b", "ru")});
  const auto out = Materialize(c, std::vector{Pair("a", "en", "b", "ru")}, OneComponent({"a", "b"}), false);
  const auto& train = out.by_split[0];
  ASSERT_EQ(train.size(), 2u);
  EXPECT_EQ(train[0].src_lang, L("en"));
  EXPECT_EQ(train[0].tgt_lang, L("ru"));
  EXPECT_EQ(train[0].article_text, "article a");
  EXPECT_EQ(train[0].summary_text, "summary b");
  EXPECT_EQ(train[1].src_lang, L("ru"));
  EXPECT_EQ(train[1].tgt_lang, L("en"));
}

TEST(MaterializeTest, InLanguageSamplesAdded) {
  const Corpus c = Corpus::FromDocuments({Doc("a", "en"), Doc("b", "ru")});
  const auto out = Materialize(c, std::vector{Pair("a", "en", "b", "ru")}, OneComponent({"a", "b"}), true);
  EXPECT_EQ(out.by_split[0].size(), 4u);
}

TEST(MaterializeTest, DroppedPairSkippedAndLogged) {
  const Corpus c = Corpus::FromDocuments({Doc("a", "en"), Doc("b", "ru"), Doc("a2", "en")});
  const auto out = Materialize(c, std::vector{Pair("a2", "en", "b", "ru")}, OneComponent({"b"}), false, {{"a2", "a"}});
  EXPECT_TRUE(out.by_split[0].empty());
  EXPECT_EQ(out.log.size(), 1u);
}

TEST(MaterializeTest, SampleDirectoryRoundTripAndCountsMatchStats) {
  TempDir dir;
  const Corpus c = Corpus::FromDocuments({Doc("a", "en"), Doc("b", "ru"), Doc("x", "en"), Doc("y", "zh")});
  SplitManifest m;
  m.components = {{0, Split::kTrain, {"a", "b"}}, {1, Split::kTest, {"x", "y"}}};
  const std::vector<MatchedPair> pairs = {Pair("a", "en", "b", "ru"), Pair("x", "en", "y", "zh")};
  const auto splits = Materialize(c, pairs, m, true);
  const auto entries = WriteSampleDirectory(splits, dir.path());
  std::vector<CrossSample> all;
  std::map<std::pair<LangCode, LangCode>, std::uint64_t> recount;
  for (const auto& e : ReadSampleIndex(dir.path())) {
    const auto samples = ReadSampleFile(dir / e.file);
    EXPECT_EQ(samples.size(), e.count);
    for (const auto& s : samples) {
      EXPECT_EQ(s.split, e.split);
      ++recount[{s.src_lang, s.tgt_lang}];
    }
    all.insert(all.end(), samples.begin(), samples.end());
  }
  std::vector<CrossSample> expected;
  for (const auto& v : splits.by_split) expected.insert(expected.end(), v.begin(), v.end());
  ASSERT_EQ(all.size(), expected.size());
  const auto stats = StatsMatrix(all);
  for (const auto& [k, n] : recount) EXPECT_EQ(stats.at(k.first, k.second), n);
  EXPECT_EQ(stats.total(), all.size());
}

TEST(MaterializeTest, RewriteRemovesStaleFiles) {
  TempDir dir;
  const Corpus c = Corpus::FromDocuments({Doc("a", "en"), Doc("b", "ru")});
  WriteSampleDirectory(Materialize(c, std::vector{Pair("a", "en", "b", "ru")}, OneComponent({"a", "b"}, Split::kDev), false),
                       dir.path());
  EXPECT_TRUE(std::filesystem::exists(dir / "dev.en.ru.jsonl"));
  WriteSampleDirectory(Materialize(c, std::vector{Pair("a", "en", "b", "ru")}, OneComponent({"a", "b"}), false),
                       dir.path());
  EXPECT_FALSE(std::filesystem::exists(dir / "dev.en.ru.jsonl"));
  EXPECT_TRUE(std::filesystem::exists(dir / "train.en.ru.jsonl"));
}

TEST(StatsTest, MirroredBengaliArabic) {
  CrossSample s1{"b1", "a1", L("bn"), L("ar"), "", "", 0, Split::kTrain};
  CrossSample s2{"a1", "b1", L("ar"), L("bn"), "", "", 0, Split::kTrain};
  const auto m = StatsMatrix(std::vector{s1, s2});
  EXPECT_EQ(m.at(L("bn"), L("ar")), 1u);
  EXPECT_EQ(m.at(L("ar"), L("bn")), 1u);
  EXPECT_EQ(m.total(), 2u);
}

TEST(StatsTest, RowIsArticleColumnIsSummary) {
  // Three bengali-article/arabic-summary samples and one the other way round.
  std::vector<CrossSample> samples;
  for (int i = 0; i < 3; ++i) samples.push_back({"b", "a", L("bn"), L("ar"), "", "", 0, Split::kTrain});
  samples.push_back({"a", "b", L("ar"), L("bn"), "", "", 0, Split::kTrain});
  const auto m = StatsMatrix(samples);
  EXPECT_EQ(m.RenderTsv(), "article\\summary\tar\tbn\nar\t0\t1\nbn\t3\t0\ntotal\t4\n");
}

TEST(StatsTest, EmptyIsZeroMatrix) {
  const std::vector<LangCode> axis = {L("en"), L("ru")};
  const auto m = StatsMatrix({}, axis);
  EXPECT_EQ(m.total(), 0u);
  EXPECT_EQ(m.RenderTsv(), "article\\summary\ten\tru\nen\t0\t0\nru\t0\t0\ntotal\t0\n");
}

// ---------------------------------------------------------------------------
// Leakage

TEST(LeakageTest, NoSummaryInTwoSplits) {
  std::mt19937_64 rng(41);
  const auto recs = testing::RandomRecords(rng, 4, 200, 16);
  const auto store = EmbeddingStore::FromRecords(16, recs);
  std::vector<Document> docs;
  for (const auto& r : recs) docs.push_back({r.doc_id, r.lang, "t", "s"});
  const Corpus corpus = Corpus::FromDocuments(docs);
  const auto direct = AlignAll(store, store.languages(), {});
  const auto graph = CapComponents(ComponentGraph::Build(direct), {});
  const auto fin = FinalizePairs(graph, direct, InducedPairs(graph, store, kDefaultTau, 0.6437));
  const auto groups = SemanticDedupAll(store);
  const auto dedup = ApplyDedup(fin.pairs, groups);
  const auto dropped = SurvivorMap(groups);
  const auto comps = SplitComponents(corpus, dedup.pairs, dropped);
  auto manifest = AssignSplits(ComponentLoads(comps, dedup.pairs, corpus), {}, 3);
  for (auto& c : manifest.components) c.members = comps[c.component_id];
  const auto splits = Materialize(corpus, dedup.pairs, manifest, true, dropped);
  std::map<std::string, std::set<Split>> seen;
  for (const auto& v : splits.by_split) {
    for (const auto& s : v) {
      seen[s.src_id].insert(s.split);
      seen[s.tgt_id].insert(s.split);
    }
  }
  for (const auto& [id, set] : seen) EXPECT_EQ(set.size(), 1u) << id;
  for (const auto& [dropped_id, survivor] : dropped) EXPECT_FALSE(seen.count(dropped_id));
}

}  // namespace
}  // namespace xsf
