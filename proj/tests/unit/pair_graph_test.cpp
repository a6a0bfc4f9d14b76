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
#include "xsum_forge/pair_graph.hpp"

namespace xsf {
namespace {

using testing::L;

MatchedPair Direct(std::string a, const char* la, std::string b, const char* lb, double sim) {
  MatchedPair p{std::move(a), std::move(b), L(la), L(lb), sim, PairKind::kDirect};
  p.Canonicalize();
  return p;
}

std::vector<std::vector<std::string>> ComponentIds(const ComponentGraph& g) {
  std::vector<std::vector<std::string>> out;
  for (const auto& comp : g.components()) {
    std::vector<std::string> ids;
    for (std::size_t v : comp) ids.push_back(g.vertices()[v].id);
    out.push_back(ids);
  }
  return out;
}

TEST(ComponentGraphTest, ChainFormsOneComponent) {
  const auto g = ComponentGraph::Build(std::vector{Direct("A", "en", "B", "ru", 0.8), Direct("B", "ru", "C", "zh", 0.8)});
  EXPECT_EQ(ComponentIds(g), (std::vector<std::vector<std::string>>{{"A", "B", "C"}}));
}

TEST(ComponentGraphTest, NoPairsNoComponents) {
  EXPECT_TRUE(ComponentGraph::Build({}).components().empty());
}

TEST(ComponentGraphTest, DisjointPairs) {
  const auto g = ComponentGraph::Build(std::vector{Direct("A", "en", "B", "ru", 0.8), Direct("C", "en", "D", "ru", 0.8)});
  ASSERT_EQ(g.components().size(), 2u);
  EXPECT_EQ(g.components()[0].size(), 2u);
  EXPECT_EQ(g.components()[1].size(), 2u);
}

TEST(ComponentGraphTest, RepeatedEdgeRejected) {
  EXPECT_THROW(ComponentGraph::Build(std::vector{Direct("A", "en", "B", "ru", 0.8), Direct("B", "ru", "A", "en", 0.8)}),
               Error);
}

TEST(StoerWagnerTest, MatchesExhaustiveOnRandomGraphs) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> w(0.05, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng() % 7;  // 2..8
    std::vector<WeightedEdge> edges;
    for (std::size_t v = 1; v < n; ++v) edges.push_back({rng() % v, v, w(rng)});  // spanning tree
    for (std::size_t u = 0; u < n; ++u) {
      for (std::size_t v = u + 1; v < n; ++v) {
        if (rng() % 3 == 0) {
          bool exists = false;
          for (const auto& e : edges) exists |= (e.u == u && e.v == v) || (e.u == v && e.v == u);
          if (!exists) edges.push_back({u, v, w(rng)});
        }
      }
    }
    const MinCut cut = StoerWagnerMinCut(n, edges);
    EXPECT_NEAR(cut.weight, testing::ExhaustiveMinCut(n, edges), 1e-9) << "trial " << trial;
    ASSERT_FALSE(cut.side.empty());
    ASSERT_LT(cut.side.size(), n);
    double crossing = 0.0;
    for (const auto& e : edges) {
      const bool su = std::binary_search(cut.side.begin(), cut.side.end(), e.u);
      const bool sv = std::binary_search(cut.side.begin(), cut.side.end(), e.v);
      if (su != sv) crossing += e.weight;
    }
    EXPECT_NEAR(crossing, cut.weight, 1e-9);
  }
}

TEST(CapTest, SmallComponentUnchanged) {
  const auto g = ComponentGraph::Build(std::vector{Direct("A", "en", "B", "ru", 0.8), Direct("B", "ru", "C", "zh", 0.8)});
  const auto capped = CapComponents(g, {});
  EXPECT_EQ(ComponentIds(capped), ComponentIds(g));
  EXPECT_TRUE(capped.removed_edges().empty());
}

TEST(CapTest, PathCutAtWeakestEdge) {
  // v0 - v1 - v2 - v3 - v4 - v5 alternating languages
  const char* langs[] = {"en", "ru"};
  const double weights[] = {0.9, 0.8, 0.5, 0.8, 0.9};
  std::vector<MatchedPair> pairs;
  for (int i = 0; i < 5; ++i) {
    pairs.push_back(Direct("v" + std::to_string(i), langs[i % 2], "v" + std::to_string(i + 1), langs[(i + 1) % 2],
                           weights[i]));
  }
  const auto capped = CapComponents(ComponentGraph::Build(pairs), {3, 0.6437});
  ASSERT_EQ(capped.removed_edges().size(), 1u);
  EXPECT_DOUBLE_EQ(capped.removed_edges()[0].weight, 0.5);
  EXPECT_EQ(ComponentIds(capped),
            (std::vector<std::vector<std::string>>{{"v0", "v1", "v2"}, {"v3", "v4", "v5"}}));
}

TEST(CapTest, RandomGraphsCappedAndIdempotent) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> w(0.75, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 8;
    std::vector<MatchedPair> pairs;
    std::set<std::pair<int, int>> seen;
    for (std::size_t v = 1; v < n; ++v) {
      const int u = static_cast<int>(rng() % v);
      seen.emplace(u, static_cast<int>(v));
    }
    for (int k = 0; k < 6; ++k) {
      int u = static_cast<int>(rng() % n), v = static_cast<int>(rng() % n);
      if (u == v || (u % 2) == (v % 2)) continue;
      seen.emplace(std::min(u, v), std::max(u, v));
    }
    for (const auto& [u, v] : seen) {
      if ((u % 2) == (v % 2)) continue;
      pairs.push_back(Direct("v" + std::to_string(u), u % 2 ? "ru" : "en", "v" + std::to_string(v),
                             v % 2 ? "ru" : "en", w(rng)));
    }
    const auto capped = CapComponents(ComponentGraph::Build(pairs), {4, 0.6437});
    EXPECT_LE(capped.MaxComponentSize(), 4u);
    const auto again = CapComponents(capped, {4, 0.6437});
    EXPECT_EQ(ComponentIds(again), ComponentIds(capped));
    EXPECT_EQ(again.removed_edges().size(), capped.removed_edges().size());
  }
}

TEST(CapTest, LargeComponentBroughtUnderCap) {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> w(0.75, 1.0);
  std::vector<MatchedPair> pairs;
  const char* langs[] = {"en", "ru", "zh"};
  for (int v = 1; v < 120; ++v) {
    int u = static_cast<int>(rng() % v);
    while (u % 3 == v % 3) u = (u + 1) % v;
    if (u % 3 == v % 3) continue;
    pairs.push_back(Direct("n" + std::to_string(u), langs[u % 3], "n" + std::to_string(v), langs[v % 3], w(rng)));
  }
  const auto g = ComponentGraph::Build(pairs);
  const auto capped = CapComponents(g, {});
  EXPECT_LE(capped.MaxComponentSize(), 50u);
  EXPECT_GT(capped.removed_edges().size(), 0u);
}

TEST(InducedTest, HandExample) {
  // C=(1,0,0); A and B are placed so sim(A,C)=0.80, sim(B,C)=0.78, sim(A,B)=0.70.
  const double a1 = 0.6, b1 = std::sqrt(1 - 0.78 * 0.78);
  const double b2 = (0.70 - 0.80 * 0.78) / a1;
  const double b3 = std::sqrt(1 - 0.78 * 0.78 - b2 * b2);
  std::vector<SummaryRecord> recs = {
      {"A", L("en"), {0.80f, static_cast<float>(a1), 0.0f}},
      {"B", L("ru"), {0.78f, static_cast<float>(b2), static_cast<float>(b3)}},
      {"C", L("zh"), {1.0f, 0.0f, 0.0f}},
  };
  (void)b1;
  const auto store = EmbeddingStore::FromRecords(3, recs);
  ASSERT_NEAR(store.SimilarityOf("A", "B"), 0.70, 1e-6);
  const auto direct = std::vector{Direct("A", "en", "C", "zh", 0.80), Direct("B", "ru", "C", "zh", 0.78)};
  const auto graph = ComponentGraph::Build(direct);
  const auto induced = InducedPairs(graph, store, kDefaultTau, kDefaultTau - kDefaultTauPrimeDelta);
  ASSERT_EQ(induced.size(), 1u);
  EXPECT_EQ(induced[0].a_id, "A");
  EXPECT_EQ(induced[0].b_id, "B");
  EXPECT_EQ(induced[0].kind, PairKind::kInduced);

  const auto fin = FinalizePairs(graph, direct, induced);
  EXPECT_EQ(fin.pairs.size(), 3u);
  EXPECT_EQ(std::set<std::size_t>(fin.component_ids.begin(), fin.component_ids.end()).size(), 1u);
}

TEST(InducedTest, BelowTauPrimeNotInduced) {
  const double b2 = (0.60 - 0.80 * 0.78) / 0.6;
  const double b3 = std::sqrt(1 - 0.78 * 0.78 - b2 * b2);
  const auto store = EmbeddingStore::FromRecords(
      3, {{"A", L("en"), {0.80f, 0.6f, 0.0f}},
          {"B", L("ru"), {0.78f, static_cast<float>(b2), static_cast<float>(b3)}},
          {"C", L("zh"), {1.0f, 0.0f, 0.0f}}});
  const auto graph = ComponentGraph::Build(std::vector{Direct("A", "en", "C", "zh", 0.8), Direct("B", "ru", "C", "zh", 0.78)});
  EXPECT_TRUE(InducedPairs(graph, store, kDefaultTau, 0.6437).empty());
}

TEST(InducedTest, DifferentComponentsNotInduced) {
  // A-C and B-D are separate components; A and B are mutual NNs at 0.70.
  const float y = std::sqrt(1.0f - 0.49f);
  const auto store = EmbeddingStore::FromRecords(
      3, {{"A", L("en"), {1, 0, 0}}, {"C", L("zh"), {1, 0, 0}}, {"B", L("ru"), {0.7f, y, 0}}, {"D", L("zh"), {0.7f, y, 0}}});
  const auto graph = ComponentGraph::Build(std::vector{Direct("A", "en", "C", "zh", 1.0), Direct("B", "ru", "D", "zh", 1.0)});
  EXPECT_TRUE(InducedPairs(graph, store, kDefaultTau, 0.6437).empty());
}

TEST(FinalizeTest, EmptyInducedKeepsDirect) {
  const auto direct = std::vector{Direct("A", "en", "B", "ru", 0.8), Direct("C", "en", "D", "ru", 0.9)};
  const auto fin = FinalizePairs(ComponentGraph::Build(direct), direct, {});
  EXPECT_EQ(fin.pairs.size(), 2u);
  EXPECT_EQ(fin.pairs[0], direct[0]);
  EXPECT_EQ(fin.pairs[1], direct[1]);
}

TEST(InducedPropertyTest, MatchesIndependentPipeline) {
  std::mt19937_64 rng(23);
  std::size_t total_pairs = 0;
  for (int trial = 0; trial < 12; ++trial) {
    const auto recs = testing::RandomRecords(rng, 3 + trial % 3, 120, 16);
    const auto store = EmbeddingStore::FromRecords(16, recs);
    const auto direct = AlignAll(store, store.languages(), {});
    const auto graph = CapComponents(ComponentGraph::Build(direct), {});
    if (!graph.removed_edges().empty()) continue;
    const auto induced = InducedPairs(graph, store, kDefaultTau, 0.6437);
    const auto fin = FinalizePairs(graph, direct, induced);
    const auto oracle_direct = testing::OracleDirectPairs(recs, kDefaultTau);
    auto expected = testing::OracleInducedPairs(recs, oracle_direct, kDefaultTau, 0.6437);
    std::set<std::pair<std::string, std::string>> got_induced;
    for (const auto& p : induced) got_induced.emplace(p.a_id, p.b_id);
    EXPECT_EQ(got_induced, expected);
    expected.insert(oracle_direct.begin(), oracle_direct.end());
    std::multiset<std::pair<std::string, std::string>> got;
    for (const auto& p : fin.pairs) got.emplace(p.a_id, p.b_id);
    const std::multiset<std::pair<std::string, std::string>> want(expected.begin(), expected.end());
    EXPECT_EQ(got, want);
    total_pairs += fin.pairs.size();
  }
  EXPECT_GE(total_pairs, 200u);
}

TEST(ManifestTest, ListsVerticesAndRemovedEdges) {
  const char* langs[] = {"en", "ru"};
  std::vector<MatchedPair> pairs;
  for (int i = 0; i < 3; ++i) {
    pairs.push_back(Direct("v" + std::to_string(i), langs[i % 2], "v" + std::to_string(i + 1), langs[(i + 1) % 2],
                           i == 1 ? 0.5 : 0.9));
  }
  const auto capped = CapComponents(ComponentGraph::Build(pairs), {2, 0.4});
  EXPECT_EQ(capped.RenderManifest(),
            "{\"component_id\":0,\"removed_edges\":[{\"a_id\":\"v1\",\"b_id\":\"v2\",\"similarity\":0.5}],"
            "\"vertices\":[{\"id\":\"v0\",\"lang\":\"en\"},{\"id\":\"v1\",\"lang\":\"ru\"}]}\n"
            "{\"component_id\":1,\"removed_edges\":[],"
            "\"vertices\":[{\"id\":\"v2\",\"lang\":\"en\"},{\"id\":\"v3\",\"lang\":\"ru\"}]}\n");
}

}  // namespace
}  // namespace xsf
