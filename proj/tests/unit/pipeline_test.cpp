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
#include <nlohmann/json.hpp>

#include "oracles.hpp"
#include "xsum_forge/error.hpp"
#include "xsum_forge/fsutil.hpp"
#include "xsum_forge/pipeline.hpp"

namespace xsf {
namespace {

using testing::L;
using testing::TempDir;
using nlohmann::json;

TEST(ConfigTest, DefaultsAreThePublishedConstants) {
  const PipelineConfig c;
  EXPECT_EQ(c.tau, 0.7437);
  EXPECT_EQ(c.tau_prime_delta, 0.10);
  EXPECT_DOUBLE_EQ(c.tau_prime(), 0.6437);
  EXPECT_EQ(c.max_component, 50u);
  EXPECT_EQ(c.dedup_threshold, 0.95);
  EXPECT_EQ(c.ratios.values, (std::array<double, 3>{0.8, 0.1, 0.1}));
  EXPECT_EQ(c.alpha, 0.5);
  EXPECT_EQ(c.beta, 0.75);
  EXPECT_EQ(c.min_pair_count, 30u);
  EXPECT_EQ(c.m, 8u);
  EXPECT_EQ(c.mb, 32u);
  EXPECT_EQ(c.lase_c, 6);
  EXPECT_NO_THROW(c.Validate());
}

TEST(ConfigTest, RenderListsEveryKey) {
  const std::string r = PipelineConfig().Render();
  EXPECT_NE(r.find("tau = 0.7437\n"), std::string::npos);
  EXPECT_NE(r.find("ratios = 0.8,0.1,0.1\n"), std::string::npos);
  EXPECT_NE(r.find("mb = 32\n"), std::string::npos);
  std::size_t lines = std::count(r.begin(), r.end(), '\n');
  EXPECT_EQ(lines, PipelineConfig::Keys().size());
}

TEST(ConfigTest, SetAcceptsBothSpellingsAndRejectsBadValues) {
  PipelineConfig c;
  c.Set("tau-prime-delta", "0.2");
  c.Set("ratios", "0.7/0.2/0.1");
  EXPECT_EQ(c.tau_prime_delta, 0.2);
  EXPECT_EQ(c.ratios.values[1], 0.2);
  for (auto [k, v] : std::vector<std::pair<const char*, const char*>>{
           {"tau", "abc"}, {"nope", "1"}, {"m", "-1"}, {"ratios", "0.5,0.5"}, {"include_in_language", "maybe"}}) {
    try {
      c.Set(k, v);
      ADD_FAILURE() << k;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kConfig) << k;
    }
  }
}

TEST(ConfigTest, ValidateRejectsOutOfRange) {
  for (auto [k, v] : std::vector<std::pair<const char*, const char*>>{
           {"tau", "1.5"}, {"tau_prime_delta", "0.8"}, {"max_component", "1"}, {"dedup_threshold", "0"},
           {"ratios", "0.5,0.1,0.1"}, {"alpha", "-0.5"}, {"m", "0"}}) {
    PipelineConfig c;
    c.Set(k, v);
    try {
      c.Validate();
      ADD_FAILURE() << k;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kConfig) << k;
    }
  }
}

TEST(ConfigTest, LoadFileWithComments) {
  TempDir dir;
  WriteFileAtomic(dir / "c.conf", "# tuning\ntau = 0.8   # stricter\n\nalpha=1\n");
  PipelineConfig c;
  c.LoadFile(dir / "c.conf");
  EXPECT_EQ(c.tau, 0.8);
  EXPECT_EQ(c.alpha, 1.0);
  WriteFileAtomic(dir / "bad.conf", "tau 0.8\n");
  EXPECT_THROW(c.LoadFile(dir / "bad.conf"), Error);
}

// ---------------------------------------------------------------------------
// Evaluation

struct EvalFixture {
  TempDir dir;
  LangIdModel model;

  EvalFixture() {
    const std::vector<std::pair<LangCode, std::string>> data = {
        {L("en"), "the quick brown fox jumps over the lazy dog"},
        {L("ru"), "съешь же ещё этих мягких французских булок"}};
    model = LangIdModel::Train(data);
  }

  void Write(const std::string& name, const std::vector<std::tuple<std::string, std::string, std::string>>& rows) {
    std::string text;
    for (const auto& [id, lang, t] : rows) text += json{{"id", id}, {"lang", lang}, {"text", t}}.dump() + "\n";
    WriteFileAtomic(dir / name, text);
  }

  void Vectors(const std::string& name, const std::vector<std::pair<std::string, std::vector<float>>>& rows) {
    EmbeddingFile f;
    f.dimension = static_cast<std::uint32_t>(rows.front().second.size());
    for (const auto& [id, v] : rows) {
      f.ids.push_back(id);
      f.values.insert(f.values.end(), v.begin(), v.end());
    }
    WriteEmbeddingFile(f, dir / name);
  }

  EvaluationResult Run(const std::string& refs, const std::string& ref_vecs) {
    LangIdSource src{&model, nullptr};
    return EvaluateRun({dir / "pred.jsonl", dir / refs, dir / "pred.xemb", dir / ref_vecs}, PipelineConfig(), src);
  }
};

TEST(EvaluateTest, SinglePerfectPrediction) {
  EvalFixture f;
  f.Write("pred.jsonl", {{"p1", "en", "the lazy dog"}});
  f.Write("ref.jsonl", {{"p1", "en", "the lazy dog"}});
  f.Vectors("pred.xemb", {{"p1", {1, 0}}});
  f.Vectors("ref.xemb", {{"p1", {1, 0}}});
  const auto r = f.Run("ref.jsonl", "ref.xemb");
  EXPECT_EQ(r.mean_lase, 1.0);
  ASSERT_EQ(r.pairs.size(), 1u);
  EXPECT_EQ(r.pairs[0].mean_lase, 1.0);
  EXPECT_TRUE(r.pairs[0].low_confidence);
}

TEST(EvaluateTest, EmptyPredictionsRejected) {
  EvalFixture f;
  f.Write("pred.jsonl", {});
  f.Write("ref.jsonl", {{"p1", "en", "x"}});
  f.Vectors("pred.xemb", {{"p1", {1, 0}}});
  f.Vectors("ref.xemb", {{"p1", {1, 0}}});
  EXPECT_THROW(f.Run("ref.jsonl", "ref.xemb"), Error);
}

TEST(EvaluateTest, MissingReferenceNamed) {
  EvalFixture f;
  f.Write("pred.jsonl", {{"p1", "en", "x"}, {"p2", "en", "y"}});
  f.Write("ref.jsonl", {{"p1", "en", "x"}});
  f.Vectors("pred.xemb", {{"p1", {1, 0}}, {"p2", {1, 0}}});
  f.Vectors("ref.xemb", {{"p1", {1, 0}}});
  try {
    f.Run("ref.jsonl", "ref.xemb");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("p2"), std::string::npos);
  }
}

TEST(EvaluateTest, SourceLanguageReferencesChangeOnlyMeaningAndLength) {
  EvalFixture f;
  const float s = std::sqrt(0.5f);
  f.Write("pred.jsonl", {{"p1", "en", "the quick brown fox jumps over the lazy dog again and again"},
                         {"p2", "en", "съешь же ещё"}});
  f.Write("ref_tgt.jsonl", {{"p1", "en", "the quick fox"}, {"p2", "en", "lazy dog"}});
  f.Write("ref_src.jsonl", {{"p1", "ru", "съешь же ещё этих мягких французских булок да выпей чаю"},
                            {"p2", "ru", "съешь"}});
  f.Vectors("pred.xemb", {{"p1", {1, 0}}, {"p2", {0, 1}}});
  f.Vectors("ref_tgt.xemb", {{"p1", {1, 0}}, {"p2", {s, s}}});
  f.Vectors("ref_src.xemb", {{"p1", {s, s}}, {"p2", {0, 1}}});
  const auto tgt = f.Run("ref_tgt.jsonl", "ref_tgt.xemb");
  const auto src = f.Run("ref_src.jsonl", "ref_src.xemb");
  ASSERT_EQ(tgt.samples.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(tgt.samples[i].lase.lc, src.samples[i].lase.lc);
    EXPECT_EQ(tgt.samples[i].tgt_lang, L("en"));
    EXPECT_EQ(src.samples[i].ref_lang, L("ru"));
    EXPECT_NE(tgt.samples[i].lase.ms, src.samples[i].lase.ms);
  }
  EXPECT_NE(tgt.samples[0].lase.lp, src.samples[0].lase.lp);
  EXPECT_LT(tgt.samples[1].lase.lc, 1.0);
}

TEST(EvaluateTest, AggregateIsMeanOfIndividualScores) {
  TempDir dir;
  WriteSyntheticCorpus(dir.path(), {3, 40, 16});
  const Corpus corpus = Corpus::Load(dir / "corpus.jsonl");
  std::vector<std::pair<LangCode, std::string>> data;
  for (const auto& d : corpus.documents()) data.emplace_back(d.lang, d.summary);
  const auto model = LangIdModel::Train(data);
  LangIdSource src{&model, nullptr};
  const auto r = EvaluateRun({dir / "predictions.jsonl", dir / "references.jsonl", dir / "predictions.xemb",
                              dir / "references.xemb"},
                             PipelineConfig(), src);
  ASSERT_GT(r.samples.size(), 10u);
  double sum = 0.0;
  for (const auto& s : r.samples) {
    EXPECT_EQ(s.lase.lase, s.lase.ms * s.lase.lc * s.lase.lp);
    sum += s.lase.lase;
  }
  EXPECT_NEAR(r.mean_lase, sum / r.samples.size(), 1e-12);
  std::map<std::pair<LangCode, LangCode>, std::pair<double, int>> by_pair;
  for (const auto& s : r.samples) {
    by_pair[{s.src_lang, s.tgt_lang}].first += s.lase.lase;
    ++by_pair[{s.src_lang, s.tgt_lang}].second;
  }
  for (const auto& a : r.pairs) {
    const auto& [total, n] = by_pair.at({a.src_lang, a.tgt_lang});
    EXPECT_NEAR(a.mean_lase, total / n, 1e-12);
  }
}

TEST(ScoreFileTest, RoundTripAndCorrelation) {
  TempDir dir;
  std::string x, y;
  for (int i = 0; i < 6; ++i) {
    SampleScore s;
    s.id = "s" + std::to_string(i);
    s.src_lang = s.ref_lang = L("ru");
    s.tgt_lang = L(i % 2 ? "en" : "zh");
    s.lase = {0.1 * i, 1.0, 1.0, 0.1 * i};
    s.rouge2 = 0.2 * i;
    const auto back = ParseScoreLine(RenderScoreLine(s), 1);
    EXPECT_EQ(back.id, s.id);
    EXPECT_EQ(back.lase.lase, s.lase.lase);
    x += RenderScoreLine(s) + "\n";
  }
  WriteFileAtomic(dir / "x.jsonl", x);
  const json report = json::parse(CorrelateScoreFiles(dir / "x.jsonl", "lase", dir / "x.jsonl", "rouge2", 500));
  EXPECT_NEAR(report["overall"]["pearson"].get<double>(), 1.0, 1e-12);
  EXPECT_NEAR(report["overall"]["spearman"].get<double>(), 1.0, 1e-12);
  EXPECT_EQ(report["by_target"].size(), 2u);
  EXPECT_TRUE(report["by_target"][0]["low_confidence"].get<bool>());
}

// ---------------------------------------------------------------------------
// Synthetic bundle

TEST(SynthTest, DeterministicAndValid) {
  TempDir a, b;
  const auto files = WriteSyntheticCorpus(a.path(), {}) ;
  WriteSyntheticCorpus(b.path(), {});
  for (const auto& f : files) EXPECT_EQ(Sha256File(a / f), Sha256File(b / f)) << f;
  const Corpus corpus = Corpus::Load(a / "corpus.jsonl");
  EXPECT_EQ(corpus.manifest().languages, (std::vector<LangCode>{L("en"), L("ru"), L("zh")}));
  EXPECT_NO_THROW(EmbeddingStore::Import(corpus, a / "vectors.xemb"));
}

}  // namespace
}  // namespace xsf
