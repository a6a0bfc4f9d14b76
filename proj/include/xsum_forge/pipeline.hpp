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

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "xsum_forge/aligner.hpp"
#include "xsum_forge/corpus_io.hpp"
#include "xsum_forge/dataset_builder.hpp"
#include "xsum_forge/embedding_store.hpp"
#include "xsum_forge/langid.hpp"
#include "xsum_forge/lase_metric.hpp"
#include "xsum_forge/pair_graph.hpp"
#include "xsum_forge/sampler.hpp"

namespace xsf {

inline constexpr std::uint64_t kDefaultSeed = 1;
inline constexpr std::uint64_t kDefaultLaseMinSamples = 500;

struct PipelineConfig {
  double tau = kDefaultTau;
  double tau_prime_delta = kDefaultTauPrimeDelta;
  std::uint64_t max_component = kDefaultMaxComponentSize;
  double dedup_threshold = kDefaultDedupThreshold;
  SplitRatios ratios;
  double alpha = kDefaultAlpha;
  double beta = kDefaultBeta;
  std::uint64_t min_pair_count = kDefaultMinPairCount;
  std::uint64_t m = kDefaultMiniBatches;
  std::uint64_t mb = kDefaultMiniBatchSize;
  std::int64_t lase_c = kDefaultLengthOffset;
  std::uint64_t seed = kDefaultSeed;
  std::uint64_t lase_min_samples = kDefaultLaseMinSamples;
  bool include_in_language = true;

  static const std::vector<std::string>& Keys();

  // Both "tau_prime_delta" and "tau-prime-delta" are accepted. Throws kConfig.
  void Set(std::string_view key, std::string_view value);
  std::string Get(std::string_view key) const;
  void Validate() const;
  // One "key = value" line per key, in Keys() order.
  std::string Render() const;
  // Flat "key = value" file; '#' starts a comment.
  void LoadFile(const std::filesystem::path& path);

  double tau_prime() const { return tau - tau_prime_delta; }
  AlignConfig align() const { return {tau}; }
  CapConfig cap() const { return {static_cast<std::size_t>(max_component), tau_prime()}; }
};

using LogSink = std::function<void(const std::string&)>;

// ---------------------------------------------------------------------------
// Stages. Every file output is written atomically.

void WriteStoreArtifacts(const Corpus& corpus, const EmbeddingStore& store,
                         const std::filesystem::path& out_vectors,
                         const std::filesystem::path& out_manifest);

std::vector<MatchedPair> InduceStage(const EmbeddingStore& store, std::span<const MatchedPair> direct,
                                     const PipelineConfig& cfg,
                                     const std::filesystem::path& components_out, const LogSink& log);

std::vector<MatchedPair> DedupStage(const EmbeddingStore& store, std::span<const MatchedPair> pairs,
                                    const PipelineConfig& cfg, const std::filesystem::path& groups_out,
                                    const LogSink& log);

// groups_path may be empty (no dedup applied).
SplitManifest SplitStage(const Corpus& corpus, std::span<const MatchedPair> pairs,
                         const std::filesystem::path& groups_path, const PipelineConfig& cfg,
                         const std::filesystem::path& split_out, const LogSink& log);

void MaterializeStage(const Corpus& corpus, std::span<const MatchedPair> pairs,
                      const std::filesystem::path& split_path, const std::filesystem::path& groups_path,
                      const PipelineConfig& cfg, const std::filesystem::path& out_dir, const LogSink& log);

PairCountMatrix StatsFromSamples(const std::filesystem::path& samples_dir, const Corpus* axis_corpus);
PairCountMatrix StatsFromPairs(std::span<const MatchedPair> pairs, const Corpus* axis_corpus);

SamplingPlan PlanStage(const std::filesystem::path& samples_dir, const PipelineConfig& cfg,
                       const std::filesystem::path& plan_out, const LogSink& log);

SamplePools LoadTrainPools(const std::filesystem::path& samples_dir, const SamplingPlan& plan);

void SampleStage(const std::filesystem::path& plan_path, const std::filesystem::path& samples_dir,
                 const PipelineConfig& cfg, std::uint64_t steps, const std::filesystem::path& out);

// ---------------------------------------------------------------------------
// Evaluation

struct TextRecord {
  std::string id;
  LangCode lang;
  std::string text;
  std::optional<LangCode> src_lang;
};

// {"id", "lang", "text"} per line, optional "src_lang". Throws kDuplicateId.
std::vector<TextRecord> ReadTextRecords(const std::filesystem::path& path);

// Language-ID provider: the built-in model, or distributions from an
// interchange file keyed by prediction id.
struct LangIdSource {
  const LangIdModel* model = nullptr;
  const std::map<std::string, LangIdDistribution>* interchange = nullptr;

  LangIdDistribution Distribution(const std::string& id, std::string_view text) const;
};

struct EvaluationInputs {
  std::filesystem::path predictions;
  std::filesystem::path references;
  std::filesystem::path prediction_vectors;
  std::filesystem::path reference_vectors;
};

struct SampleScore {
  std::string id;
  LangCode src_lang;
  LangCode tgt_lang;
  LangCode ref_lang;
  LaseScore lase;
  double rouge1 = 0.0;
  double rouge2 = 0.0;
  double rougeL = 0.0;
};

struct PairAggregate {
  LangCode src_lang;
  LangCode tgt_lang;
  std::uint64_t n = 0;
  double mean_lase = 0.0;
  double mean_rouge2 = 0.0;
  bool low_confidence = false;
};

struct EvaluationResult {
  std::vector<SampleScore> samples;  // sorted by id
  std::vector<PairAggregate> pairs;  // sorted by (src, tgt)
  double mean_lase = 0.0;
  double mean_rouge2 = 0.0;
};

EvaluationResult EvaluateRun(const EvaluationInputs& in, const PipelineConfig& cfg,
                             const LangIdSource& langid);
std::string RenderScoreLine(const SampleScore& s);
SampleScore ParseScoreLine(std::string_view line, std::size_t line_number);
std::string RenderEvaluationReport(const EvaluationResult& r, const PipelineConfig& cfg);

// Correlates `x_field` of one score report with `y_field` of another (joined
// by id), overall and per target language; groups under `min_samples` are
// flagged low_confidence. Returns the JSON report.
std::string CorrelateScoreFiles(const std::filesystem::path& x_path, std::string_view x_field,
                                const std::filesystem::path& y_path, std::string_view y_field,
                                std::uint64_t min_samples);

// ---------------------------------------------------------------------------
// Synthetic corpus

struct SynthOptions {
  std::uint64_t seed = kDefaultSeed;
  std::size_t stories = 150;
  std::uint32_t dimension = 16;
};

// Writes corpus.jsonl, vectors.xemb, predictions.jsonl, predictions.xemb,
// references.jsonl, references.xemb, references_src.jsonl, references_src.xemb
// into `dir`. Three languages with distinct scripts (en, ru, zh).
std::vector<std::string> WriteSyntheticCorpus(const std::filesystem::path& dir, const SynthOptions& opt);

}  // namespace xsf
