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

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "xsum_forge/corpus_io.hpp"
#include "xsum_forge/embedding_store.hpp"

namespace xsf {

inline constexpr double kDefaultDedupThreshold = 0.95;

// ---------------------------------------------------------------------------
// Semantic deduplication
// ---------------------------------------------------------------------------

struct DuplicateGroup {
  LangCode lang;
  std::string survivor;              // smallest member id
  std::vector<std::string> members;  // sorted, includes the survivor

  friend bool operator==(const DuplicateGroup&, const DuplicateGroup&) = default;
};

// Groups summaries of one language whose similarity exceeds `threshold`,
// closed transitively. Only groups with two or more members are returned.
std::vector<DuplicateGroup> SemanticDedup(const LangCode& lang, const EmbeddingStore& store,
                                          double threshold = kDefaultDedupThreshold);
std::vector<DuplicateGroup> SemanticDedupAll(const EmbeddingStore& store,
                                             double threshold = kDefaultDedupThreshold);

// Dropped id -> survivor id.
std::unordered_map<std::string, std::string> SurvivorMap(std::span<const DuplicateGroup> groups);

struct DedupOutcome {
  std::vector<MatchedPair> pairs;  // PairFileOrder
  std::size_t self_pairs_dropped = 0;
  std::size_t duplicate_pairs_dropped = 0;
};

// Re-points pairs touching a dropped summary to its survivor. Pairs that
// collapse onto one endpoint are dropped; among pairs that collapse onto the
// same endpoints a direct pair wins over an induced one, then the higher
// similarity.
DedupOutcome ApplyDedup(std::span<const MatchedPair> pairs, std::span<const DuplicateGroup> groups);

std::string RenderDedupGroups(std::span<const DuplicateGroup> groups);
std::vector<DuplicateGroup> ReadDedupGroups(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Leakage-safe splits
// ---------------------------------------------------------------------------

enum class Split : int { kTrain = 0, kDev = 1, kTest = 2 };
inline constexpr std::array<Split, 3> kAllSplits = {Split::kTrain, Split::kDev, Split::kTest};

std::string_view SplitName(Split s);
Split ParseSplit(std::string_view name);

struct SplitRatios {
  std::array<double, 3> values = {0.8, 0.1, 0.1};

  double operator[](Split s) const { return values[static_cast<std::size_t>(s)]; }
  void Validate() const;
};

// Unordered language pair; (l, l) keys in-language samples.
using LangPairKey = std::pair<LangCode, LangCode>;
LangPairKey MakeLangPairKey(const LangCode& a, const LangCode& b);

struct ComponentLoad {
  std::size_t component_id = 0;
  std::map<LangPairKey, std::uint64_t> counts;

  std::uint64_t total() const;
};

struct ComponentAssignment {
  std::size_t component_id = 0;
  Split split = Split::kTrain;
  std::vector<std::string> members;  // sorted summary ids

  friend bool operator==(const ComponentAssignment&, const ComponentAssignment&) = default;
};

struct SplitManifest {
  std::uint64_t seed = 0;
  SplitRatios ratios;
  std::vector<ComponentAssignment> components;  // by component_id
  std::vector<std::string> warnings;

  std::string ToJson() const;
  static SplitManifest FromJson(std::string_view text);
  // Summary id -> index into components.
  std::unordered_map<std::string, std::size_t> MemberIndex() const;

  friend bool operator==(const SplitManifest& a, const SplitManifest& b) {
    return a.seed == b.seed && a.ratios.values == b.ratios.values &&
           a.components == b.components && a.warnings == b.warnings;
  }
};

// Greedy largest-deficit assignment: components in descending load order
// (ties by id) go to the split whose weighted deficit
//   sum_k load_k * (ratio_s * total_k - assigned_{s,k})
// is largest; the seed only breaks exact ties. Members are left empty.
SplitManifest AssignSplits(std::span<const ComponentLoad> loads, const SplitRatios& ratios,
                           std::uint64_t seed);

// Components for splitting: connected components of the (deduplicated) pair
// graph, plus one singleton per corpus document that has no pair. Dropped
// duplicates are excluded. Numbered by smallest member id.
std::vector<std::vector<std::string>> SplitComponents(const Corpus& corpus,
                                                      std::span<const MatchedPair> pairs,
                                                      const std::unordered_map<std::string, std::string>& dropped);

// Per-component sample counts: 2 per pair under its unordered language pair,
// 1 per member under (lang, lang).
std::vector<ComponentLoad> ComponentLoads(const std::vector<std::vector<std::string>>& components,
                                          std::span<const MatchedPair> pairs, const Corpus& corpus);

// ---------------------------------------------------------------------------
// Materialization and statistics
// ---------------------------------------------------------------------------

struct CrossSample {
  std::string src_id;
  std::string tgt_id;
  LangCode src_lang;
  LangCode tgt_lang;
  std::string article_text;
  std::string summary_text;
  std::size_t component_id = 0;
  Split split = Split::kTrain;

  std::string sample_id() const { return src_id + "::" + tgt_id; }
  friend bool operator==(const CrossSample&, const CrossSample&) = default;
};

struct MaterializedSplits {
  std::array<std::vector<CrossSample>, 3> by_split;
  std::vector<std::string> log;  // skipped pairs
};

MaterializedSplits Materialize(const Corpus& corpus, std::span<const MatchedPair> pairs,
                               const SplitManifest& manifest, bool include_in_language,
                               const std::unordered_map<std::string, std::string>& dropped = {});

std::string RenderSampleLine(const CrossSample& sample);
CrossSample ParseSampleLine(std::string_view line, std::size_t line_number);

struct SampleFileEntry {
  Split split = Split::kTrain;
  LangCode src_lang;
  LangCode tgt_lang;
  std::string file;  // relative to the samples directory
  std::uint64_t count = 0;
};

// One file per (split, src_lang, tgt_lang) named "<split>.<src>.<tgt>.jsonl",
// plus index.json. Files listed by a previous index are removed first.
std::vector<SampleFileEntry> WriteSampleDirectory(const MaterializedSplits& splits,
                                                  const std::filesystem::path& dir);
std::vector<SampleFileEntry> ReadSampleIndex(const std::filesystem::path& dir);
std::vector<CrossSample> ReadSampleFile(const std::filesystem::path& path);

struct PairCountMatrix {
  std::vector<LangCode> languages;  // sorted axis
  std::map<std::pair<LangCode, LangCode>, std::uint64_t> counts;  // (article, summary)

  std::uint64_t at(const LangCode& src, const LangCode& tgt) const;
  std::uint64_t total() const;
  // TSV: rows are article languages, columns summary languages, then a
  // "total" line.
  std::string RenderTsv() const;
};

PairCountMatrix StatsMatrix(std::span<const CrossSample> samples,
                            std::span<const LangCode> axis = {});

}  // namespace xsf
