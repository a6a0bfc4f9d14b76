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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "xsum_forge/corpus_io.hpp"
#include "xsum_forge/lang_code.hpp"

namespace xsf {

// Raw contents of an "XEMB" vector file: 16-byte little-endian header
// (magic, u32 version, u32 dimension, u32 count) followed by `count` records
// of (u16 id length, id bytes, dimension x float32).
struct EmbeddingFile {
  static constexpr std::uint32_t kVersion = 1;

  std::uint32_t dimension = 0;
  std::vector<std::string> ids;
  std::vector<float> values;  // ids.size() x dimension, row-major

  std::span<const float> row(std::size_t i) const {
    return {values.data() + i * dimension, dimension};
  }
  // Id -> row index; throws kDuplicateId.
  std::unordered_map<std::string, std::size_t> Index() const;
};

EmbeddingFile ReadEmbeddingFile(const std::filesystem::path& path);
void WriteEmbeddingFile(const EmbeddingFile& file, const std::filesystem::path& path);

inline constexpr double kNormTolerance = 1e-3;

// Float32 inner product accumulated sequentially in index order. Every
// similarity in the toolkit goes through this order, which keeps threshold
// decisions reproducible.
float Similarity(std::span<const float> a, std::span<const float> b);

// Validates finiteness and |norm - 1| <= kNormTolerance, rescaling to unit
// norm when the deviation exceeds float noise. Throws kNorm / kFormat.
void NormalizeInPlace(std::span<float> v, std::string_view id);

struct SummaryRecord {
  std::string doc_id;
  LangCode lang;
  std::vector<float> embedding;
};

struct NearestNeighbor {
  std::string query_id;
  std::string neighbor_id;
  float similarity = 0.0f;

  friend bool operator==(const NearestNeighbor&, const NearestNeighbor&) = default;
};

using NeighborMap = std::map<std::string, std::optional<NearestNeighbor>>;

struct BidirectionalNeighbors {
  NeighborMap a_to_b;
  NeighborMap b_to_a;
};

// Immutable after construction. Records are grouped by language and sorted by
// doc_id inside each language, so scanning a language in row order and keeping
// strictly greater scores breaks ties toward the smallest id.
class EmbeddingStore {
 public:
  struct Location {
    std::size_t lang_index;
    std::size_t row;
  };

  EmbeddingStore() = default;

  static EmbeddingStore Import(const Corpus& corpus, const EmbeddingFile& vectors);
  static EmbeddingStore Import(const Corpus& corpus, const std::filesystem::path& vectors);
  static EmbeddingStore FromRecords(std::uint32_t dimension, std::vector<SummaryRecord> records);

  std::uint32_t dimension() const { return dimension_; }
  std::size_t size() const { return locations_.size(); }
  const std::vector<LangCode>& languages() const { return languages_; }

  bool HasLanguage(const LangCode& lang) const;
  std::span<const std::string> ids(const LangCode& lang) const;
  std::optional<Location> Locate(std::string_view id) const;
  const LangCode& LangOf(std::string_view id) const;
  std::span<const float> Vector(std::string_view id) const;
  float SimilarityOf(std::string_view a, std::string_view b) const;

  // Per-query brute-force scan. Throws kUnknownId for an unknown query and
  // kInvalidArgument when target_lang is the query's own language.
  std::optional<NearestNeighbor> NearestInLanguage(std::string_view query_id,
                                                   const LangCode& target_lang) const;

  // Blocked batch search in both directions. Languages absent from the store
  // are treated as empty.
  BidirectionalNeighbors AllNearest(const LangCode& lang_a, const LangCode& lang_b) const;

  // Row-level blocked argmax: for every row of `from`, the best row of `to`
  // (or -1 when `to` is empty) and its similarity.
  struct RowArgmax {
    std::vector<std::int64_t> best;
    std::vector<float> similarity;
  };
  RowArgmax BlockedArgmax(const LangCode& from, const LangCode& to) const;

  // Canonical export: languages in order, ids sorted within each language.
  EmbeddingFile ToFile() const;

 private:
  struct LangBlock {
    LangCode lang;
    std::vector<std::string> ids;
    std::vector<float> matrix;
  };

  const LangBlock* Block(const LangCode& lang) const;
  std::span<const float> Row(const LangBlock& block, std::size_t row) const {
    return {block.matrix.data() + row * dimension_, dimension_};
  }

  std::uint32_t dimension_ = 0;
  std::vector<LangCode> languages_;
  std::vector<LangBlock> blocks_;
  std::unordered_map<std::string, Location> locations_;
};

}  // namespace xsf
