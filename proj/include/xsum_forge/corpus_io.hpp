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

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "xsum_forge/lang_code.hpp"

namespace xsf {

struct Document {
  std::string id;
  LangCode lang;
  std::string text;
  std::string summary;

  friend bool operator==(const Document&, const Document&) = default;
};

struct CorpusManifest {
  static constexpr int kFormatVersion = 1;

  std::vector<LangCode> languages;  // sorted
  std::map<LangCode, std::size_t> counts;
  int format_version = kFormatVersion;

  std::size_t total() const;
  std::string ToJson() const;
  static CorpusManifest FromJson(std::string_view json);

  friend bool operator==(const CorpusManifest&, const CorpusManifest&) = default;
};

// Parses one corpus JSONL line. Throws kParse mentioning `line_number`.
Document ParseDocumentLine(std::string_view line, std::size_t line_number);

// Streams documents in file order. The manifest is complete once Next()
// has returned false.
class CorpusReader {
 public:
  explicit CorpusReader(const std::filesystem::path& path);

  bool Next(Document& out);
  const CorpusManifest& manifest() const { return manifest_; }
  std::size_t records_read() const { return records_; }

 private:
  std::ifstream in_;
  std::size_t line_number_ = 0;
  std::size_t records_ = 0;
  std::unordered_set<std::string> seen_ids_;
  CorpusManifest manifest_;
};

class Corpus {
 public:
  Corpus() = default;

  static Corpus Load(const std::filesystem::path& path);
  // Validates id uniqueness and summary presence like Load().
  static Corpus FromDocuments(std::vector<Document> docs);

  const std::vector<Document>& documents() const { return docs_; }
  const CorpusManifest& manifest() const { return manifest_; }
  std::size_t size() const { return docs_.size(); }

  const Document* Find(std::string_view id) const;
  bool Contains(std::string_view id) const { return Find(id) != nullptr; }

 private:
  std::vector<Document> docs_;
  std::unordered_map<std::string, std::size_t> index_;
  CorpusManifest manifest_;
};

enum class PairKind { kDirect, kInduced };

std::string_view PairKindName(PairKind kind);

struct MatchedPair {
  std::string a_id;
  std::string b_id;
  LangCode lang_a;
  LangCode lang_b;
  double similarity = 0.0;
  PairKind kind = PairKind::kDirect;

  // Swaps endpoints so that lang_a < lang_b.
  void Canonicalize();

  friend bool operator==(const MatchedPair&, const MatchedPair&) = default;
};

// Order used by every pairs artifact: (lang_a, lang_b, a_id, b_id).
bool PairFileOrder(const MatchedPair& x, const MatchedPair& y);

// Writes the pairs JSONL artifact. Every id must resolve in `corpus`.
void WritePairs(std::span<const MatchedPair> pairs, const Corpus& corpus,
                const std::filesystem::path& path);
std::string RenderPairLine(const MatchedPair& pair);
std::vector<MatchedPair> ReadPairs(const std::filesystem::path& path);

}  // namespace xsf
