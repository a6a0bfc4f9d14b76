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
#include <utility>
#include <vector>

#include "xsum_forge/lang_code.hpp"
#include "xsum_forge/lase_metric.hpp"

namespace xsf {

// Character 1-3-gram language identifier with add-one smoothing. Text is
// lowercased (ASCII), whitespace runs collapse to one space and the text is
// padded with a space on both sides before n-gram extraction.
class LangIdModel {
 public:
  static constexpr int kMaxOrder = 3;
  static constexpr std::uint32_t kVersion = 1;

  struct Classification {
    LangIdDistribution distribution;
    bool fallback_uniform = false;  // no scorable n-grams in the input
  };

  // Throws kEmpty when a language has no usable text.
  static LangIdModel Train(std::span<const std::pair<LangCode, std::string>> samples);

  Classification Classify(std::string_view text) const;
  const std::vector<LangCode>& languages() const { return languages_; }

  std::string Serialize() const;  // "XLID" binary
  static LangIdModel Deserialize(std::string_view bytes);
  void Save(const std::filesystem::path& path) const;
  static LangIdModel Load(const std::filesystem::path& path);

  static std::vector<std::string> ExtractNgrams(std::string_view text, int order);

 private:
  struct Table {
    std::uint64_t total = 0;
    std::map<std::string, std::uint32_t> counts;
  };

  void Finalize();

  std::vector<LangCode> languages_;
  std::vector<std::array<Table, kMaxOrder>> tables_;
  std::array<std::uint64_t, kMaxOrder> vocab_{};  // union vocabulary size + 1 per order
};

// Externally produced distributions keyed by text id:
// {"id": ..., "probs": {"en": 0.9, ...}} per line. Codes are normalized and
// merged; every distribution is validated.
std::map<std::string, LangIdDistribution> ReadLangIdInterchange(const std::filesystem::path& path);
std::string RenderLangIdLine(std::string_view id, const LangIdDistribution& dist);

}  // namespace xsf
