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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "xsum_forge/lang_code.hpp"

namespace xsf {

inline constexpr int kDefaultLengthOffset = 6;

// Decodes UTF-8, substituting U+FFFD for each invalid byte.
std::vector<char32_t> DecodeUtf8(std::string_view text);
void AppendUtf8(char32_t cp, std::string& out);

// True for scripts written without spaces between words (Han, kana, Thai,
// Lao, Khmer, Myanmar).
bool IsUnspacedScript(char32_t cp);

// Whitespace-delimited tokens, except that characters of unspaced scripts
// become one token per (approximate) grapheme cluster.
std::vector<std::string> Tokenize(std::string_view text);

// Token count used for length penalties. The language tag is accepted for
// interface symmetry; segmentation is decided per character from its script.
std::size_t SegmentTokens(std::string_view text, const LangCode& lang = {});

struct LangIdDistribution {
  std::map<LangCode, double> probs;

  // Throws kFormat unless values are non-negative and sum to 1 +/- 1e-6.
  void Validate() const;
  // Highest probability, ties to the smallest code. Empty when no entries.
  std::optional<LangCode> Argmax() const;
};

struct LaseScore {
  double ms = 0.0;
  double lc = 0.0;
  double lp = 0.0;
  double lase = 0.0;
};

struct LaseConfig {
  int length_offset = kDefaultLengthOffset;
  LangCode target_lang;
};

double MeaningSimilarity(std::span<const float> gen_emb, std::span<const float> ref_emb);

// 1 when target is the argmax of the distribution, otherwise P(target).
double LanguageConfidence(const LangIdDistribution& dist, const LangCode& target);

// 1 when len_gen <= len_ref + c, else exp(1 - len_gen / (len_ref + c)); the
// degenerate len_ref + c == 0 case with len_gen > 0 evaluates to 0.
double LengthPenalty(std::uint64_t len_gen, std::uint64_t len_ref, int c);

LaseScore Lase(std::string_view gen_text, std::string_view ref_text,
               std::span<const float> gen_emb, std::span<const float> ref_emb,
               const LangIdDistribution& dist, const LaseConfig& cfg);

enum class RougeVariant { kRouge1, kRouge2, kRougeL };

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

RougeScore Rouge(std::string_view gen_text, std::string_view ref_text, RougeVariant variant);
RougeScore RougeFromTokens(std::span<const std::string> gen, std::span<const std::string> ref,
                           RougeVariant variant);

// Undefined coefficients (zero variance) are empty.
struct Correlation {
  std::optional<double> pearson;
  std::optional<double> spearman;
};

// Throws kInvalidArgument unless both inputs have the same length >= 2.
Correlation Correlate(std::span<const double> xs, std::span<const double> ys);
std::optional<double> Pearson(std::span<const double> xs, std::span<const double> ys);
// 1-based ranks with ties sharing their average rank.
std::vector<double> AverageRanks(std::span<const double> values);

}  // namespace xsf
