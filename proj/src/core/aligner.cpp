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

#include "xsum_forge/aligner.hpp"

#include <algorithm>

#include "xsum_forge/error.hpp"
#include "xsum_forge/fsutil.hpp"

namespace xsf {

void AlignConfig::Validate() const {
  if (!(tau > 0.0 && tau < 1.0)) {
    Fail(ErrorCode::kConfig, "tau must lie in (0, 1), got " + FormatShortest(tau));
  }
}

std::vector<MatchedPair> AlignLanguagePair(const EmbeddingStore& store, const LangCode& lang_a,
                                           const LangCode& lang_b, const AlignConfig& cfg) {
  cfg.Validate();
  if (lang_a == lang_b) Fail(ErrorCode::kInvalidArgument, "cannot align a language with itself");
  const LangCode& lo = std::min(lang_a, lang_b);
  const LangCode& hi = std::max(lang_a, lang_b);
  std::vector<MatchedPair> pairs;
  if (!store.HasLanguage(lo) || !store.HasLanguage(hi)) return pairs;

  const auto forward = store.BlockedArgmax(lo, hi);
  const auto backward = store.BlockedArgmax(hi, lo);
  const auto lo_ids = store.ids(lo);
  const auto hi_ids = store.ids(hi);
  for (std::size_t i = 0; i < lo_ids.size(); ++i) {
    const std::int64_t j = forward.best[i];
    if (j < 0) continue;
    if (backward.best[static_cast<std::size_t>(j)] != static_cast<std::int64_t>(i)) continue;
    const float sim = forward.similarity[i];
    if (static_cast<double>(sim) < cfg.tau) continue;
    pairs.push_back({lo_ids[i], hi_ids[static_cast<std::size_t>(j)], lo, hi, sim, PairKind::kDirect});
  }
  // lo_ids is sorted, so pairs are already ordered by a_id.
  return pairs;
}

std::vector<MatchedPair> AlignAll(const EmbeddingStore& store,
                                  const std::vector<LangCode>& languages, const AlignConfig& cfg) {
  std::vector<LangCode> langs = languages;
  std::sort(langs.begin(), langs.end());
  langs.erase(std::unique(langs.begin(), langs.end()), langs.end());
  std::vector<MatchedPair> all;
  for (std::size_t i = 0; i < langs.size(); ++i) {
    for (std::size_t j = i + 1; j < langs.size(); ++j) {
      auto pairs = AlignLanguagePair(store, langs[i], langs[j], cfg);
      all.insert(all.end(), std::make_move_iterator(pairs.begin()),
                 std::make_move_iterator(pairs.end()));
    }
  }
  std::sort(all.begin(), all.end(), PairFileOrder);
  return all;
}

}  // namespace xsf
