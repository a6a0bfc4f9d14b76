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

#include <vector>

#include "xsum_forge/corpus_io.hpp"
#include "xsum_forge/embedding_store.hpp"

namespace xsf {

inline constexpr double kDefaultTau = 0.7437;

struct AlignConfig {
  double tau = kDefaultTau;

  void Validate() const;
};

// Direct pairs between two languages: mutual nearest neighbours whose
// similarity is at least tau. Output is canonically oriented and sorted by
// a_id. An empty language yields no pairs.
std::vector<MatchedPair> AlignLanguagePair(const EmbeddingStore& store, const LangCode& lang_a,
                                           const LangCode& lang_b, const AlignConfig& cfg);

// Union over every unordered language pair, in PairFileOrder.
std::vector<MatchedPair> AlignAll(const EmbeddingStore& store,
                                  const std::vector<LangCode>& languages, const AlignConfig& cfg);

}  // namespace xsf
