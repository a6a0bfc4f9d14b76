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

// Brute-force reference implementations used as test oracles. None of them
// call into the code under test beyond plain data types.
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "xsum_forge/corpus_io.hpp"
#include "xsum_forge/embedding_store.hpp"
#include "xsum_forge/pair_graph.hpp"

namespace xsf::testing {

class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

void WriteText(const std::filesystem::path& path, const std::string& text);

LangCode L(const char* code);

std::vector<float> RandomUnit(std::mt19937_64& rng, std::uint32_t d);
// normalize(base + eps * gaussian)
std::vector<float> Jitter(std::mt19937_64& rng, const std::vector<float>& base, double eps);

// Records drawn around a handful of latent points so that some cross-lingual
// similarities clear the alignment threshold; a few records repeat a vector
// exactly to exercise tie-breaking.
std::vector<SummaryRecord> RandomRecords(std::mt19937_64& rng, std::size_t n_langs, std::size_t n,
                                         std::uint32_t d);

// Sequential float dot product.
float OracleDot(const std::vector<float>& a, const std::vector<float>& b);

struct OracleNeighbor {
  std::string id;
  float similarity = 0.0f;
};

// Linear scan over every record of `lang`; strictly greater similarity wins,
// and equal similarity goes to the smaller id.
std::optional<OracleNeighbor> OracleNearest(const std::vector<SummaryRecord>& records,
                                            const SummaryRecord& query, const LangCode& lang);

// (a_id, b_id) with lang(a) < lang(b): mutual nearest neighbours with
// similarity >= tau, over every language pair.
std::set<std::pair<std::string, std::string>> OracleDirectPairs(const std::vector<SummaryRecord>& records,
                                                                double tau);

// Minimum over all 2^(n-1) - 1 bipartitions. Vertex n-1 is pinned to the
// complement side.
double ExhaustiveMinCut(std::size_t n, const std::vector<WeightedEdge>& edges);

// Connected components of the "similarity > threshold" graph within one
// language, keeping only groups of two or more; each group sorted.
std::vector<std::vector<std::string>> OracleDuplicateGroups(const std::vector<SummaryRecord>& records,
                                                            const LangCode& lang, double threshold);

// Connected components (sorted members, ordered by smallest member) of the
// graph spanned by the given undirected edges.
std::vector<std::vector<std::string>> OracleComponents(const std::vector<std::pair<std::string, std::string>>& edges);

// Independent induce stage for graphs that need no capping: components of
// the direct pairs, then every same-component cross-lingual pair with no
// direct edge that is mutual-NN and tau_prime <= sim < tau.
std::set<std::pair<std::string, std::string>> OracleInducedPairs(const std::vector<SummaryRecord>& records,
                                                                 const std::set<std::pair<std::string, std::string>>& direct,
                                                                 double tau, double tau_prime);

const SummaryRecord& RecordById(const std::vector<SummaryRecord>& records, const std::string& id);

}  // namespace xsf::testing
