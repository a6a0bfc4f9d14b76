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
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "xsum_forge/aligner.hpp"
#include "xsum_forge/corpus_io.hpp"
#include "xsum_forge/embedding_store.hpp"

namespace xsf {

inline constexpr double kDefaultTauPrimeDelta = 0.10;
inline constexpr std::size_t kDefaultMaxComponentSize = 50;

struct CapConfig {
  std::size_t max_component_size = kDefaultMaxComponentSize;
  double tau_prime = kDefaultTau - kDefaultTauPrimeDelta;

  void Validate(double tau) const;
};

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n);
  std::size_t Find(std::size_t x);
  // Keeps the smaller root so representatives are stable.
  bool Union(std::size_t a, std::size_t b);

 private:
  std::vector<std::size_t> parent_;
};

struct WeightedEdge {
  std::size_t u = 0;
  std::size_t v = 0;
  double weight = 0.0;
};

struct MinCut {
  double weight = 0.0;
  std::vector<std::size_t> side;  // sorted vertex indices on one side of the cut
};

// Global minimum cut of a connected graph on vertices 0..n-1 (Stoer-Wagner,
// maximum-adjacency ordering with ties to the lowest index). n >= 2.
MinCut StoerWagnerMinCut(std::size_t n, std::span<const WeightedEdge> edges);

struct RemovedEdge {
  std::string a_id;
  std::string b_id;
  double weight = 0.0;
};

// Weighted undirected graph of matched summaries. Vertices are sorted by id;
// components are ordered by their smallest vertex, and a component's id is its
// position in that order.
class ComponentGraph {
 public:
  struct Vertex {
    std::string id;
    LangCode lang;
  };

  // Throws kConsistency on a repeated edge or a self-loop.
  static ComponentGraph Build(std::span<const MatchedPair> direct_pairs);

  const std::vector<Vertex>& vertices() const { return vertices_; }
  const std::vector<WeightedEdge>& edges() const { return edges_; }
  const std::vector<std::vector<std::size_t>>& components() const { return components_; }
  const std::vector<RemovedEdge>& removed_edges() const { return removed_; }
  double removed_weight() const;

  std::optional<std::size_t> VertexIndex(std::string_view id) const;
  std::size_t ComponentOf(std::size_t vertex) const { return component_of_[vertex]; }
  std::optional<std::size_t> ComponentOfId(std::string_view id) const;
  bool HasEdge(std::size_t u, std::size_t v) const;
  std::size_t MaxComponentSize() const;

  // Removes edges (by index into edges()) and recomputes components.
  void RemoveEdges(std::span<const std::size_t> edge_indices);

  // JSONL: {"component_id", "vertices":[{"id","lang"}], "removed_edges":[...]}.
  // A removed edge is listed under the component of its smaller id.
  std::string RenderManifest() const;

 private:
  void RecomputeComponents();
  static std::uint64_t EdgeKey(std::size_t u, std::size_t v);

  std::vector<Vertex> vertices_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<WeightedEdge> edges_;
  std::unordered_map<std::uint64_t, std::size_t> edge_index_;
  std::vector<std::vector<std::size_t>> components_;
  std::vector<std::size_t> component_of_;
  std::vector<RemovedEdge> removed_;
};

// Repeatedly severs the global minimum cut of the first oversize component
// until every component fits max_component_size.
ComponentGraph CapComponents(ComponentGraph graph, const CapConfig& cfg);

// Cross-lingual vertex pairs inside one component with no direct edge that
// are mutual nearest neighbours with tau_prime <= similarity < tau.
std::vector<MatchedPair> InducedPairs(const ComponentGraph& graph, const EmbeddingStore& store,
                                      double tau, double tau_prime);

struct FinalizedPairs {
  std::vector<MatchedPair> pairs;          // PairFileOrder
  std::vector<std::size_t> component_ids;  // parallel to pairs
};

// Disjoint union of direct and induced pairs, each tagged with its component.
// Direct pairs whose edge was cut during capping are left out.
FinalizedPairs FinalizePairs(const ComponentGraph& graph, std::span<const MatchedPair> direct,
                             std::span<const MatchedPair> induced);

}  // namespace xsf
