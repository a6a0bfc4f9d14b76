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

#include "xsum_forge/pair_graph.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <nlohmann/json.hpp>
#include <numeric>
#include <set>
#include <tuple>

#include "xsum_forge/error.hpp"
#include "xsum_forge/fsutil.hpp"

namespace xsf {

void CapConfig::Validate(double tau) const {
  if (max_component_size < 2) Fail(ErrorCode::kConfig, "max_component must be at least 2");
  if (!(tau_prime > 0.0 && tau_prime < tau)) {
    Fail(ErrorCode::kConfig, "tau' must lie in (0, tau), got " + FormatShortest(tau_prime));
  }
}

DisjointSets::DisjointSets(std::size_t n) : parent_(n) {
  std::iota(parent_.begin(), parent_.end(), std::size_t{0});
}

std::size_t DisjointSets::Find(std::size_t x) {
  while (parent_[x] != x) {
    parent_[x] = parent_[parent_[x]];
    x = parent_[x];
  }
  return x;
}

bool DisjointSets::Union(std::size_t a, std::size_t b) {
  a = Find(a);
  b = Find(b);
  if (a == b) return false;
  if (b < a) std::swap(a, b);
  parent_[b] = a;
  return true;
}

MinCut StoerWagnerMinCut(std::size_t n, std::span<const WeightedEdge> edges) {
  if (n < 2) Fail(ErrorCode::kInvalidArgument, "minimum cut needs at least two vertices");
  std::vector<std::vector<double>> w(n, std::vector<double>(n, 0.0));
  for (const auto& e : edges) {
    if (e.u >= n || e.v >= n || e.u == e.v) Fail(ErrorCode::kInvalidArgument, "bad edge in cut input");
    w[e.u][e.v] += e.weight;
    w[e.v][e.u] += e.weight;
  }
  std::vector<std::vector<std::size_t>> groups(n);
  for (std::size_t i = 0; i < n; ++i) groups[i] = {i};
  std::vector<std::size_t> active(n);
  std::iota(active.begin(), active.end(), std::size_t{0});

  MinCut best;
  best.weight = std::numeric_limits<double>::infinity();
  std::vector<double> attach(n);
  std::vector<bool> added(n);
  while (active.size() > 1) {
    for (std::size_t v : active) {
      attach[v] = 0.0;
      added[v] = false;
    }
    std::size_t prev = active.front();
    std::size_t last = active.front();
    double cut_of_phase = 0.0;
    for (std::size_t step = 0; step < active.size(); ++step) {
      std::size_t pick = n;
      for (std::size_t v : active) {
        if (!added[v] && (pick == n || attach[v] > attach[pick])) pick = v;
      }
      added[pick] = true;
      prev = last;
      last = pick;
      cut_of_phase = attach[pick];
      for (std::size_t v : active) {
        if (!added[v]) attach[v] += w[pick][v];
      }
    }
    if (cut_of_phase < best.weight) {
      best.weight = cut_of_phase;
      best.side = groups[last];
    }
    groups[prev].insert(groups[prev].end(), groups[last].begin(), groups[last].end());
    for (std::size_t v : active) {
      w[prev][v] += w[last][v];
      w[v][prev] = w[prev][v];
    }
    w[prev][prev] = 0.0;
    active.erase(std::find(active.begin(), active.end(), last));
  }
  std::sort(best.side.begin(), best.side.end());
  return best;
}

std::uint64_t ComponentGraph::EdgeKey(std::size_t u, std::size_t v) {
  if (v < u) std::swap(u, v);
  return (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint64_t>(v);
}

ComponentGraph ComponentGraph::Build(std::span<const MatchedPair> direct_pairs) {
  ComponentGraph g;
  std::map<std::string, LangCode> ids;
  for (const auto& p : direct_pairs) {
    for (auto [id, lang] : {std::pair{&p.a_id, &p.lang_a}, std::pair{&p.b_id, &p.lang_b}}) {
      auto [it, inserted] = ids.emplace(*id, *lang);
      if (!inserted && it->second != *lang) {
        Fail(ErrorCode::kConsistency, "id \"" + *id + "\" appears with two languages");
      }
    }
  }
  for (auto& [id, lang] : ids) {
    g.index_.emplace(id, g.vertices_.size());
    g.vertices_.push_back({id, lang});
  }
  for (const auto& p : direct_pairs) {
    const std::size_t u = g.index_.at(p.a_id);
    const std::size_t v = g.index_.at(p.b_id);
    if (u == v) Fail(ErrorCode::kConsistency, "self-loop on \"" + p.a_id + "\"");
    if (!g.edge_index_.emplace(EdgeKey(u, v), g.edges_.size()).second) {
      Fail(ErrorCode::kConsistency, "duplicate edge (" + p.a_id + ", " + p.b_id + ")");
    }
    g.edges_.push_back({std::min(u, v), std::max(u, v), p.similarity});
  }
  g.RecomputeComponents();
  return g;
}

void ComponentGraph::RecomputeComponents() {
  DisjointSets sets(vertices_.size());
  for (const auto& e : edges_) sets.Union(e.u, e.v);
  components_.clear();
  component_of_.assign(vertices_.size(), 0);
  std::unordered_map<std::size_t, std::size_t> root_to_component;
  // Roots are the smallest member, so iterating vertices in order numbers
  // components by their smallest id.
  for (std::size_t v = 0; v < vertices_.size(); ++v) {
    const std::size_t root = sets.Find(v);
    auto [it, inserted] = root_to_component.emplace(root, components_.size());
    if (inserted) components_.emplace_back();
    components_[it->second].push_back(v);
    component_of_[v] = it->second;
  }
}

double ComponentGraph::removed_weight() const {
  double total = 0.0;
  for (const auto& e : removed_) total += e.weight;
  return total;
}

std::optional<std::size_t> ComponentGraph::VertexIndex(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> ComponentGraph::ComponentOfId(std::string_view id) const {
  auto v = VertexIndex(id);
  if (!v) return std::nullopt;
  return component_of_[*v];
}

bool ComponentGraph::HasEdge(std::size_t u, std::size_t v) const {
  return edge_index_.count(EdgeKey(u, v)) != 0;
}

std::size_t ComponentGraph::MaxComponentSize() const {
  std::size_t best = 0;
  for (const auto& c : components_) best = std::max(best, c.size());
  return best;
}

void ComponentGraph::RemoveEdges(std::span<const std::size_t> edge_indices) {
  std::set<std::size_t> drop(edge_indices.begin(), edge_indices.end());
  std::vector<WeightedEdge> kept;
  kept.reserve(edges_.size());
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    if (drop.count(i)) {
      const auto& e = edges_[i];
      removed_.push_back({vertices_[e.u].id, vertices_[e.v].id, e.weight});
    } else {
      kept.push_back(edges_[i]);
    }
  }
  edges_ = std::move(kept);
  edge_index_.clear();
  for (std::size_t i = 0; i < edges_.size(); ++i) edge_index_.emplace(EdgeKey(edges_[i].u, edges_[i].v), i);
  RecomputeComponents();
}

std::string ComponentGraph::RenderManifest() const {
  using nlohmann::json;
  std::vector<json> removed_by_component(components_.size(), json::array());
  std::vector<RemovedEdge> removed = removed_;
  std::sort(removed.begin(), removed.end(), [](const RemovedEdge& x, const RemovedEdge& y) {
    return std::tie(x.a_id, x.b_id) < std::tie(y.a_id, y.b_id);
  });
  for (const auto& e : removed) {
    const std::size_t c = component_of_[index_.at(e.a_id)];
    removed_by_component[c].push_back(
        {{"a_id", e.a_id}, {"b_id", e.b_id}, {"similarity", e.weight}});
  }
  std::string out;
  for (std::size_t c = 0; c < components_.size(); ++c) {
    json line;
    line["component_id"] = c;
    line["vertices"] = json::array();
    for (std::size_t v : components_[c]) {
      line["vertices"].push_back({{"id", vertices_[v].id}, {"lang", vertices_[v].lang.str()}});
    }
    line["removed_edges"] = removed_by_component[c];
    out += line.dump();
    out += '\n';
  }
  return out;
}

ComponentGraph CapComponents(ComponentGraph graph, const CapConfig& cfg) {
  if (cfg.max_component_size < 2) Fail(ErrorCode::kConfig, "max_component must be at least 2");
  for (;;) {
    const auto& comps = graph.components();
    auto oversize = std::find_if(comps.begin(), comps.end(), [&](const auto& c) {
      return c.size() > cfg.max_component_size;
    });
    if (oversize == comps.end()) break;
    const std::vector<std::size_t> members = *oversize;
    std::unordered_map<std::size_t, std::size_t> local;
    for (std::size_t i = 0; i < members.size(); ++i) local.emplace(members[i], i);
    std::vector<WeightedEdge> local_edges;
    std::vector<std::size_t> edge_ids;
    const auto& edges = graph.edges();
    for (std::size_t i = 0; i < edges.size(); ++i) {
      auto iu = local.find(edges[i].u);
      if (iu == local.end()) continue;
      local_edges.push_back({iu->second, local.at(edges[i].v), edges[i].weight});
      edge_ids.push_back(i);
    }
    const MinCut cut = StoerWagnerMinCut(members.size(), local_edges);
    std::vector<bool> on_side(members.size(), false);
    for (std::size_t v : cut.side) on_side[v] = true;
    std::vector<std::size_t> severed;
    for (std::size_t i = 0; i < local_edges.size(); ++i) {
      if (on_side[local_edges[i].u] != on_side[local_edges[i].v]) severed.push_back(edge_ids[i]);
    }
    if (severed.empty()) Fail(ErrorCode::kInternal, "minimum cut severed no edges");
    graph.RemoveEdges(severed);
  }
  return graph;
}

std::vector<MatchedPair> InducedPairs(const ComponentGraph& graph, const EmbeddingStore& store,
                                      double tau, double tau_prime) {
  const auto& vertices = graph.vertices();
  std::map<std::pair<std::size_t, LangCode>, std::optional<NearestNeighbor>> cache;
  auto nearest = [&](std::size_t v, const LangCode& lang) -> const std::optional<NearestNeighbor>& {
    auto key = std::make_pair(v, lang);
    auto it = cache.find(key);
    if (it == cache.end()) {
      it = cache.emplace(key, store.NearestInLanguage(vertices[v].id, lang)).first;
    }
    return it->second;
  };

  std::vector<MatchedPair> induced;
  for (const auto& component : graph.components()) {
    if (component.size() < 3) continue;
    std::set<LangCode> langs;
    for (std::size_t v : component) langs.insert(vertices[v].lang);
    for (std::size_t u : component) {
      const LangCode& lu = vertices[u].lang;
      for (const LangCode& lv : langs) {
        if (!(lu < lv)) continue;
        const auto& nn = nearest(u, lv);
        if (!nn) continue;
        const auto v = graph.VertexIndex(nn->neighbor_id);
        if (!v || graph.ComponentOf(*v) != graph.ComponentOf(u)) continue;
        if (graph.HasEdge(u, *v)) continue;
        const auto& back = nearest(*v, lu);
        if (!back || back->neighbor_id != vertices[u].id) continue;
        const double sim = nn->similarity;
        if (sim >= tau || sim < tau_prime) continue;
        induced.push_back({vertices[u].id, vertices[*v].id, lu, lv, sim, PairKind::kInduced});
      }
    }
  }
  std::sort(induced.begin(), induced.end(), PairFileOrder);
  return induced;
}

FinalizedPairs FinalizePairs(const ComponentGraph& graph, std::span<const MatchedPair> direct,
                             std::span<const MatchedPair> induced) {
  std::vector<MatchedPair> all;
  std::set<std::pair<std::string, std::string>> seen;
  auto add = [&](const MatchedPair& p, bool require_edge) {
    const auto u = graph.VertexIndex(p.a_id);
    const auto v = graph.VertexIndex(p.b_id);
    if (!u || !v) Fail(ErrorCode::kConsistency, "pair endpoint missing from the graph: " + p.a_id + ", " + p.b_id);
    if (require_edge && !graph.HasEdge(*u, *v)) return;  // severed while capping
    auto key = std::minmax(p.a_id, p.b_id);
    if (!seen.emplace(key.first, key.second).second) {
      Fail(ErrorCode::kConsistency, "pair (" + p.a_id + ", " + p.b_id + ") is both direct and induced");
    }
    if (graph.ComponentOf(*u) != graph.ComponentOf(*v)) {
      Fail(ErrorCode::kConsistency, "pair (" + p.a_id + ", " + p.b_id + ") spans two components");
    }
    all.push_back(p);
  };
  for (const auto& p : direct) add(p, true);
  for (const auto& p : induced) add(p, false);
  std::sort(all.begin(), all.end(), PairFileOrder);
  FinalizedPairs out;
  out.component_ids.reserve(all.size());
  for (const auto& p : all) out.component_ids.push_back(*graph.ComponentOfId(p.a_id));
  out.pairs = std::move(all);
  return out;
}

}  // namespace xsf
