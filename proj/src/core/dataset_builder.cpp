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

#include "xsum_forge/dataset_builder.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <random>
#include <set>
#include <tuple>

#include "xsum_forge/error.hpp"
#include "xsum_forge/fsutil.hpp"
#include "xsum_forge/pair_graph.hpp"

namespace xsf {

using nlohmann::json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Semantic deduplication

std::vector<DuplicateGroup> SemanticDedup(const LangCode& lang, const EmbeddingStore& store,
                                          double threshold) {
  const auto ids = store.ids(lang);
  std::vector<std::span<const float>> rows;
  rows.reserve(ids.size());
  for (const auto& id : ids) rows.push_back(store.Vector(id));
  DisjointSets sets(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      if (static_cast<double>(Similarity(rows[i], rows[j])) > threshold) sets.Union(i, j);
    }
  }
  std::map<std::size_t, std::vector<std::string>> by_root;
  for (std::size_t i = 0; i < ids.size(); ++i) by_root[sets.Find(i)].push_back(ids[i]);
  std::vector<DuplicateGroup> groups;
  for (auto& [root, members] : by_root) {
    if (members.size() < 2) continue;
    std::sort(members.begin(), members.end());
    groups.push_back({lang, members.front(), std::move(members)});
  }
  std::sort(groups.begin(), groups.end(),
            [](const DuplicateGroup& a, const DuplicateGroup& b) { return a.survivor < b.survivor; });
  return groups;
}

std::vector<DuplicateGroup> SemanticDedupAll(const EmbeddingStore& store, double threshold) {
  std::vector<DuplicateGroup> all;
  for (const auto& lang : store.languages()) {
    auto groups = SemanticDedup(lang, store, threshold);
    all.insert(all.end(), std::make_move_iterator(groups.begin()), std::make_move_iterator(groups.end()));
  }
  return all;
}

std::unordered_map<std::string, std::string> SurvivorMap(std::span<const DuplicateGroup> groups) {
  std::unordered_map<std::string, std::string> map;
  for (const auto& g : groups) {
    for (const auto& m : g.members) {
      if (m != g.survivor) map.emplace(m, g.survivor);
    }
  }
  return map;
}

DedupOutcome ApplyDedup(std::span<const MatchedPair> pairs, std::span<const DuplicateGroup> groups) {
  const auto survivor = SurvivorMap(groups);
  auto resolve = [&](const std::string& id) -> const std::string& {
    auto it = survivor.find(id);
    return it == survivor.end() ? id : it->second;
  };
  DedupOutcome out;
  std::map<std::pair<std::string, std::string>, MatchedPair> kept;
  for (MatchedPair p : pairs) {
    p.a_id = resolve(p.a_id);
    p.b_id = resolve(p.b_id);
    if (p.a_id == p.b_id) {
      ++out.self_pairs_dropped;
      continue;
    }
    auto key = std::make_pair(p.a_id, p.b_id);
    auto [it, inserted] = kept.emplace(key, p);
    if (inserted) continue;
    ++out.duplicate_pairs_dropped;
    MatchedPair& cur = it->second;
    const bool better = (p.kind == PairKind::kDirect && cur.kind == PairKind::kInduced) ||
                        (p.kind == cur.kind && p.similarity > cur.similarity);
    if (better) cur = p;
  }
  for (auto& [key, p] : kept) out.pairs.push_back(std::move(p));
  std::sort(out.pairs.begin(), out.pairs.end(), PairFileOrder);
  return out;
}

std::string RenderDedupGroups(std::span<const DuplicateGroup> groups) {
  std::string out;
  for (const auto& g : groups) {
    json line{{"lang", g.lang.str()}, {"survivor", g.survivor}, {"members", g.members}};
    out += line.dump();
    out += '\n';
  }
  return out;
}

std::vector<DuplicateGroup> ReadDedupGroups(const fs::path& path) {
  std::vector<DuplicateGroup> groups;
  ForEachLine(path, [&](std::string_view line, std::size_t n) {
    if (line.empty()) return;
    try {
      const json j = json::parse(line);
      DuplicateGroup g;
      g.lang = LangCode::Parse(j.at("lang").get<std::string>());
      g.survivor = j.at("survivor").get<std::string>();
      g.members = j.at("members").get<std::vector<std::string>>();
      if (std::find(g.members.begin(), g.members.end(), g.survivor) == g.members.end()) {
        Fail(ErrorCode::kParse, "line " + std::to_string(n) + ": survivor not among members");
      }
      groups.push_back(std::move(g));
    } catch (const json::exception& e) {
      Fail(ErrorCode::kParse, "line " + std::to_string(n) + ": " + e.what());
    }
  });
  return groups;
}

// ---------------------------------------------------------------------------
// Splits

std::string_view SplitName(Split s) {
  switch (s) {
    case Split::kTrain:
      return "train";
    case Split::kDev:
      return "dev";
    case Split::kTest:
      return "test";
  }
  return "train";
}

Split ParseSplit(std::string_view name) {
  for (Split s : kAllSplits) {
    if (SplitName(s) == name) return s;
  }
  Fail(ErrorCode::kParse, "unknown split \"" + std::string(name) + "\"");
}

void SplitRatios::Validate() const {
  double sum = 0.0;
  for (double r : values) {
    if (!(r >= 0.0 && r <= 1.0)) Fail(ErrorCode::kConfig, "split ratios must lie in [0, 1]");
    sum += r;
  }
  if (std::abs(sum - 1.0) > 1e-9) Fail(ErrorCode::kConfig, "split ratios must sum to 1");
}

LangPairKey MakeLangPairKey(const LangCode& a, const LangCode& b) {
  return a < b ? LangPairKey{a, b} : LangPairKey{b, a};
}

std::uint64_t ComponentLoad::total() const {
  std::uint64_t t = 0;
  for (const auto& [k, n] : counts) t += n;
  return t;
}

std::string SplitManifest::ToJson() const {
  json j;
  j["seed"] = seed;
  j["ratios"] = {{"train", ratios.values[0]}, {"dev", ratios.values[1]}, {"test", ratios.values[2]}};
  j["components"] = json::array();
  for (const auto& c : components) {
    j["components"].push_back(
        {{"component_id", c.component_id}, {"split", SplitName(c.split)}, {"members", c.members}});
  }
  j["warnings"] = warnings;
  return j.dump(1) + "\n";
}

SplitManifest SplitManifest::FromJson(std::string_view text) {
  SplitManifest m;
  try {
    const json j = json::parse(text);
    m.seed = j.at("seed").get<std::uint64_t>();
    const json& r = j.at("ratios");
    m.ratios.values = {r.at("train").get<double>(), r.at("dev").get<double>(), r.at("test").get<double>()};
    for (const auto& c : j.at("components")) {
      m.components.push_back({c.at("component_id").get<std::size_t>(),
                              ParseSplit(c.at("split").get<std::string>()),
                              c.at("members").get<std::vector<std::string>>()});
    }
    m.warnings = j.at("warnings").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    Fail(ErrorCode::kParse, std::string("split manifest: ") + e.what());
  }
  return m;
}

std::unordered_map<std::string, std::size_t> SplitManifest::MemberIndex() const {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < components.size(); ++i) {
    for (const auto& id : components[i].members) {
      if (!index.emplace(id, i).second) {
        Fail(ErrorCode::kConsistency, "summary \"" + id + "\" assigned to two components");
      }
    }
  }
  return index;
}

SplitManifest AssignSplits(std::span<const ComponentLoad> loads, const SplitRatios& ratios,
                           std::uint64_t seed) {
  ratios.Validate();
  SplitManifest manifest;
  manifest.seed = seed;
  manifest.ratios = ratios;

  std::map<LangPairKey, double> totals;
  std::map<LangPairKey, std::size_t> component_counts;
  for (const auto& load : loads) {
    for (const auto& [k, n] : load.counts) {
      totals[k] += static_cast<double>(n);
      ++component_counts[k];
    }
  }
  std::vector<const ComponentLoad*> order;
  order.reserve(loads.size());
  for (const auto& l : loads) order.push_back(&l);
  std::sort(order.begin(), order.end(), [](const ComponentLoad* a, const ComponentLoad* b) {
    const auto ta = a->total();
    const auto tb = b->total();
    if (ta != tb) return ta > tb;
    return a->component_id < b->component_id;
  });

  std::mt19937_64 rng(seed);
  std::array<std::map<LangPairKey, double>, 3> assigned;
  std::map<std::size_t, Split> chosen;
  for (const ComponentLoad* load : order) {
    std::array<double, 3> deficit{};
    double scale = 0.0;
    for (Split s : kAllSplits) {
      const auto si = static_cast<std::size_t>(s);
      for (const auto& [k, n] : load->counts) {
        const double c = static_cast<double>(n);
        deficit[si] += c * (ratios[s] * totals[k] - assigned[si][k]);
        scale = std::max(scale, c * totals[k]);
      }
    }
    const double best = *std::max_element(deficit.begin(), deficit.end());
    const double eps = 1e-9 * std::max(1.0, scale);
    std::vector<Split> tied;
    for (Split s : kAllSplits) {
      if (deficit[static_cast<std::size_t>(s)] >= best - eps) tied.push_back(s);
    }
    Split pick = tied.front();
    if (tied.size() > 1) pick = tied[rng() % tied.size()];
    chosen[load->component_id] = pick;
    for (const auto& [k, n] : load->counts) {
      assigned[static_cast<std::size_t>(pick)][k] += static_cast<double>(n);
    }
  }

  for (const auto& load : loads) {
    manifest.components.push_back({load.component_id, chosen[load.component_id], {}});
  }
  std::sort(manifest.components.begin(), manifest.components.end(),
            [](const auto& a, const auto& b) { return a.component_id < b.component_id; });

  std::size_t live_splits = 0;
  for (double r : ratios.values) live_splits += r > 0.0 ? 1 : 0;
  for (const auto& [k, n] : component_counts) {
    if (n < live_splits) {
      manifest.warnings.push_back("language pair (" + k.first.str() + ", " + k.second.str() +
                                  ") spans " + std::to_string(n) + " component(s), fewer than " +
                                  std::to_string(live_splits) + " splits");
    }
  }
  return manifest;
}

std::vector<std::vector<std::string>> SplitComponents(
    const Corpus& corpus, std::span<const MatchedPair> pairs,
    const std::unordered_map<std::string, std::string>& dropped) {
  std::vector<std::string> ids;
  for (const auto& d : corpus.documents()) {
    if (!dropped.count(d.id)) ids.push_back(d.id);
  }
  std::sort(ids.begin(), ids.end());
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < ids.size(); ++i) index.emplace(ids[i], i);
  DisjointSets sets(ids.size());
  for (const auto& p : pairs) {
    auto a = index.find(p.a_id);
    auto b = index.find(p.b_id);
    if (a == index.end() || b == index.end()) continue;
    sets.Union(a->second, b->second);
  }
  std::vector<std::vector<std::string>> components;
  std::unordered_map<std::size_t, std::size_t> root_to_component;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    auto [it, inserted] = root_to_component.emplace(sets.Find(i), components.size());
    if (inserted) components.emplace_back();
    components[it->second].push_back(ids[i]);
  }
  return components;
}

std::vector<ComponentLoad> ComponentLoads(const std::vector<std::vector<std::string>>& components,
                                          std::span<const MatchedPair> pairs, const Corpus& corpus) {
  std::vector<ComponentLoad> loads(components.size());
  std::unordered_map<std::string, std::size_t> member;
  for (std::size_t c = 0; c < components.size(); ++c) {
    loads[c].component_id = c;
    for (const auto& id : components[c]) {
      member.emplace(id, c);
      const Document* doc = corpus.Find(id);
      if (doc == nullptr) Fail(ErrorCode::kUnknownId, "component member \"" + id + "\" not in corpus");
      loads[c].counts[MakeLangPairKey(doc->lang, doc->lang)] += 1;
    }
  }
  for (const auto& p : pairs) {
    auto it = member.find(p.a_id);
    if (it == member.end()) continue;
    loads[it->second].counts[MakeLangPairKey(p.lang_a, p.lang_b)] += 2;
  }
  return loads;
}

// ---------------------------------------------------------------------------
// Materialization

MaterializedSplits Materialize(const Corpus& corpus, std::span<const MatchedPair> pairs,
                               const SplitManifest& manifest, bool include_in_language,
                               const std::unordered_map<std::string, std::string>& dropped) {
  const auto member = manifest.MemberIndex();
  MaterializedSplits out;
  auto emit = [&](const Document& src, const Document& tgt, const ComponentAssignment& comp) {
    out.by_split[static_cast<std::size_t>(comp.split)].push_back(
        {src.id, tgt.id, src.lang, tgt.lang, src.text, tgt.summary, comp.component_id, comp.split});
  };
  for (const auto& p : pairs) {
    if (dropped.count(p.a_id) || dropped.count(p.b_id)) {
      out.log.push_back("skipped pair (" + p.a_id + ", " + p.b_id + "): references a dropped duplicate");
      continue;
    }
    const Document* a = corpus.Find(p.a_id);
    const Document* b = corpus.Find(p.b_id);
    if (a == nullptr || b == nullptr) Fail(ErrorCode::kUnknownId, "pair (" + p.a_id + ", " + p.b_id + ") not in corpus");
    auto ca = member.find(p.a_id);
    auto cb = member.find(p.b_id);
    if (ca == member.end() || cb == member.end()) {
      Fail(ErrorCode::kConsistency, "pair (" + p.a_id + ", " + p.b_id + ") has no split assignment");
    }
    if (ca->second != cb->second) {
      Fail(ErrorCode::kConsistency, "pair (" + p.a_id + ", " + p.b_id + ") spans two components");
    }
    const auto& comp = manifest.components[ca->second];
    emit(*a, *b, comp);
    emit(*b, *a, comp);
  }
  if (include_in_language) {
    for (const auto& comp : manifest.components) {
      for (const auto& id : comp.members) {
        const Document* d = corpus.Find(id);
        if (d == nullptr) Fail(ErrorCode::kUnknownId, "component member \"" + id + "\" not in corpus");
        emit(*d, *d, comp);
      }
    }
  }
  for (auto& samples : out.by_split) {
    std::sort(samples.begin(), samples.end(), [](const CrossSample& x, const CrossSample& y) {
      return std::tie(x.src_lang, x.tgt_lang, x.src_id, x.tgt_id) <
             std::tie(y.src_lang, y.tgt_lang, y.src_id, y.tgt_id);
    });
  }
  return out;
}

std::string RenderSampleLine(const CrossSample& s) {
  json j;
  j["id"] = s.sample_id();
  j["src_id"] = s.src_id;
  j["tgt_id"] = s.tgt_id;
  j["src_lang"] = s.src_lang.str();
  j["tgt_lang"] = s.tgt_lang.str();
  j["article_text"] = s.article_text;
  j["summary_text"] = s.summary_text;
  j["component_id"] = s.component_id;
  j["split"] = SplitName(s.split);
  return j.dump();
}

CrossSample ParseSampleLine(std::string_view line, std::size_t line_number) {
  try {
    const json j = json::parse(line);
    CrossSample s;
    s.src_id = j.at("src_id").get<std::string>();
    s.tgt_id = j.at("tgt_id").get<std::string>();
    s.src_lang = LangCode::Parse(j.at("src_lang").get<std::string>());
    s.tgt_lang = LangCode::Parse(j.at("tgt_lang").get<std::string>());
    s.article_text = j.at("article_text").get<std::string>();
    s.summary_text = j.at("summary_text").get<std::string>();
    s.component_id = j.at("component_id").get<std::size_t>();
    s.split = ParseSplit(j.at("split").get<std::string>());
    return s;
  } catch (const json::exception& e) {
    Fail(ErrorCode::kParse, "line " + std::to_string(line_number) + ": " + e.what());
  }
}

namespace {

constexpr const char* kIndexName = "index.json";

std::string SampleFileName(Split s, const LangCode& src, const LangCode& tgt) {
  return std::string(SplitName(s)) + "." + src.str() + "." + tgt.str() + ".jsonl";
}

}  // namespace

std::vector<SampleFileEntry> WriteSampleDirectory(const MaterializedSplits& splits, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (fs::exists(dir / kIndexName)) {
    for (const auto& old : ReadSampleIndex(dir)) fs::remove(dir / old.file, ec);
  }
  std::vector<SampleFileEntry> entries;
  for (Split s : kAllSplits) {
    const auto& samples = splits.by_split[static_cast<std::size_t>(s)];
    std::size_t i = 0;
    while (i < samples.size()) {
      std::size_t j = i;
      while (j < samples.size() && samples[j].src_lang == samples[i].src_lang &&
             samples[j].tgt_lang == samples[i].tgt_lang) {
        ++j;
      }
      SampleFileEntry entry{s, samples[i].src_lang, samples[i].tgt_lang,
                            SampleFileName(s, samples[i].src_lang, samples[i].tgt_lang), j - i};
      AtomicFile file(dir / entry.file);
      for (std::size_t k = i; k < j; ++k) file.stream() << RenderSampleLine(samples[k]) << '\n';
      file.Commit();
      entries.push_back(std::move(entry));
      i = j;
    }
  }
  json index;
  index["format_version"] = 1;
  index["files"] = json::array();
  for (const auto& e : entries) {
    index["files"].push_back({{"split", SplitName(e.split)},
                              {"src_lang", e.src_lang.str()},
                              {"tgt_lang", e.tgt_lang.str()},
                              {"file", e.file},
                              {"count", e.count}});
  }
  WriteFileAtomic(dir / kIndexName, index.dump(1) + "\n");
  return entries;
}

std::vector<SampleFileEntry> ReadSampleIndex(const fs::path& dir) {
  RequireInput(dir / kIndexName, "sample index");
  std::vector<SampleFileEntry> entries;
  try {
    const json index = json::parse(ReadFile(dir / kIndexName));
    for (const auto& f : index.at("files")) {
      const std::string file = f.at("file").get<std::string>();
      if (file.find('/') != std::string::npos || file.find("..") != std::string::npos) {
        Fail(ErrorCode::kFormat, "sample index names a file outside its directory: " + file);
      }
      entries.push_back({ParseSplit(f.at("split").get<std::string>()),
                         LangCode::Parse(f.at("src_lang").get<std::string>()),
                         LangCode::Parse(f.at("tgt_lang").get<std::string>()), file,
                         f.at("count").get<std::uint64_t>()});
    }
  } catch (const json::exception& e) {
    Fail(ErrorCode::kParse, std::string("sample index: ") + e.what());
  }
  return entries;
}

std::vector<CrossSample> ReadSampleFile(const fs::path& path) {
  std::vector<CrossSample> samples;
  ForEachLine(path, [&](std::string_view line, std::size_t n) {
    if (!line.empty()) samples.push_back(ParseSampleLine(line, n));
  });
  return samples;
}

// ---------------------------------------------------------------------------
// Statistics

std::uint64_t PairCountMatrix::at(const LangCode& src, const LangCode& tgt) const {
  auto it = counts.find({src, tgt});
  return it == counts.end() ? 0 : it->second;
}

std::uint64_t PairCountMatrix::total() const {
  std::uint64_t t = 0;
  for (const auto& [k, n] : counts) t += n;
  return t;
}

std::string PairCountMatrix::RenderTsv() const {
  std::string out = "article\\summary";
  for (const auto& l : languages) out += "\t" + l.str();
  out += "\n";
  for (const auto& row : languages) {
    out += row.str();
    for (const auto& col : languages) out += "\t" + std::to_string(at(row, col));
    out += "\n";
  }
  out += "total\t" + std::to_string(total()) + "\n";
  return out;
}

PairCountMatrix StatsMatrix(std::span<const CrossSample> samples, std::span<const LangCode> axis) {
  PairCountMatrix m;
  std::set<LangCode> langs(axis.begin(), axis.end());
  for (const auto& s : samples) {
    ++m.counts[{s.src_lang, s.tgt_lang}];
    langs.insert(s.src_lang);
    langs.insert(s.tgt_lang);
  }
  m.languages.assign(langs.begin(), langs.end());
  return m;
}

}  // namespace xsf
