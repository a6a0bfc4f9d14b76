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

#include "xsum_forge/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <nlohmann/json.hpp>
#include <numbers>
#include <random>
#include <unordered_map>
#include <set>
#include <tuple>

#include "xsum_forge/error.hpp"
#include "xsum_forge/fsutil.hpp"

namespace xsf {

using nlohmann::json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Config

namespace {

std::string CanonicalKey(std::string_view key) {
  std::string k(key);
  std::replace(k.begin(), k.end(), '-', '_');
  return k;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double ParseDouble(std::string_view key, std::string_view v) {
  v = Trim(v);
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
    Fail(ErrorCode::kConfig, "invalid number for " + std::string(key) + ": \"" + std::string(v) + "\"");
  }
  return out;
}

std::uint64_t ParseUnsigned(std::string_view key, std::string_view v) {
  v = Trim(v);
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    Fail(ErrorCode::kConfig, "invalid non-negative integer for " + std::string(key) + ": \"" + std::string(v) + "\"");
  }
  return out;
}

}  // namespace

const std::vector<std::string>& PipelineConfig::Keys() {
  static const std::vector<std::string> keys = {
      "tau", "tau_prime_delta", "max_component", "dedup_threshold", "ratios",
      "alpha", "beta", "min_pair_count", "m", "mb", "lase_c", "seed",
      "lase_min_samples", "include_in_language"};
  return keys;
}

void PipelineConfig::Set(std::string_view raw_key, std::string_view value) {
  const std::string key = CanonicalKey(raw_key);
  if (key == "tau") {
    tau = ParseDouble(key, value);
  } else if (key == "tau_prime_delta") {
    tau_prime_delta = ParseDouble(key, value);
  } else if (key == "max_component") {
    max_component = ParseUnsigned(key, value);
  } else if (key == "dedup_threshold") {
    dedup_threshold = ParseDouble(key, value);
  } else if (key == "ratios") {
    std::string s(value);
    std::replace(s.begin(), s.end(), '/', ',');
    std::vector<double> parts;
    std::size_t start = 0;
    while (start <= s.size()) {
      const std::size_t comma = s.find(',', start);
      const std::size_t end = comma == std::string::npos ? s.size() : comma;
      parts.push_back(ParseDouble(key, std::string_view(s).substr(start, end - start)));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (parts.size() != 3) Fail(ErrorCode::kConfig, "ratios needs three values (train,dev,test)");
    ratios.values = {parts[0], parts[1], parts[2]};
  } else if (key == "alpha") {
    alpha = ParseDouble(key, value);
  } else if (key == "beta") {
    beta = ParseDouble(key, value);
  } else if (key == "min_pair_count") {
    min_pair_count = ParseUnsigned(key, value);
  } else if (key == "m") {
    m = ParseUnsigned(key, value);
  } else if (key == "mb") {
    mb = ParseUnsigned(key, value);
  } else if (key == "lase_c") {
    lase_c = static_cast<std::int64_t>(ParseUnsigned(key, value));
  } else if (key == "seed") {
    seed = ParseUnsigned(key, value);
  } else if (key == "lase_min_samples") {
    lase_min_samples = ParseUnsigned(key, value);
  } else if (key == "include_in_language") {
    const std::string_view v = Trim(value);
    if (v == "true" || v == "1") {
      include_in_language = true;
    } else if (v == "false" || v == "0") {
      include_in_language = false;
    } else {
      Fail(ErrorCode::kConfig, "include_in_language must be true or false");
    }
  } else {
    Fail(ErrorCode::kConfig, "unknown config key \"" + std::string(raw_key) + "\"");
  }
}

std::string PipelineConfig::Get(std::string_view raw_key) const {
  const std::string key = CanonicalKey(raw_key);
  if (key == "tau") return FormatShortest(tau);
  if (key == "tau_prime_delta") return FormatShortest(tau_prime_delta);
  if (key == "max_component") return std::to_string(max_component);
  if (key == "dedup_threshold") return FormatShortest(dedup_threshold);
  if (key == "ratios") {
    return FormatShortest(ratios.values[0]) + "," + FormatShortest(ratios.values[1]) + "," +
           FormatShortest(ratios.values[2]);
  }
  if (key == "alpha") return FormatShortest(alpha);
  if (key == "beta") return FormatShortest(beta);
  if (key == "min_pair_count") return std::to_string(min_pair_count);
  if (key == "m") return std::to_string(m);
  if (key == "mb") return std::to_string(mb);
  if (key == "lase_c") return std::to_string(lase_c);
  if (key == "seed") return std::to_string(seed);
  if (key == "lase_min_samples") return std::to_string(lase_min_samples);
  if (key == "include_in_language") return include_in_language ? "true" : "false";
  Fail(ErrorCode::kConfig, "unknown config key \"" + std::string(raw_key) + "\"");
}

void PipelineConfig::Validate() const {
  align().Validate();
  if (!(tau_prime_delta > 0.0 && tau_prime_delta < tau)) {
    Fail(ErrorCode::kConfig, "tau_prime_delta must lie in (0, tau)");
  }
  if (max_component < 2) Fail(ErrorCode::kConfig, "max_component must be at least 2");
  cap().Validate(tau);
  if (!(dedup_threshold > 0.0 && dedup_threshold <= 1.0)) {
    Fail(ErrorCode::kConfig, "dedup_threshold must lie in (0, 1]");
  }
  ratios.Validate();
  if (alpha < 0.0 || beta < 0.0) Fail(ErrorCode::kConfig, "alpha and beta must be non-negative");
  if (m == 0 || mb == 0) Fail(ErrorCode::kConfig, "m and mb must be positive");
  if (lase_c < 0) Fail(ErrorCode::kConfig, "lase_c must be non-negative");
}

std::string PipelineConfig::Render() const {
  std::string out;
  for (const auto& key : Keys()) out += key + " = " + Get(key) + "\n";
  return out;
}

void PipelineConfig::LoadFile(const fs::path& path) {
  RequireInput(path, "config file");
  ForEachLine(path, [&](std::string_view line, std::size_t n) {
    const std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = Trim(line);
    if (line.empty()) return;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      Fail(ErrorCode::kConfig, path.string() + ":" + std::to_string(n) + ": expected key = value");
    }
    Set(Trim(line.substr(0, eq)), Trim(line.substr(eq + 1)));
  });
}

// ---------------------------------------------------------------------------
// Stages

void WriteStoreArtifacts(const Corpus& corpus, const EmbeddingStore& store,
                         const fs::path& out_vectors, const fs::path& out_manifest) {
  WriteEmbeddingFile(store.ToFile(), out_vectors);
  if (!out_manifest.empty()) {
    json j = json::parse(corpus.manifest().ToJson());
    j["dimension"] = store.dimension();
    j["vectors"] = store.size();
    WriteFileAtomic(out_manifest, j.dump(2) + "\n");
  }
}

std::vector<MatchedPair> InduceStage(const EmbeddingStore& store, std::span<const MatchedPair> direct,
                                     const PipelineConfig& cfg, const fs::path& components_out,
                                     const LogSink& log) {
  cfg.Validate();
  for (const auto& p : direct) {
    if (p.kind != PairKind::kDirect) Fail(ErrorCode::kInvalidArgument, "induce expects direct pairs only");
  }
  ComponentGraph graph = ComponentGraph::Build(direct);
  const std::size_t before = graph.components().size();
  graph = CapComponents(std::move(graph), cfg.cap());
  const auto induced = InducedPairs(graph, store, cfg.tau, cfg.tau_prime());
  FinalizedPairs fin = FinalizePairs(graph, direct, induced);
  if (!components_out.empty()) WriteFileAtomic(components_out, graph.RenderManifest());
  if (log) {
    log("components: " + std::to_string(before) + " before capping, " +
        std::to_string(graph.components().size()) + " after; removed " +
        std::to_string(graph.removed_edges().size()) + " edge(s), weight " +
        FormatFixed6(graph.removed_weight()));
    log("pairs: " + std::to_string(fin.pairs.size() - induced.size()) + " direct, " +
        std::to_string(induced.size()) + " induced");
  }
  return std::move(fin.pairs);
}

std::vector<MatchedPair> DedupStage(const EmbeddingStore& store, std::span<const MatchedPair> pairs,
                                    const PipelineConfig& cfg, const fs::path& groups_out,
                                    const LogSink& log) {
  cfg.Validate();
  const auto groups = SemanticDedupAll(store, cfg.dedup_threshold);
  DedupOutcome outcome = ApplyDedup(pairs, groups);
  if (!groups_out.empty()) WriteFileAtomic(groups_out, RenderDedupGroups(groups));
  if (log) {
    std::size_t dropped = 0;
    for (const auto& g : groups) dropped += g.members.size() - 1;
    log("dedup: " + std::to_string(groups.size()) + " group(s), " + std::to_string(dropped) +
        " summaries dropped; " + std::to_string(outcome.self_pairs_dropped) + " self pair(s) and " +
        std::to_string(outcome.duplicate_pairs_dropped) + " repeated pair(s) removed");
  }
  return std::move(outcome.pairs);
}

namespace {

std::unordered_map<std::string, std::string> DroppedMap(const fs::path& groups_path) {
  if (groups_path.empty()) return {};
  RequireInput(groups_path, "dedup groups");
  return SurvivorMap(ReadDedupGroups(groups_path));
}

std::vector<MatchedPair> WithoutDropped(std::span<const MatchedPair> pairs,
                                        const std::unordered_map<std::string, std::string>& dropped) {
  std::vector<MatchedPair> kept;
  for (const auto& p : pairs) {
    if (!dropped.count(p.a_id) && !dropped.count(p.b_id)) kept.push_back(p);
  }
  return kept;
}

}  // namespace

SplitManifest SplitStage(const Corpus& corpus, std::span<const MatchedPair> pairs,
                         const fs::path& groups_path, const PipelineConfig& cfg,
                         const fs::path& split_out, const LogSink& log) {
  cfg.Validate();
  const auto dropped = DroppedMap(groups_path);
  const auto kept = WithoutDropped(pairs, dropped);
  for (const auto& p : kept) {
    if (!corpus.Contains(p.a_id) || !corpus.Contains(p.b_id)) {
      Fail(ErrorCode::kUnknownId, "pair (" + p.a_id + ", " + p.b_id + ") not in corpus");
    }
  }
  const auto components = SplitComponents(corpus, kept, dropped);
  const auto loads = ComponentLoads(components, kept, corpus);
  SplitManifest manifest = AssignSplits(loads, cfg.ratios, cfg.seed);
  for (auto& c : manifest.components) c.members = components[c.component_id];
  if (!split_out.empty()) WriteFileAtomic(split_out, manifest.ToJson());
  if (log) {
    std::array<std::size_t, 3> n{};
    for (const auto& c : manifest.components) ++n[static_cast<std::size_t>(c.split)];
    log("split: " + std::to_string(manifest.components.size()) + " component(s): train " +
        std::to_string(n[0]) + ", dev " + std::to_string(n[1]) + ", test " + std::to_string(n[2]));
    for (const auto& w : manifest.warnings) log("warning: " + w);
  }
  return manifest;
}

void MaterializeStage(const Corpus& corpus, std::span<const MatchedPair> pairs,
                      const fs::path& split_path, const fs::path& groups_path,
                      const PipelineConfig& cfg, const fs::path& out_dir, const LogSink& log) {
  RequireInput(split_path, "split manifest");
  const SplitManifest manifest = SplitManifest::FromJson(ReadFile(split_path));
  const auto dropped = DroppedMap(groups_path);
  const MaterializedSplits splits = Materialize(corpus, pairs, manifest, cfg.include_in_language, dropped);
  const auto entries = WriteSampleDirectory(splits, out_dir);
  if (log) {
    for (const auto& line : splits.log) log(line);
    log("materialize: " + std::to_string(entries.size()) + " file(s); train " +
        std::to_string(splits.by_split[0].size()) + ", dev " + std::to_string(splits.by_split[1].size()) +
        ", test " + std::to_string(splits.by_split[2].size()) + " samples");
  }
}

PairCountMatrix StatsFromSamples(const fs::path& samples_dir, const Corpus* axis_corpus) {
  std::vector<CrossSample> all;
  for (const auto& entry : ReadSampleIndex(samples_dir)) {
    auto samples = ReadSampleFile(samples_dir / entry.file);
    all.insert(all.end(), std::make_move_iterator(samples.begin()), std::make_move_iterator(samples.end()));
  }
  std::vector<LangCode> axis;
  if (axis_corpus != nullptr) axis = axis_corpus->manifest().languages;
  return StatsMatrix(all, axis);
}

PairCountMatrix StatsFromPairs(std::span<const MatchedPair> pairs, const Corpus* axis_corpus) {
  PairCountMatrix m;
  std::set<LangCode> langs;
  if (axis_corpus != nullptr) {
    langs.insert(axis_corpus->manifest().languages.begin(), axis_corpus->manifest().languages.end());
  }
  for (const auto& p : pairs) {
    ++m.counts[{p.lang_a, p.lang_b}];
    ++m.counts[{p.lang_b, p.lang_a}];
    langs.insert(p.lang_a);
    langs.insert(p.lang_b);
  }
  m.languages.assign(langs.begin(), langs.end());
  return m;
}

SamplingPlan PlanStage(const fs::path& samples_dir, const PipelineConfig& cfg,
                       const fs::path& plan_out, const LogSink& log) {
  cfg.Validate();
  std::map<std::pair<LangCode, LangCode>, std::uint64_t> counts;
  for (const auto& e : ReadSampleIndex(samples_dir)) {
    if (e.split == Split::kTrain) counts[{e.src_lang, e.tgt_lang}] += e.count;
  }
  PairCounts pc = PairCounts::FromMap(counts);
  pc.ApplyFloor(cfg.min_pair_count);
  if (log) {
    std::size_t zeroed = 0;
    for (const auto& [k, n] : counts) zeroed += (n > 0 && n < cfg.min_pair_count) ? 1 : 0;
    log("plan: " + std::to_string(pc.size()) + " language(s); " + std::to_string(zeroed) +
        " pair(s) under min_pair_count " + std::to_string(cfg.min_pair_count) + " discarded");
  }
  SamplingPlan plan = ComputePlan(pc, cfg.alpha, cfg.beta);
  if (!plan_out.empty()) WriteFileAtomic(plan_out, plan.ToJson());
  return plan;
}

SamplePools LoadTrainPools(const fs::path& samples_dir, const SamplingPlan& plan) {
  SamplePools pools;
  auto pos = [&](const LangCode& l) -> std::optional<std::size_t> {
    auto it = std::lower_bound(plan.languages.begin(), plan.languages.end(), l);
    if (it == plan.languages.end() || *it != l) return std::nullopt;
    return static_cast<std::size_t>(it - plan.languages.begin());
  };
  for (const auto& e : ReadSampleIndex(samples_dir)) {
    if (e.split != Split::kTrain) continue;
    const auto i = pos(e.src_lang);
    const auto j = pos(e.tgt_lang);
    if (!i || !j || plan.counts[*i][*j] == 0) continue;
    auto& pool = pools[{e.src_lang, e.tgt_lang}];
    for (const auto& s : ReadSampleFile(samples_dir / e.file)) pool.push_back(s.sample_id());
  }
  return pools;
}

void SampleStage(const fs::path& plan_path, const fs::path& samples_dir, const PipelineConfig& cfg,
                 std::uint64_t steps, const fs::path& out) {
  cfg.Validate();
  RequireInput(plan_path, "sampling plan");
  const SamplingPlan plan = SamplingPlan::FromJson(ReadFile(plan_path));
  const SamplePools pools = LoadTrainPools(samples_dir, plan);
  AtomicFile file(out);
  TrainingFeed(plan, pools, steps, cfg.m, cfg.mb, cfg.seed, [&](std::uint64_t step, const Batch& b) {
    file.stream() << RenderBatchLine(step, b) << '\n';
  });
  file.Commit();
}

// ---------------------------------------------------------------------------
// Evaluation

std::vector<TextRecord> ReadTextRecords(const fs::path& path) {
  RequireInput(path, "text records");
  std::vector<TextRecord> records;
  std::set<std::string> seen;
  ForEachLine(path, [&](std::string_view line, std::size_t n) {
    if (line.empty()) return;
    TextRecord r;
    try {
      const json j = json::parse(line);
      r.id = j.at("id").get<std::string>();
      r.lang = LangCode::Parse(j.at("lang").get<std::string>());
      r.text = j.at("text").get<std::string>();
      if (j.contains("src_lang")) r.src_lang = LangCode::Parse(j.at("src_lang").get<std::string>());
    } catch (const json::exception& e) {
      Fail(ErrorCode::kParse, path.string() + ": line " + std::to_string(n) + ": " + e.what());
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kParse) throw;
      Fail(ErrorCode::kParse, path.string() + ": line " + std::to_string(n) + ": " + e.what());
    }
    if (!seen.insert(r.id).second) {
      Fail(ErrorCode::kDuplicateId, path.string() + ": line " + std::to_string(n) + ": duplicate id \"" + r.id + "\"");
    }
    records.push_back(std::move(r));
  });
  return records;
}

LangIdDistribution LangIdSource::Distribution(const std::string& id, std::string_view text) const {
  if (interchange != nullptr) {
    auto it = interchange->find(id);
    if (it == interchange->end()) Fail(ErrorCode::kUnknownId, "no language-ID distribution for \"" + id + "\"");
    return it->second;
  }
  if (model != nullptr) return model->Classify(text).distribution;
  Fail(ErrorCode::kInvalidArgument, "no language-ID provider configured");
}

EvaluationResult EvaluateRun(const EvaluationInputs& in, const PipelineConfig& cfg,
                             const LangIdSource& langid) {
  cfg.Validate();
  auto predictions = ReadTextRecords(in.predictions);
  if (predictions.empty()) Fail(ErrorCode::kEmpty, "prediction file is empty: " + in.predictions.string());
  const auto references = ReadTextRecords(in.references);
  std::unordered_map<std::string, const TextRecord*> ref_by_id;
  for (const auto& r : references) ref_by_id.emplace(r.id, &r);
  std::vector<std::string> missing;
  for (const auto& p : predictions) {
    if (!ref_by_id.count(p.id)) missing.push_back(p.id);
  }
  if (!missing.empty()) {
    std::string list;
    for (std::size_t i = 0; i < missing.size(); ++i) list += (i ? ", " : "") + missing[i];
    Fail(ErrorCode::kUnknownId, "missing reference id(s): " + list);
  }
  const EmbeddingFile pred_vec = ReadEmbeddingFile(in.prediction_vectors);
  const EmbeddingFile ref_vec = ReadEmbeddingFile(in.reference_vectors);
  if (pred_vec.dimension != ref_vec.dimension) {
    Fail(ErrorCode::kDimension, "prediction and reference vectors differ in dimension");
  }
  const auto pred_index = pred_vec.Index();
  const auto ref_index = ref_vec.Index();
  auto vector_of = [](const EmbeddingFile& f, const std::unordered_map<std::string, std::size_t>& idx,
                      const std::string& id, const char* what) {
    auto it = idx.find(id);
    if (it == idx.end()) Fail(ErrorCode::kUnknownId, std::string("no ") + what + " vector for \"" + id + "\"");
    std::vector<float> v(f.row(it->second).begin(), f.row(it->second).end());
    NormalizeInPlace(v, id);
    return v;
  };

  std::sort(predictions.begin(), predictions.end(),
            [](const TextRecord& a, const TextRecord& b) { return a.id < b.id; });
  EvaluationResult result;
  for (const auto& p : predictions) {
    const TextRecord& ref = *ref_by_id.at(p.id);
    const auto gv = vector_of(pred_vec, pred_index, p.id, "prediction");
    const auto rv = vector_of(ref_vec, ref_index, p.id, "reference");
    LaseConfig lc{static_cast<int>(cfg.lase_c), p.lang};
    SampleScore s;
    s.id = p.id;
    s.tgt_lang = p.lang;
    s.src_lang = p.src_lang.value_or(p.lang);
    s.ref_lang = ref.lang;
    s.lase = Lase(p.text, ref.text, gv, rv, langid.Distribution(p.id, p.text), lc);
    const auto gen_tokens = Tokenize(p.text);
    const auto ref_tokens = Tokenize(ref.text);
    s.rouge1 = RougeFromTokens(gen_tokens, ref_tokens, RougeVariant::kRouge1).f1;
    s.rouge2 = RougeFromTokens(gen_tokens, ref_tokens, RougeVariant::kRouge2).f1;
    s.rougeL = RougeFromTokens(gen_tokens, ref_tokens, RougeVariant::kRougeL).f1;
    result.samples.push_back(std::move(s));
  }
  std::map<std::pair<LangCode, LangCode>, PairAggregate> agg;
  double sum_lase = 0.0;
  double sum_r2 = 0.0;
  for (const auto& s : result.samples) {
    auto& a = agg[{s.src_lang, s.tgt_lang}];
    a.src_lang = s.src_lang;
    a.tgt_lang = s.tgt_lang;
    ++a.n;
    a.mean_lase += s.lase.lase;
    a.mean_rouge2 += s.rouge2;
    sum_lase += s.lase.lase;
    sum_r2 += s.rouge2;
  }
  for (auto& [key, a] : agg) {
    a.mean_lase /= static_cast<double>(a.n);
    a.mean_rouge2 /= static_cast<double>(a.n);
    a.low_confidence = a.n < cfg.lase_min_samples;
    result.pairs.push_back(a);
  }
  result.mean_lase = sum_lase / static_cast<double>(result.samples.size());
  result.mean_rouge2 = sum_r2 / static_cast<double>(result.samples.size());
  return result;
}

std::string RenderScoreLine(const SampleScore& s) {
  json j;
  j["id"] = s.id;
  j["src_lang"] = s.src_lang.str();
  j["tgt_lang"] = s.tgt_lang.str();
  j["ref_lang"] = s.ref_lang.str();
  j["ms"] = s.lase.ms;
  j["lc"] = s.lase.lc;
  j["lp"] = s.lase.lp;
  j["lase"] = s.lase.lase;
  j["rouge1"] = s.rouge1;
  j["rouge2"] = s.rouge2;
  j["rougeL"] = s.rougeL;
  return j.dump();
}

SampleScore ParseScoreLine(std::string_view line, std::size_t line_number) {
  try {
    const json j = json::parse(line);
    SampleScore s;
    s.id = j.at("id").get<std::string>();
    s.src_lang = LangCode::Parse(j.at("src_lang").get<std::string>());
    s.tgt_lang = LangCode::Parse(j.at("tgt_lang").get<std::string>());
    s.ref_lang = LangCode::Parse(j.at("ref_lang").get<std::string>());
    s.lase.ms = j.at("ms").get<double>();
    s.lase.lc = j.at("lc").get<double>();
    s.lase.lp = j.at("lp").get<double>();
    s.lase.lase = j.at("lase").get<double>();
    s.rouge1 = j.at("rouge1").get<double>();
    s.rouge2 = j.at("rouge2").get<double>();
    s.rougeL = j.at("rougeL").get<double>();
    return s;
  } catch (const json::exception& e) {
    Fail(ErrorCode::kParse, "line " + std::to_string(line_number) + ": " + e.what());
  }
}

std::string RenderEvaluationReport(const EvaluationResult& r, const PipelineConfig& cfg) {
  json j;
  j["min_samples"] = cfg.lase_min_samples;
  j["overall"] = {{"n", r.samples.size()}, {"mean_lase", r.mean_lase}, {"mean_rouge2", r.mean_rouge2}};
  j["pairs"] = json::array();
  for (const auto& a : r.pairs) {
    j["pairs"].push_back({{"src_lang", a.src_lang.str()},
                          {"tgt_lang", a.tgt_lang.str()},
                          {"n", a.n},
                          {"mean_lase", a.mean_lase},
                          {"mean_rouge2", a.mean_rouge2},
                          {"low_confidence", a.low_confidence}});
  }
  return j.dump(1) + "\n";
}

namespace {

double ScoreField(const SampleScore& s, std::string_view field) {
  if (field == "ms") return s.lase.ms;
  if (field == "lc") return s.lase.lc;
  if (field == "lp") return s.lase.lp;
  if (field == "lase") return s.lase.lase;
  if (field == "rouge1") return s.rouge1;
  if (field == "rouge2") return s.rouge2;
  if (field == "rougeL") return s.rougeL;
  Fail(ErrorCode::kInvalidArgument, "unknown score field \"" + std::string(field) + "\"");
}

std::map<std::string, SampleScore> ReadScores(const fs::path& path) {
  std::map<std::string, SampleScore> scores;
  ForEachLine(path, [&](std::string_view line, std::size_t n) {
    if (line.empty()) return;
    SampleScore s = ParseScoreLine(line, n);
    std::string id = s.id;
    if (!scores.emplace(std::move(id), std::move(s)).second) {
      Fail(ErrorCode::kDuplicateId, path.string() + ": line " + std::to_string(n) + ": duplicate id");
    }
  });
  return scores;
}

json CorrelationJson(const std::vector<double>& xs, const std::vector<double>& ys) {
  json j;
  j["n"] = xs.size();
  j["pearson"] = nullptr;
  j["spearman"] = nullptr;
  if (xs.size() >= 2) {
    const Correlation c = Correlate(xs, ys);
    if (c.pearson) j["pearson"] = *c.pearson;
    if (c.spearman) j["spearman"] = *c.spearman;
  }
  return j;
}

}  // namespace

std::string CorrelateScoreFiles(const fs::path& x_path, std::string_view x_field,
                                const fs::path& y_path, std::string_view y_field,
                                std::uint64_t min_samples) {
  RequireInput(x_path, "score report");
  RequireInput(y_path, "score report");
  const auto xs = ReadScores(x_path);
  const auto ys = ReadScores(y_path);
  std::vector<double> all_x;
  std::vector<double> all_y;
  std::map<LangCode, std::pair<std::vector<double>, std::vector<double>>> by_target;
  for (const auto& [id, sx] : xs) {
    auto it = ys.find(id);
    if (it == ys.end()) continue;
    const double x = ScoreField(sx, x_field);
    const double y = ScoreField(it->second, y_field);
    all_x.push_back(x);
    all_y.push_back(y);
    by_target[sx.tgt_lang].first.push_back(x);
    by_target[sx.tgt_lang].second.push_back(y);
  }
  if (all_x.empty()) Fail(ErrorCode::kEmpty, "score reports share no ids");
  json j;
  j["x"] = std::string(x_field);
  j["y"] = std::string(y_field);
  j["min_samples"] = min_samples;
  j["overall"] = CorrelationJson(all_x, all_y);
  j["by_target"] = json::array();
  for (const auto& [lang, v] : by_target) {
    json g = CorrelationJson(v.first, v.second);
    g["tgt_lang"] = lang.str();
    g["low_confidence"] = v.first.size() < min_samples;
    j["by_target"].push_back(std::move(g));
  }
  return j.dump(1) + "\n";
}

// ---------------------------------------------------------------------------
// Synthetic corpus

namespace {

class SynthRng {
 public:
  explicit SynthRng(std::uint64_t seed) : engine_(seed) {}
  double Uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::size_t Index(std::size_t n) { return static_cast<std::size_t>(Uniform() * static_cast<double>(n)); }
  double Normal() {
    const double u1 = 1.0 - Uniform();
    const double u2 = Uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

std::vector<float> UnitGaussian(SynthRng& rng, std::uint32_t d) {
  std::vector<double> v(d);
  double sq = 0.0;
  for (double& x : v) {
    x = rng.Normal();
    sq += x * x;
  }
  const double norm = std::sqrt(sq);
  std::vector<float> out(d);
  for (std::uint32_t k = 0; k < d; ++k) out[k] = static_cast<float>(v[k] / norm);
  return out;
}

std::vector<float> Perturb(SynthRng& rng, const std::vector<float>& base, double eps) {
  const auto noise = UnitGaussian(rng, static_cast<std::uint32_t>(base.size()));
  std::vector<double> v(base.size());
  double sq = 0.0;
  for (std::size_t k = 0; k < base.size(); ++k) {
    v[k] = base[k] + eps * noise[k];
    sq += v[k] * v[k];
  }
  const double norm = std::sqrt(sq);
  std::vector<float> out(base.size());
  for (std::size_t k = 0; k < base.size(); ++k) out[k] = static_cast<float>(v[k] / norm);
  return out;
}

struct SynthLanguage {
  const char* code;
  std::vector<std::string> syllables;
  bool spaced;
  double noise;
};

std::string Render(const std::vector<std::string>& words, bool spaced) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (spaced && i) out += ' ';
    out += words[i];
  }
  return out;
}

}  // namespace

std::vector<std::string> WriteSyntheticCorpus(const fs::path& dir, const SynthOptions& opt) {
  SynthRng rng(opt.seed);
  const std::vector<SynthLanguage> langs = {
      {"en", {"ka", "lo", "mi", "ra", "te", "su", "no", "vi", "da", "pe", "zu", "fo"}, true, 0.30},
      {"ru", {"ба", "ло", "ми", "ра", "те", "су", "но", "ви", "да", "пе", "зу", "фо"}, true, 0.35},
      {"zh", {"山", "水", "火", "木", "金", "土", "日", "月", "风", "云", "雨", "雪", "人", "口", "心", "手"}, false, 0.80},
  };
  constexpr std::size_t kConcepts = 240;
  std::vector<std::vector<std::string>> lexicon(langs.size(), std::vector<std::string>(kConcepts));
  for (std::size_t l = 0; l < langs.size(); ++l) {
    for (std::size_t c = 0; c < kConcepts; ++c) {
      const std::size_t parts = langs[l].spaced ? 2 + rng.Index(2) : 1 + rng.Index(2);
      std::string w;
      for (std::size_t s = 0; s < parts; ++s) w += langs[l].syllables[rng.Index(langs[l].syllables.size())];
      lexicon[l][c] = w;
    }
  }
  auto words_of = [&](std::size_t l, const std::vector<std::size_t>& concepts) {
    std::vector<std::string> w;
    for (std::size_t c : concepts) w.push_back(lexicon[l][c]);
    return w;
  };

  std::string corpus;
  EmbeddingFile vectors;
  vectors.dimension = opt.dimension;
  struct DocInfo {
    std::string id;
    std::vector<std::size_t> summary;
    std::vector<float> vec;
  };
  std::vector<std::vector<std::optional<DocInfo>>> docs(opt.stories,
                                                        std::vector<std::optional<DocInfo>>(langs.size()));
  auto add_vector = [&](const std::string& id, std::vector<float> v, bool scale) {
    if (scale) {
      for (float& x : v) x *= 1.0004f;
    }
    vectors.ids.push_back(id);
    vectors.values.insert(vectors.values.end(), v.begin(), v.end());
  };
  auto add_doc = [&](const std::string& id, std::size_t l, const std::vector<std::size_t>& summary,
                     const std::vector<std::size_t>& article) {
    json line{{"id", id},
              {"lang", langs[l].code},
              {"text", Render(words_of(l, article), langs[l].spaced)},
              {"summary", Render(words_of(l, summary), langs[l].spaced)}};
    corpus += line.dump() + "\n";
  };

  std::size_t counter = 0;
  for (std::size_t k = 0; k < opt.stories; ++k) {
    const auto latent = UnitGaussian(rng, opt.dimension);
    std::vector<std::size_t> summary(8 + rng.Index(5));
    for (auto& c : summary) c = rng.Index(kConcepts);
    std::vector<std::size_t> article = summary;
    const std::size_t extra = 20 + rng.Index(15);
    for (std::size_t i = 0; i < extra; ++i) article.push_back(rng.Index(kConcepts));
    for (std::size_t l = 0; l < langs.size(); ++l) {
      if (rng.Uniform() >= 0.85) continue;
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%s-s%03zu", langs[l].code, k);
      DocInfo info{buf, summary, Perturb(rng, latent, langs[l].noise)};
      add_doc(info.id, l, summary, article);
      add_vector(info.id, info.vec, (++counter % 7) == 0);
      if (langs[l].spaced && rng.Uniform() < 0.12) {
        std::vector<std::size_t> dup_summary = summary;
        dup_summary.back() = rng.Index(kConcepts);
        add_doc(info.id + "-dup", l, dup_summary, article);
        add_vector(info.id + "-dup", Perturb(rng, info.vec, 0.05), false);
      }
      docs[k][l] = std::move(info);
    }
  }

  std::string predictions, references, references_src;
  EmbeddingFile pred_vec, ref_vec, ref_src_vec;
  pred_vec.dimension = ref_vec.dimension = ref_src_vec.dimension = opt.dimension;
  auto push = [](EmbeddingFile& f, const std::string& id, const std::vector<float>& v) {
    f.ids.push_back(id);
    f.values.insert(f.values.end(), v.begin(), v.end());
  };
  for (std::size_t k = 0; k < opt.stories; ++k) {
    for (std::size_t s = 0; s < langs.size(); ++s) {
      for (std::size_t t = 0; t < langs.size(); ++t) {
        if (s == t || !docs[k][s] || !docs[k][t]) continue;
        const DocInfo& src = *docs[k][s];
        const DocInfo& tgt = *docs[k][t];
        const double quality = rng.Uniform() * 0.6;
        std::vector<std::size_t> gen;
        for (std::size_t c : tgt.summary) {
          const double u = rng.Uniform();
          if (u < quality * 0.5) continue;
          gen.push_back(u < quality ? rng.Index(kConcepts) : c);
        }
        if (rng.Uniform() < 0.3) {
          for (std::size_t e = 0; e < 1 + rng.Index(8); ++e) gen.push_back(rng.Index(kConcepts));
        }
        if (gen.empty()) gen.push_back(tgt.summary.front());
        const bool wrong_language = rng.Uniform() < 0.05;
        const std::size_t out_lang = wrong_language ? s : t;
        const std::string id = std::string("p-") + langs[s].code + "-" + langs[t].code + "-" + tgt.id;
        predictions += json{{"id", id},
                            {"lang", langs[t].code},
                            {"src_lang", langs[s].code},
                            {"text", Render(words_of(out_lang, gen), langs[out_lang].spaced)}}
                           .dump() + "\n";
        references += json{{"id", id}, {"lang", langs[t].code}, {"text", Render(words_of(t, tgt.summary), langs[t].spaced)}}
                          .dump() + "\n";
        references_src += json{{"id", id}, {"lang", langs[s].code}, {"text", Render(words_of(s, src.summary), langs[s].spaced)}}
                              .dump() + "\n";
        push(pred_vec, id, Perturb(rng, tgt.vec, 0.1 + 1.5 * quality));
        push(ref_vec, id, tgt.vec);
        push(ref_src_vec, id, src.vec);
      }
    }
  }

  std::error_code ec;
  fs::create_directories(dir, ec);
  WriteFileAtomic(dir / "corpus.jsonl", corpus);
  WriteEmbeddingFile(vectors, dir / "vectors.xemb");
  WriteFileAtomic(dir / "predictions.jsonl", predictions);
  WriteFileAtomic(dir / "references.jsonl", references);
  WriteFileAtomic(dir / "references_src.jsonl", references_src);
  WriteEmbeddingFile(pred_vec, dir / "predictions.xemb");
  WriteEmbeddingFile(ref_vec, dir / "references.xemb");
  WriteEmbeddingFile(ref_src_vec, dir / "references_src.xemb");
  return {"corpus.jsonl",      "vectors.xemb",    "predictions.jsonl",    "predictions.xemb",
          "references.jsonl",  "references.xemb", "references_src.jsonl", "references_src.xemb"};
}

}  // namespace xsf
