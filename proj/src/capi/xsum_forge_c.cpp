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

#include "xsum_forge/xsum_forge.h"

#include <algorithm>
#include <cstring>
#include <exception>
#include <filesystem>
#include <mutex>
#include <new>
#include <nlohmann/json.hpp>
#include <string>
#include <utility>
#include <vector>

#include "xsum_forge/error.hpp"
#include "xsum_forge/fsutil.hpp"
#include "xsum_forge/pipeline.hpp"

struct xsf_config {
  xsf::PipelineConfig value;
};
struct xsf_corpus {
  xsf::Corpus value;
};
struct xsf_store {
  xsf::EmbeddingStore value;
};
struct xsf_pairs {
  std::vector<xsf::MatchedPair> value;
};
struct xsf_langid {
  xsf::LangIdModel value;
};

namespace {

namespace fs = std::filesystem;

thread_local std::string g_last_error;

std::mutex g_log_mutex;
xsf_log_fn g_log_fn = nullptr;
void* g_log_user = nullptr;

void Log(const std::string& line) {
  std::lock_guard<std::mutex> lock(g_log_mutex);
  if (g_log_fn != nullptr) g_log_fn(line.c_str(), g_log_user);
}

template <typename Fn>
xsf_status Guard(Fn&& fn) {
  g_last_error.clear();
  try {
    fn();
    return XSF_OK;
  } catch (const xsf::Error& e) {
    g_last_error = e.what();
    return static_cast<xsf_status>(static_cast<int>(e.code()));
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return XSF_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return XSF_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return XSF_ERR_INTERNAL;
  }
}

template <typename T>
const T& Need(const T* p, const char* what) {
  if (p == nullptr) xsf::Fail(xsf::ErrorCode::kInvalidArgument, std::string(what) + " is NULL");
  return *p;
}

template <typename T>
T& NeedMut(T* p, const char* what) {
  if (p == nullptr) xsf::Fail(xsf::ErrorCode::kInvalidArgument, std::string(what) + " is NULL");
  return *p;
}

std::string NeedStr(const char* s, const char* what) {
  if (s == nullptr) xsf::Fail(xsf::ErrorCode::kInvalidArgument, std::string(what) + " is NULL");
  return s;
}

fs::path OptPath(const char* s) { return s == nullptr ? fs::path() : fs::path(s); }

void CopyOut(const std::string& s, char* buf, std::size_t cap, std::size_t* needed) {
  if (needed != nullptr) *needed = s.size() + 1;
  if (cap < s.size() + 1) {
    xsf::Fail(xsf::ErrorCode::kInvalidArgument,
              "buffer too small: need " + std::to_string(s.size() + 1) + " bytes");
  }
  if (buf == nullptr) xsf::Fail(xsf::ErrorCode::kInvalidArgument, "buffer is NULL");
  std::memcpy(buf, s.c_str(), s.size() + 1);
}

template <typename T, typename... Args>
void Emit(T** out, Args&&... args) {
  if (out == nullptr) xsf::Fail(xsf::ErrorCode::kInvalidArgument, "output handle pointer is NULL");
  *out = new T{std::forward<Args>(args)...};
}

std::string DigestOf(const fs::path& p) {
  if (fs::is_directory(p)) {
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(p)) {
      if (entry.is_regular_file()) names.push_back(entry.path().filename().string());
    }
    std::sort(names.begin(), names.end());
    std::string listing;
    for (const auto& n : names) listing += n + '\t' + xsf::Sha256File(p / n) + '\n';
    return xsf::Sha256Hex(listing);
  }
  xsf::RequireInput(p, "artifact");
  return xsf::Sha256File(p);
}

}  // namespace

extern "C" {

const char* xsf_version(void) { return "0.1.0"; }

const char* xsf_status_string(xsf_status status) {
  switch (status) {
    case XSF_OK: return "ok";
    case XSF_ERR_INVALID_ARGUMENT: return "invalid argument";
    case XSF_ERR_IO: return "i/o error";
    case XSF_ERR_NOT_FOUND: return "not found";
    case XSF_ERR_PARSE: return "parse error";
    case XSF_ERR_FORMAT: return "format error";
    case XSF_ERR_DIMENSION: return "dimension mismatch";
    case XSF_ERR_NORM: return "vector norm out of tolerance";
    case XSF_ERR_DUPLICATE_ID: return "duplicate id";
    case XSF_ERR_UNKNOWN_ID: return "unknown id";
    case XSF_ERR_EMPTY: return "empty input";
    case XSF_ERR_CONSISTENCY: return "consistency violation";
    case XSF_ERR_CONFIG: return "invalid config";
    case XSF_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* xsf_last_error_message(void) { return g_last_error.c_str(); }

void xsf_set_log_callback(xsf_log_fn fn, void* user) {
  std::lock_guard<std::mutex> lock(g_log_mutex);
  g_log_fn = fn;
  g_log_user = user;
}

// Config

xsf_status xsf_config_create(xsf_config** out) {
  return Guard([&] { Emit(out); });
}

void xsf_config_destroy(xsf_config* cfg) { delete cfg; }

xsf_status xsf_config_set(xsf_config* cfg, const char* key, const char* value) {
  return Guard([&] { NeedMut(cfg, "config").value.Set(NeedStr(key, "key"), NeedStr(value, "value")); });
}

xsf_status xsf_config_get(const xsf_config* cfg, const char* key, char* buf, size_t cap, size_t* needed) {
  return Guard([&] { CopyOut(Need(cfg, "config").value.Get(NeedStr(key, "key")), buf, cap, needed); });
}

xsf_status xsf_config_load_file(xsf_config* cfg, const char* path) {
  return Guard([&] { NeedMut(cfg, "config").value.LoadFile(NeedStr(path, "path")); });
}

xsf_status xsf_config_validate(const xsf_config* cfg) {
  return Guard([&] { Need(cfg, "config").value.Validate(); });
}

xsf_status xsf_config_render(const xsf_config* cfg, char* buf, size_t cap, size_t* needed) {
  return Guard([&] { CopyOut(Need(cfg, "config").value.Render(), buf, cap, needed); });
}

size_t xsf_config_key_count(void) { return xsf::PipelineConfig::Keys().size(); }

const char* xsf_config_key(size_t i) {
  const auto& keys = xsf::PipelineConfig::Keys();
  return i < keys.size() ? keys[i].c_str() : nullptr;
}

// Corpus and store

xsf_status xsf_corpus_load(const char* path, xsf_corpus** out) {
  return Guard([&] {
    const fs::path p = NeedStr(path, "path");
    xsf::RequireInput(p, "corpus");
    Emit(out, xsf::Corpus::Load(p));
  });
}

void xsf_corpus_destroy(xsf_corpus* corpus) { delete corpus; }

xsf_status xsf_corpus_size(const xsf_corpus* corpus, size_t* out) {
  return Guard([&] { NeedMut(out, "out") = Need(corpus, "corpus").value.size(); });
}

xsf_status xsf_store_import(const xsf_corpus* corpus, const char* vectors_path, xsf_store** out) {
  return Guard([&] {
    const fs::path p = NeedStr(vectors_path, "vectors path");
    xsf::RequireInput(p, "embedding file");
    Emit(out, xsf::EmbeddingStore::Import(Need(corpus, "corpus").value, p));
  });
}

void xsf_store_destroy(xsf_store* store) { delete store; }

xsf_status xsf_store_size(const xsf_store* store, size_t* out) {
  return Guard([&] { NeedMut(out, "out") = Need(store, "store").value.size(); });
}

xsf_status xsf_store_dimension(const xsf_store* store, uint32_t* out) {
  return Guard([&] { NeedMut(out, "out") = Need(store, "store").value.dimension(); });
}

xsf_status xsf_store_write(const xsf_store* store, const xsf_corpus* corpus, const char* vectors_path,
                           const char* manifest_path) {
  return Guard([&] {
    xsf::WriteStoreArtifacts(Need(corpus, "corpus").value, Need(store, "store").value,
                             NeedStr(vectors_path, "vectors path"), OptPath(manifest_path));
  });
}

// Pairs

xsf_status xsf_pairs_load(const char* path, xsf_pairs** out) {
  return Guard([&] {
    const fs::path p = NeedStr(path, "path");
    xsf::RequireInput(p, "pairs file");
    Emit(out, xsf::ReadPairs(p));
  });
}

xsf_status xsf_pairs_create_empty(xsf_pairs** out) {
  return Guard([&] { Emit(out); });
}

void xsf_pairs_destroy(xsf_pairs* pairs) { delete pairs; }

xsf_status xsf_pairs_count(const xsf_pairs* pairs, size_t* out) {
  return Guard([&] { NeedMut(out, "out") = Need(pairs, "pairs").value.size(); });
}

xsf_status xsf_pairs_min_similarity(const xsf_pairs* pairs, double* out) {
  return Guard([&] {
    const auto& v = Need(pairs, "pairs").value;
    if (v.empty()) xsf::Fail(xsf::ErrorCode::kEmpty, "pair set is empty");
    double m = v.front().similarity;
    for (const auto& p : v) m = std::min(m, p.similarity);
    NeedMut(out, "out") = m;
  });
}

xsf_status xsf_pairs_write(const xsf_pairs* pairs, const xsf_corpus* corpus, const char* path) {
  return Guard([&] {
    xsf::WritePairs(Need(pairs, "pairs").value, Need(corpus, "corpus").value, NeedStr(path, "path"));
  });
}

// Stages

xsf_status xsf_align(const xsf_store* store, const xsf_config* cfg, xsf_pairs** out) {
  return Guard([&] {
    const auto& c = Need(cfg, "config").value;
    c.Validate();
    const auto& s = Need(store, "store").value;
    auto pairs = xsf::AlignAll(s, s.languages(), c.align());
    Log("align: " + std::to_string(pairs.size()) + " direct pair(s) at tau " + c.Get("tau"));
    Emit(out, std::move(pairs));
  });
}

xsf_status xsf_induce(const xsf_store* store, const xsf_pairs* direct, const xsf_config* cfg,
                      const char* components_path, xsf_pairs** out) {
  return Guard([&] {
    Emit(out, xsf::InduceStage(Need(store, "store").value, Need(direct, "pairs").value,
                               Need(cfg, "config").value, OptPath(components_path), Log));
  });
}

xsf_status xsf_dedup(const xsf_store* store, const xsf_pairs* pairs, const xsf_config* cfg,
                     const char* groups_path, xsf_pairs** out) {
  return Guard([&] {
    Emit(out, xsf::DedupStage(Need(store, "store").value, Need(pairs, "pairs").value,
                              Need(cfg, "config").value, OptPath(groups_path), Log));
  });
}

xsf_status xsf_split(const xsf_corpus* corpus, const xsf_pairs* pairs, const char* groups_path,
                     const xsf_config* cfg, const char* split_path) {
  return Guard([&] {
    xsf::SplitStage(Need(corpus, "corpus").value, Need(pairs, "pairs").value, OptPath(groups_path),
                    Need(cfg, "config").value, NeedStr(split_path, "split path"), Log);
  });
}

xsf_status xsf_materialize(const xsf_corpus* corpus, const xsf_pairs* pairs, const char* split_path,
                           const char* groups_path, const xsf_config* cfg, const char* out_dir) {
  return Guard([&] {
    xsf::MaterializeStage(Need(corpus, "corpus").value, Need(pairs, "pairs").value,
                          NeedStr(split_path, "split path"), OptPath(groups_path),
                          Need(cfg, "config").value, NeedStr(out_dir, "output directory"), Log);
  });
}

xsf_status xsf_stats_samples(const char* samples_dir, const xsf_corpus* corpus, char* buf, size_t cap,
                             size_t* needed) {
  return Guard([&] {
    const fs::path dir = NeedStr(samples_dir, "samples directory");
    xsf::RequireInput(dir / "index.json", "sample index");
    const auto m = xsf::StatsFromSamples(dir, corpus ? &corpus->value : nullptr);
    CopyOut(m.RenderTsv(), buf, cap, needed);
  });
}

xsf_status xsf_stats_pairs(const xsf_pairs* pairs, const xsf_corpus* corpus, char* buf, size_t cap,
                           size_t* needed) {
  return Guard([&] {
    const auto m = xsf::StatsFromPairs(Need(pairs, "pairs").value, corpus ? &corpus->value : nullptr);
    CopyOut(m.RenderTsv(), buf, cap, needed);
  });
}

xsf_status xsf_plan(const char* samples_dir, const xsf_config* cfg, const char* plan_path) {
  return Guard([&] {
    const fs::path dir = NeedStr(samples_dir, "samples directory");
    xsf::RequireInput(dir / "index.json", "sample index");
    xsf::PlanStage(dir, Need(cfg, "config").value, NeedStr(plan_path, "plan path"), Log);
  });
}

xsf_status xsf_sample(const char* plan_path, const char* samples_dir, const xsf_config* cfg,
                      uint64_t steps, const char* out_path) {
  return Guard([&] {
    const fs::path dir = NeedStr(samples_dir, "samples directory");
    xsf::RequireInput(dir / "index.json", "sample index");
    xsf::SampleStage(NeedStr(plan_path, "plan path"), dir, Need(cfg, "config").value, steps,
                     NeedStr(out_path, "output path"));
  });
}

// Language identification

xsf_status xsf_langid_train_corpus(const xsf_corpus* corpus, xsf_langid** out) {
  return Guard([&] {
    std::vector<std::pair<xsf::LangCode, std::string>> samples;
    for (const auto& d : Need(corpus, "corpus").value.documents()) {
      samples.emplace_back(d.lang, d.summary);
      samples.emplace_back(d.lang, d.text);
    }
    Emit(out, xsf::LangIdModel::Train(samples));
  });
}

xsf_status xsf_langid_load(const char* path, xsf_langid** out) {
  return Guard([&] {
    const fs::path p = NeedStr(path, "path");
    xsf::RequireInput(p, "language-ID model");
    Emit(out, xsf::LangIdModel::Load(p));
  });
}

void xsf_langid_destroy(xsf_langid* model) { delete model; }

xsf_status xsf_langid_save(const xsf_langid* model, const char* path) {
  return Guard([&] { Need(model, "model").value.Save(NeedStr(path, "path")); });
}

xsf_status xsf_langid_classify(const xsf_langid* model, const char* text, char* buf, size_t cap,
                               size_t* needed) {
  return Guard([&] {
    const auto c = Need(model, "model").value.Classify(NeedStr(text, "text"));
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [lang, p] : c.distribution.probs) j[lang.str()] = p;
    CopyOut(j.dump(), buf, cap, needed);
  });
}

xsf_status xsf_evaluate(const char* predictions_path, const char* references_path,
                        const char* prediction_vectors_path, const char* reference_vectors_path,
                        const xsf_langid* langid, const char* langid_interchange_path,
                        const xsf_config* cfg, const char* scores_path, const char* report_path) {
  return Guard([&] {
    xsf::EvaluationInputs in{NeedStr(predictions_path, "predictions path"),
                             NeedStr(references_path, "references path"),
                             NeedStr(prediction_vectors_path, "prediction vectors path"),
                             NeedStr(reference_vectors_path, "reference vectors path")};
    xsf::RequireInput(in.predictions, "predictions");
    xsf::RequireInput(in.references, "references");
    xsf::RequireInput(in.prediction_vectors, "prediction vectors");
    xsf::RequireInput(in.reference_vectors, "reference vectors");
    if ((langid == nullptr) == (langid_interchange_path == nullptr)) {
      xsf::Fail(xsf::ErrorCode::kInvalidArgument,
                "exactly one language-ID provider (model or interchange file) is required");
    }
    std::map<std::string, xsf::LangIdDistribution> interchange;
    xsf::LangIdSource source;
    if (langid != nullptr) {
      source.model = &langid->value;
    } else {
      xsf::RequireInput(langid_interchange_path, "language-ID interchange file");
      interchange = xsf::ReadLangIdInterchange(langid_interchange_path);
      source.interchange = &interchange;
    }
    const auto& c = Need(cfg, "config").value;
    const auto result = xsf::EvaluateRun(in, c, source);
    std::string lines;
    for (const auto& s : result.samples) lines += xsf::RenderScoreLine(s) + "\n";
    xsf::WriteFileAtomic(NeedStr(scores_path, "scores path"), lines);
    if (report_path != nullptr) xsf::WriteFileAtomic(report_path, xsf::RenderEvaluationReport(result, c));
    Log("evaluate: " + std::to_string(result.samples.size()) + " sample(s), mean LaSE " +
        xsf::FormatFixed6(result.mean_lase) + ", mean ROUGE-2 " + xsf::FormatFixed6(result.mean_rouge2));
  });
}

xsf_status xsf_correlate_files(const char* x_path, const char* x_field, const char* y_path,
                               const char* y_field, uint64_t min_samples, const char* out_path) {
  return Guard([&] {
    const std::string report = xsf::CorrelateScoreFiles(NeedStr(x_path, "x path"), NeedStr(x_field, "x field"),
                                                        NeedStr(y_path, "y path"), NeedStr(y_field, "y field"),
                                                        min_samples);
    xsf::WriteFileAtomic(NeedStr(out_path, "output path"), report);
  });
}

// Validators

xsf_status xsf_validate_vectors(const char* path, size_t* count) {
  return Guard([&] {
    const fs::path p = NeedStr(path, "path");
    xsf::RequireInput(p, "embedding file");
    xsf::EmbeddingFile f = xsf::ReadEmbeddingFile(p);
    const auto index = f.Index();
    if (index.size() != f.ids.size()) xsf::Fail(xsf::ErrorCode::kDuplicateId, "embedding file repeats an id");
    for (std::size_t i = 0; i < f.ids.size(); ++i) {
      std::vector<float> v(f.row(i).begin(), f.row(i).end());
      xsf::NormalizeInPlace(v, f.ids[i]);
    }
    if (count != nullptr) *count = f.ids.size();
  });
}

xsf_status xsf_validate_langid_file(const char* path, size_t* count) {
  return Guard([&] {
    const fs::path p = NeedStr(path, "path");
    xsf::RequireInput(p, "language-ID interchange file");
    const auto m = xsf::ReadLangIdInterchange(p);
    if (count != nullptr) *count = m.size();
  });
}

xsf_status xsf_validate_corpus(const char* path, size_t* count) {
  return Guard([&] {
    const fs::path p = NeedStr(path, "path");
    xsf::RequireInput(p, "corpus");
    const auto c = xsf::Corpus::Load(p);
    if (count != nullptr) *count = c.size();
  });
}

// Metric helpers

xsf_status xsf_length_penalty(uint64_t len_gen, uint64_t len_ref, int c, double* out) {
  return Guard([&] {
    if (c < 0) xsf::Fail(xsf::ErrorCode::kInvalidArgument, "length offset must be non-negative");
    NeedMut(out, "out") = xsf::LengthPenalty(len_gen, len_ref, c);
  });
}

xsf_status xsf_rouge(const char* gen, const char* ref, xsf_rouge_variant variant, double* precision,
                     double* recall, double* f1) {
  return Guard([&] {
    xsf::RougeVariant v;
    switch (variant) {
      case XSF_ROUGE_1: v = xsf::RougeVariant::kRouge1; break;
      case XSF_ROUGE_2: v = xsf::RougeVariant::kRouge2; break;
      case XSF_ROUGE_L: v = xsf::RougeVariant::kRougeL; break;
      default: xsf::Fail(xsf::ErrorCode::kInvalidArgument, "unknown ROUGE variant");
    }
    const auto s = xsf::Rouge(NeedStr(gen, "gen"), NeedStr(ref, "ref"), v);
    if (precision != nullptr) *precision = s.precision;
    if (recall != nullptr) *recall = s.recall;
    if (f1 != nullptr) *f1 = s.f1;
  });
}

xsf_status xsf_correlate(const double* xs, const double* ys, size_t n, double* pearson, int* pearson_defined,
                         double* spearman, int* spearman_defined) {
  return Guard([&] {
    if (n > 0 && (xs == nullptr || ys == nullptr)) xsf::Fail(xsf::ErrorCode::kInvalidArgument, "series is NULL");
    const auto c = xsf::Correlate(std::span<const double>(xs, n), std::span<const double>(ys, n));
    if (pearson != nullptr) *pearson = c.pearson.value_or(0.0);
    if (pearson_defined != nullptr) *pearson_defined = c.pearson.has_value();
    if (spearman != nullptr) *spearman = c.spearman.value_or(0.0);
    if (spearman_defined != nullptr) *spearman_defined = c.spearman.has_value();
  });
}

xsf_status xsf_segment_tokens(const char* text, size_t* out) {
  return Guard([&] { NeedMut(out, "out") = xsf::SegmentTokens(NeedStr(text, "text")); });
}

xsf_status xsf_similarity(const float* a, const float* b, size_t dimension, float* out) {
  return Guard([&] {
    if (dimension == 0 || a == nullptr || b == nullptr) {
      xsf::Fail(xsf::ErrorCode::kInvalidArgument, "vectors must be non-empty");
    }
    NeedMut(out, "out") = xsf::Similarity(std::span<const float>(a, dimension), std::span<const float>(b, dimension));
  });
}

xsf_status xsf_synth(const char* dir, uint64_t seed, size_t stories, uint32_t dimension) {
  return Guard([&] {
    if (stories == 0 || dimension == 0) xsf::Fail(xsf::ErrorCode::kInvalidArgument, "stories and dimension must be positive");
    xsf::WriteSyntheticCorpus(NeedStr(dir, "directory"), {seed, stories, dimension});
  });
}

// Hashing

xsf_status xsf_file_sha256(const char* path, char* buf, size_t cap, size_t* needed) {
  return Guard([&] { CopyOut(DigestOf(NeedStr(path, "path")), buf, cap, needed); });
}

xsf_status xsf_write_run_manifest(const char* stage, const xsf_config* cfg, const char* const* inputs,
                                  size_t n_inputs, const char* const* outputs, size_t n_outputs,
                                  const char* manifest_path) {
  return Guard([&] {
    const auto& c = Need(cfg, "config").value;
    auto files = [](const char* const* paths, size_t n) {
      nlohmann::json arr = nlohmann::json::array();
      for (size_t i = 0; i < n; ++i) {
        const fs::path p = NeedStr(paths[i], "path");
        arr.push_back({{"name", p.filename().string()}, {"sha256", DigestOf(p)}});
      }
      return arr;
    };
    nlohmann::json j;
    j["stage"] = NeedStr(stage, "stage");
    j["tool_version"] = xsf_version();
    j["config"] = nlohmann::json::object();
    for (const auto& key : xsf::PipelineConfig::Keys()) j["config"][key] = c.Get(key);
    j["config_sha256"] = xsf::Sha256Hex(c.Render());
    j["inputs"] = files(inputs, n_inputs);
    j["outputs"] = files(outputs, n_outputs);
    xsf::WriteFileAtomic(NeedStr(manifest_path, "manifest path"), j.dump(2) + "\n");
  });
}

}  // extern "C"
