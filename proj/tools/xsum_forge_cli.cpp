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

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "xsum_forge/xsum_forge.h"

namespace {

namespace fs = std::filesystem;

// Carries a failed status out of a subcommand body.
struct StageFailure {
  xsf_status status;
};

void Check(xsf_status s) {
  if (s != XSF_OK) throw StageFailure{s};
}

template <typename T, void (*Destroy)(T*)>
struct Deleter {
  void operator()(T* p) const { Destroy(p); }
};
using ConfigPtr = std::unique_ptr<xsf_config, Deleter<xsf_config, xsf_config_destroy>>;
using CorpusPtr = std::unique_ptr<xsf_corpus, Deleter<xsf_corpus, xsf_corpus_destroy>>;
using StorePtr = std::unique_ptr<xsf_store, Deleter<xsf_store, xsf_store_destroy>>;
using PairsPtr = std::unique_ptr<xsf_pairs, Deleter<xsf_pairs, xsf_pairs_destroy>>;
using LangIdPtr = std::unique_ptr<xsf_langid, Deleter<xsf_langid, xsf_langid_destroy>>;

template <typename Fn>
std::string FetchString(Fn&& fn) {
  size_t needed = 0;
  std::string buf(256, '\0');
  xsf_status s = fn(buf.data(), buf.size(), &needed);
  if (s != XSF_OK && needed > buf.size()) {
    buf.assign(needed, '\0');
    s = fn(buf.data(), buf.size(), &needed);
  }
  Check(s);
  buf.resize(needed - 1);
  return buf;
}

CorpusPtr LoadCorpus(const std::string& path) {
  xsf_corpus* c = nullptr;
  Check(xsf_corpus_load(path.c_str(), &c));
  return CorpusPtr(c);
}

StorePtr ImportStore(const xsf_corpus* corpus, const std::string& path) {
  xsf_store* s = nullptr;
  Check(xsf_store_import(corpus, path.c_str(), &s));
  return StorePtr(s);
}

PairsPtr LoadPairs(const std::string& path) {
  xsf_pairs* p = nullptr;
  Check(xsf_pairs_load(path.c_str(), &p));
  return PairsPtr(p);
}

const char* OrNull(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

void EnsureParent(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

struct Stage {
  CLI::App* app = nullptr;
  std::string name;
  std::map<std::string, std::optional<std::string>> overrides;
  std::function<void(xsf_config*)> body;
};

class Cli {
 public:
  Cli() : app_("Cross-lingual summarization corpus toolkit", "xsum-forge") {
    app_.require_subcommand(1);
    app_.set_version_flag("--version", std::string(xsf_version()));
  }

  int Run(int argc, char** argv) {
    Register();
    // Printing the config needs no input paths.
    if (std::any_of(argv + 1, argv + argc, [](const char* a) { return std::string_view(a) == "--print-config"; })) {
      for (auto& stage : stages_) {
        for (CLI::Option* opt : stage->app->get_options()) opt->required(false);
      }
    }
    try {
      app_.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      return app_.exit(e);
    }
    for (auto& stage : stages_) {
      if (stage->app->parsed()) return Execute(*stage);
    }
    return 1;
  }

 private:
  Stage& Add(const std::string& name, const std::string& help, bool config_flags = true) {
    auto stage = std::make_unique<Stage>();
    stage->name = name;
    stage->app = app_.add_subcommand(name, help);
    if (config_flags) {
      for (size_t i = 0; i < xsf_config_key_count(); ++i) {
        const std::string key = xsf_config_key(i);
        std::string flag = key;
        std::replace(flag.begin(), flag.end(), '_', '-');
        stage->app->add_option("--" + flag, stage->overrides[key], "Override config key " + key);
      }
      stage->app->add_option("--config", config_path_, "Flat key = value config file");
      stage->app->add_flag("--print-config", print_config_, "Print the effective config and exit");
      stage->app->add_option("--run-manifest", run_manifest_, "Run manifest path (default: <output>.run.json)");
    }
    stage->app->add_flag("-q,--quiet", quiet_, "Suppress progress lines");
    stages_.push_back(std::move(stage));
    return *stages_.back();
  }

  ConfigPtr BuildConfig(const Stage& stage) {
    xsf_config* raw = nullptr;
    Check(xsf_config_create(&raw));
    ConfigPtr cfg(raw);
    if (!config_path_.empty()) Check(xsf_config_load_file(cfg.get(), config_path_.c_str()));
    if (const char* env = std::getenv("XSUM_FORGE_SEED"); env != nullptr && *env != '\0') {
      Check(xsf_config_set(cfg.get(), "seed", env));
    }
    for (const auto& [key, value] : stage.overrides) {
      if (value) Check(xsf_config_set(cfg.get(), key.c_str(), value->c_str()));
    }
    Check(xsf_config_validate(cfg.get()));
    return cfg;
  }

  int Execute(Stage& stage) {
    if (!quiet_) {
      xsf_set_log_callback([](const char* line, void*) { std::cerr << line << '\n'; }, nullptr);
    }
    try {
      ConfigPtr cfg = BuildConfig(stage);
      if (print_config_) {
        std::cout << FetchString([&](char* b, size_t c, size_t* n) { return xsf_config_render(cfg.get(), b, c, n); });
        return 0;
      }
      stage.body(cfg.get());
      return 0;
    } catch (const StageFailure& f) {
      std::cerr << "xsum-forge " << stage.name << ": " << xsf_status_string(f.status) << ": "
                << xsf_last_error_message() << '\n';
      switch (f.status) {
        case XSF_ERR_NOT_FOUND: return 2;
        case XSF_ERR_CONFIG: return 3;
        default: return 1;
      }
    } catch (const std::exception& e) {
      std::cerr << "xsum-forge " << stage.name << ": " << e.what() << '\n';
      return 1;
    }
  }

  void Manifest(const std::string& stage, xsf_config* cfg, const std::vector<std::string>& inputs,
                const std::vector<std::string>& outputs) {
    std::vector<const char*> in;
    std::vector<const char*> out;
    for (const auto& s : inputs) {
      if (!s.empty()) in.push_back(s.c_str());
    }
    for (const auto& s : outputs) {
      if (!s.empty()) out.push_back(s.c_str());
    }
    std::string path = run_manifest_;
    if (path.empty()) {
      std::string primary = outputs.front();
      while (!primary.empty() && primary.back() == '/') primary.pop_back();
      path = primary + ".run.json";
    }
    Check(xsf_write_run_manifest(stage.c_str(), cfg, in.data(), in.size(), out.data(), out.size(), path.c_str()));
  }

  void Register();

  CLI::App app_;
  std::vector<std::unique_ptr<Stage>> stages_;
  std::string config_path_;
  std::string run_manifest_;
  bool print_config_ = false;
  bool quiet_ = false;

  // Shared option storage; only one subcommand runs per process.
  std::string corpus_, vectors_, pairs_, out_, groups_, split_, samples_, plan_;
  std::string aux_out_, predictions_, references_, pred_vectors_, ref_vectors_;
  std::string langid_model_, langid_file_, langid_corpus_;
  std::string x_path_, y_path_, x_field_ = "lase", y_field_ = "rouge2";
  uint64_t steps_ = 1000;
  uint64_t synth_seed_ = 1;
  size_t stories_ = 150;
  uint32_t dimension_ = 16;
};

void Cli::Register() {
  {
    Stage& s = Add("embed-import", "Validate and normalize an embedding file against a corpus");
    s.app->add_option("--corpus", corpus_, "Corpus JSONL")->required();
    s.app->add_option("--vectors", vectors_, "Input embedding file")->required();
    s.app->add_option("--out", out_, "Normalized embedding file")->required();
    s.app->add_option("--manifest-out", aux_out_, "Corpus manifest JSON");
    s.body = [this](xsf_config* cfg) {
      CorpusPtr corpus = LoadCorpus(corpus_);
      StorePtr store = ImportStore(corpus.get(), vectors_);
      EnsureParent(out_);
      Check(xsf_store_write(store.get(), corpus.get(), out_.c_str(), OrNull(aux_out_)));
      Manifest("embed-import", cfg, {corpus_, vectors_}, {out_, aux_out_});
    };
  }
  {
    Stage& s = Add("align", "Mine direct pairs by mutual nearest neighbours");
    s.app->add_option("--corpus", corpus_, "Corpus JSONL")->required();
    s.app->add_option("--vectors", vectors_, "Embedding file")->required();
    s.app->add_option("--out", out_, "Pairs JSONL")->required();
    s.body = [this](xsf_config* cfg) {
      CorpusPtr corpus = LoadCorpus(corpus_);
      StorePtr store = ImportStore(corpus.get(), vectors_);
      xsf_pairs* raw = nullptr;
      Check(xsf_align(store.get(), cfg, &raw));
      PairsPtr pairs(raw);
      EnsureParent(out_);
      Check(xsf_pairs_write(pairs.get(), corpus.get(), out_.c_str()));
      Manifest("align", cfg, {corpus_, vectors_}, {out_});
    };
  }
  {
    Stage& s = Add("induce", "Cap components and add induced pairs");
    s.app->add_option("--corpus", corpus_, "Corpus JSONL")->required();
    s.app->add_option("--vectors", vectors_, "Embedding file")->required();
    s.app->add_option("--pairs", pairs_, "Direct pairs JSONL")->required();
    s.app->add_option("--out", out_, "Pairs JSONL")->required();
    s.app->add_option("--components-out", aux_out_, "Component manifest JSONL");
    s.body = [this](xsf_config* cfg) {
      CorpusPtr corpus = LoadCorpus(corpus_);
      StorePtr store = ImportStore(corpus.get(), vectors_);
      PairsPtr direct = LoadPairs(pairs_);
      EnsureParent(out_);
      if (!aux_out_.empty()) EnsureParent(aux_out_);
      xsf_pairs* raw = nullptr;
      Check(xsf_induce(store.get(), direct.get(), cfg, OrNull(aux_out_), &raw));
      PairsPtr pairs(raw);
      Check(xsf_pairs_write(pairs.get(), corpus.get(), out_.c_str()));
      Manifest("induce", cfg, {corpus_, vectors_, pairs_}, {out_, aux_out_});
    };
  }
  {
    Stage& s = Add("dedup", "Collapse near-duplicate summaries");
    s.app->add_option("--corpus", corpus_, "Corpus JSONL")->required();
    s.app->add_option("--vectors", vectors_, "Embedding file")->required();
    s.app->add_option("--pairs", pairs_, "Pairs JSONL")->required();
    s.app->add_option("--out", out_, "Deduplicated pairs JSONL")->required();
    s.app->add_option("--groups-out", groups_, "Duplicate groups JSONL")->required();
    s.body = [this](xsf_config* cfg) {
      CorpusPtr corpus = LoadCorpus(corpus_);
      StorePtr store = ImportStore(corpus.get(), vectors_);
      PairsPtr in = LoadPairs(pairs_);
      EnsureParent(out_);
      EnsureParent(groups_);
      xsf_pairs* raw = nullptr;
      Check(xsf_dedup(store.get(), in.get(), cfg, groups_.c_str(), &raw));
      PairsPtr pairs(raw);
      Check(xsf_pairs_write(pairs.get(), corpus.get(), out_.c_str()));
      Manifest("dedup", cfg, {corpus_, vectors_, pairs_}, {out_, groups_});
    };
  }
  {
    Stage& s = Add("split", "Assign components to train/dev/test");
    s.app->add_option("--corpus", corpus_, "Corpus JSONL")->required();
    s.app->add_option("--pairs", pairs_, "Pairs JSONL")->required();
    s.app->add_option("--groups", groups_, "Duplicate groups JSONL");
    s.app->add_option("--out", out_, "Split manifest JSON")->required();
    s.body = [this](xsf_config* cfg) {
      CorpusPtr corpus = LoadCorpus(corpus_);
      PairsPtr pairs = LoadPairs(pairs_);
      EnsureParent(out_);
      Check(xsf_split(corpus.get(), pairs.get(), OrNull(groups_), cfg, out_.c_str()));
      Manifest("split", cfg, {corpus_, pairs_, groups_}, {out_});
    };
  }
  {
    Stage& s = Add("materialize", "Write per-split, per-direction sample files");
    s.app->add_option("--corpus", corpus_, "Corpus JSONL")->required();
    s.app->add_option("--pairs", pairs_, "Pairs JSONL")->required();
    s.app->add_option("--split", split_, "Split manifest JSON")->required();
    s.app->add_option("--groups", groups_, "Duplicate groups JSONL");
    s.app->add_option("--out", out_, "Output directory")->required();
    s.body = [this](xsf_config* cfg) {
      CorpusPtr corpus = LoadCorpus(corpus_);
      PairsPtr pairs = LoadPairs(pairs_);
      Check(xsf_materialize(corpus.get(), pairs.get(), split_.c_str(), OrNull(groups_), cfg, out_.c_str()));
      Manifest("materialize", cfg, {corpus_, pairs_, split_, groups_}, {out_});
    };
  }
  {
    Stage& s = Add("stats", "Language-pair count matrix of samples or pairs");
    auto* src = s.app->add_option("--samples", samples_, "Sample directory");
    s.app->add_option("--pairs", pairs_, "Pairs JSONL")->excludes(src);
    s.app->add_option("--corpus", corpus_, "Corpus JSONL fixing the language axis");
    s.app->add_option("--out", out_, "TSV output (default: stdout)");
    s.body = [this](xsf_config* cfg) {
      if (samples_.empty() == pairs_.empty()) {
        throw CLI::ValidationError("stats", "exactly one of --samples and --pairs is required");
      }
      CorpusPtr corpus;
      if (!corpus_.empty()) corpus = LoadCorpus(corpus_);
      std::string tsv;
      if (!samples_.empty()) {
        tsv = FetchString([&](char* b, size_t c, size_t* n) {
          return xsf_stats_samples(samples_.c_str(), corpus.get(), b, c, n);
        });
      } else {
        PairsPtr pairs = LoadPairs(pairs_);
        tsv = FetchString([&](char* b, size_t c, size_t* n) {
          return xsf_stats_pairs(pairs.get(), corpus.get(), b, c, n);
        });
      }
      if (out_.empty()) {
        std::cout << tsv;
        return;
      }
      EnsureParent(out_);
      const std::string tmp = out_ + ".tmp";
      {
        std::FILE* f = std::fopen(tmp.c_str(), "wb");
        if (f == nullptr) throw std::runtime_error("cannot write " + tmp);
        std::fwrite(tsv.data(), 1, tsv.size(), f);
        std::fclose(f);
      }
      fs::rename(tmp, out_);
      Manifest("stats", cfg, {samples_.empty() ? pairs_ : samples_, corpus_}, {out_});
    };
  }
  {
    Stage& s = Add("plan", "Compute the multistage sampling plan from train samples");
    s.app->add_option("--samples", samples_, "Sample directory")->required();
    s.app->add_option("--out", out_, "Plan JSON")->required();
    s.body = [this](xsf_config* cfg) {
      EnsureParent(out_);
      Check(xsf_plan(samples_.c_str(), cfg, out_.c_str()));
      Manifest("plan", cfg, {samples_}, {out_});
    };
  }
  {
    Stage& s = Add("sample", "Draw training batches from a plan");
    s.app->add_option("--plan", plan_, "Plan JSON")->required();
    s.app->add_option("--samples", samples_, "Sample directory")->required();
    s.app->add_option("--steps", steps_, "Number of batches")->check(CLI::PositiveNumber);
    s.app->add_option("--out", out_, "Batch JSONL")->required();
    s.body = [this](xsf_config* cfg) {
      EnsureParent(out_);
      Check(xsf_sample(plan_.c_str(), samples_.c_str(), cfg, steps_, out_.c_str()));
      Manifest("sample", cfg, {plan_, samples_}, {out_});
    };
  }
  {
    Stage& s = Add("evaluate", "Score predictions with LaSE and ROUGE");
    s.app->add_option("--predictions", predictions_, "Predictions JSONL")->required();
    s.app->add_option("--references", references_, "References JSONL")->required();
    s.app->add_option("--pred-vectors", pred_vectors_, "Prediction embeddings")->required();
    s.app->add_option("--ref-vectors", ref_vectors_, "Reference embeddings")->required();
    auto* m = s.app->add_option("--langid-model", langid_model_, "Language-ID model file");
    auto* f = s.app->add_option("--langid-file", langid_file_, "Language-ID interchange JSONL");
    auto* c = s.app->add_option("--langid-corpus", langid_corpus_, "Train the language-ID model on this corpus");
    m->excludes(f)->excludes(c);
    f->excludes(c);
    s.app->add_option("--out", out_, "Per-sample score JSONL")->required();
    s.app->add_option("--report", aux_out_, "Aggregate report JSON");
    s.body = [this](xsf_config* cfg) {
      LangIdPtr model;
      xsf_langid* raw = nullptr;
      if (!langid_model_.empty()) {
        Check(xsf_langid_load(langid_model_.c_str(), &raw));
        model.reset(raw);
      } else if (!langid_corpus_.empty()) {
        CorpusPtr corpus = LoadCorpus(langid_corpus_);
        Check(xsf_langid_train_corpus(corpus.get(), &raw));
        model.reset(raw);
      } else if (langid_file_.empty()) {
        throw CLI::ValidationError("evaluate", "one of --langid-model, --langid-file, --langid-corpus is required");
      }
      EnsureParent(out_);
      if (!aux_out_.empty()) EnsureParent(aux_out_);
      Check(xsf_evaluate(predictions_.c_str(), references_.c_str(), pred_vectors_.c_str(), ref_vectors_.c_str(),
                         model.get(), OrNull(langid_file_), cfg, out_.c_str(), OrNull(aux_out_)));
      Manifest("evaluate", cfg,
               {predictions_, references_, pred_vectors_, ref_vectors_, langid_model_, langid_file_, langid_corpus_},
               {out_, aux_out_});
    };
  }
  {
    Stage& s = Add("correlate", "Correlate two score fields across score reports");
    s.app->add_option("--x", x_path_, "First score JSONL")->required();
    s.app->add_option("--x-field", x_field_, "Field of the first report")->capture_default_str();
    s.app->add_option("--y", y_path_, "Second score JSONL")->required();
    s.app->add_option("--y-field", y_field_, "Field of the second report")->capture_default_str();
    s.app->add_option("--out", out_, "Correlation report JSON")->required();
    s.body = [this](xsf_config* cfg) {
      std::string min_samples = FetchString([&](char* b, size_t c, size_t* n) {
        return xsf_config_get(cfg, "lase_min_samples", b, c, n);
      });
      EnsureParent(out_);
      Check(xsf_correlate_files(x_path_.c_str(), x_field_.c_str(), y_path_.c_str(), y_field_.c_str(),
                                std::stoull(min_samples), out_.c_str()));
      Manifest("correlate", cfg, {x_path_, y_path_}, {out_});
    };
  }
  {
    Stage& s = Add("synth", "Write the synthetic three-language corpus bundle", false);
    s.app->add_option("--out", out_, "Output directory")->required();
    s.app->add_option("--seed", synth_seed_, "Generator seed")->capture_default_str();
    s.app->add_option("--stories", stories_, "Number of stories")->capture_default_str();
    s.app->add_option("--dimension", dimension_, "Embedding dimension")->capture_default_str();
    s.body = [this](xsf_config*) { Check(xsf_synth(out_.c_str(), synth_seed_, stories_, dimension_)); };
  }
  {
    Stage& s = Add("validate", "Check corpus, embedding, or language-ID interchange files", false);
    s.app->add_option("--corpus", corpus_, "Corpus JSONL");
    s.app->add_option("--vectors", vectors_, "Embedding file");
    s.app->add_option("--langid", langid_file_, "Language-ID interchange JSONL");
    s.body = [this](xsf_config*) {
      if (corpus_.empty() && vectors_.empty() && langid_file_.empty()) {
        throw CLI::ValidationError("validate", "nothing to validate");
      }
      size_t n = 0;
      if (!corpus_.empty()) {
        Check(xsf_validate_corpus(corpus_.c_str(), &n));
        std::cout << corpus_ << ": ok (" << n << " documents)\n";
      }
      if (!vectors_.empty()) {
        Check(xsf_validate_vectors(vectors_.c_str(), &n));
        std::cout << vectors_ << ": ok (" << n << " vectors)\n";
      }
      if (!langid_file_.empty()) {
        Check(xsf_validate_langid_file(langid_file_.c_str(), &n));
        std::cout << langid_file_ << ": ok (" << n << " records)\n";
      }
    };
  }
  {
    Stage& s = Add("train-langid", "Train the character n-gram language identifier", false);
    s.app->add_option("--corpus", corpus_, "Corpus JSONL")->required();
    s.app->add_option("--out", out_, "Model file")->required();
    s.body = [this](xsf_config*) {
      CorpusPtr corpus = LoadCorpus(corpus_);
      xsf_langid* raw = nullptr;
      Check(xsf_langid_train_corpus(corpus.get(), &raw));
      LangIdPtr model(raw);
      EnsureParent(out_);
      Check(xsf_langid_save(model.get(), out_.c_str()));
    };
  }
}

}  // namespace

int main(int argc, char** argv) {
  Cli cli;
  return cli.Run(argc, argv);
}
