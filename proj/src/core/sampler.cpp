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

#include "xsum_forge/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <set>

#include "xsum_forge/error.hpp"
#include "xsum_forge/fsutil.hpp"

namespace xsf {

using nlohmann::json;

PairCounts PairCounts::FromMap(const std::map<std::pair<LangCode, LangCode>, std::uint64_t>& counts) {
  std::set<LangCode> langs;
  for (const auto& [k, n] : counts) {
    langs.insert(k.first);
    langs.insert(k.second);
  }
  PairCounts pc;
  pc.languages.assign(langs.begin(), langs.end());
  const std::size_t n = pc.languages.size();
  pc.c.assign(n, std::vector<std::uint64_t>(n, 0));
  auto pos = [&](const LangCode& l) {
    return static_cast<std::size_t>(std::lower_bound(pc.languages.begin(), pc.languages.end(), l) -
                                    pc.languages.begin());
  };
  for (const auto& [k, v] : counts) pc.c[pos(k.first)][pos(k.second)] = v;
  return pc;
}

void PairCounts::ApplyFloor(std::uint64_t min_count) {
  for (auto& row : c) {
    for (auto& v : row) {
      if (v < min_count) v = 0;
    }
  }
}

std::uint64_t PairCounts::total() const {
  std::uint64_t t = 0;
  for (const auto& row : c) {
    for (auto v : row) t += v;
  }
  return t;
}

std::vector<double> SmoothDistribution(std::span<const double> p, double exponent) {
  std::vector<double> q(p.size(), 0.0);
  double z = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) {
      q[i] = std::pow(p[i], exponent);
      z += q[i];
    }
  }
  if (z > 0.0) {
    for (double& v : q) v /= z;
  }
  return q;
}

namespace {

std::vector<double> Normalize(const std::vector<std::uint64_t>& counts) {
  std::uint64_t total = 0;
  for (auto v : counts) total += v;
  std::vector<double> p(counts.size(), 0.0);
  if (total == 0) return p;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    p[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
  }
  return p;
}

}  // namespace

SamplingPlan ComputePlan(const PairCounts& counts, double alpha, double beta) {
  if (!(alpha >= 0.0) || !(beta >= 0.0)) Fail(ErrorCode::kConfig, "alpha and beta must be non-negative");
  if (counts.total() == 0) Fail(ErrorCode::kEmpty, "all pair counts are zero; nothing to sample");
  const std::size_t n = counts.size();
  SamplingPlan plan;
  plan.languages = counts.languages;
  plan.alpha = alpha;
  plan.beta = beta;
  plan.counts = counts.c;

  std::vector<std::uint64_t> row_sums(n, 0);
  std::vector<std::uint64_t> col_sums(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      row_sums[i] += counts.c[i][j];
      col_sums[j] += counts.c[i][j];
    }
  }
  const auto p_src = Normalize(row_sums);
  const auto p_tgt = Normalize(col_sums);
  plan.q_src = SmoothDistribution(p_src, alpha);
  plan.q_tgt = SmoothDistribution(p_tgt, alpha);

  plan.q_tgt_given_src.assign(n, std::vector<double>(n, 0.0));
  plan.q_src_given_tgt.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    plan.q_tgt_given_src[i] = SmoothDistribution(Normalize(counts.c[i]), beta);
  }
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<std::uint64_t> column(n);
    for (std::size_t i = 0; i < n; ++i) column[i] = counts.c[i][j];
    plan.q_src_given_tgt[j] = SmoothDistribution(Normalize(column), beta);
  }
  return plan;
}

std::string SamplingPlan::ToJson() const {
  json j;
  j["languages"] = json::array();
  for (const auto& l : languages) j["languages"].push_back(l.str());
  j["alpha"] = alpha;
  j["beta"] = beta;
  j["counts"] = counts;
  j["q_src"] = q_src;
  j["q_tgt"] = q_tgt;
  j["q_tgt_given_src"] = q_tgt_given_src;
  j["q_src_given_tgt"] = q_src_given_tgt;
  return j.dump(1) + "\n";
}

SamplingPlan SamplingPlan::FromJson(std::string_view text) {
  SamplingPlan plan;
  try {
    const json j = json::parse(text);
    for (const auto& l : j.at("languages")) plan.languages.push_back(LangCode::Parse(l.get<std::string>()));
    plan.alpha = j.at("alpha").get<double>();
    plan.beta = j.at("beta").get<double>();
    plan.counts = j.at("counts").get<std::vector<std::vector<std::uint64_t>>>();
    plan.q_src = j.at("q_src").get<std::vector<double>>();
    plan.q_tgt = j.at("q_tgt").get<std::vector<double>>();
    plan.q_tgt_given_src = j.at("q_tgt_given_src").get<std::vector<std::vector<double>>>();
    plan.q_src_given_tgt = j.at("q_src_given_tgt").get<std::vector<std::vector<double>>>();
  } catch (const json::exception& e) {
    Fail(ErrorCode::kParse, std::string("sampling plan: ") + e.what());
  }
  const std::size_t n = plan.languages.size();
  auto square = [n](const auto& m) {
    return m.size() == n && std::all_of(m.begin(), m.end(), [n](const auto& r) { return r.size() == n; });
  };
  if (plan.q_src.size() != n || plan.q_tgt.size() != n || !square(plan.counts) ||
      !square(plan.q_tgt_given_src) || !square(plan.q_src_given_tgt)) {
    Fail(ErrorCode::kFormat, "sampling plan: distribution shapes do not match the language list");
  }
  return plan;
}

std::string_view PivotSideName(PivotSide side) {
  return side == PivotSide::kSource ? "source" : "target";
}

std::size_t Batch::sample_count() const {
  std::size_t n = 0;
  for (const auto& mb : mini_batches) n += mb.ids.size();
  return n;
}

BatchSampler::BatchSampler(const SamplingPlan& plan, const SamplePools& pools,
                           std::size_t mini_batches, std::size_t mini_batch_size, std::uint64_t seed)
    : plan_(plan), pools_(pools), m_(mini_batches), mb_(mini_batch_size), rng_(seed) {
  if (m_ == 0 || mb_ == 0) Fail(ErrorCode::kConfig, "m and mb must be positive");
}

double BatchSampler::Uniform() {
  return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
}

std::size_t BatchSampler::Categorical(std::span<const double> probs) {
  const double u = Uniform();
  double cum = 0.0;
  std::size_t last_positive = probs.size();
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    last_positive = i;
    cum += probs[i];
    if (u < cum) return i;
  }
  if (last_positive == probs.size()) Fail(ErrorCode::kConsistency, "categorical with no mass");
  return last_positive;
}

std::size_t BatchSampler::UniformIndex(std::size_t n) {
  const std::uint64_t range = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
  std::uint64_t x;
  do {
    x = rng_();
  } while (x >= limit);
  return static_cast<std::size_t>(x % range);
}

const std::vector<std::string>& BatchSampler::Pool(std::size_t i, std::size_t j) const {
  auto it = pools_.find({plan_.languages[i], plan_.languages[j]});
  if (it == pools_.end() || it->second.empty()) {
    Fail(ErrorCode::kConsistency, "empty sample pool for (" + plan_.languages[i].str() + ", " +
                                      plan_.languages[j].str() + ")");
  }
  return it->second;
}

Batch BatchSampler::Next() {
  Batch batch;
  const double r = Uniform();
  batch.pivot_side = r > 0.5 ? PivotSide::kSource : PivotSide::kTarget;
  const bool source_pivot = batch.pivot_side == PivotSide::kSource;
  const std::size_t pivot = Categorical(source_pivot ? plan_.q_src : plan_.q_tgt);
  batch.pivot_lang = plan_.languages[pivot];
  batch.mini_batches.reserve(m_);
  for (std::size_t k = 0; k < m_; ++k) {
    const std::size_t partner =
        Categorical(source_pivot ? plan_.q_tgt_given_src[pivot] : plan_.q_src_given_tgt[pivot]);
    const std::size_t i = source_pivot ? pivot : partner;
    const std::size_t j = source_pivot ? partner : pivot;
    const auto& pool = Pool(i, j);
    MiniBatch mb{plan_.languages[i], plan_.languages[j], {}};
    mb.ids.reserve(mb_);
    for (std::size_t s = 0; s < mb_; ++s) mb.ids.push_back(pool[UniformIndex(pool.size())]);
    batch.mini_batches.push_back(std::move(mb));
  }
  return batch;
}

void TrainingFeed(const SamplingPlan& plan, const SamplePools& pools, std::uint64_t steps,
                  std::size_t mini_batches, std::size_t mini_batch_size, std::uint64_t seed,
                  const std::function<void(std::uint64_t, const Batch&)>& sink) {
  if (steps == 0) return;
  BatchSampler sampler(plan, pools, mini_batches, mini_batch_size, seed);
  for (std::uint64_t step = 0; step < steps; ++step) sink(step, sampler.Next());
}

std::string RenderBatchLine(std::uint64_t step, const Batch& batch) {
  json j;
  j["step"] = step;
  j["pivot_side"] = PivotSideName(batch.pivot_side);
  j["pivot_lang"] = batch.pivot_lang.str();
  j["mini_batches"] = json::array();
  for (const auto& mb : batch.mini_batches) {
    j["mini_batches"].push_back(
        {{"src_lang", mb.src_lang.str()}, {"tgt_lang", mb.tgt_lang.str()}, {"ids", mb.ids}});
  }
  return j.dump();
}

}  // namespace xsf
