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

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "xsum_forge/lang_code.hpp"

namespace xsf {

inline constexpr double kDefaultAlpha = 0.5;
inline constexpr double kDefaultBeta = 0.75;
inline constexpr std::uint64_t kDefaultMinPairCount = 30;
inline constexpr std::size_t kDefaultMiniBatches = 8;
inline constexpr std::size_t kDefaultMiniBatchSize = 32;

// c[i][j]: training samples with source language i and target language j.
struct PairCounts {
  std::vector<LangCode> languages;  // sorted
  std::vector<std::vector<std::uint64_t>> c;

  static PairCounts FromMap(const std::map<std::pair<LangCode, LangCode>, std::uint64_t>& counts);
  // Zeroes every entry below `min_count`.
  void ApplyFloor(std::uint64_t min_count);
  std::size_t size() const { return languages.size(); }
  std::uint64_t total() const;
};

struct SamplingPlan {
  std::vector<LangCode> languages;
  double alpha = kDefaultAlpha;
  double beta = kDefaultBeta;
  std::vector<std::vector<std::uint64_t>> counts;
  std::vector<double> q_src;
  std::vector<double> q_tgt;
  std::vector<std::vector<double>> q_tgt_given_src;  // [i][j]
  std::vector<std::vector<double>> q_src_given_tgt;  // [j][i]

  std::string ToJson() const;
  static SamplingPlan FromJson(std::string_view text);

  friend bool operator==(const SamplingPlan&, const SamplingPlan&) = default;
};

// Renormalizes p^exponent; zero-mass entries stay zero for every exponent.
std::vector<double> SmoothDistribution(std::span<const double> p, double exponent);

// Throws kEmpty on an all-zero count matrix.
SamplingPlan ComputePlan(const PairCounts& counts, double alpha = kDefaultAlpha,
                         double beta = kDefaultBeta);

enum class PivotSide { kSource, kTarget };
std::string_view PivotSideName(PivotSide side);

struct MiniBatch {
  LangCode src_lang;
  LangCode tgt_lang;
  std::vector<std::string> ids;
};

struct Batch {
  PivotSide pivot_side = PivotSide::kSource;
  LangCode pivot_lang;
  std::vector<MiniBatch> mini_batches;

  std::size_t sample_count() const;
};

// Sample ids per (source, target) language pair.
using SamplePools = std::map<std::pair<LangCode, LangCode>, std::vector<std::string>>;

// Seeded multistage batch generator. Each batch flips a fair coin for the
// pivot side, draws the pivot language from the smoothed marginal, then draws
// every mini-batch's partner language from the smoothed conditional; ids are
// drawn uniformly with replacement from the chosen pool.
class BatchSampler {
 public:
  BatchSampler(const SamplingPlan& plan, const SamplePools& pools, std::size_t mini_batches,
               std::size_t mini_batch_size, std::uint64_t seed);

  Batch Next();

 private:
  double Uniform();
  std::size_t Categorical(std::span<const double> probs);
  std::size_t UniformIndex(std::size_t n);
  const std::vector<std::string>& Pool(std::size_t i, std::size_t j) const;

  const SamplingPlan& plan_;
  const SamplePools& pools_;
  std::size_t m_;
  std::size_t mb_;
  std::mt19937_64 rng_;
};

// Exactly `steps` batches from a fresh sampler seeded with `seed`.
void TrainingFeed(const SamplingPlan& plan, const SamplePools& pools, std::uint64_t steps,
                  std::size_t mini_batches, std::size_t mini_batch_size, std::uint64_t seed,
                  const std::function<void(std::uint64_t, const Batch&)>& sink);

std::string RenderBatchLine(std::uint64_t step, const Batch& batch);

}  // namespace xsf
