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

#include "xsum_forge/lase_metric.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "xsum_forge/embedding_store.hpp"
#include "xsum_forge/error.hpp"
#include "xsum_forge/fsutil.hpp"

namespace xsf {

void LangIdDistribution::Validate() const {
  double sum = 0.0;
  for (const auto& [lang, p] : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      Fail(ErrorCode::kFormat, "negative or non-finite probability for " + lang.str());
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-6) {
    Fail(ErrorCode::kFormat, "language probabilities sum to " + FormatShortest(sum) + ", not 1");
  }
}

std::optional<LangCode> LangIdDistribution::Argmax() const {
  std::optional<LangCode> best;
  double best_p = 0.0;
  for (const auto& [lang, p] : probs) {
    if (!best || p > best_p) {
      best = lang;
      best_p = p;
    }
  }
  return best;
}

double MeaningSimilarity(std::span<const float> gen_emb, std::span<const float> ref_emb) {
  return static_cast<double>(Similarity(gen_emb, ref_emb));
}

double LanguageConfidence(const LangIdDistribution& dist, const LangCode& target) {
  const auto top = dist.Argmax();
  if (top && *top == target) return 1.0;
  auto it = dist.probs.find(target);
  return it == dist.probs.end() ? 0.0 : it->second;
}

double LengthPenalty(std::uint64_t len_gen, std::uint64_t len_ref, int c) {
  if (c < 0) Fail(ErrorCode::kInvalidArgument, "length offset must be non-negative");
  const std::uint64_t allowance = len_ref + static_cast<std::uint64_t>(c);
  if (len_gen <= allowance) return 1.0;
  if (allowance == 0) return 0.0;  // limit of exp(1 - x / eps)
  return std::exp(1.0 - static_cast<double>(len_gen) / static_cast<double>(allowance));
}

LaseScore Lase(std::string_view gen_text, std::string_view ref_text,
               std::span<const float> gen_emb, std::span<const float> ref_emb,
               const LangIdDistribution& dist, const LaseConfig& cfg) {
  LaseScore s;
  s.ms = MeaningSimilarity(gen_emb, ref_emb);
  s.lc = LanguageConfidence(dist, cfg.target_lang);
  s.lp = LengthPenalty(SegmentTokens(gen_text, cfg.target_lang), SegmentTokens(ref_text),
                       cfg.length_offset);
  s.lase = s.ms * s.lc * s.lp;
  return s;
}

namespace {

using NgramCounts = std::unordered_map<std::string, std::uint64_t>;

NgramCounts CountNgrams(std::span<const std::string> tokens, std::size_t n, std::uint64_t& total) {
  NgramCounts counts;
  total = 0;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key = tokens[i];
    for (std::size_t k = 1; k < n; ++k) {
      key += '\x1f';
      key += tokens[i + k];
    }
    ++counts[key];
    ++total;
  }
  return counts;
}

std::size_t LcsLength(std::span<const std::string> a, std::span<const std::string> b) {
  std::vector<std::size_t> prev(b.size() + 1, 0);
  std::vector<std::size_t> cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

RougeScore FromCounts(double overlap, double gen_total, double ref_total) {
  RougeScore s;
  s.precision = gen_total > 0 ? overlap / gen_total : 0.0;
  s.recall = ref_total > 0 ? overlap / ref_total : 0.0;
  const double sum = s.precision + s.recall;
  s.f1 = sum > 0 ? 2.0 * s.precision * s.recall / sum : 0.0;
  return s;
}

}  // namespace

RougeScore RougeFromTokens(std::span<const std::string> gen, std::span<const std::string> ref,
                           RougeVariant variant) {
  if (variant == RougeVariant::kRougeL) {
    const double lcs = static_cast<double>(LcsLength(gen, ref));
    return FromCounts(lcs, static_cast<double>(gen.size()), static_cast<double>(ref.size()));
  }
  const std::size_t n = variant == RougeVariant::kRouge1 ? 1 : 2;
  std::uint64_t gen_total = 0;
  std::uint64_t ref_total = 0;
  const auto gen_counts = CountNgrams(gen, n, gen_total);
  const auto ref_counts = CountNgrams(ref, n, ref_total);
  std::uint64_t overlap = 0;
  for (const auto& [gram, count] : gen_counts) {
    auto it = ref_counts.find(gram);
    if (it != ref_counts.end()) overlap += std::min(count, it->second);
  }
  return FromCounts(static_cast<double>(overlap), static_cast<double>(gen_total),
                    static_cast<double>(ref_total));
}

RougeScore Rouge(std::string_view gen_text, std::string_view ref_text, RougeVariant variant) {
  const auto gen = Tokenize(gen_text);
  const auto ref = Tokenize(ref_text);
  return RougeFromTokens(gen, ref, variant);
}

std::optional<double> Pearson(std::span<const double> xs, std::span<const double> ys) {
  const std::size_t n = xs.size();
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(n);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> AverageRanks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

Correlation Correlate(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) Fail(ErrorCode::kInvalidArgument, "correlate: inputs differ in length");
  if (xs.size() < 2) Fail(ErrorCode::kInvalidArgument, "correlate: need at least two observations");
  Correlation c;
  c.pearson = Pearson(xs, ys);
  const auto rx = AverageRanks(xs);
  const auto ry = AverageRanks(ys);
  c.spearman = Pearson(rx, ry);
  return c;
}

}  // namespace xsf
