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

#include "xsum_forge/langid.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <nlohmann/json.hpp>
#include <unordered_map>

#include "xsum_forge/error.hpp"
#include "xsum_forge/fsutil.hpp"

namespace xsf {

namespace {

constexpr char kMagic[4] = {'X', 'L', 'I', 'D'};

bool IsSpaceCp(char32_t cp) {
  return cp == ' ' || (cp >= 0x09 && cp <= 0x0D) || cp == 0xA0 || cp == 0x3000 ||
         (cp >= 0x2000 && cp <= 0x200A);
}

template <typename T>
void Put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T Take(std::string_view bytes, std::size_t& pos) {
  if (pos + sizeof(T) > bytes.size()) Fail(ErrorCode::kFormat, "truncated XLID model");
  T v;
  std::memcpy(&v, bytes.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

std::string TakeString(std::string_view bytes, std::size_t& pos) {
  const auto len = Take<std::uint16_t>(bytes, pos);
  if (pos + len > bytes.size()) Fail(ErrorCode::kFormat, "truncated XLID model");
  std::string s(bytes.substr(pos, len));
  pos += len;
  return s;
}

}  // namespace

std::vector<std::string> LangIdModel::ExtractNgrams(std::string_view text, int order) {
  std::vector<char32_t> cps;
  cps.push_back(' ');
  for (char32_t cp : DecodeUtf8(text)) {
    if (IsSpaceCp(cp)) {
      if (cps.back() != ' ') cps.push_back(' ');
      continue;
    }
    if (cp >= 'A' && cp <= 'Z') cp = cp - 'A' + 'a';
    cps.push_back(cp);
  }
  if (cps.back() != ' ') cps.push_back(' ');
  std::vector<std::string> grams;
  if (cps.size() < static_cast<std::size_t>(order)) return grams;
  for (std::size_t i = 0; i + static_cast<std::size_t>(order) <= cps.size(); ++i) {
    bool all_space = true;
    std::string g;
    for (int k = 0; k < order; ++k) {
      const char32_t cp = cps[i + static_cast<std::size_t>(k)];
      all_space = all_space && cp == ' ';
      AppendUtf8(cp, g);
    }
    if (!all_space) grams.push_back(std::move(g));
  }
  return grams;
}

LangIdModel LangIdModel::Train(std::span<const std::pair<LangCode, std::string>> samples) {
  std::map<LangCode, std::array<Table, kMaxOrder>> by_lang;
  for (const auto& [lang, text] : samples) {
    auto& tables = by_lang[lang];
    for (int n = 1; n <= kMaxOrder; ++n) {
      for (auto& g : ExtractNgrams(text, n)) {
        ++tables[static_cast<std::size_t>(n - 1)].counts[g];
        ++tables[static_cast<std::size_t>(n - 1)].total;
      }
    }
  }
  if (by_lang.empty()) Fail(ErrorCode::kEmpty, "language-ID training corpus is empty");
  LangIdModel model;
  for (auto& [lang, tables] : by_lang) {
    if (tables[0].total == 0) Fail(ErrorCode::kEmpty, "language " + lang.str() + " has no usable text");
    model.languages_.push_back(lang);
    model.tables_.push_back(std::move(tables));
  }
  model.Finalize();
  return model;
}

void LangIdModel::Finalize() {
  for (int n = 0; n < kMaxOrder; ++n) {
    std::map<std::string_view, bool> vocab;
    for (const auto& tables : tables_) {
      for (const auto& [g, c] : tables[static_cast<std::size_t>(n)].counts) vocab.emplace(g, true);
    }
    vocab_[static_cast<std::size_t>(n)] = vocab.size() + 1;
  }
}

LangIdModel::Classification LangIdModel::Classify(std::string_view text) const {
  Classification out;
  const std::size_t k = languages_.size();
  std::vector<double> score(k, 0.0);
  std::size_t grams_seen = 0;
  for (int n = 1; n <= kMaxOrder; ++n) {
    const auto idx = static_cast<std::size_t>(n - 1);
    for (const auto& g : ExtractNgrams(text, n)) {
      ++grams_seen;
      for (std::size_t l = 0; l < k; ++l) {
        const Table& t = tables_[l][idx];
        auto it = t.counts.find(g);
        const double count = it == t.counts.end() ? 0.0 : static_cast<double>(it->second);
        score[l] += std::log((count + 1.0) / (static_cast<double>(t.total) + static_cast<double>(vocab_[idx])));
      }
    }
  }
  if (grams_seen == 0) {
    out.fallback_uniform = true;
    for (const auto& lang : languages_) out.distribution.probs[lang] = 1.0 / static_cast<double>(k);
    return out;
  }
  double best = -INFINITY;
  for (double& s : score) {
    s /= static_cast<double>(grams_seen);
    best = std::max(best, s);
  }
  double z = 0.0;
  for (double& s : score) {
    s = std::exp(s - best);
    z += s;
  }
  for (std::size_t l = 0; l < k; ++l) out.distribution.probs[languages_[l]] = score[l] / z;
  return out;
}

std::string LangIdModel::Serialize() const {
  std::string out(kMagic, 4);
  Put<std::uint32_t>(out, kVersion);
  Put<std::uint32_t>(out, static_cast<std::uint32_t>(languages_.size()));
  for (std::size_t l = 0; l < languages_.size(); ++l) {
    const std::string& code = languages_[l].str();
    Put<std::uint16_t>(out, static_cast<std::uint16_t>(code.size()));
    out += code;
    for (const Table& t : tables_[l]) {
      Put<std::uint64_t>(out, t.total);
      Put<std::uint32_t>(out, static_cast<std::uint32_t>(t.counts.size()));
      for (const auto& [g, c] : t.counts) {
        Put<std::uint16_t>(out, static_cast<std::uint16_t>(g.size()));
        out += g;
        Put<std::uint32_t>(out, c);
      }
    }
  }
  return out;
}

LangIdModel LangIdModel::Deserialize(std::string_view bytes) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    Fail(ErrorCode::kFormat, "not an XLID model");
  }
  std::size_t pos = 4;
  if (Take<std::uint32_t>(bytes, pos) != kVersion) Fail(ErrorCode::kFormat, "unsupported XLID version");
  const auto n_langs = Take<std::uint32_t>(bytes, pos);
  LangIdModel model;
  for (std::uint32_t l = 0; l < n_langs; ++l) {
    model.languages_.push_back(LangCode::Parse(TakeString(bytes, pos)));
    std::array<Table, kMaxOrder> tables;
    for (Table& t : tables) {
      t.total = Take<std::uint64_t>(bytes, pos);
      const auto entries = Take<std::uint32_t>(bytes, pos);
      for (std::uint32_t e = 0; e < entries; ++e) {
        std::string g = TakeString(bytes, pos);
        t.counts.emplace(std::move(g), Take<std::uint32_t>(bytes, pos));
      }
    }
    if (tables[0].total == 0) Fail(ErrorCode::kFormat, "XLID language without n-grams");
    model.tables_.push_back(std::move(tables));
  }
  if (pos != bytes.size()) Fail(ErrorCode::kFormat, "trailing bytes in XLID model");
  if (!std::is_sorted(model.languages_.begin(), model.languages_.end())) {
    Fail(ErrorCode::kFormat, "XLID languages out of order");
  }
  model.Finalize();
  return model;
}

void LangIdModel::Save(const std::filesystem::path& path) const { WriteFileAtomic(path, Serialize()); }

LangIdModel LangIdModel::Load(const std::filesystem::path& path) { return Deserialize(ReadFile(path)); }

std::map<std::string, LangIdDistribution> ReadLangIdInterchange(const std::filesystem::path& path) {
  using nlohmann::json;
  std::map<std::string, LangIdDistribution> out;
  ForEachLine(path, [&](std::string_view line, std::size_t n) {
    if (line.empty()) return;
    const std::string where = "line " + std::to_string(n) + ": ";
    LangIdDistribution dist;
    std::string id;
    try {
      const json j = json::parse(line);
      id = j.at("id").get<std::string>();
      for (const auto& [code, p] : j.at("probs").items()) {
        if (!p.is_number()) Fail(ErrorCode::kParse, where + "probability for " + code + " is not a number");
        dist.probs[LangCode::Parse(code)] += p.get<double>();
      }
    } catch (const json::exception& e) {
      Fail(ErrorCode::kParse, where + e.what());
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kParse) throw;
      Fail(ErrorCode::kParse, where + e.what());
    }
    try {
      dist.Validate();
    } catch (const Error& e) {
      Fail(ErrorCode::kFormat, where + e.what());
    }
    if (!out.emplace(id, std::move(dist)).second) {
      Fail(ErrorCode::kDuplicateId, where + "duplicate id \"" + id + "\"");
    }
  });
  return out;
}

std::string RenderLangIdLine(std::string_view id, const LangIdDistribution& dist) {
  nlohmann::json j;
  j["id"] = id;
  j["probs"] = nlohmann::json::object();
  for (const auto& [lang, p] : dist.probs) j["probs"][lang.str()] = p;
  return j.dump();
}

}  // namespace xsf
