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

#include "xsum_forge/embedding_store.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <numeric>
#include <tuple>

#include "xsum_forge/error.hpp"
#include "xsum_forge/fsutil.hpp"

namespace xsf {

namespace {

constexpr char kMagic[4] = {'X', 'E', 'M', 'B'};
constexpr std::size_t kQueryTile = 32;
constexpr std::size_t kCandidateTile = 128;

static_assert(std::endian::native == std::endian::little,
              "XEMB I/O assumes a little-endian host");

template <typename T>
T ReadLe(const std::string& buf, std::size_t& pos, const std::string& path) {
  if (pos + sizeof(T) > buf.size()) Fail(ErrorCode::kFormat, path + ": truncated vector file");
  T v;
  std::memcpy(&v, buf.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

template <typename T>
void WriteLe(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

}  // namespace

std::unordered_map<std::string, std::size_t> EmbeddingFile::Index() const {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!index.emplace(ids[i], i).second) {
      Fail(ErrorCode::kDuplicateId, "vector file repeats id \"" + ids[i] + "\"");
    }
  }
  return index;
}

EmbeddingFile ReadEmbeddingFile(const std::filesystem::path& path) {
  const std::string buf = ReadFile(path);
  const std::string name = path.string();
  if (buf.size() < 16 || std::memcmp(buf.data(), kMagic, 4) != 0) {
    Fail(ErrorCode::kFormat, name + ": not an XEMB file");
  }
  std::size_t pos = 4;
  const auto version = ReadLe<std::uint32_t>(buf, pos, name);
  if (version != EmbeddingFile::kVersion) {
    Fail(ErrorCode::kFormat, name + ": unsupported XEMB version " + std::to_string(version));
  }
  EmbeddingFile file;
  file.dimension = ReadLe<std::uint32_t>(buf, pos, name);
  const auto count = ReadLe<std::uint32_t>(buf, pos, name);
  if (file.dimension == 0) Fail(ErrorCode::kDimension, name + ": dimension is zero");
  file.ids.reserve(count);
  file.values.resize(static_cast<std::size_t>(count) * file.dimension);
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto len = ReadLe<std::uint16_t>(buf, pos, name);
    if (pos + len > buf.size()) Fail(ErrorCode::kFormat, name + ": truncated vector file");
    file.ids.emplace_back(buf.data() + pos, len);
    pos += len;
    const std::size_t bytes = sizeof(float) * file.dimension;
    if (pos + bytes > buf.size()) Fail(ErrorCode::kFormat, name + ": truncated vector file");
    std::memcpy(file.values.data() + static_cast<std::size_t>(i) * file.dimension,
                buf.data() + pos, bytes);
    pos += bytes;
  }
  if (pos != buf.size()) Fail(ErrorCode::kFormat, name + ": trailing bytes after " + std::to_string(count) + " records");
  return file;
}

void WriteEmbeddingFile(const EmbeddingFile& file, const std::filesystem::path& path) {
  if (file.values.size() != file.ids.size() * file.dimension) {
    Fail(ErrorCode::kDimension, "vector payload does not match ids x dimension");
  }
  AtomicFile out(path);
  std::ostream& os = out.stream();
  os.write(kMagic, 4);
  WriteLe<std::uint32_t>(os, EmbeddingFile::kVersion);
  WriteLe<std::uint32_t>(os, file.dimension);
  WriteLe<std::uint32_t>(os, static_cast<std::uint32_t>(file.ids.size()));
  for (std::size_t i = 0; i < file.ids.size(); ++i) {
    const std::string& id = file.ids[i];
    if (id.size() > 0xFFFF) Fail(ErrorCode::kFormat, "id longer than 65535 bytes");
    WriteLe<std::uint16_t>(os, static_cast<std::uint16_t>(id.size()));
    os.write(id.data(), static_cast<std::streamsize>(id.size()));
    os.write(reinterpret_cast<const char*>(file.values.data() + i * file.dimension),
             static_cast<std::streamsize>(sizeof(float) * file.dimension));
  }
  out.Commit();
}

float Similarity(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) {
    Fail(ErrorCode::kDimension, "dimension mismatch: " + std::to_string(a.size()) +
                                    " vs " + std::to_string(b.size()));
  }
  float acc = 0.0f;
  for (std::size_t k = 0; k < a.size(); ++k) acc += a[k] * b[k];
  return acc;
}

void NormalizeInPlace(std::span<float> v, std::string_view id) {
  double sq = 0.0;
  for (float x : v) {
    if (!std::isfinite(x)) Fail(ErrorCode::kFormat, "non-finite entry in vector of \"" + std::string(id) + "\"");
    sq += static_cast<double>(x) * x;
  }
  const double norm = std::sqrt(sq);
  if (std::abs(norm - 1.0) > kNormTolerance) {
    Fail(ErrorCode::kNorm, "vector of \"" + std::string(id) + "\" has norm " +
                               FormatShortest(norm) + ", outside 1 +/- 1e-3");
  }
  // Below this deviation the vector is already unit norm at float precision.
  if (std::abs(norm - 1.0) > 1e-6) {
    for (float& x : v) x = static_cast<float>(x / norm);
  }
}

EmbeddingStore EmbeddingStore::Import(const Corpus& corpus, const EmbeddingFile& vectors) {
  const auto index = vectors.Index();
  for (const auto& id : vectors.ids) {
    if (!corpus.Contains(id)) {
      Fail(ErrorCode::kUnknownId, "vector id \"" + id + "\" is absent from the corpus");
    }
  }
  std::vector<SummaryRecord> records;
  records.reserve(corpus.size());
  for (const Document& doc : corpus.documents()) {
    auto it = index.find(doc.id);
    if (it == index.end()) {
      Fail(ErrorCode::kUnknownId, "no vector for document \"" + doc.id + "\"");
    }
    auto row = vectors.row(it->second);
    records.push_back({doc.id, doc.lang, std::vector<float>(row.begin(), row.end())});
  }
  return FromRecords(vectors.dimension, std::move(records));
}

EmbeddingStore EmbeddingStore::Import(const Corpus& corpus, const std::filesystem::path& vectors) {
  return Import(corpus, ReadEmbeddingFile(vectors));
}

EmbeddingStore EmbeddingStore::FromRecords(std::uint32_t dimension,
                                           std::vector<SummaryRecord> records) {
  if (dimension == 0) Fail(ErrorCode::kDimension, "store dimension must be positive");
  EmbeddingStore store;
  store.dimension_ = dimension;
  std::sort(records.begin(), records.end(), [](const SummaryRecord& x, const SummaryRecord& y) {
    return std::tie(x.lang, x.doc_id) < std::tie(y.lang, y.doc_id);
  });
  for (auto& rec : records) {
    if (rec.embedding.size() != dimension) {
      Fail(ErrorCode::kDimension, "vector of \"" + rec.doc_id + "\" has dimension " +
                                      std::to_string(rec.embedding.size()) + ", store expects " +
                                      std::to_string(dimension));
    }
    NormalizeInPlace(rec.embedding, rec.doc_id);
    if (store.blocks_.empty() || store.blocks_.back().lang != rec.lang) {
      store.blocks_.push_back({rec.lang, {}, {}});
      store.languages_.push_back(rec.lang);
    }
    LangBlock& block = store.blocks_.back();
    if (!store.locations_.emplace(rec.doc_id, Location{store.blocks_.size() - 1, block.ids.size()}).second) {
      Fail(ErrorCode::kDuplicateId, "duplicate summary id \"" + rec.doc_id + "\"");
    }
    block.ids.push_back(rec.doc_id);
    block.matrix.insert(block.matrix.end(), rec.embedding.begin(), rec.embedding.end());
  }
  return store;
}

const EmbeddingStore::LangBlock* EmbeddingStore::Block(const LangCode& lang) const {
  auto it = std::lower_bound(languages_.begin(), languages_.end(), lang);
  if (it == languages_.end() || *it != lang) return nullptr;
  return &blocks_[static_cast<std::size_t>(it - languages_.begin())];
}

bool EmbeddingStore::HasLanguage(const LangCode& lang) const { return Block(lang) != nullptr; }

std::span<const std::string> EmbeddingStore::ids(const LangCode& lang) const {
  const LangBlock* b = Block(lang);
  if (b == nullptr) return {};
  return b->ids;
}

std::optional<EmbeddingStore::Location> EmbeddingStore::Locate(std::string_view id) const {
  auto it = locations_.find(std::string(id));
  if (it == locations_.end()) return std::nullopt;
  return it->second;
}

const LangCode& EmbeddingStore::LangOf(std::string_view id) const {
  auto loc = Locate(id);
  if (!loc) Fail(ErrorCode::kUnknownId, "unknown summary id \"" + std::string(id) + "\"");
  return blocks_[loc->lang_index].lang;
}

std::span<const float> EmbeddingStore::Vector(std::string_view id) const {
  auto loc = Locate(id);
  if (!loc) Fail(ErrorCode::kUnknownId, "unknown summary id \"" + std::string(id) + "\"");
  return Row(blocks_[loc->lang_index], loc->row);
}

float EmbeddingStore::SimilarityOf(std::string_view a, std::string_view b) const {
  return Similarity(Vector(a), Vector(b));
}

std::optional<NearestNeighbor> EmbeddingStore::NearestInLanguage(
    std::string_view query_id, const LangCode& target_lang) const {
  const auto loc = Locate(query_id);
  if (!loc) Fail(ErrorCode::kUnknownId, "unknown query id \"" + std::string(query_id) + "\"");
  const LangBlock& own = blocks_[loc->lang_index];
  if (own.lang == target_lang) {
    Fail(ErrorCode::kInvalidArgument, "target language equals the query's language");
  }
  const LangBlock* target = Block(target_lang);
  if (target == nullptr || target->ids.empty()) return std::nullopt;
  const auto q = Row(own, loc->row);
  std::size_t best = 0;
  float best_sim = Similarity(q, Row(*target, 0));
  for (std::size_t r = 1; r < target->ids.size(); ++r) {
    const float s = Similarity(q, Row(*target, r));
    if (s > best_sim) {
      best_sim = s;
      best = r;
    }
  }
  return NearestNeighbor{std::string(query_id), target->ids[best], best_sim};
}

EmbeddingStore::RowArgmax EmbeddingStore::BlockedArgmax(const LangCode& from,
                                                        const LangCode& to) const {
  RowArgmax out;
  const LangBlock* src = Block(from);
  const LangBlock* dst = Block(to);
  if (src == nullptr) return out;
  const std::size_t nq = src->ids.size();
  out.best.assign(nq, -1);
  out.similarity.assign(nq, 0.0f);
  if (dst == nullptr || dst->ids.empty()) return out;

  const std::size_t nc = dst->ids.size();
  const std::size_t d = dimension_;
  // Candidate tiles are transposed (d x tile) so the inner loop runs across
  // candidates; each individual dot product still accumulates in index order.
  std::vector<float> tile(d * kCandidateTile);
  std::vector<float> acc(kCandidateTile);
  std::vector<bool> seen(nq, false);

  for (std::size_t c0 = 0; c0 < nc; c0 += kCandidateTile) {
    const std::size_t width = std::min(kCandidateTile, nc - c0);
    for (std::size_t j = 0; j < width; ++j) {
      const float* row = dst->matrix.data() + (c0 + j) * d;
      for (std::size_t k = 0; k < d; ++k) tile[k * kCandidateTile + j] = row[k];
    }
    for (std::size_t q0 = 0; q0 < nq; q0 += kQueryTile) {
      const std::size_t qend = std::min(nq, q0 + kQueryTile);
      for (std::size_t qi = q0; qi < qend; ++qi) {
        const float* q = src->matrix.data() + qi * d;
        std::fill(acc.begin(), acc.begin() + static_cast<std::ptrdiff_t>(width), 0.0f);
        for (std::size_t k = 0; k < d; ++k) {
          const float qk = q[k];
          const float* t = tile.data() + k * kCandidateTile;
          for (std::size_t j = 0; j < width; ++j) acc[j] += qk * t[j];
        }
        for (std::size_t j = 0; j < width; ++j) {
          if (!seen[qi] || acc[j] > out.similarity[qi]) {
            seen[qi] = true;
            out.similarity[qi] = acc[j];
            out.best[qi] = static_cast<std::int64_t>(c0 + j);
          }
        }
      }
    }
  }
  return out;
}

BidirectionalNeighbors EmbeddingStore::AllNearest(const LangCode& lang_a,
                                                  const LangCode& lang_b) const {
  if (lang_a == lang_b) Fail(ErrorCode::kInvalidArgument, "all_nearest needs two distinct languages");
  BidirectionalNeighbors result;
  auto fill = [&](const LangCode& from, const LangCode& to, NeighborMap& map) {
    const LangBlock* src = Block(from);
    if (src == nullptr) return;
    const LangBlock* dst = Block(to);
    const RowArgmax arg = BlockedArgmax(from, to);
    for (std::size_t i = 0; i < src->ids.size(); ++i) {
      if (arg.best[i] < 0) {
        map.emplace(src->ids[i], std::nullopt);
      } else {
        map.emplace(src->ids[i],
                    NearestNeighbor{src->ids[i], dst->ids[static_cast<std::size_t>(arg.best[i])],
                                    arg.similarity[i]});
      }
    }
  };
  fill(lang_a, lang_b, result.a_to_b);
  fill(lang_b, lang_a, result.b_to_a);
  return result;
}

EmbeddingFile EmbeddingStore::ToFile() const {
  EmbeddingFile file;
  file.dimension = dimension_;
  for (const auto& b : blocks_) {
    file.ids.insert(file.ids.end(), b.ids.begin(), b.ids.end());
    file.values.insert(file.values.end(), b.matrix.begin(), b.matrix.end());
  }
  return file;
}

}  // namespace xsf
