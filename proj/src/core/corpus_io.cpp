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

#include "xsum_forge/corpus_io.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>
#include <tuple>

#include "xsum_forge/error.hpp"
#include "xsum_forge/fsutil.hpp"

namespace xsf {

using nlohmann::json;

namespace {

std::string LineError(std::size_t line, const std::string& what) {
  return "line " + std::to_string(line) + ": " + what;
}

const json& RequireField(const json& obj, const char* key, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    Fail(ErrorCode::kParse, LineError(line, std::string("missing field \"") + key + "\""));
  }
  return *it;
}

std::string RequireString(const json& obj, const char* key, std::size_t line) {
  const json& v = RequireField(obj, key, line);
  if (!v.is_string()) {
    Fail(ErrorCode::kParse, LineError(line, std::string("field \"") + key + "\" is not a string"));
  }
  return v.get<std::string>();
}

void Count(CorpusManifest& manifest, const LangCode& lang) {
  auto [it, inserted] = manifest.counts.emplace(lang, 0);
  ++it->second;
  if (inserted) {
    manifest.languages.insert(
        std::upper_bound(manifest.languages.begin(), manifest.languages.end(), lang),
        lang);
  }
}

}  // namespace

std::size_t CorpusManifest::total() const {
  std::size_t sum = 0;
  for (const auto& [lang, n] : counts) sum += n;
  return sum;
}

std::string CorpusManifest::ToJson() const {
  json j;
  j["format_version"] = format_version;
  j["languages"] = json::array();
  for (const auto& l : languages) j["languages"].push_back(l.str());
  j["counts"] = json::object();
  for (const auto& [l, n] : counts) j["counts"][l.str()] = n;
  j["total"] = total();
  return j.dump(2) + "\n";
}

CorpusManifest CorpusManifest::FromJson(std::string_view text) {
  CorpusManifest m;
  try {
    const json j = json::parse(text);
    m.format_version = j.at("format_version").get<int>();
    for (const auto& l : j.at("languages")) m.languages.push_back(LangCode::Parse(l.get<std::string>()));
    for (const auto& [k, v] : j.at("counts").items()) m.counts[LangCode::Parse(k)] = v.get<std::size_t>();
  } catch (const json::exception& e) {
    Fail(ErrorCode::kParse, std::string("corpus manifest: ") + e.what());
  }
  return m;
}

Document ParseDocumentLine(std::string_view line, std::size_t line_number) {
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::parse_error& e) {
    Fail(ErrorCode::kParse, LineError(line_number, std::string("malformed JSON: ") + e.what()));
  }
  if (!obj.is_object()) Fail(ErrorCode::kParse, LineError(line_number, "expected a JSON object"));
  Document doc;
  doc.id = RequireString(obj, "id", line_number);
  const std::string lang = RequireString(obj, "lang", line_number);
  doc.text = RequireString(obj, "text", line_number);
  doc.summary = RequireString(obj, "summary", line_number);
  if (doc.id.empty()) Fail(ErrorCode::kParse, LineError(line_number, "empty id"));
  if (doc.id.size() > 0xFFFF) Fail(ErrorCode::kParse, LineError(line_number, "id longer than 65535 bytes"));
  if (doc.summary.empty()) Fail(ErrorCode::kParse, LineError(line_number, "empty summary"));
  try {
    doc.lang = LangCode::Parse(lang);
  } catch (const Error& e) {
    Fail(ErrorCode::kParse, LineError(line_number, e.what()));
  }
  return doc;
}

CorpusReader::CorpusReader(const std::filesystem::path& path) {
  RequireInput(path, "corpus");
  in_.open(path, std::ios::binary);
  if (!in_) Fail(ErrorCode::kIo, "cannot open corpus " + path.string());
}

bool CorpusReader::Next(Document& out) {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_number_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    Document doc = ParseDocumentLine(line, line_number_);
    if (!seen_ids_.insert(doc.id).second) {
      Fail(ErrorCode::kDuplicateId,
           LineError(line_number_, "duplicate id \"" + doc.id + "\""));
    }
    Count(manifest_, doc.lang);
    ++records_;
    out = std::move(doc);
    return true;
  }
  return false;
}

Corpus Corpus::Load(const std::filesystem::path& path) {
  CorpusReader reader(path);
  Corpus corpus;
  Document doc;
  while (reader.Next(doc)) {
    corpus.index_.emplace(doc.id, corpus.docs_.size());
    corpus.docs_.push_back(std::move(doc));
  }
  corpus.manifest_ = reader.manifest();
  return corpus;
}

Corpus Corpus::FromDocuments(std::vector<Document> docs) {
  Corpus corpus;
  corpus.docs_ = std::move(docs);
  for (std::size_t i = 0; i < corpus.docs_.size(); ++i) {
    const Document& d = corpus.docs_[i];
    if (d.summary.empty()) Fail(ErrorCode::kParse, "document \"" + d.id + "\" has an empty summary");
    if (!corpus.index_.emplace(d.id, i).second) {
      Fail(ErrorCode::kDuplicateId, "duplicate id \"" + d.id + "\"");
    }
    Count(corpus.manifest_, d.lang);
  }
  return corpus;
}

const Document* Corpus::Find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &docs_[it->second];
}

std::string_view PairKindName(PairKind kind) {
  return kind == PairKind::kDirect ? "direct" : "induced";
}

void MatchedPair::Canonicalize() {
  if (lang_b < lang_a) {
    std::swap(a_id, b_id);
    std::swap(lang_a, lang_b);
  }
}

bool PairFileOrder(const MatchedPair& x, const MatchedPair& y) {
  return std::tie(x.lang_a, x.lang_b, x.a_id, x.b_id) <
         std::tie(y.lang_a, y.lang_b, y.a_id, y.b_id);
}

std::string RenderPairLine(const MatchedPair& p) {
  std::string line = "{\"a_id\":" + json(p.a_id).dump() +
                     ",\"b_id\":" + json(p.b_id).dump() +
                     ",\"lang_a\":" + json(p.lang_a.str()).dump() +
                     ",\"lang_b\":" + json(p.lang_b.str()).dump() +
                     ",\"similarity\":" + FormatFixed6(p.similarity) +
                     ",\"kind\":\"" + std::string(PairKindName(p.kind)) + "\"}";
  return line;
}

void WritePairs(std::span<const MatchedPair> pairs, const Corpus& corpus,
                const std::filesystem::path& path) {
  std::vector<MatchedPair> sorted(pairs.begin(), pairs.end());
  for (const auto& p : sorted) {
    for (const std::string* id : {&p.a_id, &p.b_id}) {
      if (!corpus.Contains(*id)) {
        Fail(ErrorCode::kUnknownId, "pair references id \"" + *id + "\" absent from the corpus");
      }
    }
  }
  std::sort(sorted.begin(), sorted.end(), PairFileOrder);
  AtomicFile file(path);
  for (const auto& p : sorted) file.stream() << RenderPairLine(p) << '\n';
  file.Commit();
}

std::vector<MatchedPair> ReadPairs(const std::filesystem::path& path) {
  RequireInput(path, "pairs file");
  std::vector<MatchedPair> pairs;
  ForEachLine(path, [&](std::string_view line, std::size_t n) {
    if (line.empty()) return;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      Fail(ErrorCode::kParse, LineError(n, std::string("malformed JSON: ") + e.what()));
    }
    if (!obj.is_object()) Fail(ErrorCode::kParse, LineError(n, "expected a JSON object"));
    MatchedPair p;
    p.a_id = RequireString(obj, "a_id", n);
    p.b_id = RequireString(obj, "b_id", n);
    try {
      p.lang_a = LangCode::Parse(RequireString(obj, "lang_a", n));
      p.lang_b = LangCode::Parse(RequireString(obj, "lang_b", n));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kParse) throw;
      Fail(ErrorCode::kParse, LineError(n, e.what()));
    }
    const json& sim = RequireField(obj, "similarity", n);
    if (!sim.is_number()) Fail(ErrorCode::kParse, LineError(n, "similarity is not a number"));
    p.similarity = sim.get<double>();
    const std::string kind = RequireString(obj, "kind", n);
    if (kind == "direct") {
      p.kind = PairKind::kDirect;
    } else if (kind == "induced") {
      p.kind = PairKind::kInduced;
    } else {
      Fail(ErrorCode::kParse, LineError(n, "unknown kind \"" + kind + "\""));
    }
    if (p.lang_a == p.lang_b) Fail(ErrorCode::kParse, LineError(n, "pair within a single language"));
    pairs.push_back(std::move(p));
  });
  return pairs;
}

}  // namespace xsf
