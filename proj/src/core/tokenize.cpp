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

#include <string>
#include <vector>

#include "xsum_forge/lase_metric.hpp"

namespace xsf {

namespace {

struct Range {
  char32_t lo;
  char32_t hi;
};

constexpr Range kUnspaced[] = {
    {0x0E00, 0x0E7F},   // Thai
    {0x0E80, 0x0EFF},   // Lao
    {0x1000, 0x109F},   // Myanmar
    {0x1780, 0x17FF},   // Khmer
    {0x19E0, 0x19FF},   // Khmer symbols
    {0x2E80, 0x2FDF},   // CJK radicals
    {0x3005, 0x3007},
    {0x3021, 0x3029},
    {0x3038, 0x303B},
    {0x3040, 0x309F},   // Hiragana
    {0x30A0, 0x30FF},   // Katakana
    {0x31F0, 0x31FF},
    {0x3400, 0x4DBF},   // CJK ext A
    {0x4E00, 0x9FFF},   // CJK unified
    {0xA9E0, 0xA9FF},   // Myanmar ext B
    {0xAA60, 0xAA7F},   // Myanmar ext A
    {0xF900, 0xFAFF},   // CJK compatibility
    {0xFF66, 0xFF9F},   // halfwidth katakana
    {0x20000, 0x3134F}, // CJK ext B onward
};

// Marks that extend the preceding grapheme cluster.
constexpr Range kExtend[] = {
    {0x0300, 0x036F}, {0x0E31, 0x0E31}, {0x0E33, 0x0E3A}, {0x0E47, 0x0E4E},
    {0x0EB1, 0x0EB1}, {0x0EB3, 0x0EBC}, {0x0EC8, 0x0ECD}, {0x102B, 0x103E},
    {0x1056, 0x1059}, {0x105E, 0x1060}, {0x1062, 0x1064}, {0x1067, 0x106D},
    {0x1071, 0x1074}, {0x1082, 0x108D}, {0x108F, 0x108F}, {0x109A, 0x109D},
    {0x17B4, 0x17D3}, {0x17DD, 0x17DD}, {0x1AB0, 0x1AFF}, {0x1DC0, 0x1DFF},
    {0x200C, 0x200D}, {0x20D0, 0x20FF}, {0x3099, 0x309A}, {0xFE00, 0xFE0F},
    {0xFE20, 0xFE2F}, {0xFF9E, 0xFF9F}, {0xE0100, 0xE01EF},
};

template <std::size_t N>
bool InRanges(char32_t cp, const Range (&ranges)[N]) {
  for (const auto& r : ranges) {
    if (cp >= r.lo && cp <= r.hi) return true;
  }
  return false;
}

bool IsSpace(char32_t cp) {
  return cp == ' ' || (cp >= 0x09 && cp <= 0x0D) || cp == 0x85 || cp == 0xA0 || cp == 0x1680 ||
         (cp >= 0x2000 && cp <= 0x200A) || cp == 0x2028 || cp == 0x2029 || cp == 0x202F ||
         cp == 0x205F || cp == 0x3000;
}

constexpr char32_t kZwj = 0x200D;
constexpr char32_t kMyanmarVirama = 0x1039;
constexpr char32_t kKhmerCoeng = 0x17D2;

}  // namespace

std::vector<char32_t> DecodeUtf8(std::string_view text) {
  std::vector<char32_t> out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const auto b0 = static_cast<unsigned char>(text[i]);
    std::size_t len = 0;
    char32_t cp = 0;
    if (b0 < 0x80) {
      len = 1;
      cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    }
    bool ok = len > 0 && i + len <= text.size();
    for (std::size_t k = 1; ok && k < len; ++k) {
      const auto b = static_cast<unsigned char>(text[i + k]);
      if ((b & 0xC0) != 0x80) {
        ok = false;
      } else {
        cp = (cp << 6) | (b & 0x3F);
      }
    }
    if (ok && (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))) ok = false;
    if (!ok) {
      out.push_back(0xFFFD);
      i += 1;
    } else {
      out.push_back(cp);
      i += len;
    }
  }
  return out;
}

void AppendUtf8(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool IsUnspacedScript(char32_t cp) { return InRanges(cp, kUnspaced) && !InRanges(cp, kExtend); }

std::vector<std::string> Tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  bool current_is_cluster = false;
  bool glue_next = false;  // after ZWJ, virama or coeng
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
    current_is_cluster = false;
  };
  for (char32_t cp : DecodeUtf8(text)) {
    if (IsSpace(cp)) {
      flush();
      glue_next = false;
      continue;
    }
    const bool extend = InRanges(cp, kExtend);
    if ((extend || glue_next) && !current.empty()) {
      AppendUtf8(cp, current);
      glue_next = cp == kZwj || cp == kMyanmarVirama || cp == kKhmerCoeng;
      continue;
    }
    glue_next = cp == kZwj || cp == kMyanmarVirama || cp == kKhmerCoeng;
    if (IsUnspacedScript(cp)) {
      flush();
      AppendUtf8(cp, current);
      current_is_cluster = true;
    } else {
      if (current_is_cluster) flush();
      AppendUtf8(cp, current);
    }
  }
  flush();
  return tokens;
}

std::size_t SegmentTokens(std::string_view text, const LangCode& /*lang*/) {
  return Tokenize(text).size();
}

}  // namespace xsf
