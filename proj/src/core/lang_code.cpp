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

#include "xsum_forge/lang_code.hpp"

#include "xsum_forge/error.hpp"

namespace xsf {

std::string LangCode::Normalize(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    if (c >= 'A' && c <= 'Z') {
      out.push_back(static_cast<char>(c - 'A' + 'a'));
    } else if (c == '_') {
      out.push_back('-');
    } else {
      out.push_back(c);
    }
  }
  return out;
}

bool LangCode::IsValid(std::string_view normalized) {
  if (normalized.size() < 2 || normalized.size() > 15) return false;
  for (char c : normalized) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-';
    if (!ok) return false;
  }
  return true;
}

LangCode LangCode::Parse(std::string_view raw) {
  std::string norm = Normalize(raw);
  if (!IsValid(norm)) {
    Fail(ErrorCode::kInvalidArgument,
         "invalid language code '" + std::string(raw) + "'");
  }
  return LangCode(std::move(norm));
}

}  // namespace xsf
