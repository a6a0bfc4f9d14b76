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

#include <compare>
#include <string>
#include <string_view>

namespace xsf {

// Normalized language tag: lowercase ASCII, [a-z0-9-], 2 to 15 chars.
// "zh_CN" and "zh-CN" both normalize to "zh-cn".
class LangCode {
 public:
  LangCode() = default;

  // Throws Error(kInvalidArgument) when the normalized form is not a valid tag.
  static LangCode Parse(std::string_view raw);
  static bool IsValid(std::string_view normalized);
  static std::string Normalize(std::string_view raw);

  const std::string& str() const noexcept { return code_; }
  bool empty() const noexcept { return code_.empty(); }

  friend auto operator<=>(const LangCode&, const LangCode&) = default;
  friend bool operator==(const LangCode&, const LangCode&) = default;

 private:
  explicit LangCode(std::string code) : code_(std::move(code)) {}
  std::string code_;
};

}  // namespace xsf
