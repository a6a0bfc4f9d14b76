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
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <string_view>

namespace xsf {

// Writes to a sibling temp file and renames over the target on Commit().
// An uncommitted file is removed on destruction.
class AtomicFile {
 public:
  explicit AtomicFile(std::filesystem::path target);
  ~AtomicFile();
  AtomicFile(const AtomicFile&) = delete;
  AtomicFile& operator=(const AtomicFile&) = delete;

  std::ostream& stream() { return out_; }
  void Commit();

 private:
  std::filesystem::path target_;
  std::filesystem::path temp_;
  std::ofstream out_;
  bool committed_ = false;
};

void WriteFileAtomic(const std::filesystem::path& path, std::string_view content);

// Throws kNotFound naming `what` when the path does not exist.
void RequireInput(const std::filesystem::path& path, std::string_view what);

std::string ReadFile(const std::filesystem::path& path);

// Calls fn(line, 1-based line number) for every line; a trailing newline does
// not produce an extra empty line.
void ForEachLine(const std::filesystem::path& path,
                 const std::function<void(std::string_view, std::size_t)>& fn);

std::string Sha256Hex(std::string_view bytes);
std::string Sha256File(const std::filesystem::path& path);

// Fixed six-decimal rendering, locale independent.
std::string FormatFixed6(double value);
// Shortest round-trip rendering.
std::string FormatShortest(double value);

}  // namespace xsf
