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

#include "xsum_forge/fsutil.hpp"

#include <openssl/sha.h>

#include <array>
#include <charconv>
#include <sstream>

#include "xsum_forge/error.hpp"

namespace xsf {

namespace fs = std::filesystem;

AtomicFile::AtomicFile(fs::path target) : target_(std::move(target)) {
  temp_ = target_;
  temp_ += ".tmp";
  if (target_.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target_.parent_path(), ec);
  }
  out_.open(temp_, std::ios::binary | std::ios::trunc);
  if (!out_) Fail(ErrorCode::kIo, "cannot open " + temp_.string() + " for writing");
}

AtomicFile::~AtomicFile() {
  if (!committed_) {
    out_.close();
    std::error_code ec;
    fs::remove(temp_, ec);
  }
}

void AtomicFile::Commit() {
  out_.flush();
  if (!out_) Fail(ErrorCode::kIo, "write failed for " + temp_.string());
  out_.close();
  std::error_code ec;
  fs::rename(temp_, target_, ec);
  if (ec) Fail(ErrorCode::kIo, "cannot rename onto " + target_.string() + ": " + ec.message());
  committed_ = true;
}

void WriteFileAtomic(const fs::path& path, std::string_view content) {
  AtomicFile file(path);
  file.stream().write(content.data(), static_cast<std::streamsize>(content.size()));
  file.Commit();
}

void RequireInput(const fs::path& path, std::string_view what) {
  std::error_code ec;
  if (!fs::exists(path, ec)) {
    Fail(ErrorCode::kNotFound,
         "missing " + std::string(what) + ": " + path.string());
  }
}

std::string ReadFile(const fs::path& path) {
  RequireInput(path, "file");
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void ForEachLine(const fs::path& path,
                 const std::function<void(std::string_view, std::size_t)>& fn) {
  RequireInput(path, "file");
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot open " + path.string());
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    fn(line, number);
  }
}

namespace {

std::string ToHex(const unsigned char* digest, std::size_t n) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(n * 2, '0');
  for (std::size_t i = 0; i < n; ++i) {
    out[2 * i] = kHex[digest[i] >> 4];
    out[2 * i + 1] = kHex[digest[i] & 0xF];
  }
  return out;
}

}  // namespace

std::string Sha256Hex(std::string_view bytes) {
  std::array<unsigned char, SHA256_DIGEST_LENGTH> digest{};
  SHA256(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size(),
         digest.data());
  return ToHex(digest.data(), digest.size());
}

std::string Sha256File(const fs::path& path) { return Sha256Hex(ReadFile(path)); }

std::string FormatFixed6(double value) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                 std::chars_format::fixed, 6);
  if (ec != std::errc()) Fail(ErrorCode::kInternal, "number formatting failed");
  std::string out(buf.data(), end);
  if (out == "-0.000000") out = "0.000000";
  return out;
}

std::string FormatShortest(double value) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) Fail(ErrorCode::kInternal, "number formatting failed");
  return std::string(buf.data(), end);
}

}  // namespace xsf
