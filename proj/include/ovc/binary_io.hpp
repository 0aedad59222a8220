// Copyright 2026 The OVC Authors.
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

#ifndef OVC_BINARY_IO_HPP_
#define OVC_BINARY_IO_HPP_

#include <cstddef>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ovc/error.hpp"

namespace ovc {

// Appends little-endian encoded values to a byte buffer.
class ByteWriter {
 public:
  void U8(std::uint8_t v) { bytes_.push_back(v); }
  void U16(std::uint16_t v) { Le(v, 2); }
  void U32(std::uint32_t v) { Le(v, 4); }
  void U64(std::uint64_t v) { Le(v, 8); }
  void F32(float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    Le(bits, 4);
  }
  void Raw(std::string_view s) { bytes_.insert(bytes_.end(), s.begin(), s.end()); }

  // u16 length prefix followed by the bytes.
  void ShortString(std::string_view s);

  const std::vector<std::uint8_t>& bytes() const { return bytes_; }
  std::vector<std::uint8_t> Release() { return std::move(bytes_); }

 private:
  void Le(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> bytes_;
};

// Bounds-checked little-endian reader. Any read past the end raises
// CorruptionError naming `context`.
class ByteReader {
 public:
  ByteReader(const std::vector<std::uint8_t>& bytes, std::string context)
      : bytes_(bytes), context_(std::move(context)) {}

  std::uint8_t U8() { return static_cast<std::uint8_t>(Le(1)); }
  std::uint16_t U16() { return static_cast<std::uint16_t>(Le(2)); }
  std::uint32_t U32() { return static_cast<std::uint32_t>(Le(4)); }
  std::uint64_t U64() { return Le(8); }
  float F32() {
    const auto bits = static_cast<std::uint32_t>(Le(4));
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
  }
  std::string Raw(std::size_t n);
  std::string ShortString() { return Raw(U16()); }

  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }
  bool AtEnd() const { return pos_ == bytes_.size(); }
  void Require(std::size_t n) const;

 private:
  std::uint64_t Le(std::size_t n);

  const std::vector<std::uint8_t>& bytes_;
  std::string context_;
  std::size_t pos_ = 0;
};

std::vector<std::uint8_t> ReadFileBytes(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it over `path`, so readers
// never observe a partially written file.
void WriteFileAtomic(const std::filesystem::path& path, std::string_view data);
void WriteFileAtomic(const std::filesystem::path& path,
                     const std::vector<std::uint8_t>& data);

std::string ReadTextFile(const std::filesystem::path& path);

}  // namespace ovc

#endif  // OVC_BINARY_IO_HPP_
