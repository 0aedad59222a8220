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

#include "ovc/binary_io.hpp"

#include <fstream>
#include <iterator>
#include <system_error>

namespace ovc {

void ByteWriter::ShortString(std::string_view s) {
  if (s.size() > 0xFFFF) {
    throw ValidationError("string of " + std::to_string(s.size()) +
                          " bytes exceeds the u16 length prefix");
  }
  U16(static_cast<std::uint16_t>(s.size()));
  Raw(s);
}

void ByteReader::Require(std::size_t n) const {
  if (n > remaining()) {
    throw CorruptionError(context_ + ": truncated at byte " +
                          std::to_string(pos_) + " (needed " +
                          std::to_string(n) + ", have " +
                          std::to_string(remaining()) + ")");
  }
}

std::uint64_t ByteReader::Le(std::size_t n) {
  Require(n);
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < n; ++i) {
    v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
  }
  pos_ += n;
  return v;
}

std::string ByteReader::Raw(std::size_t n) {
  Require(n);
  std::string s(reinterpret_cast<const char*>(bytes_.data()) + pos_, n);
  pos_ += n;
  return s;
}

std::vector<std::uint8_t> ReadFileBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failure on '" + path.string() + "'");
  return bytes;
}

std::string ReadTextFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failure on '" + path.string() + "'");
  return text;
}

void WriteFileAtomic(const std::filesystem::path& path, std::string_view data) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    out.flush();
    if (!out) throw IoError("write failure on '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move output into place at '" + path.string() + "'");
  }
}

void WriteFileAtomic(const std::filesystem::path& path,
                     const std::vector<std::uint8_t>& data) {
  WriteFileAtomic(path, std::string_view(reinterpret_cast<const char*>(data.data()),
                                         data.size()));
}

}  // namespace ovc
