/* Copyright 2026 The MVCNN Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Little-endian byte buffer helpers shared by the on-disk and wire formats.

#ifndef MVCNN_BINARY_IO_H_
#define MVCNN_BINARY_IO_H_

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <span>
#include <string_view>
#include <type_traits>
#include <vector>

#include "mvcnn/error.h"

namespace mvcnn {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

class ByteWriter {
 public:
  template <typename T>
    requires std::is_arithmetic_v<T>
  void put(T value) {
    const auto* p = reinterpret_cast<const unsigned char*>(&value);
    bytes_.insert(bytes_.end(), p, p + sizeof(T));
  }

  void put_magic(std::string_view magic) {
    bytes_.insert(bytes_.end(), magic.begin(), magic.end());
  }

  void put_bytes(std::span<const unsigned char> data) {
    bytes_.insert(bytes_.end(), data.begin(), data.end());
  }

  const std::vector<unsigned char>& bytes() const { return bytes_; }
  std::vector<unsigned char> take() { return std::move(bytes_); }

 private:
  std::vector<unsigned char> bytes_;
};

// Reads values in order; running past the end throws `truncated_code`.
class ByteReader {
 public:
  explicit ByteReader(std::span<const unsigned char> data,
                      ErrorCode truncated_code = ErrorCode::kTruncated)
      : data_(data), truncated_code_(truncated_code) {}

  template <typename T>
    requires std::is_arithmetic_v<T>
  T get() {
    require(sizeof(T));
    T value;
    std::memcpy(&value, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }

  bool magic_matches(std::string_view magic) {
    require(magic.size());
    const bool ok =
        std::memcmp(data_.data() + pos_, magic.data(), magic.size()) == 0;
    pos_ += magic.size();
    return ok;
  }

  std::span<const unsigned char> get_bytes(std::size_t n) {
    require(n);
    auto out = data_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

  void skip(std::size_t n) { get_bytes(n); }
  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  void require(std::size_t n) const {
    if (data_.size() - pos_ < n) {
      throw Error(truncated_code_, "unexpected end of data at byte " +
                                       std::to_string(pos_));
    }
  }

  std::span<const unsigned char> data_;
  std::size_t pos_ = 0;
  ErrorCode truncated_code_;
};

std::vector<unsigned char> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path,
                      std::span<const unsigned char> bytes);

}  // namespace mvcnn

#endif  // MVCNN_BINARY_IO_H_
