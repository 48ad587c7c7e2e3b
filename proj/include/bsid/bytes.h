// Copyright 2026 The bsid Authors
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

#ifndef BSID_BYTES_H_
#define BSID_BYTES_H_

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"

namespace bsid {

inline constexpr size_t kEphIdSize = 13;
inline constexpr size_t kAuthTagSize = 13;
inline constexpr size_t kKeySize = 32;
inline constexpr size_t kBaselineEphIdSize = 16;

using Bytes = std::vector<uint8_t>;
using ByteSpan = std::span<const uint8_t>;

// 32-byte secrets: seeds, TESLA keys, PRF outputs and SHA-256 digests.
using Key32 = std::array<uint8_t, kKeySize>;
using Hash256 = std::array<uint8_t, 32>;
using EphId = std::array<uint8_t, kEphIdSize>;
using AuthTag = std::array<uint8_t, kAuthTagSize>;
using BaselineEphId = std::array<uint8_t, kBaselineEphIdSize>;

std::string ToHex(ByteSpan data);
absl::StatusOr<Bytes> FromHex(absl::string_view hex);

// Parses exactly N bytes of hex into a fixed-size array.
template <size_t N>
absl::StatusOr<std::array<uint8_t, N>> FixedFromHex(absl::string_view hex);

template <size_t N>
ByteSpan AsSpan(const std::array<uint8_t, N>& a) {
  return ByteSpan(a.data(), a.size());
}

inline ByteSpan AsSpan(absl::string_view s) {
  return ByteSpan(reinterpret_cast<const uint8_t*>(s.data()), s.size());
}

// Big-endian serializer used by every wire and file format in the project.
absl::Status WriteFileBytes(const std::string& path, ByteSpan data);
absl::StatusOr<Bytes> ReadFileBytes(const std::string& path);

class ByteWriter {
 public:
  void U8(uint8_t v) { out_.push_back(v); }
  void U16(uint16_t v);
  void U32(uint32_t v);
  void U64(uint64_t v);
  void Append(ByteSpan data) {
    out_.insert(out_.end(), data.begin(), data.end());
  }

  const Bytes& bytes() const& { return out_; }
  Bytes&& bytes() && { return std::move(out_); }

 private:
  Bytes out_;
};

// Bounds-checked big-endian reader. Every accessor fails with
// InvalidArgument once the input is exhausted.
class ByteReader {
 public:
  explicit ByteReader(ByteSpan data) : data_(data) {}

  absl::StatusOr<uint8_t> U8();
  absl::StatusOr<uint16_t> U16();
  absl::StatusOr<uint32_t> U32();
  absl::StatusOr<uint64_t> U64();
  absl::StatusOr<ByteSpan> Take(size_t n);

  template <size_t N>
  absl::StatusOr<std::array<uint8_t, N>> Fixed() {
    auto span = Take(N);
    if (!span.ok()) return span.status();
    std::array<uint8_t, N> out;
    std::copy(span->begin(), span->end(), out.begin());
    return out;
  }

  size_t remaining() const { return data_.size() - pos_; }
  bool done() const { return pos_ == data_.size(); }

 private:
  ByteSpan data_;
  size_t pos_ = 0;
};

template <size_t N>
absl::StatusOr<std::array<uint8_t, N>> FixedFromHex(absl::string_view hex) {
  auto bytes = FromHex(hex);
  if (!bytes.ok()) return bytes.status();
  if (bytes->size() != N) {
    return absl::InvalidArgumentError("hex value has wrong length");
  }
  std::array<uint8_t, N> out;
  std::copy(bytes->begin(), bytes->end(), out.begin());
  return out;
}

}  // namespace bsid

#endif  // BSID_BYTES_H_
