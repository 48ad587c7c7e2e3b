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

#include "bsid/bytes.h"

#include <fstream>
#include <iterator>

#include "absl/strings/ascii.h"
#include "absl/strings/escaping.h"
#include "absl/strings/str_cat.h"

namespace bsid {

std::string ToHex(ByteSpan data) {
  return absl::BytesToHexString(absl::string_view(
      reinterpret_cast<const char*>(data.data()), data.size()));
}

absl::StatusOr<Bytes> FromHex(absl::string_view hex) {
  if (hex.size() % 2 != 0) {
    return absl::InvalidArgumentError("malformed: hex string has odd length");
  }
  for (char c : hex) {
    if (!absl::ascii_isxdigit(static_cast<unsigned char>(c))) {
      return absl::InvalidArgumentError(absl::StrCat(
          "malformed: invalid hex character '", std::string(1, c), "'"));
    }
  }
  std::string raw = absl::HexStringToBytes(absl::string_view(hex));
  return Bytes(raw.begin(), raw.end());
}

void ByteWriter::U16(uint16_t v) {
  out_.push_back(static_cast<uint8_t>(v >> 8));
  out_.push_back(static_cast<uint8_t>(v));
}

void ByteWriter::U32(uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) {
    out_.push_back(static_cast<uint8_t>(v >> shift));
  }
}

void ByteWriter::U64(uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) {
    out_.push_back(static_cast<uint8_t>(v >> shift));
  }
}

absl::StatusOr<ByteSpan> ByteReader::Take(size_t n) {
  if (remaining() < n) {
    return absl::InvalidArgumentError(absl::StrCat(
        "truncated input: need ", n, " bytes, have ", remaining()));
  }
  ByteSpan out = data_.subspan(pos_, n);
  pos_ += n;
  return out;
}

absl::StatusOr<uint8_t> ByteReader::U8() {
  auto s = Take(1);
  if (!s.ok()) return s.status();
  return (*s)[0];
}

absl::StatusOr<uint16_t> ByteReader::U16() {
  auto s = Take(2);
  if (!s.ok()) return s.status();
  return static_cast<uint16_t>(((*s)[0] << 8) | (*s)[1]);
}

absl::StatusOr<uint32_t> ByteReader::U32() {
  auto s = Take(4);
  if (!s.ok()) return s.status();
  uint32_t v = 0;
  for (uint8_t b : *s) v = (v << 8) | b;
  return v;
}

absl::StatusOr<uint64_t> ByteReader::U64() {
  auto s = Take(8);
  if (!s.ok()) return s.status();
  uint64_t v = 0;
  for (uint8_t b : *s) v = (v << 8) | b;
  return v;
}

absl::Status WriteFileBytes(const std::string& path, ByteSpan data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size()));
  if (!out) return absl::UnavailableError(absl::StrCat("cannot write ", path));
  return absl::OkStatus();
}

absl::StatusOr<Bytes> ReadFileBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot read ", path));
  return Bytes(std::istreambuf_iterator<char>(in),
               std::istreambuf_iterator<char>());
}

}  // namespace bsid
