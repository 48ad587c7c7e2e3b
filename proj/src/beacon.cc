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

#include "bsid/beacon.h"

#include <algorithm>

#include "absl/strings/str_cat.h"

namespace bsid {

namespace {
constexpr size_t kVersionOffset = 3;
constexpr size_t kEphIdOffset = 4;
constexpr size_t kAuthOffset = kEphIdOffset + kEphIdSize;
constexpr size_t kReservedOffset = kAuthOffset + kAuthTagSize;
static_assert(kReservedOffset == kBeaconSize - 1);
}  // namespace

absl::StatusOr<BeaconWire> EncodeBeacon(const Beacon& beacon) {
  if (beacon.reserved != 0) {
    return absl::InvalidArgumentError("invalid-beacon: reserved byte is not 0");
  }
  BeaconWire wire{};
  std::copy(beacon.flags.begin(), beacon.flags.end(), wire.begin());
  wire[kVersionOffset] = beacon.version;
  std::copy(beacon.ephid.begin(), beacon.ephid.end(),
            wire.begin() + kEphIdOffset);
  std::copy(beacon.auth.begin(), beacon.auth.end(), wire.begin() + kAuthOffset);
  wire[kReservedOffset] = 0;
  return wire;
}

absl::StatusOr<Beacon> DecodeBeacon(ByteSpan wire) {
  if (wire.size() != kBeaconSize) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed: beacon is ", wire.size(), " bytes, not 31"));
  }
  if (wire[kVersionOffset] != kBeaconVersion) {
    return absl::UnimplementedError(absl::StrCat(
        "unsupported-version: ", static_cast<int>(wire[kVersionOffset])));
  }
  if (wire[kReservedOffset] != 0) {
    return absl::InvalidArgumentError("malformed: reserved byte is not 0");
  }
  Beacon b;
  std::copy_n(wire.begin(), 3, b.flags.begin());
  b.version = wire[kVersionOffset];
  std::copy_n(wire.begin() + kEphIdOffset, kEphIdSize, b.ephid.begin());
  std::copy_n(wire.begin() + kAuthOffset, kAuthTagSize, b.auth.begin());
  return b;
}

}  // namespace bsid
