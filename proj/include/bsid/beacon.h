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

// 31-byte advertisement: 3 bytes of BLE flags and a 28-byte payload.
//
//   offset  0  flags[3]
//   offset  3  version
//   offset  4  ephid[13]
//   offset 17  auth[13]
//   offset 30  reserved (0)

#ifndef BSID_BEACON_H_
#define BSID_BEACON_H_

#include <array>
#include <cstdint>

#include "absl/status/statusor.h"
#include "bsid/bytes.h"

namespace bsid {

inline constexpr size_t kBeaconSize = 31;
inline constexpr size_t kBeaconPayloadSize = 28;
inline constexpr uint8_t kBeaconVersion = 0x01;
inline constexpr std::array<uint8_t, 3> kDefaultBeaconFlags = {0x02, 0x01,
                                                               0x06};

using BeaconWire = std::array<uint8_t, kBeaconSize>;

struct Beacon {
  std::array<uint8_t, 3> flags = kDefaultBeaconFlags;
  uint8_t version = kBeaconVersion;
  EphId ephid{};
  AuthTag auth{};
  uint8_t reserved = 0;

  friend bool operator==(const Beacon&, const Beacon&) = default;
};

// Fails with invalid-beacon when reserved is nonzero.
absl::StatusOr<BeaconWire> EncodeBeacon(const Beacon& beacon);

// Fails with malformed (length != 31 or reserved != 0) or
// unsupported-version.
absl::StatusOr<Beacon> DecodeBeacon(ByteSpan wire);

}  // namespace bsid

#endif  // BSID_BEACON_H_
