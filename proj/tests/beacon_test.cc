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

#include "bsid/crypto.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace bsid {
namespace {

using ::bsid::testing::HasKind;

Beacon RandomBeacon(Drbg& rng) {
  Beacon b;
  b.flags = rng.Next<3>();
  b.ephid = rng.Next<kEphIdSize>();
  b.auth = rng.Next<kAuthTagSize>();
  return b;
}

TEST(BeaconTest, AllZeroBeacon) {
  Beacon b;
  b.flags = {0, 0, 0};
  ASSERT_OK_AND_ASSIGN(BeaconWire wire, EncodeBeacon(b));
  ASSERT_EQ(wire.size(), 31u);
  for (size_t i = 0; i < wire.size(); ++i) {
    EXPECT_EQ(wire[i], i == 3 ? kBeaconVersion : 0) << i;
  }
}

TEST(BeaconTest, RoundTrip) {
  Drbg rng = Drbg::FromUint64(5);
  for (int i = 0; i < 1000; ++i) {
    const Beacon b = RandomBeacon(rng);
    ASSERT_OK_AND_ASSIGN(BeaconWire wire, EncodeBeacon(b));
    ASSERT_EQ(wire.size(), kBeaconSize);
    ASSERT_OK_AND_ASSIGN(Beacon back, DecodeBeacon(wire));
    ASSERT_EQ(back, b);
  }
}

TEST(BeaconTest, FieldOffsets) {
  Beacon b;
  for (size_t i = 0; i < kEphIdSize; ++i)
    b.ephid[i] = static_cast<uint8_t>(0x10 + i);
  for (size_t i = 0; i < kAuthTagSize; ++i)
    b.auth[i] = static_cast<uint8_t>(0x80 + i);
  ASSERT_OK_AND_ASSIGN(BeaconWire wire, EncodeBeacon(b));
  EXPECT_EQ(wire[0], 0x02);
  EXPECT_EQ(wire[1], 0x01);
  EXPECT_EQ(wire[2], 0x06);
  EXPECT_EQ(wire[3], kBeaconVersion);
  for (size_t i = 0; i < kEphIdSize; ++i) EXPECT_EQ(wire[4 + i], 0x10 + i);
  for (size_t i = 0; i < kAuthTagSize; ++i) EXPECT_EQ(wire[17 + i], 0x80 + i);
  EXPECT_EQ(wire[30], 0);
}

TEST(BeaconTest, DecodeErrors) {
  ASSERT_OK_AND_ASSIGN(BeaconWire wire, EncodeBeacon(Beacon{}));
  EXPECT_TRUE(HasKind(DecodeBeacon(ByteSpan(wire).first(30)),
                      absl::StatusCode::kInvalidArgument, "malformed"));
  Bytes longer(wire.begin(), wire.end());
  longer.push_back(0);
  EXPECT_TRUE(HasKind(DecodeBeacon(longer), absl::StatusCode::kInvalidArgument,
                      "malformed"));

  BeaconWire bad_version = wire;
  bad_version[3] = 0xFF;
  EXPECT_TRUE(HasKind(DecodeBeacon(bad_version),
                      absl::StatusCode::kUnimplemented, "unsupported-version"));

  BeaconWire bad_reserved = wire;
  bad_reserved[30] = 1;
  EXPECT_TRUE(HasKind(DecodeBeacon(bad_reserved),
                      absl::StatusCode::kInvalidArgument, "malformed"));
}

TEST(BeaconTest, EncodeRejectsNonZeroReserved) {
  Beacon b;
  b.reserved = 7;
  EXPECT_TRUE(HasKind(EncodeBeacon(b), absl::StatusCode::kInvalidArgument,
                      "invalid-beacon"));
}

}  // namespace
}  // namespace bsid
