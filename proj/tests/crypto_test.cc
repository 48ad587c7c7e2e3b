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

#include "bsid/crypto.h"

#include <set>

#include "gtest/gtest.h"
#include "test_util.h"

namespace bsid {
namespace {

using ::bsid::testing::HasKind;
using ::bsid::testing::KeyOf;

// Frozen values from tests/oracles/vectors.py.
constexpr char kPrfZeroBroadcastKey[] =
    "7c0e632124721e388416257f1697bbdfac09c694ff7bb9a6a6b41fd6770b5f72";
constexpr char kPrgZero13[] = "6db65fd59fd356f6729140571b";
constexpr char kPrgZero70[] =
    "6db65fd59fd356f6729140571b5bcd6bb3b83492a16e1bf0a3884442fc3c8a0e2158a890"
    "6d5e2c2be001bac943ab9cab4063536e1c546b40221fdf8db031a4bbe15f37442363";
constexpr char kAuthTagZero[] = "9a8d4d9a2d9d68f48ebe674e8e";

TEST(PrfTest, FrozenVector) {
  EXPECT_EQ(ToHex(AsSpan(Prf(Key32{}, "broadcast key"))), kPrfZeroBroadcastKey);
}

TEST(PrfTest, Deterministic) {
  const Key32 k = KeyOf(7);
  EXPECT_EQ(Prf(k, "broadcast key"), Prf(k, "broadcast key"));
}

TEST(PrfTest, LabelsSeparate) {
  const Key32 k = KeyOf(7);
  EXPECT_NE(Prf(k, "broadcast key 1"), Prf(k, "broadcast key 2"));
}

TEST(PrfTest, SpanKeyMustBe32Bytes) {
  const Bytes short_key(31, 0);
  EXPECT_TRUE(HasKind(Prf(ByteSpan(short_key), "x"),
                      absl::StatusCode::kInvalidArgument, "invalid-argument"));
  const Bytes key(32, 0);
  ASSERT_OK_AND_ASSIGN(Key32 out, Prf(ByteSpan(key), "broadcast key"));
  EXPECT_EQ(ToHex(AsSpan(out)), kPrfZeroBroadcastKey);
}

TEST(PrgTest, FrozenVectors) {
  ASSERT_OK_AND_ASSIGN(Bytes out13, Prg(Key32{}, 13));
  EXPECT_EQ(ToHex(out13), kPrgZero13);
  ASSERT_OK_AND_ASSIGN(Bytes out70, Prg(Key32{}, 70));
  EXPECT_EQ(ToHex(out70), kPrgZero70);
}

TEST(PrgTest, PrefixConsistent) {
  const Key32 s = KeyOf(3);
  ASSERT_OK_AND_ASSIGN(Bytes a, Prg(s, 16));
  ASSERT_OK_AND_ASSIGN(Bytes b, Prg(s, 64));
  EXPECT_EQ(a, Bytes(b.begin(), b.begin() + 16));
}

TEST(PrgTest, SeedsSeparate) {
  ASSERT_OK_AND_ASSIGN(Bytes a, Prg(KeyOf(1), 32));
  ASSERT_OK_AND_ASSIGN(Bytes b, Prg(KeyOf(2), 32));
  EXPECT_NE(a, b);
}

TEST(PrgTest, ZeroLengthRejected) {
  EXPECT_TRUE(HasKind(Prg(Key32{}, 0), absl::StatusCode::kInvalidArgument,
                      "invalid-argument"));
}

TEST(AuthTagTest, FrozenVector) {
  EXPECT_EQ(ToHex(AsSpan(ComputeAuthTag(Key32{}, EphId{}))), kAuthTagZero);
}

TEST(AuthTagTest, DeterministicAndTruncated) {
  EphId id;
  id.fill(0x42);
  const AuthTag a = ComputeAuthTag(KeyOf(9), id);
  EXPECT_EQ(a, ComputeAuthTag(KeyOf(9), id));
  EXPECT_EQ(a.size(), 13u);
  const Hash256 full = HmacSha256(AsSpan(KeyOf(9)), AsSpan(id));
  EXPECT_TRUE(std::equal(a.begin(), a.end(), full.begin()));
}

TEST(AuthTagTest, PrecomputedTaggerMatchesHmac) {
  Drbg rng = Drbg::FromUint64(11);
  for (int trial = 0; trial < 50; ++trial) {
    const Key32 key = rng.NextKey();
    AuthTagger tagger(key);
    for (int j = 0; j < 20; ++j) {
      const EphId id = rng.Next<kEphIdSize>();
      ASSERT_EQ(tagger.Tag(id), ComputeAuthTag(key, id));
    }
  }
}

TEST(AeadTest, RoundTripAndTamper) {
  const Key32 key = KeyOf(5);
  const std::array<uint8_t, kAeadNonceSize> nonce{1, 2, 3};
  const Bytes msg = {1, 2, 3, 4, 5};
  Bytes sealed = AeadSeal(key, nonce, msg);
  EXPECT_EQ(sealed.size(), kAeadNonceSize + msg.size() + kAeadTagSize);
  ASSERT_OK_AND_ASSIGN(Bytes opened, AeadOpen(key, sealed));
  EXPECT_EQ(opened, msg);

  EXPECT_FALSE(AeadOpen(KeyOf(6), sealed).ok());
  sealed[kAeadNonceSize] ^= 1;
  EXPECT_FALSE(AeadOpen(key, sealed).ok());
  EXPECT_TRUE(HasKind(AeadOpen(key, ByteSpan(sealed).first(10)),
                      absl::StatusCode::kInvalidArgument, "malformed"));
}

TEST(DrbgTest, SeededStreamsRepeat) {
  Drbg a = Drbg::FromUint64(42);
  Drbg b = Drbg::FromUint64(42);
  for (int i = 0; i < 100; ++i) ASSERT_EQ(a.NextUint64(), b.NextUint64());
  Drbg c = Drbg::FromUint64(43);
  EXPECT_NE(Drbg::FromUint64(42).NextKey(), c.NextKey());
}

TEST(DrbgTest, UniformStaysInRange) {
  Drbg rng = Drbg::FromUint64(1);
  std::set<uint64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    const uint64_t v = rng.Uniform(10);
    ASSERT_LT(v, 10u);
    seen.insert(v);
  }
  EXPECT_EQ(seen.size(), 10u);
}

TEST(HexTest, RoundTripAndErrors) {
  const Bytes data = {0x00, 0xab, 0xff};
  EXPECT_EQ(ToHex(data), "00abff");
  ASSERT_OK_AND_ASSIGN(Bytes back, FromHex("00ABff"));
  EXPECT_EQ(back, data);
  EXPECT_FALSE(FromHex("abc").ok());
  EXPECT_FALSE(FromHex("zz").ok());
  EXPECT_FALSE(FixedFromHex<4>("00abff").ok());
}

TEST(ByteReaderTest, ReadsBigEndianAndStopsAtEnd) {
  ByteWriter w;
  w.U8(1);
  w.U16(0x0203);
  w.U32(0x04050607);
  w.U64(0x08090a0b0c0d0e0full);
  ByteReader r(w.bytes());
  EXPECT_EQ(*r.U8(), 1);
  EXPECT_EQ(*r.U16(), 0x0203);
  EXPECT_EQ(*r.U32(), 0x04050607u);
  EXPECT_EQ(*r.U64(), 0x08090a0b0c0d0e0full);
  EXPECT_TRUE(r.done());
  EXPECT_FALSE(r.U8().ok());
}

}  // namespace
}  // namespace bsid
