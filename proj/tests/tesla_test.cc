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

#include "bsid/tesla.h"

#include <set>
#include <thread>

#include "bsid/clock.h"
#include "bsid/key_release_udp.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace bsid {
namespace {

using ::bsid::testing::HasKind;
using ::bsid::testing::KeyOf;
using ::bsid::testing::Toy128;

const absl::Time kStart = absl::FromUnixSeconds(1'800'000'000);

// Frozen values from tests/oracles/vectors.py: zero seed, L = 3.
constexpr const char* kZeroChain[] = {
    "c4f77e2ec2b82fc8eea0ac12e8a088149bc5ded72bcf378c33df7bfc0af095f4",
    "4d734f4221bfd05afc9ab21722a1a1b251c547d31b79fe831328fb565295422f",
    "e3ad4c11ec2e6ebe0f8627f75e610fa57efabeb81070934cf8b9d70cdb04b7d4",
    "1eef37d7a1dab580b458f6bc3823f9cab399ba4c9b7c353f3c9b13261c585a7b",
};

TeslaSchedule DaySchedule(uint32_t length = kIntervalsPerDay) {
  TeslaSchedule s;
  s.start = kStart;
  s.length = length;
  return s;
}

TEST(ScheduleTest, ReleaseTimesAndIntervals) {
  const TeslaSchedule s = DaySchedule();
  EXPECT_EQ(s.ReleaseTime(1), kStart);
  EXPECT_EQ(s.ReleaseTime(3), kStart + absl::Minutes(10));
  EXPECT_EQ(s.IntervalAt(kStart - absl::Minutes(5)), 1u);
  EXPECT_EQ(s.IntervalAt(kStart - absl::Seconds(1)), 1u);
  EXPECT_EQ(s.IntervalAt(kStart), 2u);
  EXPECT_EQ(s.IntervalAt(kStart - absl::Minutes(5) - absl::Seconds(1)),
            std::nullopt);
  EXPECT_EQ(s.IntervalAt(s.ReleaseTime(288)), std::nullopt);
  EXPECT_EQ(s.IntervalAt(s.ReleaseTime(288) - absl::Seconds(1)), 288u);
  // The guard window: interval i is acceptable only until t_i - sync_error.
  EXPECT_TRUE(s.Acceptable(2, kStart + absl::Minutes(5) - absl::Seconds(11)));
  EXPECT_FALSE(s.Acceptable(2, kStart + absl::Minutes(5) - absl::Seconds(10)));
}

TEST(ChainTest, FrozenVectors) {
  TeslaSchedule s = DaySchedule(3);
  ASSERT_OK_AND_ASSIGN(TeslaChain chain, TeslaChain::Generate(Key32{}, s));
  for (uint32_t i = 0; i <= 3; ++i) {
    ASSERT_OK_AND_ASSIGN(Key32 k, chain.key(i));
    EXPECT_EQ(ToHex(AsSpan(k)), kZeroChain[i]) << i;
  }
  EXPECT_EQ(ToHex(AsSpan(chain.anchor())), kZeroChain[0]);
}

TEST(ChainTest, LengthOneAndFullDay) {
  ASSERT_OK_AND_ASSIGN(TeslaChain one,
                       TeslaChain::Generate(KeyOf(1), DaySchedule(1)));
  EXPECT_EQ(Sha256(AsSpan(one.key(1).value())), one.anchor());

  ASSERT_OK_AND_ASSIGN(TeslaChain day,
                       TeslaChain::Generate(KeyOf(1), DaySchedule()));
  ASSERT_EQ(day.length(), 288u);
  // Recursive oracle: hash k_288 down 288 times.
  Key32 k = Prf(KeyOf(1), "tesla-chain");
  EXPECT_EQ(day.key(288).value(), k);
  for (int step = 0; step < 288; ++step) k = Sha256(AsSpan(k));
  EXPECT_EQ(k, day.anchor());

  ASSERT_OK_AND_ASSIGN(TeslaChain again,
                       TeslaChain::Generate(KeyOf(1), DaySchedule()));
  for (uint32_t i = 0; i <= 288; ++i)
    ASSERT_EQ(again.key(i).value(), day.key(i).value());
}

TEST(ChainTest, RejectsBadSchedules) {
  EXPECT_TRUE(HasKind(TeslaChain::Generate(KeyOf(1), DaySchedule(0)),
                      absl::StatusCode::kInvalidArgument, "invalid-argument"));
  TeslaSchedule s = DaySchedule();
  s.sync_error = s.period;
  EXPECT_TRUE(HasKind(TeslaChain::Generate(KeyOf(1), s),
                      absl::StatusCode::kInvalidArgument, "invalid-argument"));
}

TEST(ReleaseTest, NeverBeforeReleaseTime) {
  ASSERT_OK_AND_ASSIGN(TeslaChain chain,
                       TeslaChain::Generate(KeyOf(2), DaySchedule()));
  ManualClock clock(kStart - absl::Minutes(5));
  uint32_t released = 0;
  // Walk the day in 7-second steps; every key appears exactly at t_i.
  while (clock.Now() <= chain.schedule().ReleaseTime(288) + absl::Minutes(1)) {
    for (uint32_t i = 1; i <= 288; ++i) {
      auto k = ReleaseKey(chain, i, clock.Now());
      const bool due = clock.Now() >= chain.schedule().ReleaseTime(i);
      ASSERT_EQ(k.ok(), due) << i;
      if (!due) {
        ASSERT_TRUE(HasKind(k, absl::StatusCode::kUnavailable, "not-yet"));
        break;  // later keys are not due either
      }
      ASSERT_EQ(*k, chain.key(i).value());
      released = std::max(released, i);
    }
    clock.Advance(absl::Seconds(7));
  }
  EXPECT_EQ(released, 288u);
}

TEST(ReleaseTest, Boundaries) {
  ASSERT_OK_AND_ASSIGN(TeslaChain chain,
                       TeslaChain::Generate(KeyOf(2), DaySchedule()));
  const absl::Time t7 = chain.schedule().ReleaseTime(7);
  EXPECT_EQ(ReleaseKey(chain, 7, t7).value(), chain.key(7).value());
  EXPECT_TRUE(HasKind(ReleaseKey(chain, 7, t7 - absl::Seconds(1)),
                      absl::StatusCode::kUnavailable, "not-yet"));
  EXPECT_TRUE(HasKind(ReleaseKey(chain, 0, t7), absl::StatusCode::kOutOfRange,
                      "invalid-interval"));
  EXPECT_TRUE(HasKind(ReleaseKey(chain, 289, t7 + absl::Hours(48)),
                      absl::StatusCode::kOutOfRange, "invalid-interval"));
}

TEST(VerifyTest, AcceptsExactlySuffixConsistentKeys) {
  ASSERT_OK_AND_ASSIGN(TeslaChain chain,
                       TeslaChain::Generate(KeyOf(3), DaySchedule(40)));
  Drbg rng = Drbg::FromUint64(4);
  for (uint32_t j = 0; j + 10 <= 40; ++j) {
    const Key32 kj = chain.key(j).value();
    for (uint32_t gap = 1; gap <= 10; ++gap) {
      const uint32_t i = j + gap;
      EXPECT_TRUE(VerifyReleasedKey(chain.key(i).value(), i, j, kj));
      EXPECT_EQ(HashBack(chain.key(i).value(), gap), kj);
      // Right key, wrong claimed index.
      if (i + 1 <= 40) {
        EXPECT_FALSE(VerifyReleasedKey(chain.key(i + 1).value(), i, j, kj));
      }
      EXPECT_FALSE(VerifyReleasedKey(chain.key(i).value(), i + 1, j, kj));
      EXPECT_FALSE(VerifyReleasedKey(rng.NextKey(), i, j, kj));
    }
    EXPECT_FALSE(VerifyReleasedKey(kj, j, j, kj));
  }
}

class AuthServiceTest : public ::testing::Test {
 protected:
  AuthServiceTest()
      : keys_(Toy128()),
        chain_(TeslaChain::Generate(KeyOf(9), DaySchedule()).value()),
        clock_(kStart - absl::Hours(1)),
        service_(keys_.public_key(), chain_, clock_, 5) {}

  AuthRequest Request(uint8_t tag, uint32_t interval) {
    AuthRequest r;
    r.nonce.fill(tag);
    r.response_key = KeyOf(tag);
    r.ephid.fill(tag);
    r.sd = keys_.RawSign(PaddedMessage(r.ephid, keys_.public_key()).value());
    r.interval = interval;
    return r;
  }

  DayKeyPair keys_;
  TeslaChain chain_;
  ManualClock clock_;
  AuthService service_;
};

TEST_F(AuthServiceTest, IssuesTagUnderIntervalKey) {
  const AuthRequest req = Request(1, 7);
  ASSERT_OK_AND_ASSIGN(PublishedAuth entry, service_.Issue(req));
  EXPECT_EQ(entry.nonce, req.nonce);
  ASSERT_OK_AND_ASSIGN(AuthTag auth,
                       DecryptAuthenticator(entry, req.response_key));
  // Oracle: recompute k_7 by hashing the top key down.
  const Key32 k7 = HashBack(Prf(KeyOf(9), "tesla-chain"), 288 - 7);
  EXPECT_EQ(auth, ComputeAuthTag(k7, req.ephid));
  EXPECT_FALSE(DecryptAuthenticator(entry, KeyOf(99)).ok());
}

TEST_F(AuthServiceTest, Rejections) {
  ASSERT_OK(service_.Issue(Request(1, 7)));
  AuthRequest dup = Request(1, 8);
  dup.nonce.fill(0xEE);
  EXPECT_TRUE(HasKind(service_.Issue(dup), absl::StatusCode::kAlreadyExists,
                      "already-issued"));

  AuthRequest forged = Request(2, 7);
  forged.sd = forged.sd + BigNum(1);
  EXPECT_TRUE(HasKind(service_.Issue(forged),
                      absl::StatusCode::kUnauthenticated,
                      "invalid-credential"));

  EXPECT_TRUE(HasKind(service_.Issue(Request(3, 0)),
                      absl::StatusCode::kOutOfRange, "invalid-interval"));
  EXPECT_TRUE(HasKind(service_.Issue(Request(3, 289)),
                      absl::StatusCode::kOutOfRange, "invalid-interval"));

  AuthRequest same_nonce = Request(4, 7);
  same_nonce.nonce.fill(1);
  EXPECT_TRUE(HasKind(service_.Issue(same_nonce),
                      absl::StatusCode::kInvalidArgument, "invalid-argument"));
}

TEST_F(AuthServiceTest, RetrievalModes) {
  // Nonces 0x10, 0x11, ..., 0x17: the first nibble is shared by all eight,
  // the first 7 bits by pairs.
  for (uint8_t t = 0x10; t < 0x18; ++t)
    ASSERT_OK(service_.Issue(Request(t, t)));
  const std::vector<PublishedAuth> full = service_.RetrieveFull();
  ASSERT_EQ(full.size(), 8u);

  const Bytes prefix = {0x14};
  const std::vector<PublishedAuth> by_byte =
      service_.RetrievePartial(prefix, 8);
  ASSERT_EQ(by_byte.size(), 1u);
  EXPECT_EQ(by_byte[0].nonce[0], 0x14);
  EXPECT_EQ(service_.RetrievePartial(prefix, 4).size(), 8u);
  EXPECT_EQ(service_.RetrievePartial(prefix, 6).size(), 4u);
  EXPECT_EQ(service_.RetrievePartial(prefix, 0).size(), 8u);
  for (size_t bits : {0, 4, 6, 7, 8}) {
    for (const PublishedAuth& e : service_.RetrievePartial(prefix, bits)) {
      EXPECT_NE(std::find(full.begin(), full.end(), e), full.end());
    }
  }

  const AuthRequest req = Request(0x15, 0x15);
  auto entry = service_.RetrieveIndividual(req.nonce);
  ASSERT_TRUE(entry.has_value());
  ASSERT_OK_AND_ASSIGN(AuthTag auth,
                       DecryptAuthenticator(*entry, req.response_key));
  EXPECT_EQ(auth, ComputeAuthTag(chain_.key(0x15).value(), req.ephid));
  RequestNonce unknown;
  unknown.fill(0x99);
  EXPECT_FALSE(service_.RetrieveIndividual(unknown).has_value());
}

TEST_F(AuthServiceTest, SharedPrefixSubset) {
  // 8 entries; 3 of them share the first byte 0xAB.
  const std::vector<uint8_t> first = {0xAB, 0x01, 0xAB, 0x02,
                                      0x03, 0xAB, 0x04, 0x05};
  for (size_t i = 0; i < first.size(); ++i) {
    AuthRequest r = Request(static_cast<uint8_t>(0x40 + i), 5);
    r.nonce[0] = first[i];
    ASSERT_OK(service_.Issue(r));
  }
  const Bytes prefix = {0xAB};
  const auto partial = service_.RetrievePartial(prefix, 8);
  ASSERT_EQ(partial.size(), 3u);
  for (const PublishedAuth& e : partial) EXPECT_EQ(e.nonce[0], 0xAB);
}

TEST_F(AuthServiceTest, PublishedListRoundTrip) {
  for (uint8_t t = 1; t <= 3; ++t) ASSERT_OK(service_.Issue(Request(t, t)));
  const auto full = service_.RetrieveFull();
  ASSERT_OK_AND_ASSIGN(auto back,
                       DecodePublishedList(EncodePublishedList(full)));
  EXPECT_EQ(back, full);
  Bytes truncated = EncodePublishedList(full);
  truncated.pop_back();
  EXPECT_FALSE(DecodePublishedList(truncated).ok());
}

TEST_F(AuthServiceTest, MixIssuesEverythingValidInShuffledOrder) {
  Mix mix(3);
  for (uint8_t t = 1; t <= 20; ++t) mix.Submit(Request(t, t));
  AuthRequest bad = Request(21, 21);
  bad.sd = BigNum(5);
  mix.Submit(bad);
  EXPECT_EQ(mix.pending(), 21u);
  const Mix::FlushResult result = mix.Flush(service_);
  EXPECT_EQ(result.issued, 20u);
  EXPECT_EQ(result.rejected, 1u);
  EXPECT_EQ(mix.pending(), 0u);
  EXPECT_EQ(service_.RetrieveFull().size(), 20u);
}

TEST_F(AuthServiceTest, ServiceReleasesOnItsClock) {
  EXPECT_TRUE(HasKind(service_.ReleaseKey(1), absl::StatusCode::kUnavailable,
                      "not-yet"));
  clock_.Set(kStart);
  EXPECT_EQ(service_.ReleaseKey(1).value(), chain_.key(1).value());
}

TEST(KeyDatagramTest, EncodingAndHandling) {
  ASSERT_OK_AND_ASSIGN(TeslaChain chain,
                       TeslaChain::Generate(KeyOf(6), DaySchedule()));
  EXPECT_EQ(DecodeKeyRequest(EncodeKeyRequest(42)).value(), 42u);
  EXPECT_FALSE(DecodeKeyRequest(Bytes{0x01, 0x00}).ok());

  const absl::Time now = chain.schedule().ReleaseTime(5);
  auto reply = HandleKeyDatagram(chain, now, EncodeKeyRequest(5));
  ASSERT_TRUE(reply.has_value());
  ASSERT_OK_AND_ASSIGN(auto decoded, DecodeKeyResponse(*reply));
  EXPECT_EQ(decoded.first, 5u);
  EXPECT_EQ(decoded.second, chain.key(5).value());

  auto early = HandleKeyDatagram(chain, now, EncodeKeyRequest(6));
  ASSERT_TRUE(early.has_value());
  EXPECT_TRUE(HasKind(DecodeKeyResponse(*early), absl::StatusCode::kUnavailable,
                      "not-yet"));
  auto out_of_range = HandleKeyDatagram(chain, now, EncodeKeyRequest(1000));
  ASSERT_TRUE(out_of_range.has_value());
  EXPECT_FALSE(DecodeKeyResponse(*out_of_range).ok());
  EXPECT_FALSE(HandleKeyDatagram(chain, now, Bytes{0x77}).has_value());
}

TEST(KeyReleaseUdpTest, ServesKeysOverLoopback) {
  ASSERT_OK_AND_ASSIGN(TeslaChain chain,
                       TeslaChain::Generate(KeyOf(7), DaySchedule()));
  ManualClock clock(chain.schedule().ReleaseTime(3));
  ASSERT_OK_AND_ASSIGN(KeyReleaseServer server,
                       KeyReleaseServer::Bind(chain, clock, 0));
  ASSERT_NE(server.port(), 0);
  std::thread serving([&server] { ASSERT_TRUE(server.Serve(2).ok()); });

  auto k3 = RequestKey("127.0.0.1", server.port(), 3, absl::Seconds(5));
  auto k4 = RequestKey("127.0.0.1", server.port(), 4, absl::Seconds(5));
  serving.join();
  ASSERT_OK(k3);
  EXPECT_EQ(*k3, chain.key(3).value());
  EXPECT_TRUE(HasKind(k4, absl::StatusCode::kUnavailable, "not-yet"));

  // Nobody is serving any more.
  EXPECT_EQ(RequestKey("127.0.0.1", server.port(), 3, absl::Milliseconds(200))
                .status()
                .code(),
            absl::StatusCode::kDeadlineExceeded);
}

}  // namespace
}  // namespace bsid
