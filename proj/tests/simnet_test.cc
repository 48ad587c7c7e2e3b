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

#include "bsid/simnet.h"

#include <sstream>

#include "gtest/gtest.h"
#include "test_util.h"

namespace bsid {
namespace {

using ::bsid::testing::HasKind;

SimConfig Small() {
  SimConfig c;
  c.duration_s = 1800;
  c.attacker_count = 1;
  c.honest_count = 3;
  c.reception_rate = 1.0;
  c.signer_modulus_bits = 512;
  c.registration_sets = 3;
  return c;
}

TEST(SimnetTest, NoAttackersMeansNothingRejected) {
  SimConfig c = Small();
  c.attacker_count = 0;
  ASSERT_OK_AND_ASSIGN(SimMetrics m, RunScenario(c));
  EXPECT_EQ(m.rejected_total, 0u);
  EXPECT_EQ(m.expired_total, 0u);
  EXPECT_EQ(m.pending_total, 0u);
  EXPECT_GT(m.received_honest, 0u);
  EXPECT_EQ(m.verified_honest, m.received_honest);
  EXPECT_EQ(m.received_from_attackers, 0u);
}

TEST(SimnetTest, SingleAttackerHalfHour) {
  SimConfig c = Small();
  c.honest_count = 1;
  ASSERT_OK_AND_ASSIGN(SimMetrics m, RunScenario(c));
  EXPECT_EQ(m.attacker_beacons_sent, 90'000u);
  EXPECT_EQ(m.received_from_attackers, 90'000u);
  EXPECT_EQ(m.verified_from_attackers, 0u);
  EXPECT_DOUBLE_EQ(m.reduction_rate, 1.0);
}

TEST(SimnetTest, Deterministic) {
  SimConfig c = Small();
  c.reception_rate = 0.4;
  ASSERT_OK_AND_ASSIGN(SimMetrics a, RunScenario(c));
  ASSERT_OK_AND_ASSIGN(SimMetrics b, RunScenario(c));
  EXPECT_EQ(a, b);
  EXPECT_EQ(FormatMetricsCsv(a), FormatMetricsCsv(b));
  c.rng_seed = 2;
  ASSERT_OK_AND_ASSIGN(SimMetrics other, RunScenario(c));
  EXPECT_NE(a.received_total, other.received_total);
}

TEST(SimnetTest, BaselineStoresEverythingFromTheSameStream) {
  SimConfig c = Small();
  c.reception_rate = 0.5;
  ASSERT_OK_AND_ASSIGN(SimMetrics verified, RunScenario(c));
  ASSERT_OK_AND_ASSIGN(SimMetrics baseline, BaselineScenario(c));
  EXPECT_EQ(baseline.stored_total, baseline.received_total);
  EXPECT_EQ(baseline.stored_bytes,
            baseline.stored_total * kBaselineRecordBytes);
  EXPECT_EQ(baseline.received_from_attackers, verified.received_from_attackers);
  EXPECT_EQ(baseline.received_honest, verified.received_honest);
  EXPECT_EQ(verified.verified_from_attackers, 0u);
  EXPECT_GE(1.0 - static_cast<double>(verified.verified_from_attackers) /
                      static_cast<double>(baseline.stored_total),
            0.90);
}

TEST(SimnetTest, ConservationAndAttackerRejectionAcrossSeeds) {
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    SimConfig c = Small();
    c.duration_s = 900;
    c.attacker_count = 2;
    c.reception_rate = 0.3 + 0.1 * static_cast<double>(seed);
    c.rng_seed = seed;
    ASSERT_OK_AND_ASSIGN(SimMetrics m, RunScenario(c));
    EXPECT_EQ(m.verified_from_attackers, 0u) << seed;
    EXPECT_EQ(m.verified_honest, m.received_honest) << seed;
    EXPECT_EQ(m.received_total, m.stored_total + m.rejected_total +
                                    m.expired_total + m.pending_total)
        << seed;
    for (const SimSample& s : m.samples) {
      ASSERT_EQ(s.received, s.pending + s.verified + s.rejected)
          << seed << " t=" << s.time_s << " r=" << s.receiver_id;
    }
  }
}

TEST(SimnetTest, LateKeysExpireHonestRecords) {
  SimConfig c = Small();
  c.attacker_count = 0;
  c.duration_s = 1200;
  c.verification_delay_s = 700;
  ASSERT_OK_AND_ASSIGN(SimMetrics m, RunScenario(c));
  EXPECT_GT(m.expired_total, 0u);
  EXPECT_LT(m.verified_honest, m.received_honest);
}

TEST(SimnetTest, CsvShape) {
  EXPECT_EQ(FormatMetricsCsv(SimMetrics{}),
            "time_s,receiver_id,received,pending,verified,rejected,bytes\n");
  SimConfig c = Small();
  c.duration_s = 600;
  c.sample_interval_s = 10;
  ASSERT_OK_AND_ASSIGN(SimMetrics m, RunScenario(c));
  EXPECT_EQ(m.samples.size(), 3u * 60u);
  const std::string csv = FormatMetricsCsv(m);
  std::istringstream in(csv);
  std::string line;
  size_t rows = 0;
  std::getline(in, line);
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 180u);
  EXPECT_EQ(FormatMetricsCsv(m), csv);
}

TEST(SimnetTest, ConfigValidationAndParsing) {
  SimConfig c = Small();
  c.reception_rate = 1.5;
  EXPECT_TRUE(HasKind(RunScenario(c), absl::StatusCode::kInvalidArgument,
                      "invalid-argument"));
  c = Small();
  c.attacker_interval_ms = 0;
  EXPECT_FALSE(c.Validate().ok());
  c = Small();
  c.epoch_s = 0;
  EXPECT_FALSE(c.Validate().ok());

  ASSERT_OK_AND_ASSIGN(SimConfig parsed,
                       ParseSimConfig(SerializeSimConfig(Small())));
  EXPECT_EQ(SerializeSimConfig(parsed), SerializeSimConfig(Small()));
  ASSERT_OK_AND_ASSIGN(SimConfig partial,
                       ParseSimConfig(R"({"attacker_count": 4})"));
  EXPECT_EQ(partial.attacker_count, 4u);
  EXPECT_EQ(partial.epoch_s, 300);
  EXPECT_TRUE(HasKind(ParseSimConfig(R"({"bogus": 1})"),
                      absl::StatusCode::kInvalidArgument, "malformed"));
  EXPECT_TRUE(HasKind(ParseSimConfig("{"), absl::StatusCode::kInvalidArgument,
                      "malformed"));
}

TEST(DosMagnitudeTest, BandsFromBandwidth) {
  const double one_hour = DosMagnitudeBytes(1.0, 36, 1);
  EXPECT_DOUBLE_EQ(one_hour, 1e6 / 128.0 * 36 * 3600);
  EXPECT_GE(one_hour, 1e9);
  EXPECT_LE(one_hour, 2e9);
  EXPECT_DOUBLE_EQ(DosMagnitudeBytes(1.0, 16, 1), 450e6);
  EXPECT_DOUBLE_EQ(DosMagnitudeBytes(2.0, 16, 1), 900e6);
  EXPECT_DOUBLE_EQ(DosMagnitudeBytes(1.0, 36, 8), 8.1e9);
  EXPECT_EQ(DosMagnitudeBytes(1.0, 36, 0), 0.0);
  EXPECT_DOUBLE_EQ(DosMagnitudeBytes(1.0, 36, 1, {16.0, 0.5}), one_hour / 2);
  EXPECT_DOUBLE_EQ(DosMagnitudeBytes(1.0, 36, 1, {31.0, 1.0}),
                   1e6 / 248.0 * 36 * 3600);
}

}  // namespace
}  // namespace bsid
