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

// Discrete-event simulation of a room of receivers under beacon flooding.
//
// Honest devices register with a real signer, obtain authenticators through
// the Mix and broadcast one credential per interval. Attackers broadcast
// well-formed beacons with random EphID and Auth every attacker_interval_ms.
// Every honest device is also a receiver; each beacon reaches each other
// receiver independently with probability reception_rate.
//
// Simulated time is integer milliseconds from 0. Interval i is on air during
// [(i-1)T, iT) and its key is released at iT + verification_delay. After
// `duration_s` a drain phase releases the keys of every interval that was on
// air, so final totals contain no pending records.
//
// All randomness derives from rng_seed; the verified and baseline modes
// consume identical streams and so see the same beacons.

#ifndef BSID_SIMNET_H_
#define BSID_SIMNET_H_

#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/statusor.h"

namespace bsid {

struct SimConfig {
  int64_t duration_s = 1800;
  int64_t epoch_s = 300;
  uint32_t attacker_count = 1;
  int64_t attacker_interval_ms = 20;
  uint32_t honest_count = 1;
  int64_t honest_interval_ms = 1000;
  double reception_rate = 1.0;
  double verification_delay_s = 2.0;
  int64_t sync_error_s = 10;
  int64_t sample_interval_s = 10;
  uint64_t rng_seed = 1;
  // Honest-device registration parameters.
  int signer_modulus_bits = 1024;
  uint16_t registration_sets = 4;

  absl::Status Validate() const;
};

absl::StatusOr<SimConfig> ParseSimConfig(const std::string& json);
std::string SerializeSimConfig(const SimConfig& config);

struct SimSample {
  int64_t time_s = 0;
  uint32_t receiver_id = 0;
  uint64_t received = 0;
  uint64_t pending = 0;
  uint64_t verified = 0;
  // Includes pending records that expired without a key.
  uint64_t rejected = 0;
  uint64_t bytes = 0;

  friend bool operator==(const SimSample&, const SimSample&) = default;
};

struct SimMetrics {
  std::vector<SimSample> samples;

  // Final totals over all receivers, after the drain phase. Counts are
  // distinct sightings: one per (receiver, EphID, Auth, interval).
  uint64_t received_total = 0;
  uint64_t received_from_attackers = 0;
  uint64_t received_honest = 0;
  uint64_t stored_total = 0;
  uint64_t verified_from_attackers = 0;
  uint64_t verified_honest = 0;
  uint64_t rejected_total = 0;
  uint64_t expired_total = 0;
  uint64_t pending_total = 0;
  uint64_t stored_bytes = 0;

  // 1 - verified_from_attackers / received_from_attackers.
  double reduction_rate = 0.0;
  // 1 - stored_total / received_total, honest records included.
  double overall_reduction = 0.0;

  uint64_t attacker_beacons_sent = 0;
  uint64_t honest_beacons_sent = 0;
  uint64_t events = 0;

  friend bool operator==(const SimMetrics&, const SimMetrics&) = default;
};

// Receivers verify beacons in place; records are 38 bytes.
absl::StatusOr<SimMetrics> RunScenario(const SimConfig& config);

// Same event stream, no verification: every received EphID is stored as a
// 36-byte record.
absl::StatusOr<SimMetrics> BaselineScenario(const SimConfig& config);

inline constexpr uint64_t kBaselineRecordBytes = 36;

// CSV: time_s,receiver_id,received,pending,verified,rejected,bytes
std::string FormatMetricsCsv(const SimMetrics& metrics);
absl::Status ExportMetricsCsv(const SimMetrics& metrics,
                              const std::string& path);

// Storage an attacker can force per receiver. Every bit of bandwidth
// carries raw EphID bytes (16 per ID) at the given link efficiency; each ID
// costs record_bytes of storage.
struct DosModel {
  double id_wire_bytes = 16.0;
  double mac_efficiency = 1.0;
};
double DosMagnitudeBytes(double bandwidth_mbps, double record_bytes,
                         double hours, DosModel model = {});

}  // namespace bsid

#endif  // BSID_SIMNET_H_
