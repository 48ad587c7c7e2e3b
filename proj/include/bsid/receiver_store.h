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

// Receiver side of beacon authentication.
//
// Beacons are buffered per broadcast interval until that interval's key is
// released. A released key is first checked against the chain; each buffered
// record is then promoted to long-term storage iff its tag matches, and
// dropped otherwise. Records whose key never arrives expire after two
// intervals. Only promoted records reach the 38-byte store.

#ifndef BSID_RECEIVER_STORE_H_
#define BSID_RECEIVER_STORE_H_

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "absl/container/flat_hash_map.h"
#include "absl/status/statusor.h"
#include "absl/time/time.h"
#include "bsid/beacon.h"
#include "bsid/bytes.h"
#include "bsid/tesla.h"

namespace bsid {

inline constexpr size_t kRecordSize = 38;
inline constexpr absl::Duration kRetention = absl::Hours(24 * 14);

struct PendingRecord {
  EphId ephid{};
  AuthTag auth{};
  absl::Time first_receipt;
  absl::Duration duration;
  int16_t rssi = 0;
  uint32_t interval = 0;
};

// ephid(13) | auth(13) | u32 first_receipt | u32 duration | i16 rssi |
// u16 day_index, big-endian.
struct VerifiedRecord {
  EphId ephid{};
  AuthTag auth{};
  uint32_t first_receipt = 0;  // epoch seconds
  uint32_t duration = 0;       // seconds
  int16_t rssi = 0;
  uint16_t day_index = 0;

  std::array<uint8_t, kRecordSize> Encode() const;
  static absl::StatusOr<VerifiedRecord> Decode(ByteSpan data);

  friend bool operator==(const VerifiedRecord&,
                         const VerifiedRecord&) = default;
};

enum class BeaconOutcome {
  kBuffered,  // new pending record
  kUpdated,   // extended an existing record
  kRejected,  // outside the chain or inside the guard window
};

struct ReleaseOutcome {
  size_t accepted = 0;
  size_t rejected = 0;
};

struct PruneOutcome {
  size_t verified_dropped = 0;
  size_t pending_dropped = 0;
};

struct StorageBytes {
  uint64_t pending_bytes = 0;
  uint64_t verified_bytes = 0;
};

// Running totals over distinct sightings. At any point
//   received = promoted + rejected + pending + expired.
struct StoreCounters {
  uint64_t received = 0;
  uint64_t promoted = 0;
  uint64_t rejected = 0;
  uint64_t expired = 0;
};

// One logical writer; not internally synchronized.
class ReceiverStore {
 public:
  ReceiverStore(TeslaSchedule schedule, const Key32& anchor,
                uint16_t day_index);

  BeaconOutcome OnBeacon(const Beacon& beacon, absl::Time now, int16_t rssi);

  // Fails with invalid-key, leaving all state unchanged, unless `key` is k_i
  // of the anchored chain. On success verifies every pending interval <= i;
  // keys for skipped intervals are recovered by hashing back.
  absl::StatusOr<ReleaseOutcome> OnKeyRelease(const Key32& key, uint32_t i);

  // Drops verified records older than 14 days and pending records older
  // than two intervals.
  PruneOutcome Prune(absl::Time now);

  StorageBytes storage_bytes() const;
  size_t pending_count() const { return pending_count_; }
  const std::vector<VerifiedRecord>& verified() const { return verified_; }
  const StoreCounters& counters() const { return counters_; }
  const TeslaSchedule& schedule() const { return schedule_; }

  // Adds a record that was verified elsewhere, e.g. when loading a store.
  void AddVerified(const VerifiedRecord& record) {
    verified_.push_back(record);
  }

 private:
  using RecordKey = std::pair<EphId, AuthTag>;
  using IntervalRecords = absl::flat_hash_map<RecordKey, PendingRecord>;

  TeslaSchedule schedule_;
  uint16_t day_index_;
  uint32_t last_index_ = 0;
  Key32 last_key_;
  std::map<uint32_t, IntervalRecords> pending_;
  size_t pending_count_ = 0;
  std::vector<VerifiedRecord> verified_;
  StoreCounters counters_;
};

// Store file: "BSID" | u32 count | count * 38-byte records.
Bytes EncodeStoreFile(const std::vector<VerifiedRecord>& records);
absl::StatusOr<std::vector<VerifiedRecord>> DecodeStoreFile(ByteSpan data);

}  // namespace bsid

#endif  // BSID_RECEIVER_STORE_H_
