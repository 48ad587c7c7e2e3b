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

#include "bsid/receiver_store.h"

#include <algorithm>
#include <iterator>

#include "absl/strings/str_cat.h"
#include "bsid/status_macros.h"

namespace bsid {

namespace {

constexpr char kStoreMagic[] = "BSID";

uint32_t ToEpochSeconds(absl::Time t) {
  return static_cast<uint32_t>(
      std::clamp<int64_t>(absl::ToUnixSeconds(t), 0, UINT32_MAX));
}

}  // namespace

std::array<uint8_t, kRecordSize> VerifiedRecord::Encode() const {
  ByteWriter w;
  w.Append(AsSpan(ephid));
  w.Append(AsSpan(auth));
  w.U32(first_receipt);
  w.U32(duration);
  w.U16(static_cast<uint16_t>(rssi));
  w.U16(day_index);
  std::array<uint8_t, kRecordSize> out;
  std::copy(w.bytes().begin(), w.bytes().end(), out.begin());
  return out;
}

absl::StatusOr<VerifiedRecord> VerifiedRecord::Decode(ByteSpan data) {
  if (data.size() != kRecordSize) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed: record is ", data.size(), " bytes, not 38"));
  }
  ByteReader r(data);
  VerifiedRecord rec;
  rec.ephid = *r.Fixed<kEphIdSize>();
  rec.auth = *r.Fixed<kAuthTagSize>();
  rec.first_receipt = *r.U32();
  rec.duration = *r.U32();
  rec.rssi = static_cast<int16_t>(*r.U16());
  rec.day_index = *r.U16();
  return rec;
}

ReceiverStore::ReceiverStore(TeslaSchedule schedule, const Key32& anchor,
                             uint16_t day_index)
    : schedule_(schedule), day_index_(day_index), last_key_(anchor) {}

BeaconOutcome ReceiverStore::OnBeacon(const Beacon& beacon, absl::Time now,
                                      int16_t rssi) {
  const std::optional<uint32_t> interval = schedule_.IntervalAt(now);
  if (!interval.has_value() || !schedule_.Acceptable(*interval, now) ||
      *interval <= last_index_) {
    ++counters_.received;
    ++counters_.rejected;
    return BeaconOutcome::kRejected;
  }
  IntervalRecords& records = pending_[*interval];
  auto [it, inserted] =
      records.try_emplace(RecordKey{beacon.ephid, beacon.auth});
  if (!inserted) {
    it->second.duration = now - it->second.first_receipt;
    return BeaconOutcome::kUpdated;
  }
  it->second = PendingRecord{beacon.ephid,         beacon.auth, now,
                             absl::ZeroDuration(), rssi,        *interval};
  ++pending_count_;
  ++counters_.received;
  return BeaconOutcome::kBuffered;
}

absl::StatusOr<ReleaseOutcome> ReceiverStore::OnKeyRelease(const Key32& key,
                                                           uint32_t i) {
  bool valid = false;
  if (i == 0 || i > schedule_.length) {
    valid = false;
  } else if (i > last_index_) {
    valid = VerifyReleasedKey(key, i, last_index_, last_key_);
  } else {
    valid = HashBack(last_key_, last_index_ - i) == key;
  }
  if (!valid) {
    return absl::UnauthenticatedError(
        absl::StrCat("invalid-key: key for interval ", i,
                     " does not hash to the verified chain"));
  }

  ReleaseOutcome out;
  auto end = pending_.upper_bound(i);
  for (auto it = pending_.begin(); it != end; ++it) {
    AuthTagger tagger(HashBack(key, i - it->first));
    for (const auto& [record_key, rec] : it->second) {
      if (tagger.Tag(rec.ephid) == rec.auth) {
        verified_.push_back(VerifiedRecord{
            rec.ephid, rec.auth, ToEpochSeconds(rec.first_receipt),
            static_cast<uint32_t>(absl::ToInt64Seconds(rec.duration)), rec.rssi,
            day_index_});
        ++out.accepted;
      } else {
        ++out.rejected;
      }
    }
    pending_count_ -= it->second.size();
  }
  pending_.erase(pending_.begin(), end);
  counters_.promoted += out.accepted;
  counters_.rejected += out.rejected;
  if (i > last_index_) {
    last_index_ = i;
    last_key_ = key;
  }
  return out;
}

PruneOutcome ReceiverStore::Prune(absl::Time now) {
  PruneOutcome out;
  const uint32_t cutoff = ToEpochSeconds(now - kRetention);
  const auto old = std::remove_if(
      verified_.begin(), verified_.end(),
      [cutoff](const VerifiedRecord& r) { return r.first_receipt < cutoff; });
  out.verified_dropped =
      static_cast<size_t>(std::distance(old, verified_.end()));
  verified_.erase(old, verified_.end());

  const absl::Duration max_age = 2 * schedule_.period;
  for (auto it = pending_.begin(); it != pending_.end();) {
    IntervalRecords& records = it->second;
    for (auto rec = records.begin(); rec != records.end();) {
      if (now - rec->second.first_receipt > max_age) {
        records.erase(rec++);
        ++out.pending_dropped;
      } else {
        ++rec;
      }
    }
    it = records.empty() ? pending_.erase(it) : std::next(it);
  }
  pending_count_ -= out.pending_dropped;
  counters_.expired += out.pending_dropped;
  return out;
}

StorageBytes ReceiverStore::storage_bytes() const {
  return StorageBytes{uint64_t{kRecordSize} * pending_count_,
                      uint64_t{kRecordSize} * verified_.size()};
}

Bytes EncodeStoreFile(const std::vector<VerifiedRecord>& records) {
  ByteWriter w;
  w.Append(AsSpan(absl::string_view(kStoreMagic, 4)));
  w.U32(static_cast<uint32_t>(records.size()));
  for (const VerifiedRecord& r : records) w.Append(AsSpan(r.Encode()));
  return std::move(w).bytes();
}

absl::StatusOr<std::vector<VerifiedRecord>> DecodeStoreFile(ByteSpan data) {
  ByteReader r(data);
  auto magic = r.Take(4);
  if (!magic.ok() || !std::equal(magic->begin(), magic->end(), kStoreMagic)) {
    return absl::InvalidArgumentError("malformed: store file magic");
  }
  auto count = r.U32();
  if (!count.ok() || r.remaining() != uint64_t{*count} * kRecordSize) {
    return absl::InvalidArgumentError("malformed: store file length");
  }
  std::vector<VerifiedRecord> records;
  records.reserve(*count);
  for (uint32_t i = 0; i < *count; ++i) {
    ASSIGN_OR_RETURN(VerifiedRecord rec,
                     VerifiedRecord::Decode(*r.Take(kRecordSize)));
    records.push_back(rec);
  }
  return records;
}

}  // namespace bsid
