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

// Positive reports, exposure matching and FinalTrial match tallying.
//
// A positive user publishes, for each infectious day, the secondary seed of
// the set that was actually signed and broadcast plus its index s. Anyone can
// re-derive those EphIDs and intersect them with their verified store.
//
// FinalTrial lets the health authority count matches per case without
// learning who matched. Each device holds codes (i || n_i) for
// i = 1..max_cases under a Merkle root R, and a blind signature SP = R^d'
// from a dedicated FinalTrial key. On a match with case i the device posts
// (n_i, SP, Merkle path); observers verify the path to R and SP^e' = R.
//
// The posted SP is the same for every post from one device, so posts by the
// same device are linkable to each other. Unlinking them would need one
// signed root per post; this module does not attempt that.

#ifndef BSID_EXPOSURE_H_
#define BSID_EXPOSURE_H_

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "bsid/big_num.h"
#include "bsid/bytes.h"
#include "bsid/crypto.h"
#include "bsid/merkle.h"
#include "bsid/receiver_store.h"
#include "bsid/rsa_blind.h"

namespace bsid {

inline constexpr uint32_t kDefaultInfectiousLeadDays = 2;
inline constexpr uint32_t kDefaultMaxCases = 4096;
inline constexpr uint64_t kDefaultSuspiciousThreshold = 1000;
inline constexpr size_t kFinalTrialNonceSize = 16;
using FinalTrialNonce = std::array<uint8_t, kFinalTrialNonceSize>;

struct InfectiousDay {
  uint32_t day_index = 0;
  Key32 secondary_seed{};  // SK_{t_s}
  uint16_t selected = 0;   // s
  uint16_t per_set = 0;    // n

  friend bool operator==(const InfectiousDay&, const InfectiousDay&) = default;
};

struct PositiveReport {
  uint32_t publication_day = 0;
  uint32_t case_number = 0;
  std::vector<InfectiousDay> days;

  friend bool operator==(const PositiveReport&,
                         const PositiveReport&) = default;
};

struct MatchPost {
  uint32_t signing_day = 0;
  uint32_t case_number = 0;
  FinalTrialNonce nonce{};
  BigNum sp;
  MerkleProof proof;

  Bytes Serialize() const;
  static absl::StatusOr<MatchPost> Parse(ByteSpan data);
};

// Days symptom_day - lead_days .. last_day, clamped at day 0.
std::vector<uint32_t> InfectiousPeriod(
    uint32_t symptom_day, uint32_t last_day,
    uint32_t lead_days = kDefaultInfectiousLeadDays);

// Append-only log of reports and match posts. With a journal path every
// append is written through as u32 length | u8 type | body. Appends are
// serialized; reads return a consistent prefix.
class BulletinBoard {
 public:
  BulletinBoard();
  // Replays an existing journal, or starts an empty one.
  static absl::StatusOr<BulletinBoard> Open(const std::string& journal_path);

  // Returns the case number: 1 + earlier reports with the same day.
  absl::StatusOr<uint32_t> PublishPositive(uint32_t publication_day,
                                           std::vector<InfectiousDay> days);

  // Returns false (and appends nothing) when an identical post exists.
  absl::StatusOr<bool> PostMatch(const MatchPost& post);

  std::vector<PositiveReport> reports() const;
  std::vector<MatchPost> match_posts() const;

 private:
  absl::Status Append(uint8_t type, const Bytes& body);

  std::unique_ptr<std::mutex> mu_;
  std::string journal_path_;
  std::vector<PositiveReport> reports_;
  std::vector<MatchPost> posts_;
  std::vector<Bytes> post_bytes_;
};

struct ExposureMatch {
  uint32_t publication_day = 0;
  uint32_t case_number = 0;
  uint32_t day_index = 0;
  std::vector<EphId> ephids;
};

// For every report and infectious day, derives the n EphIDs of set s and
// intersects them with the verified records of that day.
std::vector<ExposureMatch> CheckExposure(
    const std::vector<VerifiedRecord>& store, const BulletinBoard& board);

// Leaf bytes u32 case_number || nonce.
Bytes FinalTrialLeaf(uint32_t case_number, const FinalTrialNonce& nonce);

class FinalTrialCodeSet {
 public:
  // Signs a blinded value with the FinalTrial key; the signer's side of the
  // exchange.
  using BlindSigner = std::function<absl::StatusOr<BigNum>(const BigNum&)>;

  // Draws nonces from `rng`, builds the tree and obtains SP by blinding R,
  // having it signed and unblinding. Fails with signer-misbehavior if SP
  // does not verify.
  static absl::StatusOr<FinalTrialCodeSet> Generate(uint32_t max_cases,
                                                    const DayPublicKey& key,
                                                    const BlindSigner& sign,
                                                    Drbg& rng);

  uint32_t max_cases() const { return static_cast<uint32_t>(nonces_.size()); }
  const std::vector<FinalTrialNonce>& nonces() const { return nonces_; }
  const Hash256& root() const { return tree_.root(); }
  const BigNum& sp() const { return sp_; }
  uint32_t signing_day() const { return signing_day_; }

  // The post for case i; no-code-available when i is 0 or above max_cases.
  absl::StatusOr<MatchPost> MakePost(uint32_t case_number) const;

 private:
  FinalTrialCodeSet(std::vector<FinalTrialNonce> nonces, MerkleTree tree,
                    BigNum sp, uint32_t signing_day)
      : nonces_(std::move(nonces)),
        tree_(std::move(tree)),
        sp_(std::move(sp)),
        signing_day_(signing_day) {}

  std::vector<FinalTrialNonce> nonces_;
  MerkleTree tree_;
  BigNum sp_;
  uint32_t signing_day_;
};

absl::StatusOr<MatchPost> FinalTrialPostMatch(const FinalTrialCodeSet& codes,
                                              uint32_t case_number,
                                              BulletinBoard& board);

// Merkle path to the proof root, SP^e' = root, and the signing day matches.
bool VerifyMatchPost(const MatchPost& post, const DayPublicKey& key);

enum class TallyVerdict { kNormal, kSuspicious };

struct TallyResult {
  uint64_t valid_posts = 0;
  TallyVerdict verdict = TallyVerdict::kNormal;
};

// Counts distinct verifiable posts for case i; suspicious iff the count
// exceeds the threshold.
TallyResult FinalTrialTally(const BulletinBoard& board, uint32_t case_number,
                            const DayPublicKey& key,
                            uint64_t threshold = kDefaultSuspiciousThreshold);

}  // namespace bsid

#endif  // BSID_EXPOSURE_H_
