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

// Delayed key disclosure for beacon authenticators.
//
// The chain is generated backward from k_L = PRF(seed, "tesla-chain") with
// k_{i-1} = SHA256(k_i), so a released key authenticates every earlier one
// and reveals nothing about later ones. Key k_i is released at
//
//   t_i = t_1 + (i - 1) * T.
//
// Beacons carrying Auth = MAC(k_i, EphID) are on air during the interval
// before that release, [t_i - T, t_i). A receiver accepts them only until
// t_i - delta, where delta bounds clock skew; after that the key may already
// be public and a forger could compute the tag.

#ifndef BSID_TESLA_H_
#define BSID_TESLA_H_

#include <array>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "absl/container/flat_hash_set.h"
#include "absl/status/statusor.h"
#include "absl/time/time.h"
#include "bsid/big_num.h"
#include "bsid/bytes.h"
#include "bsid/clock.h"
#include "bsid/crypto.h"
#include "bsid/rsa_blind.h"

namespace bsid {

inline constexpr uint32_t kIntervalsPerDay = 288;
inline constexpr size_t kRequestNonceSize = 16;
using RequestNonce = std::array<uint8_t, kRequestNonceSize>;

struct TeslaSchedule {
  absl::Time start = absl::UnixEpoch();  // t_1
  absl::Duration period = absl::Minutes(5);
  absl::Duration sync_error = absl::Seconds(10);
  uint32_t length = kIntervalsPerDay;

  absl::Time ReleaseTime(uint32_t i) const {
    return start + (static_cast<int64_t>(i) - 1) * period;
  }
  // Interval whose beacons are on air at t; nullopt outside 1..length.
  std::optional<uint32_t> IntervalAt(absl::Time t) const;
  // True while beacons of interval i may still be accepted at t.
  bool Acceptable(uint32_t i, absl::Time t) const {
    return t < ReleaseTime(i) - sync_error;
  }
};

class TeslaChain {
 public:
  // Fails with invalid-argument when length is 0 or the period is not
  // positive.
  static absl::StatusOr<TeslaChain> Generate(const Key32& seed,
                                             TeslaSchedule schedule);

  const TeslaSchedule& schedule() const { return schedule_; }
  uint32_t length() const { return schedule_.length; }
  // k_0, the public commitment.
  const Key32& anchor() const { return keys_[0]; }
  // Unconditional access for the key holder. i in 0..length.
  absl::StatusOr<Key32> key(uint32_t i) const;

 private:
  TeslaChain(TeslaSchedule schedule, std::vector<Key32> keys)
      : schedule_(schedule), keys_(std::move(keys)) {}

  TeslaSchedule schedule_;
  std::vector<Key32> keys_;
};

// k_i if now >= t_i; not-yet (Unavailable) otherwise; invalid-interval
// (OutOfRange) for i outside 1..L.
absl::StatusOr<Key32> ReleaseKey(const TeslaChain& chain, uint32_t i,
                                 absl::Time now);

// True iff hashing `candidate` (i - j) times yields k_j. False when i <= j.
bool VerifyReleasedKey(const Key32& candidate, uint32_t i, uint32_t j,
                       const Key32& k_j);

// Hashes k_i down to k_j for j <= i.
Key32 HashBack(const Key32& k_i, uint32_t steps);

struct AuthRequest {
  RequestNonce nonce{};
  Key32 response_key{};
  EphId ephid{};
  BigNum sd;
  uint32_t interval = 0;
};

struct PublishedAuth {
  RequestNonce nonce{};
  // AEAD output: 12-byte nonce || encrypted Auth || 16-byte tag.
  Bytes ciphertext;

  friend bool operator==(const PublishedAuth&, const PublishedAuth&) = default;
};

absl::StatusOr<AuthTag> DecryptAuthenticator(const PublishedAuth& entry,
                                             const Key32& response_key);

// The signer's authenticator service for one day: one key pair, one chain.
// Issue() is serialized; retrievals return snapshots.
class AuthService {
 public:
  AuthService(DayPublicKey key, TeslaChain chain, const Clock& clock,
              uint64_t rng_seed);

  // Errors: invalid-credential (bad signature), already-issued (EphID seen
  // before), invalid-interval, invalid-argument (nonce already published).
  absl::StatusOr<PublishedAuth> Issue(const AuthRequest& request);

  absl::StatusOr<Key32> ReleaseKey(uint32_t i) const;

  std::vector<PublishedAuth> RetrieveFull() const;
  // Entries whose nonce starts with the first `bit_count` bits of `prefix`.
  std::vector<PublishedAuth> RetrievePartial(ByteSpan prefix,
                                             size_t bit_count) const;
  std::optional<PublishedAuth> RetrieveIndividual(
      const RequestNonce& nonce) const;

  const TeslaChain& chain() const { return chain_; }
  const DayPublicKey& public_key() const { return key_; }

 private:
  const DayPublicKey key_;
  const TeslaChain chain_;
  const Clock& clock_;
  mutable std::mutex mu_;
  Drbg rng_;
  absl::flat_hash_set<EphId> served_;
  std::map<RequestNonce, Bytes> published_;
};

// Published-auth list file: {16-byte nonce, u16 length, ciphertext}*.
Bytes EncodePublishedList(const std::vector<PublishedAuth>& entries);
absl::StatusOr<std::vector<PublishedAuth>> DecodePublishedList(ByteSpan data);

// Unlinkable request channel. Requests are held until Flush(), which hands
// them to the service in a seeded random order.
class Mix {
 public:
  explicit Mix(uint64_t rng_seed) : rng_(Drbg::FromUint64(rng_seed)) {}

  void Submit(AuthRequest request) { queue_.push_back(std::move(request)); }
  size_t pending() const { return queue_.size(); }

  struct FlushResult {
    size_t issued = 0;
    size_t rejected = 0;
  };
  FlushResult Flush(AuthService& service);

 private:
  Drbg rng_;
  std::vector<AuthRequest> queue_;
};

// Key-release datagrams.
//   request  = u8 0x01 | u32 i
//   response = u8 0x02 | u32 i | k_i    or    u8 0x03 (not yet)
inline constexpr uint8_t kKeyRequest = 0x01;
inline constexpr uint8_t kKeyResponse = 0x02;
inline constexpr uint8_t kKeyNotYet = 0x03;

Bytes EncodeKeyRequest(uint32_t i);
absl::StatusOr<uint32_t> DecodeKeyRequest(ByteSpan datagram);
// nullopt encodes not-yet.
Bytes EncodeKeyResponse(uint32_t i, const std::optional<Key32>& key);
// Returns {i, k_i}; not-yet maps to Unavailable.
absl::StatusOr<std::pair<uint32_t, Key32>> DecodeKeyResponse(ByteSpan datagram);

// The server's answer to one request datagram, or nullopt for garbage
// (which is dropped). Out-of-range intervals are answered as not-yet.
std::optional<Bytes> HandleKeyDatagram(const TeslaChain& chain, absl::Time now,
                                       ByteSpan datagram);

}  // namespace bsid

#endif  // BSID_TESLA_H_
