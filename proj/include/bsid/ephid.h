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

// Per-day seed hierarchy.
//
//   SK_1 || ... || SK_M       = PRG(PRF(sk_t, "secondary-seeds"))
//   EphID_{i,1} || ... || _n  = PRG(PRF(SK_i, "broadcast key <i>"))
//   b_1 || ... || b_M         = PRG(PRF(b_t, "blinding-seeds"))
//   rhat_{i,1} || ... || _n   = PRG(PRF(b_i, "blinding <i>")), one
//                               modulus-width slice per EphID, resampled
//                               until it is a valid blinding factor
//   r_{i,j}                   = rhat_{i,j}^e mod N
//
// Set indices i are 1-based everywhere. Every derivation is a pure function
// of its inputs, which is what lets the signer audit revealed sets.

#ifndef BSID_EPHID_H_
#define BSID_EPHID_H_

#include <cstdint>
#include <vector>

#include "absl/status/statusor.h"
#include "bsid/big_num.h"
#include "bsid/bytes.h"
#include "bsid/crypto.h"
#include "bsid/rsa_blind.h"

namespace bsid {

inline constexpr uint32_t kDefaultSetCount = 100;      // M
inline constexpr uint32_t kDefaultEphIdsPerDay = 288;  // n

struct MainDaySeed {
  Key32 secret_seed{};    // sk_t
  Key32 blinding_seed{};  // b_t
  uint32_t day_index = 0;

  static MainDaySeed Generate(uint32_t day_index, Drbg& rng);
};

struct BlindingSet {
  std::vector<Key32> seeds;                      // b_{t_1..t_M}
  std::vector<std::vector<BigNum>> factors;      // rhat per set
  std::vector<std::vector<BigNum>> multipliers;  // rhat^e per set
};

absl::StatusOr<std::vector<Key32>> DeriveSecondarySeeds(const Key32& sk_t,
                                                        uint32_t set_count);

absl::StatusOr<std::vector<EphId>> DeriveEphIds(const Key32& secondary_seed,
                                                uint32_t set_index,
                                                uint32_t count);

// DP-3T style: 16-byte IDs under the fixed label "broadcast key".
absl::StatusOr<std::vector<BaselineEphId>> DeriveBaselineEphIds(
    const Key32& day_seed, uint32_t count);
// SK_{t+1} = SHA256(SK_t).
Key32 NextBaselineDaySeed(const Key32& day_seed);

absl::StatusOr<std::vector<Key32>> DeriveBlindingSeeds(const Key32& b_t,
                                                       uint32_t set_count);

// Blinding factors rhat for one set.
absl::StatusOr<std::vector<BigNum>> DeriveBlindingFactors(
    const Key32& blinding_seed, uint32_t set_index, uint32_t count,
    const DayPublicKey& key);

absl::StatusOr<BlindingSet> DeriveBlinding(const MainDaySeed& main,
                                           uint32_t set_count, uint32_t count,
                                           const DayPublicKey& key);

// The n blinded values of set i, recomputed from its two seeds. Client and
// signer audit both go through this function.
absl::StatusOr<std::vector<BigNum>> ComputeBlindedSet(
    const Key32& secondary_seed, const Key32& blinding_seed, uint32_t set_index,
    uint32_t count, const DayPublicKey& key);

}  // namespace bsid

#endif  // BSID_EPHID_H_
