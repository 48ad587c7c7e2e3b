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

#include "bsid/ephid.h"

#include <algorithm>

#include "absl/strings/str_cat.h"
#include "bsid/status_macros.h"

namespace bsid {

namespace {

constexpr char kSecondarySeedsLabel[] = "secondary-seeds";
constexpr char kBlindingSeedsLabel[] = "blinding-seeds";
constexpr char kBaselineLabel[] = "broadcast key";
constexpr uint32_t kMaxResamples = 1 << 16;

absl::StatusOr<std::vector<Key32>> SplitSeeds(const Key32& root,
                                              absl::string_view label,
                                              uint32_t set_count) {
  if (set_count == 0) {
    return absl::InvalidArgumentError(
        "invalid-argument: set count M must be at least 1");
  }
  ASSIGN_OR_RETURN(Bytes stream,
                   Prg(Prf(root, label), size_t{set_count} * kKeySize));
  std::vector<Key32> seeds(set_count);
  for (uint32_t i = 0; i < set_count; ++i) {
    std::copy_n(stream.begin() + size_t{i} * kKeySize, kKeySize,
                seeds[i].begin());
  }
  return seeds;
}

template <size_t N>
absl::StatusOr<std::vector<std::array<uint8_t, N>>> SplitIds(
    const Key32& seed, absl::string_view label, uint32_t count) {
  if (count == 0) {
    return absl::InvalidArgumentError(
        "invalid-argument: EphID count n must be at least 1");
  }
  ASSIGN_OR_RETURN(Bytes stream, Prg(Prf(seed, label), size_t{count} * N));
  std::vector<std::array<uint8_t, N>> ids(count);
  for (uint32_t j = 0; j < count; ++j) {
    std::copy_n(stream.begin() + size_t{j} * N, N, ids[j].begin());
  }
  return ids;
}

// Candidate bytes for a resampled factor: a fresh expansion salted with the
// factor position and the attempt counter.
Key32 ResampleSeed(const Key32& base, uint32_t position, uint32_t attempt) {
  ByteWriter w;
  w.Append(AsSpan(base));
  w.U32(position);
  w.U32(attempt);
  return Sha256(w.bytes());
}

}  // namespace

MainDaySeed MainDaySeed::Generate(uint32_t day_index, Drbg& rng) {
  MainDaySeed seed;
  seed.secret_seed = rng.NextKey();
  seed.blinding_seed = rng.NextKey();
  seed.day_index = day_index;
  return seed;
}

absl::StatusOr<std::vector<Key32>> DeriveSecondarySeeds(const Key32& sk_t,
                                                        uint32_t set_count) {
  return SplitSeeds(sk_t, kSecondarySeedsLabel, set_count);
}

absl::StatusOr<std::vector<EphId>> DeriveEphIds(const Key32& secondary_seed,
                                                uint32_t set_index,
                                                uint32_t count) {
  return SplitIds<kEphIdSize>(secondary_seed,
                              absl::StrCat("broadcast key ", set_index), count);
}

absl::StatusOr<std::vector<BaselineEphId>> DeriveBaselineEphIds(
    const Key32& day_seed, uint32_t count) {
  return SplitIds<kBaselineEphIdSize>(day_seed, kBaselineLabel, count);
}

Key32 NextBaselineDaySeed(const Key32& day_seed) {
  return Sha256(AsSpan(day_seed));
}

absl::StatusOr<std::vector<Key32>> DeriveBlindingSeeds(const Key32& b_t,
                                                       uint32_t set_count) {
  return SplitSeeds(b_t, kBlindingSeedsLabel, set_count);
}

absl::StatusOr<std::vector<BigNum>> DeriveBlindingFactors(
    const Key32& blinding_seed, uint32_t set_index, uint32_t count,
    const DayPublicKey& key) {
  if (count == 0) {
    return absl::InvalidArgumentError(
        "invalid-argument: EphID count n must be at least 1");
  }
  const size_t width = key.modulus_bytes();
  const int bits = key.modulus_bits();
  const Key32 base = Prf(blinding_seed, absl::StrCat("blinding ", set_index));
  ASSIGN_OR_RETURN(Bytes stream, Prg(base, size_t{count} * width));

  std::vector<BigNum> factors;
  factors.reserve(count);
  for (uint32_t j = 0; j < count; ++j) {
    // Masking to the modulus bit length keeps the acceptance rate >= 1/2.
    BigNum candidate =
        BigNum::FromBytes(ByteSpan(stream).subspan(size_t{j} * width, width))
            .MaskBits(bits);
    uint32_t attempt = 0;
    while (!IsValidBlindingFactor(candidate, key)) {
      if (++attempt > kMaxResamples) {
        return absl::InternalError("blinding factor resampling exhausted");
      }
      ASSIGN_OR_RETURN(Bytes fresh, Prg(ResampleSeed(base, j, attempt), width));
      candidate = BigNum::FromBytes(fresh).MaskBits(bits);
    }
    factors.push_back(std::move(candidate));
  }
  return factors;
}

absl::StatusOr<BlindingSet> DeriveBlinding(const MainDaySeed& main,
                                           uint32_t set_count, uint32_t count,
                                           const DayPublicKey& key) {
  BlindingSet out;
  ASSIGN_OR_RETURN(out.seeds,
                   DeriveBlindingSeeds(main.blinding_seed, set_count));
  for (uint32_t i = 1; i <= set_count; ++i) {
    ASSIGN_OR_RETURN(std::vector<BigNum> factors,
                     DeriveBlindingFactors(out.seeds[i - 1], i, count, key));
    std::vector<BigNum> multipliers;
    multipliers.reserve(factors.size());
    for (const BigNum& rhat : factors) {
      multipliers.push_back(rhat.ModExp(key.verify_exponent, key.modulus));
    }
    out.factors.push_back(std::move(factors));
    out.multipliers.push_back(std::move(multipliers));
  }
  return out;
}

absl::StatusOr<std::vector<BigNum>> ComputeBlindedSet(
    const Key32& secondary_seed, const Key32& blinding_seed, uint32_t set_index,
    uint32_t count, const DayPublicKey& key) {
  ASSIGN_OR_RETURN(std::vector<EphId> ids,
                   DeriveEphIds(secondary_seed, set_index, count));
  ASSIGN_OR_RETURN(std::vector<BigNum> factors,
                   DeriveBlindingFactors(blinding_seed, set_index, count, key));
  std::vector<BigNum> blinded;
  blinded.reserve(count);
  for (uint32_t j = 0; j < count; ++j) {
    ASSIGN_OR_RETURN(BigNum b, Blind(ids[j], factors[j], key));
    blinded.push_back(std::move(b));
  }
  return blinded;
}

}  // namespace bsid
