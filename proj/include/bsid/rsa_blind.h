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

// Raw-RSA blind signatures over per-day keys.
//
// The signed message for an EphID is the integer Prefix_t || EphID, where the
// prefix is a public per-day random bit string of (modulus_bits - 104) bits
// with its top bit cleared, so the padded message is always below N.
//
// Blinding:   m' = m * rhat^e        mod N
// Signing:    s' = m'^d              mod N
// Unblinding: s  = s' * rhat^-1      mod N   (= m^d)
//
// NOTE: raw RSA over a public fixed prefix is multiplicatively malleable
// (the product of two signatures signs the product of two messages). The
// prefix makes most such products fall outside the valid message space, but
// this is not a padding-secure scheme such as RSA-PSS.

#ifndef BSID_RSA_BLIND_H_
#define BSID_RSA_BLIND_H_

#include <cstdint>
#include <string>

#include "absl/status/statusor.h"
#include "bsid/big_num.h"
#include "bsid/bytes.h"
#include "bsid/crypto.h"

namespace bsid {

inline constexpr int kEphIdBits = 8 * kEphIdSize;
inline constexpr int kDefaultModulusBits = 2048;

// Public half of a day key: everything a client or verifier needs.
struct DayPublicKey {
  uint32_t day_index = 0;
  BigNum verify_exponent;
  BigNum modulus;
  BigNum prefix;
  int prefix_bits = 0;

  int modulus_bits() const { return modulus.BitLength(); }
  // Width used by every fixed-width big-integer encoding under this key.
  size_t modulus_bytes() const { return modulus.ByteLength(); }
};

// A signer's key for one day. Immutable after creation; holds CRT
// components so signing costs a quarter of a plain exponentiation.
class DayKeyPair {
 public:
  // Generates a fresh key with e = 65537 and a random prefix, drawing all
  // randomness from `rng`. modulus_bits must be at least 512 so that the
  // prefix and a 256-bit Merkle root both fit.
  static absl::StatusOr<DayKeyPair> Generate(uint32_t day_index,
                                             int modulus_bits, Drbg& rng);

  // Builds a key from explicit primes. Used for toy groups in tests; the
  // prefix is supplied by the caller (prefix_bits may be 0).
  static absl::StatusOr<DayKeyPair> FromPrimes(uint32_t day_index,
                                               const BigNum& p, const BigNum& q,
                                               const BigNum& e,
                                               const BigNum& prefix,
                                               int prefix_bits);

  const DayPublicKey& public_key() const { return public_; }
  const BigNum& sign_exponent() const { return d_; }
  const BigNum& prime_p() const { return p_; }
  const BigNum& prime_q() const { return q_; }

  // m^d mod N via CRT.
  BigNum RawSign(const BigNum& m) const;

 private:
  DayKeyPair() = default;
  absl::Status Precompute();

  DayPublicKey public_;
  BigNum d_;
  BigNum p_;
  BigNum q_;
  BigNum dp_;
  BigNum dq_;
  BigNum q_inv_;
};

// integer(Prefix_t || ephid). Fails if the result is not below N, which only
// happens for toy moduli.
absl::StatusOr<BigNum> PaddedMessage(const EphId& ephid,
                                     const DayPublicKey& key);

// m * multiplier mod N. The multiplier is already r = rhat^e.
BigNum BlindWithMultiplier(const BigNum& message, const BigNum& multiplier,
                           const DayPublicKey& key);

// m * rhat^e mod N. Fails with invalid-blinding-factor unless 0 < rhat < N
// and gcd(rhat, N) = 1.
absl::StatusOr<BigNum> BlindMessage(const BigNum& message, const BigNum& rhat,
                                    const DayPublicKey& key);
absl::StatusOr<BigNum> Blind(const EphId& ephid, const BigNum& rhat,
                             const DayPublicKey& key);

// blinded^d mod N. Fails with InvalidArgument unless 0 < blinded < N.
absl::StatusOr<BigNum> SignBlinded(const BigNum& blinded,
                                   const DayKeyPair& keys);

// signed * rhat^-1 mod N. Fails with invalid-blinding-factor when rhat is
// not invertible.
absl::StatusOr<BigNum> Unblind(const BigNum& signed_blinded, const BigNum& rhat,
                               const DayPublicKey& key);

// The multiplier r' with target * r' = blinded (mod N), i.e.
// blinded * target^-1. Any blinded value is a blinding of any message under
// some multiplier, which is why the signer learns nothing from it.
absl::StatusOr<BigNum> AlternativeMultiplier(const BigNum& target,
                                             const BigNum& blinded,
                                             const DayPublicKey& key);

// signature^e mod N == message. False for signatures outside [0, N).
bool VerifyMessageSignature(const BigNum& message, const BigNum& signature,
                            const DayPublicKey& key);
bool VerifySignature(const EphId& ephid, const BigNum& signature,
                     const DayPublicKey& key);

// True iff rhat is a usable derived blinding factor:
//   1 < rhat < N and gcd(rhat, N) = 1.
bool IsValidBlindingFactor(const BigNum& rhat, const DayPublicKey& key);

// Key files: JSON objects with hex-encoded big integers. The private file is
// a superset of the public one.
std::string SerializePublicKey(const DayPublicKey& key);
std::string SerializeKeyPair(const DayKeyPair& keys);
absl::StatusOr<DayPublicKey> ParsePublicKey(absl::string_view json);
absl::StatusOr<DayKeyPair> ParseKeyPair(absl::string_view json);

}  // namespace bsid

#endif  // BSID_RSA_BLIND_H_
