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

#include "bsid/rsa_blind.h"

#include "absl/strings/str_cat.h"
#include "bsid/status_macros.h"
#include "json.hpp"

namespace bsid {

namespace {

constexpr uint64_t kPublicExponent = 65537;
constexpr int kMaxPrimeAttempts = 64;

BigNum RandomBits(int bits, Drbg& rng) {
  Bytes raw((bits + 7) / 8);
  rng.Fill(raw);
  return BigNum::FromBytes(raw).MaskBits(bits);
}

// Random `bits`-bit prime p with gcd(p - 1, e) = 1. The top two bits are set
// so that the product of two such primes has exactly 2 * bits bits.
absl::StatusOr<BigNum> GeneratePrime(int bits, const BigNum& e, Drbg& rng) {
  const BigNum one(1);
  const BigNum two(2);
  const BigNum top_bits = BigNum(3) << (bits - 2);
  for (int attempt = 0; attempt < kMaxPrimeAttempts; ++attempt) {
    BigNum candidate = RandomBits(bits, rng);
    if (!candidate.IsBitSet(bits - 1) || !candidate.IsBitSet(bits - 2)) {
      candidate = (candidate.MaskBits(bits - 2)) + top_bits;
    }
    if (!candidate.IsOdd()) candidate = candidate + one;
    // Incremental search; restart if we run off the top.
    for (int step = 0; step < 20 * bits; ++step) {
      if (candidate.BitLength() != bits) break;
      if (candidate.IsPrime() && (candidate - one).Gcd(e).IsOne()) {
        return candidate;
      }
      candidate = candidate + two;
    }
  }
  return absl::InternalError("prime search exhausted");
}

nlohmann::json PublicToJson(const DayPublicKey& key) {
  return nlohmann::json{
      {"day_index", key.day_index},
      {"modulus", key.modulus.ToHexString()},
      {"verify_exponent", key.verify_exponent.ToHexString()},
      {"prefix", key.prefix.ToHexString()},
      {"prefix_bits", key.prefix_bits},
  };
}

absl::StatusOr<BigNum> HexField(const nlohmann::json& j, const char* name) {
  if (!j.contains(name) || !j[name].is_string()) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed: key file: missing string field '", name, "'"));
  }
  return BigNum::FromHexString(j[name].get<std::string>());
}

absl::StatusOr<DayPublicKey> PublicFromJson(const nlohmann::json& j) {
  DayPublicKey key;
  if (!j.contains("day_index") || !j["day_index"].is_number_unsigned() ||
      !j.contains("prefix_bits") || !j["prefix_bits"].is_number_integer()) {
    return absl::InvalidArgumentError(
        "malformed: key file: missing numeric fields");
  }
  key.day_index = j["day_index"].get<uint32_t>();
  key.prefix_bits = j["prefix_bits"].get<int>();
  ASSIGN_OR_RETURN(key.modulus, HexField(j, "modulus"));
  ASSIGN_OR_RETURN(key.verify_exponent, HexField(j, "verify_exponent"));
  ASSIGN_OR_RETURN(key.prefix, HexField(j, "prefix"));
  if (key.modulus.BitLength() < 8 || key.prefix_bits < 0 ||
      key.prefix.BitLength() > key.prefix_bits) {
    return absl::InvalidArgumentError(
        "malformed: key file: inconsistent key parameters");
  }
  return key;
}

}  // namespace

absl::StatusOr<DayKeyPair> DayKeyPair::Generate(uint32_t day_index,
                                                int modulus_bits, Drbg& rng) {
  if (modulus_bits < 512 || modulus_bits % 2 != 0) {
    return absl::InvalidArgumentError(absl::StrCat(
        "invalid-argument: modulus_bits must be an even number >= 512, got ",
        modulus_bits));
  }
  const BigNum e(kPublicExponent);
  ASSIGN_OR_RETURN(BigNum p, GeneratePrime(modulus_bits / 2, e, rng));
  BigNum q;
  do {
    ASSIGN_OR_RETURN(q, GeneratePrime(modulus_bits / 2, e, rng));
  } while (q == p);
  const int prefix_bits = modulus_bits - kEphIdBits;
  // Top bit of the prefix stays clear.
  BigNum prefix = RandomBits(prefix_bits - 1, rng);
  return FromPrimes(day_index, p, q, e, prefix, prefix_bits);
}

absl::StatusOr<DayKeyPair> DayKeyPair::FromPrimes(
    uint32_t day_index, const BigNum& p, const BigNum& q, const BigNum& e,
    const BigNum& prefix, int prefix_bits) {
  if (p == q || !p.IsPrime() || !q.IsPrime()) {
    return absl::InvalidArgumentError("p and q must be distinct primes");
  }
  if (prefix_bits < 0 || prefix.BitLength() > prefix_bits) {
    return absl::InvalidArgumentError("prefix does not fit in prefix_bits");
  }
  const BigNum one(1);
  DayKeyPair keys;
  keys.p_ = p;
  keys.q_ = q;
  keys.public_.day_index = day_index;
  keys.public_.verify_exponent = e;
  keys.public_.modulus = p * q;
  keys.public_.prefix = prefix;
  keys.public_.prefix_bits = prefix_bits;
  const BigNum lambda = (p - one).Lcm(q - one);
  auto d = e.ModInverse(lambda);
  if (!d.ok()) {
    return absl::InvalidArgumentError("e is not invertible modulo lambda(N)");
  }
  keys.d_ = *std::move(d);
  RETURN_IF_ERROR(keys.Precompute());

  // Probe: sign and verify a fixed value below N.
  const BigNum probe = BigNum(0xB51D) % keys.public_.modulus;
  if (!(keys.RawSign(probe).ModExp(e, keys.public_.modulus) == probe)) {
    return absl::InternalError("key probe failed: e * d != 1 mod lambda(N)");
  }
  return keys;
}

absl::Status DayKeyPair::Precompute() {
  const BigNum one(1);
  dp_ = d_ % (p_ - one);
  dq_ = d_ % (q_ - one);
  ASSIGN_OR_RETURN(q_inv_, q_.ModInverse(p_));
  return absl::OkStatus();
}

BigNum DayKeyPair::RawSign(const BigNum& m) const {
  // Garner recombination: s = sq + q * ((sp - sq) * q^-1 mod p).
  const BigNum sp = (m % p_).ModExp(dp_, p_);
  const BigNum sq = (m % q_).ModExp(dq_, q_);
  const BigNum diff = (sp + p_ - (sq % p_)) % p_;
  const BigNum h = diff.ModMul(q_inv_, p_);
  return sq + q_ * h;
}

absl::StatusOr<BigNum> PaddedMessage(const EphId& ephid,
                                     const DayPublicKey& key) {
  BigNum m = (key.prefix << kEphIdBits) + BigNum::FromBytes(AsSpan(ephid));
  if (m >= key.modulus) {
    return absl::InvalidArgumentError(
        "invalid-argument: padded EphID is not below the modulus");
  }
  return m;
}

bool IsValidBlindingFactor(const BigNum& rhat, const DayPublicKey& key) {
  return rhat > BigNum(1) && rhat < key.modulus &&
         rhat.Gcd(key.modulus).IsOne();
}

BigNum BlindWithMultiplier(const BigNum& message, const BigNum& multiplier,
                           const DayPublicKey& key) {
  return message.ModMul(multiplier, key.modulus);
}

absl::StatusOr<BigNum> BlindMessage(const BigNum& message, const BigNum& rhat,
                                    const DayPublicKey& key) {
  // rhat = 1 is the identity blinding; derived factors are always > 1.
  if (rhat.IsZero() || rhat >= key.modulus || !rhat.Gcd(key.modulus).IsOne()) {
    return absl::InvalidArgumentError(
        "invalid-blinding-factor: need 0 < rhat < N and gcd(rhat, N) = 1");
  }
  if (message >= key.modulus) {
    return absl::InvalidArgumentError(
        "invalid-argument: message is not below the modulus");
  }
  const BigNum multiplier = rhat.ModExp(key.verify_exponent, key.modulus);
  return BlindWithMultiplier(message, multiplier, key);
}

absl::StatusOr<BigNum> Blind(const EphId& ephid, const BigNum& rhat,
                             const DayPublicKey& key) {
  ASSIGN_OR_RETURN(BigNum m, PaddedMessage(ephid, key));
  return BlindMessage(m, rhat, key);
}

absl::StatusOr<BigNum> SignBlinded(const BigNum& blinded,
                                   const DayKeyPair& keys) {
  if (blinded.IsZero() || blinded >= keys.public_key().modulus) {
    return absl::InvalidArgumentError(
        "invalid-argument: blinded value must satisfy 0 < value < N");
  }
  return keys.RawSign(blinded);
}

absl::StatusOr<BigNum> Unblind(const BigNum& signed_blinded, const BigNum& rhat,
                               const DayPublicKey& key) {
  auto inverse = rhat.ModInverse(key.modulus);
  if (rhat.IsZero() || !inverse.ok()) {
    return absl::InvalidArgumentError(
        "invalid-blinding-factor: rhat is not invertible mod N");
  }
  return signed_blinded.ModMul(*inverse, key.modulus);
}

absl::StatusOr<BigNum> AlternativeMultiplier(const BigNum& target,
                                             const BigNum& blinded,
                                             const DayPublicKey& key) {
  auto inverse = target.ModInverse(key.modulus);
  if (target.IsZero() || !inverse.ok()) {
    return absl::InvalidArgumentError(
        "invalid-argument: message is not invertible mod N");
  }
  return blinded.ModMul(*inverse, key.modulus);
}

bool VerifyMessageSignature(const BigNum& message, const BigNum& signature,
                            const DayPublicKey& key) {
  if (signature >= key.modulus) return false;
  return signature.ModExp(key.verify_exponent, key.modulus) == message;
}

bool VerifySignature(const EphId& ephid, const BigNum& signature,
                     const DayPublicKey& key) {
  auto m = PaddedMessage(ephid, key);
  if (!m.ok()) return false;
  return VerifyMessageSignature(*m, signature, key);
}

std::string SerializePublicKey(const DayPublicKey& key) {
  return PublicToJson(key).dump(2);
}

std::string SerializeKeyPair(const DayKeyPair& keys) {
  nlohmann::json j = PublicToJson(keys.public_key());
  j["sign_exponent"] = keys.sign_exponent().ToHexString();
  j["prime_p"] = keys.prime_p().ToHexString();
  j["prime_q"] = keys.prime_q().ToHexString();
  return j.dump(2);
}

absl::StatusOr<DayPublicKey> ParsePublicKey(absl::string_view json) {
  nlohmann::json j = nlohmann::json::parse(json, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    return absl::InvalidArgumentError(
        "malformed: key file is not a JSON object");
  }
  return PublicFromJson(j);
}

absl::StatusOr<DayKeyPair> ParseKeyPair(absl::string_view json) {
  nlohmann::json j = nlohmann::json::parse(json, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    return absl::InvalidArgumentError(
        "malformed: key file is not a JSON object");
  }
  ASSIGN_OR_RETURN(DayPublicKey pub, PublicFromJson(j));
  ASSIGN_OR_RETURN(BigNum p, HexField(j, "prime_p"));
  ASSIGN_OR_RETURN(BigNum q, HexField(j, "prime_q"));
  ASSIGN_OR_RETURN(
      DayKeyPair keys,
      DayKeyPair::FromPrimes(pub.day_index, p, q, pub.verify_exponent,
                             pub.prefix, pub.prefix_bits));
  if (!(keys.public_key().modulus == pub.modulus)) {
    return absl::InvalidArgumentError("malformed: key file: modulus != p * q");
  }
  return keys;
}

}  // namespace bsid
