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

#ifndef BSID_BIG_NUM_H_
#define BSID_BIG_NUM_H_

#include <openssl/bn.h>

#include <compare>
#include <cstdint>
#include <memory>
#include <string>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "bsid/bytes.h"

namespace bsid {

// Value-semantic arbitrary precision non-negative integer backed by an
// OpenSSL BIGNUM. Copies are deep. Arithmetic that can fail (inverse, range
// checked serialization) returns StatusOr; everything else aborts only on
// allocation failure.
class BigNum {
 public:
  BigNum();
  explicit BigNum(uint64_t value);
  BigNum(const BigNum& other);
  BigNum(BigNum&& other) noexcept = default;
  BigNum& operator=(const BigNum& other);
  BigNum& operator=(BigNum&& other) noexcept = default;
  ~BigNum() = default;

  // Big-endian, unsigned.
  static BigNum FromBytes(ByteSpan bytes);
  static absl::StatusOr<BigNum> FromDecimal(absl::string_view decimal);
  static absl::StatusOr<BigNum> FromHexString(absl::string_view hex);

  // Fixed-width big-endian encoding, left-padded with zeros. Fails if the
  // value needs more than `width` bytes.
  absl::StatusOr<Bytes> ToBytes(size_t width) const;
  // Minimal big-endian encoding (empty for zero).
  Bytes ToMinimalBytes() const;
  std::string ToDecimal() const;
  std::string ToHexString() const;
  absl::StatusOr<uint64_t> ToUint64() const;

  int BitLength() const;
  size_t ByteLength() const { return (BitLength() + 7) / 8; }
  bool IsZero() const;
  bool IsOne() const;
  bool IsOdd() const;
  bool IsBitSet(int n) const;

  BigNum operator+(const BigNum& rhs) const;
  // Requires *this >= rhs.
  BigNum operator-(const BigNum& rhs) const;
  BigNum operator*(const BigNum& rhs) const;
  BigNum operator/(const BigNum& rhs) const;
  BigNum operator%(const BigNum& rhs) const;
  BigNum operator<<(int bits) const;
  BigNum operator>>(int bits) const;

  // Keeps only the low `bits` bits.
  BigNum MaskBits(int bits) const;
  BigNum ModMul(const BigNum& rhs, const BigNum& modulus) const;
  BigNum ModExp(const BigNum& exponent, const BigNum& modulus) const;
  absl::StatusOr<BigNum> ModInverse(const BigNum& modulus) const;
  BigNum Gcd(const BigNum& rhs) const;
  BigNum Lcm(const BigNum& rhs) const;

  // Probabilistic primality test; error probability below 2^-128.
  bool IsPrime() const;

  std::strong_ordering operator<=>(const BigNum& rhs) const;
  bool operator==(const BigNum& rhs) const;
  bool operator==(uint64_t rhs) const { return *this == BigNum(rhs); }

  const BIGNUM* get() const { return bn_.get(); }

 private:
  struct Deleter {
    void operator()(BIGNUM* bn) const { BN_clear_free(bn); }
  };
  explicit BigNum(BIGNUM* raw) : bn_(raw) {}

  std::unique_ptr<BIGNUM, Deleter> bn_;
};

}  // namespace bsid

#endif  // BSID_BIG_NUM_H_
