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

#include "bsid/big_num.h"

#include <openssl/crypto.h>

#include <cstdlib>

#include "absl/strings/str_cat.h"

namespace bsid {

namespace {

BIGNUM* NewOrDie() {
  BIGNUM* bn = BN_new();
  if (bn == nullptr) std::abort();
  return bn;
}

void CheckOk(int rc) {
  if (rc != 1) std::abort();
}

// BN_CTX is scratch space only; one per thread keeps BigNum thread-safe.
BN_CTX* Ctx() {
  struct CtxHolder {
    BN_CTX* ctx = BN_CTX_new();
    ~CtxHolder() { BN_CTX_free(ctx); }
  };
  thread_local CtxHolder holder;
  if (holder.ctx == nullptr) std::abort();
  return holder.ctx;
}

}  // namespace

BigNum::BigNum() : bn_(NewOrDie()) {}

BigNum::BigNum(uint64_t value) : bn_(NewOrDie()) {
  CheckOk(BN_set_word(bn_.get(), value));
}

BigNum::BigNum(const BigNum& other) : bn_(BN_dup(other.bn_.get())) {
  if (bn_ == nullptr) std::abort();
}

BigNum& BigNum::operator=(const BigNum& other) {
  if (this != &other) {
    bn_.reset(BN_dup(other.bn_.get()));
    if (bn_ == nullptr) std::abort();
  }
  return *this;
}

BigNum BigNum::FromBytes(ByteSpan bytes) {
  BIGNUM* bn = BN_bin2bn(bytes.data(), static_cast<int>(bytes.size()), nullptr);
  if (bn == nullptr) std::abort();
  return BigNum(bn);
}

absl::StatusOr<BigNum> BigNum::FromDecimal(absl::string_view decimal) {
  if (decimal.empty())
    return absl::InvalidArgumentError("malformed: empty decimal");
  for (char c : decimal) {
    if (c < '0' || c > '9') {
      return absl::InvalidArgumentError(
          absl::StrCat("invalid decimal digit in '", decimal, "'"));
    }
  }
  BIGNUM* bn = nullptr;
  std::string copy(decimal);
  if (BN_dec2bn(&bn, copy.c_str()) == 0) {
    return absl::InvalidArgumentError("malformed: failed to parse decimal");
  }
  return BigNum(bn);
}

absl::StatusOr<BigNum> BigNum::FromHexString(absl::string_view hex) {
  std::string padded(hex);
  if (padded.size() % 2 == 1) padded.insert(padded.begin(), '0');
  auto bytes = FromHex(padded);
  if (!bytes.ok()) return bytes.status();
  return FromBytes(*bytes);
}

absl::StatusOr<Bytes> BigNum::ToBytes(size_t width) const {
  if (ByteLength() > width) {
    return absl::InvalidArgumentError(
        absl::StrCat("invalid-argument: value needs ", ByteLength(),
                     " bytes, field is ", width));
  }
  Bytes out(width);
  if (BN_bn2binpad(bn_.get(), out.data(), static_cast<int>(width)) < 0) {
    return absl::InternalError("BN_bn2binpad failed");
  }
  return out;
}

Bytes BigNum::ToMinimalBytes() const {
  Bytes out(ByteLength());
  BN_bn2bin(bn_.get(), out.data());
  return out;
}

std::string BigNum::ToDecimal() const {
  char* s = BN_bn2dec(bn_.get());
  if (s == nullptr) std::abort();
  std::string out(s);
  OPENSSL_free(s);
  return out;
}

std::string BigNum::ToHexString() const { return ToHex(ToMinimalBytes()); }

absl::StatusOr<uint64_t> BigNum::ToUint64() const {
  if (BitLength() > 64) return absl::OutOfRangeError("value exceeds 64 bits");
  uint64_t v = 0;
  for (uint8_t b : ToMinimalBytes()) v = (v << 8) | b;
  return v;
}

int BigNum::BitLength() const { return BN_num_bits(bn_.get()); }
bool BigNum::IsZero() const { return BN_is_zero(bn_.get()); }
bool BigNum::IsOne() const { return BN_is_one(bn_.get()); }
bool BigNum::IsOdd() const { return BN_is_odd(bn_.get()); }
bool BigNum::IsBitSet(int n) const { return BN_is_bit_set(bn_.get(), n); }

BigNum BigNum::operator+(const BigNum& rhs) const {
  BigNum out;
  CheckOk(BN_add(out.bn_.get(), bn_.get(), rhs.bn_.get()));
  return out;
}

BigNum BigNum::operator-(const BigNum& rhs) const {
  BigNum out;
  CheckOk(BN_sub(out.bn_.get(), bn_.get(), rhs.bn_.get()));
  return out;
}

BigNum BigNum::operator*(const BigNum& rhs) const {
  BigNum out;
  CheckOk(BN_mul(out.bn_.get(), bn_.get(), rhs.bn_.get(), Ctx()));
  return out;
}

BigNum BigNum::operator/(const BigNum& rhs) const {
  BigNum out;
  CheckOk(BN_div(out.bn_.get(), nullptr, bn_.get(), rhs.bn_.get(), Ctx()));
  return out;
}

BigNum BigNum::operator%(const BigNum& rhs) const {
  BigNum out;
  CheckOk(BN_nnmod(out.bn_.get(), bn_.get(), rhs.bn_.get(), Ctx()));
  return out;
}

BigNum BigNum::operator<<(int bits) const {
  BigNum out;
  CheckOk(BN_lshift(out.bn_.get(), bn_.get(), bits));
  return out;
}

BigNum BigNum::operator>>(int bits) const {
  BigNum out;
  CheckOk(BN_rshift(out.bn_.get(), bn_.get(), bits));
  return out;
}

BigNum BigNum::MaskBits(int bits) const {
  BigNum out(*this);
  if (out.BitLength() > bits) CheckOk(BN_mask_bits(out.bn_.get(), bits));
  return out;
}

BigNum BigNum::ModMul(const BigNum& rhs, const BigNum& modulus) const {
  BigNum out;
  CheckOk(BN_mod_mul(out.bn_.get(), bn_.get(), rhs.bn_.get(), modulus.bn_.get(),
                     Ctx()));
  return out;
}

BigNum BigNum::ModExp(const BigNum& exponent, const BigNum& modulus) const {
  BigNum out;
  CheckOk(BN_mod_exp(out.bn_.get(), bn_.get(), exponent.bn_.get(),
                     modulus.bn_.get(), Ctx()));
  return out;
}

absl::StatusOr<BigNum> BigNum::ModInverse(const BigNum& modulus) const {
  BigNum out;
  if (BN_mod_inverse(out.bn_.get(), bn_.get(), modulus.bn_.get(), Ctx()) ==
      nullptr) {
    return absl::InvalidArgumentError(
        "invalid-argument: value is not invertible");
  }
  return out;
}

BigNum BigNum::Gcd(const BigNum& rhs) const {
  BigNum out;
  CheckOk(BN_gcd(out.bn_.get(), bn_.get(), rhs.bn_.get(), Ctx()));
  return out;
}

BigNum BigNum::Lcm(const BigNum& rhs) const { return (*this * rhs) / Gcd(rhs); }

bool BigNum::IsPrime() const {
  return BN_check_prime(bn_.get(), Ctx(), nullptr) == 1;
}

std::strong_ordering BigNum::operator<=>(const BigNum& rhs) const {
  int c = BN_cmp(bn_.get(), rhs.bn_.get());
  if (c < 0) return std::strong_ordering::less;
  if (c > 0) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

bool BigNum::operator==(const BigNum& rhs) const {
  return BN_cmp(bn_.get(), rhs.bn_.get()) == 0;
}

}  // namespace bsid
