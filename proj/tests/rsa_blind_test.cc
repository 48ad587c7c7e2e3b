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

#include "gtest/gtest.h"
#include "test_util.h"

namespace bsid {
namespace {

using ::bsid::testing::Big;
using ::bsid::testing::HasKind;
using ::bsid::testing::Toy128;
using ::bsid::testing::Toy16Bit;
using ::bsid::testing::Toy3233;

// Private exponents computed outside the library (e*d = 1 mod lcm(p-1, q-1)).
constexpr uint64_t kToy3233D = 413;
constexpr uint64_t kToy16BitD = 2213;
// 65 * 2^17 mod 3233, from tests/oracles/vectors.py.
constexpr uint64_t kToyBlind = 725;

class SharedKey : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    Drbg rng = Drbg::FromUint64(2026);
    key_ = new DayKeyPair(DayKeyPair::Generate(5, 1024, rng).value());
    next_day_ = new DayKeyPair(DayKeyPair::Generate(6, 1024, rng).value());
  }
  static void TearDownTestSuite() {
    delete key_;
    delete next_day_;
  }
  static DayKeyPair* key_;
  static DayKeyPair* next_day_;
};
DayKeyPair* SharedKey::key_ = nullptr;
DayKeyPair* SharedKey::next_day_ = nullptr;

TEST(BigNumTest, ArithmeticAndEncoding) {
  const BigNum a = Big(1000);
  EXPECT_EQ(a + Big(24), Big(1024));
  EXPECT_EQ((a * a) % Big(7), Big(1000000 % 7));
  EXPECT_EQ(Big(1) << 100 >> 99, Big(2));
  EXPECT_EQ(Big(0xFFFF).MaskBits(8), Big(0xFF));
  ASSERT_OK_AND_ASSIGN(Bytes fixed, Big(0x0102).ToBytes(4));
  EXPECT_EQ(fixed, (Bytes{0, 0, 1, 2}));
  EXPECT_EQ(Big(0x0102).ToMinimalBytes(), (Bytes{1, 2}));
  EXPECT_TRUE(Big(0).ToMinimalBytes().empty());
  EXPECT_FALSE(Big(0x010203).ToBytes(2).ok());
  EXPECT_EQ(BigNum::FromBytes(fixed), Big(0x0102));
  ASSERT_OK_AND_ASSIGN(BigNum dec,
                       BigNum::FromDecimal("123456789012345678901"));
  EXPECT_EQ(dec.ToDecimal(), "123456789012345678901");
  EXPECT_FALSE(BigNum::FromDecimal("12a").ok());
  EXPECT_EQ(Big(3).ModInverse(Big(7)).value(), Big(5));
  EXPECT_FALSE(Big(6).ModInverse(Big(9)).ok());
  EXPECT_EQ(Big(12).Gcd(Big(18)), Big(6));
  EXPECT_TRUE(Big(3233).Gcd(Big(61)) == Big(61));
  EXPECT_TRUE(Big(65537).IsPrime());
  EXPECT_FALSE(Big(3233).IsPrime());
  BigNum copy = a;
  copy = copy + Big(1);
  EXPECT_EQ(a, Big(1000));
}

TEST(ToyGroupTest, KeyMatchesHandComputedExponent) {
  const DayKeyPair k = Toy3233();
  EXPECT_EQ(k.public_key().modulus, Big(3233));
  EXPECT_EQ(k.public_key().verify_exponent, Big(17));
  for (uint64_t m : {2, 65, 1000, 3232}) {
    EXPECT_EQ(k.RawSign(Big(m)), Big(m).ModExp(Big(kToy3233D), Big(3233)));
  }
  const DayKeyPair k16 = Toy16Bit();
  EXPECT_EQ(k16.public_key().modulus, Big(34571));
  for (uint64_t m : {2, 65, 34570}) {
    EXPECT_EQ(k16.RawSign(Big(m)), Big(m).ModExp(Big(kToy16BitD), Big(34571)));
  }
}

TEST(BlindTest, ToyVector) {
  const DayPublicKey pub = Toy3233().public_key();
  ASSERT_OK_AND_ASSIGN(BigNum blinded, BlindMessage(Big(65), Big(2), pub));
  EXPECT_EQ(blinded, Big(kToyBlind));
}

TEST(BlindTest, IdentityBlindingIsThePaddedMessage) {
  const DayPublicKey pub = Toy128().public_key();
  EphId id;
  id.fill(0x5A);
  ASSERT_OK_AND_ASSIGN(BigNum blinded, Blind(id, Big(1), pub));
  const BigNum expected = (pub.prefix << 104) + BigNum::FromBytes(AsSpan(id));
  EXPECT_EQ(blinded, expected);
  ASSERT_OK_AND_ASSIGN(BigNum padded, PaddedMessage(id, pub));
  EXPECT_EQ(padded, expected);
}

TEST(BlindTest, DistinctFactorsGiveDistinctOutputs) {
  const DayPublicKey pub = Toy3233().public_key();
  EXPECT_NE(BlindMessage(Big(65), Big(2), pub).value(),
            BlindMessage(Big(65), Big(3), pub).value());
}

TEST(BlindTest, RejectsNonInvertibleFactors) {
  const DayPublicKey pub = Toy3233().public_key();
  for (uint64_t bad : {0, 61, 53, 3233, 4000}) {
    EXPECT_TRUE(HasKind(BlindMessage(Big(65), Big(bad), pub),
                        absl::StatusCode::kInvalidArgument,
                        "invalid-blinding-factor"))
        << bad;
  }
  EXPECT_FALSE(IsValidBlindingFactor(Big(1), pub));
  EXPECT_TRUE(IsValidBlindingFactor(Big(2), pub));
}

TEST(BlindTest, PaddedMessageMustFitModulus) {
  // A 13-byte EphID does not fit under a 12-bit modulus.
  EphId id;
  id.fill(0xFF);
  EXPECT_TRUE(HasKind(PaddedMessage(id, Toy3233().public_key()),
                      absl::StatusCode::kInvalidArgument, "invalid-argument"));
}

TEST(SignTest, FixedPointAndInverse) {
  const DayKeyPair k = Toy3233();
  EXPECT_EQ(SignBlinded(Big(1), k).value(), Big(1));
  for (uint64_t m = 1; m < 3233; m += 37) {
    ASSERT_OK_AND_ASSIGN(BigNum s, SignBlinded(Big(m), k));
    EXPECT_EQ(s.ModExp(Big(17), Big(3233)), Big(m));
  }
  EXPECT_TRUE(HasKind(SignBlinded(Big(0), k),
                      absl::StatusCode::kInvalidArgument, "invalid-argument"));
  EXPECT_TRUE(HasKind(SignBlinded(Big(3233), k),
                      absl::StatusCode::kInvalidArgument, "invalid-argument"));
}

TEST(SignTest, UnblindingIdentityOnToyGroup) {
  // sign(blind(m, r)) * r^-1 = m^d mod N, with d from outside the library.
  const DayKeyPair k = Toy3233();
  const DayPublicKey& pub = k.public_key();
  for (uint64_t m : {5, 65, 1234, 3000}) {
    for (uint64_t r : {2, 3, 100, 3232}) {
      ASSERT_OK_AND_ASSIGN(BigNum b, BlindMessage(Big(m), Big(r), pub));
      ASSERT_OK_AND_ASSIGN(BigNum sb, SignBlinded(b, k));
      ASSERT_OK_AND_ASSIGN(BigNum s, Unblind(sb, Big(r), pub));
      EXPECT_EQ(s, Big(m).ModExp(Big(kToy3233D), Big(3233)));
      EXPECT_TRUE(VerifyMessageSignature(Big(m), s, pub));
    }
  }
}

TEST(UnblindTest, IdentityFactorIsNoOp) {
  const DayPublicKey pub = Toy3233().public_key();
  EXPECT_EQ(Unblind(Big(999), Big(1), pub).value(), Big(999));
  EXPECT_TRUE(HasKind(Unblind(Big(999), Big(61), pub),
                      absl::StatusCode::kInvalidArgument,
                      "invalid-blinding-factor"));
}

TEST_F(SharedKey, RoundTripMatchesDirectExponentiation) {
  const DayPublicKey& pub = key_->public_key();
  Drbg rng = Drbg::FromUint64(77);
  for (int trial = 0; trial < 200; ++trial) {
    const EphId id = rng.Next<kEphIdSize>();
    BigNum rhat;
    do {
      Bytes raw(pub.modulus_bytes());
      rng.Fill(raw);
      rhat = BigNum::FromBytes(raw) % pub.modulus;
    } while (!IsValidBlindingFactor(rhat, pub));
    ASSERT_OK_AND_ASSIGN(BigNum b, Blind(id, rhat, pub));
    ASSERT_OK_AND_ASSIGN(BigNum sb, SignBlinded(b, *key_));
    ASSERT_OK_AND_ASSIGN(BigNum s, Unblind(sb, rhat, pub));
    ASSERT_OK_AND_ASSIGN(BigNum m, PaddedMessage(id, pub));
    // Non-CRT route for the expected value.
    ASSERT_EQ(s, m.ModExp(key_->sign_exponent(), pub.modulus));
    ASSERT_TRUE(VerifySignature(id, s, pub));

    ASSERT_OK_AND_ASSIGN(BigNum wrong, Unblind(sb, rhat + BigNum(1), pub));
    ASSERT_FALSE(VerifySignature(id, wrong, pub));
  }
}

TEST_F(SharedKey, RandomSignatureAndOtherDayFail) {
  const DayPublicKey& pub = key_->public_key();
  EphId id;
  id.fill(3);
  ASSERT_OK_AND_ASSIGN(BigNum m, PaddedMessage(id, pub));
  const BigNum s = key_->RawSign(m);
  EXPECT_TRUE(VerifySignature(id, s, pub));
  EXPECT_FALSE(VerifySignature(id, s + BigNum(1), pub));
  EXPECT_FALSE(VerifySignature(id, s, next_day_->public_key()));
  EXPECT_FALSE(VerifySignature(id, pub.modulus + s, pub));
}

TEST_F(SharedKey, AlternativeMultiplierExplainsAnyBlindedValue) {
  const DayPublicKey& pub = key_->public_key();
  Drbg rng = Drbg::FromUint64(3);
  for (int trial = 0; trial < 20; ++trial) {
    const EphId id1 = rng.Next<kEphIdSize>();
    const EphId id2 = rng.Next<kEphIdSize>();
    ASSERT_OK_AND_ASSIGN(BigNum m1, PaddedMessage(id1, pub));
    ASSERT_OK_AND_ASSIGN(BigNum m2, PaddedMessage(id2, pub));
    const BigNum r1 = BigNum(rng.NextUint64() | 3);
    ASSERT_OK_AND_ASSIGN(BigNum blinded, BlindMessage(m1, r1, pub));
    ASSERT_OK_AND_ASSIGN(BigNum alt, AlternativeMultiplier(m2, blinded, pub));
    EXPECT_EQ(BlindWithMultiplier(m2, alt, pub), blinded);
  }
}

TEST_F(SharedKey, KeyFilesRoundTrip) {
  ASSERT_OK_AND_ASSIGN(DayKeyPair back, ParseKeyPair(SerializeKeyPair(*key_)));
  EXPECT_EQ(back.public_key().modulus, key_->public_key().modulus);
  EXPECT_EQ(back.sign_exponent(), key_->sign_exponent());
  EXPECT_EQ(back.public_key().prefix, key_->public_key().prefix);
  EXPECT_EQ(back.public_key().day_index, 5u);

  ASSERT_OK_AND_ASSIGN(DayPublicKey pub,
                       ParsePublicKey(SerializePublicKey(key_->public_key())));
  EXPECT_EQ(pub.modulus, key_->public_key().modulus);
  EXPECT_EQ(pub.prefix_bits, key_->public_key().prefix_bits);

  EXPECT_TRUE(HasKind(ParseKeyPair("{"), absl::StatusCode::kInvalidArgument,
                      "malformed"));
  EXPECT_TRUE(HasKind(ParsePublicKey("{}"), absl::StatusCode::kInvalidArgument,
                      "malformed"));
}

TEST(KeyGenTest, SeededGenerationIsDeterministicAndSized) {
  Drbg a = Drbg::FromUint64(9);
  Drbg b = Drbg::FromUint64(9);
  ASSERT_OK_AND_ASSIGN(DayKeyPair ka, DayKeyPair::Generate(0, 512, a));
  ASSERT_OK_AND_ASSIGN(DayKeyPair kb, DayKeyPair::Generate(0, 512, b));
  EXPECT_EQ(ka.public_key().modulus, kb.public_key().modulus);
  EXPECT_EQ(ka.public_key().modulus_bits(), 512);
  EXPECT_EQ(ka.public_key().verify_exponent, Big(65537));
  EXPECT_EQ(ka.prime_p() * ka.prime_q(), ka.public_key().modulus);
  EXPECT_TRUE(HasKind(DayKeyPair::Generate(0, 256, a),
                      absl::StatusCode::kInvalidArgument, "invalid-argument"));
}

}  // namespace
}  // namespace bsid
