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

#include "bsid/crypto.h"

#include <openssl/hmac.h>
#include <openssl/rand.h>

#include <algorithm>
#include <cstdlib>
#include <cstring>

#include "absl/strings/str_cat.h"

namespace bsid {

namespace {

constexpr size_t kSha256BlockSize = 64;

void Die(const char* what) {
  (void)what;
  std::abort();
}

}  // namespace

Hash256 Sha256(ByteSpan data) {
  Hash256 out;
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(),
                 nullptr) != 1) {
    Die("EVP_Digest");
  }
  return out;
}

Hash256 HmacSha256(ByteSpan key, ByteSpan message) {
  Hash256 out;
  unsigned int len = 0;
  if (HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()),
           message.data(), message.size(), out.data(), &len) == nullptr) {
    Die("HMAC");
  }
  return out;
}

absl::StatusOr<Key32> Prf(ByteSpan key, absl::string_view label) {
  if (key.size() != kKeySize) {
    return absl::InvalidArgumentError(absl::StrCat(
        "invalid-argument: PRF key must be 32 bytes, got ", key.size()));
  }
  return HmacSha256(key, AsSpan(label));
}

Key32 Prf(const Key32& key, absl::string_view label) {
  return HmacSha256(AsSpan(key), AsSpan(label));
}

absl::StatusOr<Bytes> Prg(const Key32& seed, size_t out_len) {
  if (out_len == 0) {
    return absl::InvalidArgumentError(
        "invalid-argument: PRG output length must be positive");
  }
  Bytes out;
  out.reserve(out_len + 32);
  std::array<uint8_t, kKeySize + 4> block_input;
  std::copy(seed.begin(), seed.end(), block_input.begin());
  for (uint32_t counter = 0; out.size() < out_len; ++counter) {
    block_input[32] = static_cast<uint8_t>(counter >> 24);
    block_input[33] = static_cast<uint8_t>(counter >> 16);
    block_input[34] = static_cast<uint8_t>(counter >> 8);
    block_input[35] = static_cast<uint8_t>(counter);
    Hash256 block = Sha256(block_input);
    out.insert(out.end(), block.begin(), block.end());
  }
  out.resize(out_len);
  return out;
}

AuthTag ComputeAuthTag(const Key32& key, const EphId& ephid) {
  Hash256 mac = HmacSha256(AsSpan(key), AsSpan(ephid));
  AuthTag tag;
  std::copy_n(mac.begin(), tag.size(), tag.begin());
  return tag;
}

AuthTagger::AuthTagger(const Key32& key)
    : inner_(EVP_MD_CTX_new()),
      outer_(EVP_MD_CTX_new()),
      scratch_(EVP_MD_CTX_new()) {
  if (!inner_ || !outer_ || !scratch_) Die("EVP_MD_CTX_new");
  std::array<uint8_t, kSha256BlockSize> ipad;
  std::array<uint8_t, kSha256BlockSize> opad;
  ipad.fill(0x36);
  opad.fill(0x5c);
  // 32-byte keys are shorter than the block size, so no pre-hashing.
  for (size_t i = 0; i < key.size(); ++i) {
    ipad[i] ^= key[i];
    opad[i] ^= key[i];
  }
  if (EVP_DigestInit_ex(inner_.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(inner_.get(), ipad.data(), ipad.size()) != 1 ||
      EVP_DigestInit_ex(outer_.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(outer_.get(), opad.data(), opad.size()) != 1) {
    Die("HMAC precompute");
  }
}

AuthTag AuthTagger::Tag(const EphId& ephid) {
  Hash256 inner_digest;
  Hash256 outer_digest;
  unsigned int len = 0;
  EVP_MD_CTX* ctx = scratch_.get();
  if (EVP_MD_CTX_copy_ex(ctx, inner_.get()) != 1 ||
      EVP_DigestUpdate(ctx, ephid.data(), ephid.size()) != 1 ||
      EVP_DigestFinal_ex(ctx, inner_digest.data(), &len) != 1 ||
      EVP_MD_CTX_copy_ex(ctx, outer_.get()) != 1 ||
      EVP_DigestUpdate(ctx, inner_digest.data(), inner_digest.size()) != 1 ||
      EVP_DigestFinal_ex(ctx, outer_digest.data(), &len) != 1) {
    Die("HMAC evaluate");
  }
  AuthTag tag;
  std::copy_n(outer_digest.begin(), tag.size(), tag.begin());
  return tag;
}

Bytes AeadSeal(const Key32& key,
               const std::array<uint8_t, kAeadNonceSize>& nonce,
               ByteSpan plaintext) {
  std::unique_ptr<EVP_CIPHER_CTX, decltype(&EVP_CIPHER_CTX_free)> ctx(
      EVP_CIPHER_CTX_new(), &EVP_CIPHER_CTX_free);
  if (!ctx) Die("EVP_CIPHER_CTX_new");
  Bytes out(kAeadNonceSize + plaintext.size() + kAeadTagSize);
  std::copy(nonce.begin(), nonce.end(), out.begin());
  int len = 0;
  if (EVP_EncryptInit_ex(ctx.get(), EVP_chacha20_poly1305(), nullptr,
                         key.data(), nonce.data()) != 1 ||
      EVP_EncryptUpdate(ctx.get(), out.data() + kAeadNonceSize, &len,
                        plaintext.data(),
                        static_cast<int>(plaintext.size())) != 1 ||
      EVP_EncryptFinal_ex(ctx.get(), out.data() + kAeadNonceSize + len, &len) !=
          1 ||
      EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_AEAD_GET_TAG, kAeadTagSize,
                          out.data() + kAeadNonceSize + plaintext.size()) !=
          1) {
    Die("AEAD seal");
  }
  return out;
}

absl::StatusOr<Bytes> AeadOpen(const Key32& key, ByteSpan sealed) {
  if (sealed.size() < kAeadNonceSize + kAeadTagSize) {
    return absl::InvalidArgumentError("malformed: sealed box too short");
  }
  const size_t ct_len = sealed.size() - kAeadNonceSize - kAeadTagSize;
  std::unique_ptr<EVP_CIPHER_CTX, decltype(&EVP_CIPHER_CTX_free)> ctx(
      EVP_CIPHER_CTX_new(), &EVP_CIPHER_CTX_free);
  if (!ctx) Die("EVP_CIPHER_CTX_new");
  Bytes plaintext(ct_len);
  std::array<uint8_t, kAeadTagSize> tag;
  std::copy_n(sealed.begin() + kAeadNonceSize + ct_len, kAeadTagSize,
              tag.begin());
  int len = 0;
  if (EVP_DecryptInit_ex(ctx.get(), EVP_chacha20_poly1305(), nullptr,
                         key.data(), sealed.data()) != 1 ||
      EVP_DecryptUpdate(ctx.get(), plaintext.data(), &len,
                        sealed.data() + kAeadNonceSize,
                        static_cast<int>(ct_len)) != 1 ||
      EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_AEAD_SET_TAG, kAeadTagSize,
                          tag.data()) != 1) {
    return absl::InternalError("AEAD open setup failed");
  }
  if (EVP_DecryptFinal_ex(ctx.get(), plaintext.data() + len, &len) != 1) {
    return absl::UnauthenticatedError(
        "invalid-key: authentication tag mismatch");
  }
  return plaintext;
}

Drbg Drbg::FromUint64(uint64_t seed) {
  ByteWriter w;
  w.U64(seed);
  return Drbg(Sha256(w.bytes()));
}

Drbg Drbg::FromEntropy() {
  Key32 seed;
  if (RAND_bytes(seed.data(), static_cast<int>(seed.size())) != 1) {
    Die("RAND_bytes");
  }
  return Drbg(seed);
}

void Drbg::Refill() {
  std::array<uint8_t, kKeySize + 8> input;
  std::copy(seed_.begin(), seed_.end(), input.begin());
  for (int i = 0; i < 8; ++i) {
    input[kKeySize + i] = static_cast<uint8_t>(counter_ >> (56 - 8 * i));
  }
  ++counter_;
  block_ = Sha256(input);
  used_ = 0;
}

void Drbg::Fill(std::span<uint8_t> out) {
  for (uint8_t& b : out) {
    if (used_ == block_.size()) Refill();
    b = block_[used_++];
  }
}

Key32 Drbg::NextKey() { return Next<kKeySize>(); }

uint64_t Drbg::NextUint64() {
  auto bytes = Next<8>();
  uint64_t v = 0;
  for (uint8_t b : bytes) v = (v << 8) | b;
  return v;
}

uint64_t Drbg::Uniform(uint64_t bound) {
  if (bound == 0) std::abort();
  // Rejection sampling removes modulo bias.
  const uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
  uint64_t v;
  do {
    v = NextUint64();
  } while (v >= limit);
  return v % bound;
}

}  // namespace bsid
