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

// Symmetric primitives shared by every protocol module.
//
//   Prf(key, label)  = HMAC-SHA256(key, label)
//   Prg(seed, len)   = SHA256(seed || be32(0)) || SHA256(seed || be32(1)) ...
//                      truncated to len bytes
//   AuthTag(k, id)   = HMAC-SHA256(k, id)[0..13)
//
// Prg output is prefix-consistent: Prg(s, a) is a prefix of Prg(s, b) for
// a <= b.

#ifndef BSID_CRYPTO_H_
#define BSID_CRYPTO_H_

#include <openssl/evp.h>

#include <array>
#include <cstdint>
#include <memory>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "bsid/bytes.h"

namespace bsid {

inline constexpr size_t kAeadNonceSize = 12;
inline constexpr size_t kAeadTagSize = 16;

Hash256 Sha256(ByteSpan data);
Hash256 HmacSha256(ByteSpan key, ByteSpan message);

// Fails with InvalidArgument unless key is exactly 32 bytes.
absl::StatusOr<Key32> Prf(ByteSpan key, absl::string_view label);
Key32 Prf(const Key32& key, absl::string_view label);

// Fails with InvalidArgument when out_len is zero.
absl::StatusOr<Bytes> Prg(const Key32& seed, size_t out_len);

AuthTag ComputeAuthTag(const Key32& key, const EphId& ephid);

// HMAC keyed once, then evaluated over many EphIDs. Receivers verify every
// pending record of an interval against one released key.
class AuthTagger {
 public:
  explicit AuthTagger(const Key32& key);
  // Not thread-safe: evaluation reuses one scratch context.
  AuthTag Tag(const EphId& ephid);

 private:
  struct CtxDeleter {
    void operator()(EVP_MD_CTX* ctx) const { EVP_MD_CTX_free(ctx); }
  };
  using CtxPtr = std::unique_ptr<EVP_MD_CTX, CtxDeleter>;

  CtxPtr inner_;
  CtxPtr outer_;
  CtxPtr scratch_;
};

// ChaCha20-Poly1305. Output layout: nonce(12) || ciphertext || tag(16).
Bytes AeadSeal(const Key32& key,
               const std::array<uint8_t, kAeadNonceSize>& nonce,
               ByteSpan plaintext);
// Fails with Unauthenticated on any tag mismatch.
absl::StatusOr<Bytes> AeadOpen(const Key32& key, ByteSpan sealed);

// Deterministic byte source: SHA-256 in counter mode over a 32-byte seed.
// Every piece of randomness in the project flows through one of these so
// that protocol runs are reproducible from a seed.
class Drbg {
 public:
  explicit Drbg(const Key32& seed) : seed_(seed) {}
  static Drbg FromUint64(uint64_t seed);
  // Seeds from the operating system.
  static Drbg FromEntropy();

  void Fill(std::span<uint8_t> out);
  Key32 NextKey();
  uint64_t NextUint64();
  // Uniform in [0, bound). bound must be positive.
  uint64_t Uniform(uint64_t bound);

  template <size_t N>
  std::array<uint8_t, N> Next() {
    std::array<uint8_t, N> out;
    Fill(out);
    return out;
  }

 private:
  void Refill();

  Key32 seed_;
  uint64_t counter_ = 0;
  Hash256 block_{};
  size_t used_ = block_.size();
};

}  // namespace bsid

#endif  // BSID_CRYPTO_H_
