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

#include "bsid/tesla.h"

#include "absl/strings/str_cat.h"
#include "bsid/status_macros.h"

namespace bsid {

namespace {

constexpr char kChainLabel[] = "tesla-chain";

absl::Status InvalidInterval(uint32_t i, uint32_t length) {
  return absl::OutOfRangeError(
      absl::StrCat("invalid-interval: ", i, " is outside 1..", length));
}

bool PrefixMatches(const RequestNonce& nonce, ByteSpan prefix,
                   size_t bit_count) {
  for (size_t bit = 0; bit < bit_count; ++bit) {
    const uint8_t mask = 0x80 >> (bit % 8);
    if ((nonce[bit / 8] & mask) != (prefix[bit / 8] & mask)) return false;
  }
  return true;
}

}  // namespace

std::optional<uint32_t> TeslaSchedule::IntervalAt(absl::Time t) const {
  const absl::Time first_window = start - period;
  if (t < first_window) return std::nullopt;
  absl::Duration rem;
  const int64_t index = absl::IDivDuration(t - first_window, period, &rem);
  if (index >= length) return std::nullopt;
  return static_cast<uint32_t>(index + 1);
}

absl::StatusOr<TeslaChain> TeslaChain::Generate(const Key32& seed,
                                                TeslaSchedule schedule) {
  if (schedule.length == 0) {
    return absl::InvalidArgumentError("invalid-argument: chain length is 0");
  }
  if (schedule.period <= absl::ZeroDuration() ||
      schedule.sync_error < absl::ZeroDuration() ||
      schedule.sync_error >= schedule.period) {
    return absl::InvalidArgumentError(
        "invalid-argument: need period > sync_error >= 0");
  }
  std::vector<Key32> keys(size_t{schedule.length} + 1);
  keys[schedule.length] = Prf(seed, kChainLabel);
  for (uint32_t i = schedule.length; i > 0; --i) {
    keys[i - 1] = Sha256(AsSpan(keys[i]));
  }
  return TeslaChain(schedule, std::move(keys));
}

absl::StatusOr<Key32> TeslaChain::key(uint32_t i) const {
  if (i > schedule_.length) return InvalidInterval(i, schedule_.length);
  return keys_[i];
}

absl::StatusOr<Key32> ReleaseKey(const TeslaChain& chain, uint32_t i,
                                 absl::Time now) {
  if (i == 0 || i > chain.length()) return InvalidInterval(i, chain.length());
  if (now < chain.schedule().ReleaseTime(i)) {
    return absl::UnavailableError(
        absl::StrCat("not-yet: key ", i, " is released at ",
                     absl::FormatTime(chain.schedule().ReleaseTime(i))));
  }
  return chain.key(i);
}

Key32 HashBack(const Key32& k_i, uint32_t steps) {
  Key32 k = k_i;
  for (uint32_t s = 0; s < steps; ++s) k = Sha256(AsSpan(k));
  return k;
}

bool VerifyReleasedKey(const Key32& candidate, uint32_t i, uint32_t j,
                       const Key32& k_j) {
  if (i <= j) return false;
  return HashBack(candidate, i - j) == k_j;
}

absl::StatusOr<AuthTag> DecryptAuthenticator(const PublishedAuth& entry,
                                             const Key32& response_key) {
  ASSIGN_OR_RETURN(Bytes plain, AeadOpen(response_key, entry.ciphertext));
  if (plain.size() != kAuthTagSize) {
    return absl::DataLossError("malformed: authenticator has wrong length");
  }
  AuthTag tag;
  std::copy(plain.begin(), plain.end(), tag.begin());
  return tag;
}

AuthService::AuthService(DayPublicKey key, TeslaChain chain, const Clock& clock,
                         uint64_t rng_seed)
    : key_(std::move(key)),
      chain_(std::move(chain)),
      clock_(clock),
      rng_(Drbg::FromUint64(rng_seed)) {}

absl::StatusOr<PublishedAuth> AuthService::Issue(const AuthRequest& request) {
  if (!VerifySignature(request.ephid, request.sd, key_)) {
    return absl::UnauthenticatedError(
        "invalid-credential: signature does not verify under the day key");
  }
  if (request.interval == 0 || request.interval > chain_.length()) {
    return InvalidInterval(request.interval, chain_.length());
  }
  ASSIGN_OR_RETURN(Key32 k, chain_.key(request.interval));
  const AuthTag auth = ComputeAuthTag(k, request.ephid);

  std::lock_guard<std::mutex> lock(mu_);
  if (served_.contains(request.ephid)) {
    return absl::AlreadyExistsError(
        "already-issued: an authenticator exists for this EphID");
  }
  if (published_.contains(request.nonce)) {
    return absl::InvalidArgumentError(
        "invalid-argument: request nonce already published");
  }
  const auto aead_nonce = rng_.Next<kAeadNonceSize>();
  PublishedAuth entry{request.nonce,
                      AeadSeal(request.response_key, aead_nonce, AsSpan(auth))};
  served_.insert(request.ephid);
  published_.emplace(entry.nonce, entry.ciphertext);
  return entry;
}

absl::StatusOr<Key32> AuthService::ReleaseKey(uint32_t i) const {
  return bsid::ReleaseKey(chain_, i, clock_.Now());
}

std::vector<PublishedAuth> AuthService::RetrieveFull() const {
  std::lock_guard<std::mutex> lock(mu_);
  std::vector<PublishedAuth> out;
  out.reserve(published_.size());
  for (const auto& [nonce, ct] : published_) out.push_back({nonce, ct});
  return out;
}

std::vector<PublishedAuth> AuthService::RetrievePartial(
    ByteSpan prefix, size_t bit_count) const {
  bit_count = std::min({bit_count, prefix.size() * 8, kRequestNonceSize * 8});
  std::lock_guard<std::mutex> lock(mu_);
  std::vector<PublishedAuth> out;
  for (const auto& [nonce, ct] : published_) {
    if (PrefixMatches(nonce, prefix, bit_count)) out.push_back({nonce, ct});
  }
  return out;
}

std::optional<PublishedAuth> AuthService::RetrieveIndividual(
    const RequestNonce& nonce) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = published_.find(nonce);
  if (it == published_.end()) return std::nullopt;
  return PublishedAuth{it->first, it->second};
}

Bytes EncodePublishedList(const std::vector<PublishedAuth>& entries) {
  ByteWriter w;
  for (const PublishedAuth& e : entries) {
    w.Append(AsSpan(e.nonce));
    w.U16(static_cast<uint16_t>(e.ciphertext.size()));
    w.Append(e.ciphertext);
  }
  return std::move(w).bytes();
}

absl::StatusOr<std::vector<PublishedAuth>> DecodePublishedList(ByteSpan data) {
  ByteReader r(data);
  std::vector<PublishedAuth> out;
  while (!r.done()) {
    PublishedAuth e;
    auto nonce = r.Fixed<kRequestNonceSize>();
    auto len = r.U16();
    if (!nonce.ok() || !len.ok()) {
      return absl::InvalidArgumentError("malformed: truncated published entry");
    }
    auto ct = r.Take(*len);
    if (!ct.ok()) {
      return absl::InvalidArgumentError("malformed: truncated ciphertext");
    }
    e.nonce = *nonce;
    e.ciphertext.assign(ct->begin(), ct->end());
    out.push_back(std::move(e));
  }
  return out;
}

Mix::FlushResult Mix::Flush(AuthService& service) {
  // Fisher-Yates driven by the Mix's own stream.
  for (size_t i = queue_.size(); i > 1; --i) {
    std::swap(queue_[i - 1], queue_[rng_.Uniform(i)]);
  }
  FlushResult result;
  for (const AuthRequest& request : queue_) {
    if (service.Issue(request).ok()) {
      ++result.issued;
    } else {
      ++result.rejected;
    }
  }
  queue_.clear();
  return result;
}

Bytes EncodeKeyRequest(uint32_t i) {
  ByteWriter w;
  w.U8(kKeyRequest);
  w.U32(i);
  return std::move(w).bytes();
}

absl::StatusOr<uint32_t> DecodeKeyRequest(ByteSpan datagram) {
  ByteReader r(datagram);
  auto tag = r.U8();
  auto i = r.U32();
  if (!tag.ok() || *tag != kKeyRequest || !i.ok() || !r.done()) {
    return absl::InvalidArgumentError("malformed: key request");
  }
  return *i;
}

Bytes EncodeKeyResponse(uint32_t i, const std::optional<Key32>& key) {
  ByteWriter w;
  if (!key.has_value()) {
    w.U8(kKeyNotYet);
    return std::move(w).bytes();
  }
  w.U8(kKeyResponse);
  w.U32(i);
  w.Append(AsSpan(*key));
  return std::move(w).bytes();
}

absl::StatusOr<std::pair<uint32_t, Key32>> DecodeKeyResponse(
    ByteSpan datagram) {
  if (datagram.size() == 1 && datagram[0] == kKeyNotYet) {
    return absl::UnavailableError("not-yet: key not released");
  }
  ByteReader r(datagram);
  auto tag = r.U8();
  auto i = r.U32();
  auto key = r.Fixed<kKeySize>();
  if (!tag.ok() || *tag != kKeyResponse || !i.ok() || !key.ok() || !r.done()) {
    return absl::InvalidArgumentError("malformed: key response");
  }
  return std::make_pair(*i, *key);
}

std::optional<Bytes> HandleKeyDatagram(const TeslaChain& chain, absl::Time now,
                                       ByteSpan datagram) {
  auto i = DecodeKeyRequest(datagram);
  if (!i.ok()) return std::nullopt;
  auto key = ReleaseKey(chain, *i, now);
  if (!key.ok()) return EncodeKeyResponse(*i, std::nullopt);
  return EncodeKeyResponse(*i, *key);
}

}  // namespace bsid
