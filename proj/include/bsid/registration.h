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

// Cut-and-choose issuance of blind-signed EphIDs.
//
// On day t-2 the client blinds M sets of n EphIDs and sends all M*n values
// together with a verified identity. The signer picks one set s at random
// and asks for the seeds of the other M-1 sets. It re-derives those sets
// bit-exactly; on a full match it signs set s, otherwise the identity is
// blocklisted. A client that cheats in exactly one set escapes detection
// with probability 1/M.
//
// Error statuses carry the error kind as the first token of the message,
// e.g. "audit-failed: set 3 value 17 does not match". RegistrationErrorOf()
// recovers the kind.

#ifndef BSID_REGISTRATION_H_
#define BSID_REGISTRATION_H_

#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "absl/container/flat_hash_map.h"
#include "absl/container/flat_hash_set.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "absl/time/time.h"
#include "bsid/big_num.h"
#include "bsid/bytes.h"
#include "bsid/crypto.h"
#include "bsid/ephid.h"
#include "bsid/rsa_blind.h"

namespace bsid {

enum class RegistrationError : uint8_t {
  kNone = 0,
  kMalformedRequest = 0xE1,
  kAlreadyRegistered = 0xE2,
  kBlocked = 0xE3,
  kAuditFailed = 0xE4,
  kMalformedReveal = 0xE5,
  kIdentityRejected = 0xE6,
  kUnknownDay = 0xE7,
  kSignerMisbehavior = 0xE8,
  kInternal = 0xEF,
};

absl::string_view RegistrationErrorName(RegistrationError error);
RegistrationError RegistrationErrorOf(const absl::Status& status);
absl::Status MakeRegistrationError(RegistrationError error,
                                   absl::string_view detail);

struct RegistrationRequest {
  std::string identity;
  uint32_t day_index = 0;
  uint16_t set_count = 0;                    // M
  uint16_t per_set = 0;                      // n
  std::vector<std::vector<BigNum>> blinded;  // [M][n]
};

struct Challenge {
  uint64_t session_id = 0;
  uint16_t selected = 0;  // s, 1-based
};

struct RevealedSet {
  uint16_t index = 0;  // 1-based
  Key32 secondary_seed{};
  Key32 blinding_seed{};
};

struct RevealPackage {
  std::vector<RevealedSet> sets;
};

struct Credential {
  EphId ephid{};
  BigNum signature;
  // 1-based broadcast interval on day_index.
  uint32_t interval = 0;
};

struct IssuedCredentials {
  uint32_t day_index = 0;
  uint16_t selected = 0;
  uint16_t set_count = 0;
  uint16_t per_set = 0;
  Key32 secondary_seed{};  // SK_{t_s}; published on a positive report.
  std::vector<Credential> credentials;
};

// Client-side session state. Holds the day seeds so that the reveal and the
// unblinding can be recomputed; never leaves the device.
struct ClientState {
  MainDaySeed main;
  std::string identity;
  uint16_t set_count = 0;
  uint16_t per_set = 0;
  DayPublicKey key;
  std::vector<Key32> secondary_seeds;
  std::vector<Key32> blinding_seeds;
};

absl::StatusOr<std::pair<RegistrationRequest, ClientState>> ClientBegin(
    const MainDaySeed& main, uint16_t set_count, uint16_t per_set,
    const DayPublicKey& key, std::string identity);

// Seeds of every set except `selected`.
absl::StatusOr<RevealPackage> ClientReveal(const ClientState& state,
                                           uint16_t selected);

// Unblinds the signer's answer for set `selected`; fails with
// signer-misbehavior if any resulting signature does not verify.
absl::StatusOr<IssuedCredentials> ClientUnblind(
    const ClientState& state, uint16_t selected,
    const std::vector<BigNum>& signed_blinded);

using IdentityVerifier = std::function<absl::Status(absl::string_view)>;

// Accepts any well-formed token (non-empty, printable, at most 256 bytes)
// unless it was scripted to fail with Reject().
class StubIdentityVerifier {
 public:
  void Reject(std::string identity) { rejected_.insert(std::move(identity)); }
  absl::Status operator()(absl::string_view identity) const;

 private:
  std::set<std::string, std::less<>> rejected_;
};

struct BlocklistEntry {
  std::string identity;
  absl::Time blocked_from;
  absl::Time expires_at;
};

// Persisted as one tab-separated line per entry:
//   identity \t blocked_from \t expires_at   (decimal epoch seconds)
class Blocklist {
 public:
  void Add(std::string identity, absl::Time from, absl::Time expires);
  bool IsBlocked(absl::string_view identity, absl::Time now) const;
  const std::vector<BlocklistEntry>& entries() const { return entries_; }

  std::string Serialize() const;
  static absl::StatusOr<Blocklist> Parse(absl::string_view text);
  absl::Status Save(const std::string& path) const;
  static absl::StatusOr<Blocklist> Load(const std::string& path);

 private:
  std::vector<BlocklistEntry> entries_;
};

struct SignerOptions {
  absl::Duration blocklist_expiry = absl::Hours(24 * 90);
  uint64_t rng_seed = 0;
  IdentityVerifier verify_identity = StubIdentityVerifier();
};

// The issuing authority. Thread-safe; all state mutations serialize on one
// mutex.
class Signer {
 public:
  explicit Signer(SignerOptions options = {});

  absl::Status AddDayKeys(DayKeyPair keys);
  absl::StatusOr<DayPublicKey> PublicKey(uint32_t day_index) const;

  // Rejects blocked or already-served identities and malformed requests;
  // otherwise records the identity as served for the day and returns a
  // challenge with a uniformly random selected set.
  absl::StatusOr<Challenge> Receive(RegistrationRequest request,
                                    absl::Time now);

  // Audits every revealed set and signs the selected one. Any mismatch
  // blocklists the identity and fails with audit-failed.
  absl::StatusOr<std::vector<BigNum>> AuditAndSign(uint64_t session_id,
                                                   const RevealPackage& reveal,
                                                   absl::Time now);

  // Drops served-identity records of days before `day_index`.
  void PruneServedBefore(uint32_t day_index);

  Blocklist blocklist() const;
  void SetBlocklist(Blocklist blocklist);

  // Every byte the signer retains: open sessions, completed transcripts,
  // served identities and the blocklist. Used to check what the signer can
  // and cannot learn.
  Bytes DebugStateBytes() const;

 private:
  struct Session {
    RegistrationRequest request;
    uint16_t selected = 0;
  };
  struct TranscriptEntry {
    RegistrationRequest request;
    uint16_t selected = 0;
    RevealPackage reveal;
    std::vector<BigNum> signed_values;
  };

  SignerOptions options_;
  mutable std::mutex mu_;
  Drbg rng_;
  uint64_t next_session_ = 1;
  std::map<uint32_t, DayKeyPair> keys_;
  std::map<uint32_t, std::set<std::string, std::less<>>> served_;
  std::map<uint64_t, Session> sessions_;
  std::vector<TranscriptEntry> transcript_;
  Blocklist blocklist_;
};

// ---------------------------------------------------------------------------
// Wire format. All integers big-endian; big integers are modulus-width.
//
//   request   = u8 0x01 | u32 day | u16 M | u16 n | u16 len | identity |
//               M*n values
//   challenge = u8 0x02 | u16 s
//   reveal    = u8 0x03 | (M-1) * (u16 index | 32 SK | 32 b)
//   response  = u8 0x04 | n values
//   error     = u8 error-code (0xE1..0xEF)
//
// On a stream each message is framed with a u32 length.

inline constexpr uint8_t kMsgRequest = 0x01;
inline constexpr uint8_t kMsgChallenge = 0x02;
inline constexpr uint8_t kMsgReveal = 0x03;
inline constexpr uint8_t kMsgResponse = 0x04;

absl::StatusOr<Bytes> EncodeRequest(const RegistrationRequest& request,
                                    size_t value_width);
// The value width is implied by the remaining length.
absl::StatusOr<RegistrationRequest> DecodeRequest(ByteSpan wire);
Bytes EncodeChallenge(const Challenge& challenge);
absl::StatusOr<Challenge> DecodeChallenge(ByteSpan wire);
Bytes EncodeReveal(const RevealPackage& reveal);
absl::StatusOr<RevealPackage> DecodeReveal(ByteSpan wire);
absl::StatusOr<Bytes> EncodeResponse(const std::vector<BigNum>& values,
                                     size_t value_width);
Bytes EncodeError(const absl::Status& status);
// Returns the signed values, or the status carried by an error message.
absl::StatusOr<std::vector<BigNum>> DecodeResponse(ByteSpan wire,
                                                   size_t value_width);

Bytes FrameMessage(ByteSpan message);
// Splits one u32-length-prefixed frame off the front of `stream`.
absl::StatusOr<Bytes> UnframeMessage(ByteSpan stream, size_t* consumed);

// Server side of one client connection speaking the wire format.
class SignerConnection {
 public:
  SignerConnection(Signer& signer, std::function<absl::Time()> clock)
      : signer_(signer), clock_(std::move(clock)) {}

  // Consumes a request or reveal, returns a challenge, response or error.
  Bytes Handle(ByteSpan message);

 private:
  Signer& signer_;
  std::function<absl::Time()> clock_;
  uint64_t session_id_ = 0;
  size_t value_width_ = 0;
};

// Drives the whole client side through `transport`, which carries one
// message to the signer and returns its reply.
absl::StatusOr<IssuedCredentials> RunRegistration(
    const MainDaySeed& main, uint16_t set_count, uint16_t per_set,
    const DayPublicKey& key, std::string identity,
    const std::function<Bytes(ByteSpan)>& transport);

// Credentials file (JSON): day seeds, selected set and the (EphID, SD) list.
std::string SerializeCredentials(const IssuedCredentials& creds,
                                 const MainDaySeed& main);
absl::StatusOr<IssuedCredentials> ParseCredentials(absl::string_view json);

}  // namespace bsid

#endif  // BSID_REGISTRATION_H_
