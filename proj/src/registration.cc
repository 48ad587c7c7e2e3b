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

#include "bsid/registration.h"

#include <fstream>
#include <sstream>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "bsid/status_macros.h"

namespace bsid {

namespace {

constexpr size_t kMaxIdentityLength = 256;

absl::StatusCode CodeFor(RegistrationError error) {
  switch (error) {
    case RegistrationError::kMalformedRequest:
    case RegistrationError::kMalformedReveal:
      return absl::StatusCode::kInvalidArgument;
    case RegistrationError::kAlreadyRegistered:
      return absl::StatusCode::kAlreadyExists;
    case RegistrationError::kBlocked:
    case RegistrationError::kAuditFailed:
      return absl::StatusCode::kPermissionDenied;
    case RegistrationError::kIdentityRejected:
      return absl::StatusCode::kUnauthenticated;
    case RegistrationError::kUnknownDay:
      return absl::StatusCode::kNotFound;
    case RegistrationError::kSignerMisbehavior:
      return absl::StatusCode::kDataLoss;
    case RegistrationError::kNone:
    case RegistrationError::kInternal:
      break;
  }
  return absl::StatusCode::kInternal;
}

constexpr RegistrationError kAllErrors[] = {
    RegistrationError::kMalformedRequest, RegistrationError::kAlreadyRegistered,
    RegistrationError::kBlocked,          RegistrationError::kAuditFailed,
    RegistrationError::kMalformedReveal,  RegistrationError::kIdentityRejected,
    RegistrationError::kUnknownDay,       RegistrationError::kSignerMisbehavior,
    RegistrationError::kInternal,
};

void AppendValues(ByteWriter& w, const std::vector<BigNum>& values) {
  for (const BigNum& v : values) w.Append(v.ToMinimalBytes());
}

}  // namespace

absl::string_view RegistrationErrorName(RegistrationError error) {
  switch (error) {
    case RegistrationError::kNone:
      return "ok";
    case RegistrationError::kMalformedRequest:
      return "malformed-request";
    case RegistrationError::kAlreadyRegistered:
      return "already-registered";
    case RegistrationError::kBlocked:
      return "blocked";
    case RegistrationError::kAuditFailed:
      return "audit-failed";
    case RegistrationError::kMalformedReveal:
      return "malformed-reveal";
    case RegistrationError::kIdentityRejected:
      return "identity-rejected";
    case RegistrationError::kUnknownDay:
      return "unknown-day";
    case RegistrationError::kSignerMisbehavior:
      return "signer-misbehavior";
    case RegistrationError::kInternal:
      return "internal";
  }
  return "internal";
}

absl::Status MakeRegistrationError(RegistrationError error,
                                   absl::string_view detail) {
  return absl::Status(CodeFor(error),
                      absl::StrCat(RegistrationErrorName(error), ": ", detail));
}

RegistrationError RegistrationErrorOf(const absl::Status& status) {
  if (status.ok()) return RegistrationError::kNone;
  absl::string_view message = status.message();
  for (RegistrationError e : kAllErrors) {
    absl::string_view name = RegistrationErrorName(e);
    if (message.size() > name.size() &&
        message.substr(0, name.size()) == name && message[name.size()] == ':') {
      return e;
    }
  }
  return RegistrationError::kInternal;
}

// ---------------------------------------------------------------------------
// Client

absl::StatusOr<std::pair<RegistrationRequest, ClientState>> ClientBegin(
    const MainDaySeed& main, uint16_t set_count, uint16_t per_set,
    const DayPublicKey& key, std::string identity) {
  if (set_count == 0 || per_set == 0) {
    return absl::InvalidArgumentError(
        "invalid-argument: M and n must both be at least 1");
  }
  ClientState state;
  state.main = main;
  state.identity = identity;
  state.set_count = set_count;
  state.per_set = per_set;
  state.key = key;
  ASSIGN_OR_RETURN(state.secondary_seeds,
                   DeriveSecondarySeeds(main.secret_seed, set_count));
  ASSIGN_OR_RETURN(state.blinding_seeds,
                   DeriveBlindingSeeds(main.blinding_seed, set_count));

  RegistrationRequest request;
  request.identity = std::move(identity);
  request.day_index = key.day_index;
  request.set_count = set_count;
  request.per_set = per_set;
  request.blinded.reserve(set_count);
  for (uint16_t i = 1; i <= set_count; ++i) {
    ASSIGN_OR_RETURN(
        std::vector<BigNum> blinded,
        ComputeBlindedSet(state.secondary_seeds[i - 1],
                          state.blinding_seeds[i - 1], i, per_set, key));
    request.blinded.push_back(std::move(blinded));
  }
  return std::make_pair(std::move(request), std::move(state));
}

absl::StatusOr<RevealPackage> ClientReveal(const ClientState& state,
                                           uint16_t selected) {
  if (selected < 1 || selected > state.set_count) {
    return absl::InvalidArgumentError(
        absl::StrCat("invalid-argument: challenge selects set ", selected,
                     " of ", state.set_count));
  }
  RevealPackage reveal;
  for (uint16_t i = 1; i <= state.set_count; ++i) {
    if (i == selected) continue;
    reveal.sets.push_back(RevealedSet{i, state.secondary_seeds[i - 1],
                                      state.blinding_seeds[i - 1]});
  }
  return reveal;
}

absl::StatusOr<IssuedCredentials> ClientUnblind(
    const ClientState& state, uint16_t selected,
    const std::vector<BigNum>& signed_blinded) {
  if (selected < 1 || selected > state.set_count) {
    return absl::InvalidArgumentError(
        "invalid-argument: selected set out of range");
  }
  if (signed_blinded.size() != state.per_set) {
    return MakeRegistrationError(
        RegistrationError::kSignerMisbehavior,
        absl::StrCat("expected ", state.per_set, " signed values, got ",
                     signed_blinded.size()));
  }
  const Key32& secondary = state.secondary_seeds[selected - 1];
  ASSIGN_OR_RETURN(std::vector<EphId> ids,
                   DeriveEphIds(secondary, selected, state.per_set));
  ASSIGN_OR_RETURN(std::vector<BigNum> factors,
                   DeriveBlindingFactors(state.blinding_seeds[selected - 1],
                                         selected, state.per_set, state.key));

  IssuedCredentials creds;
  creds.day_index = state.key.day_index;
  creds.selected = selected;
  creds.set_count = state.set_count;
  creds.per_set = state.per_set;
  creds.secondary_seed = secondary;
  creds.credentials.reserve(state.per_set);
  for (uint16_t j = 0; j < state.per_set; ++j) {
    ASSIGN_OR_RETURN(BigNum sd,
                     Unblind(signed_blinded[j], factors[j], state.key));
    if (!VerifySignature(ids[j], sd, state.key)) {
      return MakeRegistrationError(
          RegistrationError::kSignerMisbehavior,
          absl::StrCat("signature ", j, " does not verify after unblinding"));
    }
    creds.credentials.push_back(
        Credential{ids[j], std::move(sd), static_cast<uint32_t>(j) + 1});
  }
  return creds;
}

// ---------------------------------------------------------------------------
// Identity and blocklist

absl::Status StubIdentityVerifier::operator()(
    absl::string_view identity) const {
  if (identity.empty() || identity.size() > kMaxIdentityLength) {
    return MakeRegistrationError(RegistrationError::kIdentityRejected,
                                 "identity must be 1..256 bytes");
  }
  for (char c : identity) {
    if (static_cast<unsigned char>(c) < 0x20 || c == 0x7f) {
      return MakeRegistrationError(RegistrationError::kIdentityRejected,
                                   "identity contains control characters");
    }
  }
  if (rejected_.contains(identity)) {
    return MakeRegistrationError(RegistrationError::kIdentityRejected,
                                 "identity verification failed");
  }
  return absl::OkStatus();
}

void Blocklist::Add(std::string identity, absl::Time from, absl::Time expires) {
  entries_.push_back(BlocklistEntry{std::move(identity), from, expires});
}

bool Blocklist::IsBlocked(absl::string_view identity, absl::Time now) const {
  for (const BlocklistEntry& e : entries_) {
    if (e.identity == identity && now >= e.blocked_from && now < e.expires_at) {
      return true;
    }
  }
  return false;
}

std::string Blocklist::Serialize() const {
  std::string out;
  for (const BlocklistEntry& e : entries_) {
    absl::StrAppend(&out, e.identity, "\t", absl::ToUnixSeconds(e.blocked_from),
                    "\t", absl::ToUnixSeconds(e.expires_at), "\n");
  }
  return out;
}

absl::StatusOr<Blocklist> Blocklist::Parse(absl::string_view text) {
  Blocklist list;
  int line_no = 0;
  for (absl::string_view line : absl::StrSplit(text, '\n', absl::SkipEmpty())) {
    ++line_no;
    std::vector<absl::string_view> fields = absl::StrSplit(line, '\t');
    int64_t from = 0;
    int64_t expires = 0;
    if (fields.size() != 3 || fields[0].empty() ||
        !absl::SimpleAtoi(fields[1], &from) ||
        !absl::SimpleAtoi(fields[2], &expires) || expires <= from) {
      return absl::InvalidArgumentError(
          absl::StrCat("blocklist line ", line_no, " is malformed"));
    }
    list.Add(std::string(fields[0]), absl::FromUnixSeconds(from),
             absl::FromUnixSeconds(expires));
  }
  return list;
}

absl::Status Blocklist::Save(const std::string& path) const {
  std::ofstream out(path, std::ios::trunc);
  out << Serialize();
  if (!out) return absl::UnavailableError(absl::StrCat("cannot write ", path));
  return absl::OkStatus();
}

absl::StatusOr<Blocklist> Blocklist::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot read ", path));
  std::stringstream buf;
  buf << in.rdbuf();
  return Parse(buf.str());
}

// ---------------------------------------------------------------------------
// Signer

Signer::Signer(SignerOptions options)
    : options_(std::move(options)), rng_(Drbg::FromUint64(options_.rng_seed)) {}

absl::Status Signer::AddDayKeys(DayKeyPair keys) {
  std::lock_guard<std::mutex> lock(mu_);
  const uint32_t day = keys.public_key().day_index;
  if (keys_.contains(day)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "invalid-argument: keys for day ", day, " already installed"));
  }
  keys_.emplace(day, std::move(keys));
  return absl::OkStatus();
}

absl::StatusOr<DayPublicKey> Signer::PublicKey(uint32_t day_index) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = keys_.find(day_index);
  if (it == keys_.end()) {
    return MakeRegistrationError(RegistrationError::kUnknownDay,
                                 absl::StrCat("no keys for day ", day_index));
  }
  return it->second.public_key();
}

absl::StatusOr<Challenge> Signer::Receive(RegistrationRequest request,
                                          absl::Time now) {
  RETURN_IF_ERROR(options_.verify_identity(request.identity));
  if (request.set_count == 0 || request.per_set == 0 ||
      request.blinded.size() != request.set_count) {
    return MakeRegistrationError(RegistrationError::kMalformedRequest,
                                 "dimensions do not match M x n");
  }
  for (const auto& row : request.blinded) {
    if (row.size() != request.per_set) {
      return MakeRegistrationError(RegistrationError::kMalformedRequest,
                                   "set length does not match n");
    }
  }

  std::lock_guard<std::mutex> lock(mu_);
  auto key_it = keys_.find(request.day_index);
  if (key_it == keys_.end()) {
    return MakeRegistrationError(
        RegistrationError::kUnknownDay,
        absl::StrCat("no keys for day ", request.day_index));
  }
  const BigNum& modulus = key_it->second.public_key().modulus;
  for (const auto& row : request.blinded) {
    for (const BigNum& v : row) {
      if (v.IsZero() || v >= modulus) {
        return MakeRegistrationError(RegistrationError::kMalformedRequest,
                                     "blinded value outside (0, N)");
      }
    }
  }
  if (blocklist_.IsBlocked(request.identity, now)) {
    return MakeRegistrationError(RegistrationError::kBlocked,
                                 "identity is blocklisted");
  }
  auto& served = served_[request.day_index];
  if (served.contains(request.identity)) {
    return MakeRegistrationError(
        RegistrationError::kAlreadyRegistered,
        absl::StrCat("identity already served for day ", request.day_index));
  }
  served.insert(request.identity);

  Challenge challenge;
  challenge.session_id = next_session_++;
  challenge.selected =
      static_cast<uint16_t>(rng_.Uniform(request.set_count) + 1);
  sessions_.emplace(challenge.session_id,
                    Session{std::move(request), challenge.selected});
  return challenge;
}

absl::StatusOr<std::vector<BigNum>> Signer::AuditAndSign(
    uint64_t session_id, const RevealPackage& reveal, absl::Time now) {
  Session session;
  const DayKeyPair* keys = nullptr;
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = sessions_.find(session_id);
    if (it == sessions_.end()) {
      return MakeRegistrationError(RegistrationError::kMalformedReveal,
                                   "no open session");
    }
    const Session& open = it->second;
    const uint16_t m = open.request.set_count;
    std::set<uint16_t> seen;
    bool well_formed = reveal.sets.size() + 1 == m;
    for (const RevealedSet& set : reveal.sets) {
      if (set.index < 1 || set.index > m || set.index == open.selected ||
          !seen.insert(set.index).second) {
        well_formed = false;
      }
    }
    if (!well_formed) {
      return MakeRegistrationError(
          RegistrationError::kMalformedReveal,
          absl::StrCat("reveal must cover exactly the ", m - 1,
                       " non-selected sets"));
    }
    session = std::move(it->second);
    sessions_.erase(it);
    // std::map nodes are stable and keys are never removed.
    keys = &keys_.at(session.request.day_index);
  }

  const DayPublicKey& pub = keys->public_key();
  const RegistrationRequest& request = session.request;
  absl::Status audit = absl::OkStatus();
  for (const RevealedSet& set : reveal.sets) {
    auto recomputed = ComputeBlindedSet(set.secondary_seed, set.blinding_seed,
                                        set.index, request.per_set, pub);
    if (!recomputed.ok()) {
      audit = MakeRegistrationError(RegistrationError::kAuditFailed,
                                    recomputed.status().message());
      break;
    }
    const std::vector<BigNum>& sent = request.blinded[set.index - 1];
    for (size_t j = 0; j < sent.size(); ++j) {
      if (!((*recomputed)[j] == sent[j])) {
        audit = MakeRegistrationError(
            RegistrationError::kAuditFailed,
            absl::StrCat("set ", set.index, " value ", j,
                         " does not match its revealed seeds"));
        break;
      }
    }
    if (!audit.ok()) break;
  }

  std::vector<BigNum> signed_values;
  if (audit.ok()) {
    signed_values.reserve(request.per_set);
    for (const BigNum& blinded : request.blinded[session.selected - 1]) {
      ASSIGN_OR_RETURN(BigNum s, SignBlinded(blinded, *keys));
      signed_values.push_back(std::move(s));
    }
  }

  std::lock_guard<std::mutex> lock(mu_);
  if (!audit.ok()) {
    blocklist_.Add(request.identity, now, now + options_.blocklist_expiry);
  }
  transcript_.push_back(TranscriptEntry{
      std::move(session.request), session.selected, reveal, signed_values});
  if (!audit.ok()) return audit;
  return signed_values;
}

void Signer::PruneServedBefore(uint32_t day_index) {
  std::lock_guard<std::mutex> lock(mu_);
  served_.erase(served_.begin(), served_.lower_bound(day_index));
}

Blocklist Signer::blocklist() const {
  std::lock_guard<std::mutex> lock(mu_);
  return blocklist_;
}

void Signer::SetBlocklist(Blocklist blocklist) {
  std::lock_guard<std::mutex> lock(mu_);
  blocklist_ = std::move(blocklist);
}

Bytes Signer::DebugStateBytes() const {
  std::lock_guard<std::mutex> lock(mu_);
  ByteWriter w;
  auto append_request = [&w](const RegistrationRequest& r) {
    w.Append(AsSpan(r.identity));
    w.U32(r.day_index);
    for (const auto& row : r.blinded) AppendValues(w, row);
  };
  for (const auto& [id, session] : sessions_) {
    w.U64(id);
    append_request(session.request);
    w.U16(session.selected);
  }
  for (const TranscriptEntry& t : transcript_) {
    append_request(t.request);
    w.U16(t.selected);
    for (const RevealedSet& s : t.reveal.sets) {
      w.U16(s.index);
      w.Append(AsSpan(s.secondary_seed));
      w.Append(AsSpan(s.blinding_seed));
    }
    AppendValues(w, t.signed_values);
  }
  for (const auto& [day, identities] : served_) {
    w.U32(day);
    for (const std::string& id : identities) w.Append(AsSpan(id));
  }
  w.Append(AsSpan(blocklist_.Serialize()));
  return std::move(w).bytes();
}

}  // namespace bsid
