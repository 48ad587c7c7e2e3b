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

#include "bsid/exposure.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

#include "absl/container/flat_hash_map.h"
#include "absl/container/flat_hash_set.h"
#include "absl/strings/str_cat.h"
#include "bsid/ephid.h"
#include "bsid/status_macros.h"

namespace bsid {

namespace {

constexpr uint8_t kEntryReport = 1;
constexpr uint8_t kEntryMatch = 2;

Bytes EncodeReport(const PositiveReport& r) {
  ByteWriter w;
  w.U32(r.publication_day);
  w.U32(r.case_number);
  w.U16(static_cast<uint16_t>(r.days.size()));
  for (const InfectiousDay& d : r.days) {
    w.U32(d.day_index);
    w.Append(AsSpan(d.secondary_seed));
    w.U16(d.selected);
    w.U16(d.per_set);
  }
  return std::move(w).bytes();
}

absl::StatusOr<PositiveReport> DecodeReport(ByteSpan body) {
  ByteReader r(body);
  PositiveReport report;
  ASSIGN_OR_RETURN(report.publication_day, r.U32());
  ASSIGN_OR_RETURN(report.case_number, r.U32());
  ASSIGN_OR_RETURN(uint16_t count, r.U16());
  for (uint16_t k = 0; k < count; ++k) {
    InfectiousDay d;
    ASSIGN_OR_RETURN(d.day_index, r.U32());
    ASSIGN_OR_RETURN(d.secondary_seed, r.Fixed<kKeySize>());
    ASSIGN_OR_RETURN(d.selected, r.U16());
    ASSIGN_OR_RETURN(d.per_set, r.U16());
    report.days.push_back(d);
  }
  if (!r.done()) return absl::InvalidArgumentError("malformed: report body");
  return report;
}

}  // namespace

std::vector<uint32_t> InfectiousPeriod(uint32_t symptom_day, uint32_t last_day,
                                       uint32_t lead_days) {
  std::vector<uint32_t> days;
  const uint32_t first = symptom_day > lead_days ? symptom_day - lead_days : 0;
  for (uint32_t d = first; d <= last_day; ++d) days.push_back(d);
  return days;
}

Bytes MatchPost::Serialize() const {
  ByteWriter w;
  w.U32(signing_day);
  w.U32(case_number);
  w.Append(AsSpan(nonce));
  const Bytes sp_bytes = sp.ToMinimalBytes();
  w.U16(static_cast<uint16_t>(sp_bytes.size()));
  w.Append(sp_bytes);
  w.Append(proof.Serialize());
  return std::move(w).bytes();
}

absl::StatusOr<MatchPost> MatchPost::Parse(ByteSpan data) {
  ByteReader r(data);
  MatchPost post;
  ASSIGN_OR_RETURN(post.signing_day, r.U32());
  ASSIGN_OR_RETURN(post.case_number, r.U32());
  ASSIGN_OR_RETURN(post.nonce, r.Fixed<kFinalTrialNonceSize>());
  ASSIGN_OR_RETURN(uint16_t sp_len, r.U16());
  ASSIGN_OR_RETURN(ByteSpan sp, r.Take(sp_len));
  post.sp = BigNum::FromBytes(sp);
  ASSIGN_OR_RETURN(ByteSpan rest, r.Take(r.remaining()));
  ASSIGN_OR_RETURN(post.proof, MerkleProof::Parse(rest));
  return post;
}

BulletinBoard::BulletinBoard() : mu_(std::make_unique<std::mutex>()) {}

absl::StatusOr<BulletinBoard> BulletinBoard::Open(
    const std::string& journal_path) {
  BulletinBoard board;
  if (std::filesystem::exists(journal_path)) {
    ASSIGN_OR_RETURN(Bytes journal, ReadFileBytes(journal_path));
    ByteReader r(journal);
    while (!r.done()) {
      auto len = r.U32();
      if (!len.ok() || *len == 0) {
        return absl::InvalidArgumentError("malformed: journal entry length");
      }
      auto entry = r.Take(*len);
      if (!entry.ok()) {
        return absl::InvalidArgumentError("malformed: truncated journal entry");
      }
      const uint8_t type = (*entry)[0];
      ByteSpan body = entry->subspan(1);
      if (type == kEntryReport) {
        ASSIGN_OR_RETURN(PositiveReport report, DecodeReport(body));
        board.reports_.push_back(std::move(report));
      } else if (type == kEntryMatch) {
        ASSIGN_OR_RETURN(MatchPost post, MatchPost::Parse(body));
        board.posts_.push_back(std::move(post));
        board.post_bytes_.emplace_back(body.begin(), body.end());
      } else {
        return absl::InvalidArgumentError(
            absl::StrCat("malformed: journal entry type ", type));
      }
    }
  }
  board.journal_path_ = journal_path;
  return board;
}

absl::Status BulletinBoard::Append(uint8_t type, const Bytes& body) {
  if (journal_path_.empty()) return absl::OkStatus();
  ByteWriter w;
  w.U32(static_cast<uint32_t>(body.size() + 1));
  w.U8(type);
  w.Append(body);
  std::ofstream out(journal_path_, std::ios::binary | std::ios::app);
  out.write(reinterpret_cast<const char*>(w.bytes().data()),
            static_cast<std::streamsize>(w.bytes().size()));
  if (!out) {
    return absl::UnavailableError(
        absl::StrCat("cannot append to ", journal_path_));
  }
  return absl::OkStatus();
}

absl::StatusOr<uint32_t> BulletinBoard::PublishPositive(
    uint32_t publication_day, std::vector<InfectiousDay> days) {
  std::lock_guard<std::mutex> lock(*mu_);
  uint32_t prior = 0;
  for (const PositiveReport& r : reports_) {
    if (r.publication_day == publication_day) ++prior;
  }
  PositiveReport report{publication_day, prior + 1, std::move(days)};
  RETURN_IF_ERROR(Append(kEntryReport, EncodeReport(report)));
  reports_.push_back(std::move(report));
  return prior + 1;
}

absl::StatusOr<bool> BulletinBoard::PostMatch(const MatchPost& post) {
  Bytes body = post.Serialize();
  std::lock_guard<std::mutex> lock(*mu_);
  if (std::find(post_bytes_.begin(), post_bytes_.end(), body) !=
      post_bytes_.end()) {
    return false;
  }
  RETURN_IF_ERROR(Append(kEntryMatch, body));
  posts_.push_back(post);
  post_bytes_.push_back(std::move(body));
  return true;
}

std::vector<PositiveReport> BulletinBoard::reports() const {
  std::lock_guard<std::mutex> lock(*mu_);
  return reports_;
}

std::vector<MatchPost> BulletinBoard::match_posts() const {
  std::lock_guard<std::mutex> lock(*mu_);
  return posts_;
}

std::vector<ExposureMatch> CheckExposure(
    const std::vector<VerifiedRecord>& store, const BulletinBoard& board) {
  absl::flat_hash_map<uint32_t, absl::flat_hash_set<EphId>> by_day;
  for (const VerifiedRecord& r : store) by_day[r.day_index].insert(r.ephid);

  std::vector<ExposureMatch> matches;
  for (const PositiveReport& report : board.reports()) {
    for (const InfectiousDay& day : report.days) {
      auto seen = by_day.find(day.day_index);
      if (seen == by_day.end() || day.per_set == 0) continue;
      auto ids = DeriveEphIds(day.secondary_seed, day.selected, day.per_set);
      if (!ids.ok()) continue;
      ExposureMatch match{
          report.publication_day, report.case_number, day.day_index, {}};
      for (const EphId& id : *ids) {
        if (seen->second.contains(id)) match.ephids.push_back(id);
      }
      if (!match.ephids.empty()) matches.push_back(std::move(match));
    }
  }
  return matches;
}

Bytes FinalTrialLeaf(uint32_t case_number, const FinalTrialNonce& nonce) {
  ByteWriter w;
  w.U32(case_number);
  w.Append(AsSpan(nonce));
  return std::move(w).bytes();
}

absl::StatusOr<FinalTrialCodeSet> FinalTrialCodeSet::Generate(
    uint32_t max_cases, const DayPublicKey& key, const BlindSigner& sign,
    Drbg& rng) {
  if (max_cases == 0) {
    return absl::InvalidArgumentError("invalid-argument: max_cases is 0");
  }
  std::vector<FinalTrialNonce> nonces(max_cases);
  std::vector<Bytes> leaves;
  leaves.reserve(max_cases);
  for (uint32_t i = 0; i < max_cases; ++i) {
    nonces[i] = rng.Next<kFinalTrialNonceSize>();
    leaves.push_back(FinalTrialLeaf(i + 1, nonces[i]));
  }
  ASSIGN_OR_RETURN(MerkleTree tree, MerkleTree::Build(leaves));

  const BigNum r = BigNum::FromBytes(AsSpan(tree.root()));
  if (r >= key.modulus) {
    return absl::InvalidArgumentError(
        "invalid-argument: FinalTrial modulus is smaller than a root hash");
  }
  BigNum rhat;
  do {
    Bytes raw(key.modulus_bytes());
    rng.Fill(raw);
    rhat = BigNum::FromBytes(raw) % key.modulus;
  } while (!IsValidBlindingFactor(rhat, key));
  ASSIGN_OR_RETURN(BigNum blinded, BlindMessage(r, rhat, key));
  ASSIGN_OR_RETURN(BigNum signed_blinded, sign(blinded));
  ASSIGN_OR_RETURN(BigNum sp, Unblind(signed_blinded, rhat, key));
  if (!VerifyMessageSignature(r, sp, key)) {
    return absl::DataLossError(
        "signer-misbehavior: FinalTrial root signature does not verify");
  }
  return FinalTrialCodeSet(std::move(nonces), std::move(tree), std::move(sp),
                           key.day_index);
}

absl::StatusOr<MatchPost> FinalTrialCodeSet::MakePost(
    uint32_t case_number) const {
  if (case_number == 0 || case_number > max_cases()) {
    return absl::OutOfRangeError(absl::StrCat(
        "no-code-available: case ", case_number, " exceeds ", max_cases()));
  }
  ASSIGN_OR_RETURN(MerkleProof proof, tree_.Prove(case_number - 1));
  return MatchPost{signing_day_, case_number, nonces_[case_number - 1], sp_,
                   std::move(proof)};
}

absl::StatusOr<MatchPost> FinalTrialPostMatch(const FinalTrialCodeSet& codes,
                                              uint32_t case_number,
                                              BulletinBoard& board) {
  ASSIGN_OR_RETURN(MatchPost post, codes.MakePost(case_number));
  RETURN_IF_ERROR(board.PostMatch(post).status());
  return post;
}

bool VerifyMatchPost(const MatchPost& post, const DayPublicKey& key) {
  if (post.signing_day != key.day_index) return false;
  if (!VerifyMerkleProof(post.proof,
                         FinalTrialLeaf(post.case_number, post.nonce))) {
    return false;
  }
  return VerifyMessageSignature(BigNum::FromBytes(AsSpan(post.proof.root)),
                                post.sp, key);
}

TallyResult FinalTrialTally(const BulletinBoard& board, uint32_t case_number,
                            const DayPublicKey& key, uint64_t threshold) {
  std::set<Bytes> distinct;
  for (const MatchPost& post : board.match_posts()) {
    if (post.case_number != case_number || !VerifyMatchPost(post, key)) {
      continue;
    }
    distinct.insert(post.Serialize());
  }
  TallyResult result;
  result.valid_posts = distinct.size();
  result.verdict = result.valid_posts > threshold ? TallyVerdict::kSuspicious
                                                  : TallyVerdict::kNormal;
  return result;
}

}  // namespace bsid
