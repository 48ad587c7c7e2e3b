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

#include <optional>

#include "absl/strings/str_cat.h"
#include "bsid/registration.h"
#include "bsid/status_macros.h"
#include "json.hpp"

namespace bsid {

namespace {

constexpr size_t kMaxFrame = 64u << 20;
constexpr size_t kMaxIdentity = 0xffff;

absl::Status Malformed(RegistrationError kind, absl::string_view what) {
  return MakeRegistrationError(kind, what);
}

absl::Status AppendValue(ByteWriter& w, const BigNum& v, size_t width) {
  ASSIGN_OR_RETURN(Bytes b, v.ToBytes(width));
  w.Append(b);
  return absl::OkStatus();
}

// A one-byte error message, if `wire` is one.
std::optional<absl::Status> AsError(ByteSpan wire) {
  if (wire.size() == 1 && wire[0] >= 0xE1 && wire[0] <= 0xEF) {
    auto kind = static_cast<RegistrationError>(wire[0]);
    return MakeRegistrationError(kind, "reported by signer");
  }
  return std::nullopt;
}

}  // namespace

absl::StatusOr<Bytes> EncodeRequest(const RegistrationRequest& request,
                                    size_t value_width) {
  if (request.identity.size() > kMaxIdentity || value_width == 0) {
    return absl::InvalidArgumentError(
        "invalid-argument: request cannot be encoded");
  }
  ByteWriter w;
  w.U8(kMsgRequest);
  w.U32(request.day_index);
  w.U16(request.set_count);
  w.U16(request.per_set);
  w.U16(static_cast<uint16_t>(request.identity.size()));
  w.Append(AsSpan(request.identity));
  for (const auto& row : request.blinded) {
    for (const BigNum& v : row) RETURN_IF_ERROR(AppendValue(w, v, value_width));
  }
  return std::move(w).bytes();
}

absl::StatusOr<RegistrationRequest> DecodeRequest(ByteSpan wire) {
  constexpr auto kind = RegistrationError::kMalformedRequest;
  ByteReader r(wire);
  auto tag = r.U8();
  if (!tag.ok() || *tag != kMsgRequest) return Malformed(kind, "not a request");
  RegistrationRequest req;
  auto day = r.U32();
  auto m = r.U16();
  auto n = r.U16();
  auto len = r.U16();
  if (!day.ok() || !m.ok() || !n.ok() || !len.ok()) {
    return Malformed(kind, "truncated header");
  }
  req.day_index = *day;
  req.set_count = *m;
  req.per_set = *n;
  auto identity = r.Take(*len);
  if (!identity.ok()) return Malformed(kind, "truncated identity");
  req.identity.assign(identity->begin(), identity->end());

  const size_t count = size_t{req.set_count} * req.per_set;
  if (count == 0 || r.remaining() == 0 || r.remaining() % count != 0) {
    return Malformed(kind, "payload does not hold M*n equal-width values");
  }
  const size_t width = r.remaining() / count;
  req.blinded.resize(req.set_count);
  for (auto& row : req.blinded) {
    row.reserve(req.per_set);
    for (uint16_t j = 0; j < req.per_set; ++j) {
      row.push_back(BigNum::FromBytes(*r.Take(width)));
    }
  }
  return req;
}

Bytes EncodeChallenge(const Challenge& challenge) {
  ByteWriter w;
  w.U8(kMsgChallenge);
  w.U16(challenge.selected);
  return std::move(w).bytes();
}

absl::StatusOr<Challenge> DecodeChallenge(ByteSpan wire) {
  if (auto err = AsError(wire)) return *err;
  ByteReader r(wire);
  auto tag = r.U8();
  auto s = r.U16();
  if (!tag.ok() || *tag != kMsgChallenge || !s.ok() || !r.done()) {
    return absl::InvalidArgumentError("malformed: bad challenge message");
  }
  return Challenge{0, *s};
}

Bytes EncodeReveal(const RevealPackage& reveal) {
  ByteWriter w;
  w.U8(kMsgReveal);
  for (const RevealedSet& s : reveal.sets) {
    w.U16(s.index);
    w.Append(AsSpan(s.secondary_seed));
    w.Append(AsSpan(s.blinding_seed));
  }
  return std::move(w).bytes();
}

absl::StatusOr<RevealPackage> DecodeReveal(ByteSpan wire) {
  constexpr auto kind = RegistrationError::kMalformedReveal;
  constexpr size_t kEntry = 2 + 2 * kKeySize;
  ByteReader r(wire);
  auto tag = r.U8();
  if (!tag.ok() || *tag != kMsgReveal || r.remaining() % kEntry != 0) {
    return Malformed(kind, "bad reveal framing");
  }
  RevealPackage reveal;
  while (!r.done()) {
    RevealedSet s;
    s.index = *r.U16();
    s.secondary_seed = *r.Fixed<kKeySize>();
    s.blinding_seed = *r.Fixed<kKeySize>();
    reveal.sets.push_back(s);
  }
  return reveal;
}

absl::StatusOr<Bytes> EncodeResponse(const std::vector<BigNum>& values,
                                     size_t value_width) {
  ByteWriter w;
  w.U8(kMsgResponse);
  for (const BigNum& v : values) {
    RETURN_IF_ERROR(AppendValue(w, v, value_width));
  }
  return std::move(w).bytes();
}

Bytes EncodeError(const absl::Status& status) {
  RegistrationError kind = RegistrationErrorOf(status);
  if (kind == RegistrationError::kNone) kind = RegistrationError::kInternal;
  return Bytes{static_cast<uint8_t>(kind)};
}

absl::StatusOr<std::vector<BigNum>> DecodeResponse(ByteSpan wire,
                                                   size_t value_width) {
  if (auto err = AsError(wire)) return *err;
  if (wire.empty() || wire[0] != kMsgResponse || value_width == 0 ||
      (wire.size() - 1) % value_width != 0) {
    return MakeRegistrationError(RegistrationError::kSignerMisbehavior,
                                 "bad response message");
  }
  std::vector<BigNum> values;
  for (size_t off = 1; off < wire.size(); off += value_width) {
    values.push_back(BigNum::FromBytes(wire.subspan(off, value_width)));
  }
  return values;
}

Bytes FrameMessage(ByteSpan message) {
  ByteWriter w;
  w.U32(static_cast<uint32_t>(message.size()));
  w.Append(message);
  return std::move(w).bytes();
}

absl::StatusOr<Bytes> UnframeMessage(ByteSpan stream, size_t* consumed) {
  ByteReader r(stream);
  auto len = r.U32();
  if (!len.ok())
    return absl::OutOfRangeError("malformed: incomplete frame header");
  if (*len > kMaxFrame)
    return absl::InvalidArgumentError("malformed: frame too large");
  auto body = r.Take(*len);
  if (!body.ok())
    return absl::OutOfRangeError("malformed: incomplete frame body");
  *consumed = 4 + *len;
  return Bytes(body->begin(), body->end());
}

Bytes SignerConnection::Handle(ByteSpan message) {
  if (message.empty()) {
    return EncodeError(MakeRegistrationError(
        RegistrationError::kMalformedRequest, "empty message"));
  }
  if (message[0] == kMsgRequest) {
    if (session_id_ != 0) {
      return EncodeError(MakeRegistrationError(
          RegistrationError::kMalformedRequest, "session already open"));
    }
    auto request = DecodeRequest(message);
    if (!request.ok()) return EncodeError(request.status());
    value_width_ = (message.size() - 11 - request->identity.size()) /
                   (size_t{request->set_count} * request->per_set);
    auto key = signer_.PublicKey(request->day_index);
    if (!key.ok()) return EncodeError(key.status());
    if (value_width_ != key->modulus_bytes()) {
      return EncodeError(
          MakeRegistrationError(RegistrationError::kMalformedRequest,
                                "values are not modulus-width"));
    }
    auto challenge = signer_.Receive(*std::move(request), clock_());
    if (!challenge.ok()) return EncodeError(challenge.status());
    session_id_ = challenge->session_id;
    return EncodeChallenge(*challenge);
  }
  if (message[0] == kMsgReveal) {
    if (session_id_ == 0) {
      return EncodeError(MakeRegistrationError(
          RegistrationError::kMalformedReveal, "no open session"));
    }
    auto reveal = DecodeReveal(message);
    if (!reveal.ok()) return EncodeError(reveal.status());
    auto signed_values = signer_.AuditAndSign(session_id_, *reveal, clock_());
    if (!signed_values.ok()) {
      if (RegistrationErrorOf(signed_values.status()) !=
          RegistrationError::kMalformedReveal) {
        session_id_ = 0;
      }
      return EncodeError(signed_values.status());
    }
    session_id_ = 0;
    auto response = EncodeResponse(*signed_values, value_width_);
    if (!response.ok()) return EncodeError(response.status());
    return *std::move(response);
  }
  return EncodeError(MakeRegistrationError(RegistrationError::kMalformedRequest,
                                           "unknown message type"));
}

absl::StatusOr<IssuedCredentials> RunRegistration(
    const MainDaySeed& main, uint16_t set_count, uint16_t per_set,
    const DayPublicKey& key, std::string identity,
    const std::function<Bytes(ByteSpan)>& transport) {
  auto begun = ClientBegin(main, set_count, per_set, key, std::move(identity));
  if (!begun.ok()) return begun.status();
  auto& [request, state] = *begun;
  const size_t width = key.modulus_bytes();

  ASSIGN_OR_RETURN(Bytes request_wire, EncodeRequest(request, width));
  ASSIGN_OR_RETURN(Challenge challenge,
                   DecodeChallenge(transport(request_wire)));
  ASSIGN_OR_RETURN(RevealPackage reveal,
                   ClientReveal(state, challenge.selected));
  ASSIGN_OR_RETURN(std::vector<BigNum> signed_values,
                   DecodeResponse(transport(EncodeReveal(reveal)), width));
  return ClientUnblind(state, challenge.selected, signed_values);
}

std::string SerializeCredentials(const IssuedCredentials& creds,
                                 const MainDaySeed& main) {
  nlohmann::json list = nlohmann::json::array();
  for (const Credential& c : creds.credentials) {
    list.push_back({{"ephid", ToHex(c.ephid)},
                    {"signature", c.signature.ToHexString()},
                    {"interval", c.interval}});
  }
  nlohmann::json j = {
      {"day_index", creds.day_index},
      {"selected", creds.selected},
      {"set_count", creds.set_count},
      {"per_set", creds.per_set},
      {"secret_seed", ToHex(main.secret_seed)},
      {"blinding_seed", ToHex(main.blinding_seed)},
      {"secondary_seed", ToHex(creds.secondary_seed)},
      {"credentials", std::move(list)},
  };
  return j.dump(2);
}

absl::StatusOr<IssuedCredentials> ParseCredentials(absl::string_view json) {
  nlohmann::json j = nlohmann::json::parse(json, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    return absl::InvalidArgumentError("malformed: credentials are not JSON");
  }
  try {
    IssuedCredentials creds;
    creds.day_index = j.at("day_index").get<uint32_t>();
    creds.selected = j.at("selected").get<uint16_t>();
    creds.set_count = j.at("set_count").get<uint16_t>();
    creds.per_set = j.at("per_set").get<uint16_t>();
    ASSIGN_OR_RETURN(
        creds.secondary_seed,
        FixedFromHex<kKeySize>(j.at("secondary_seed").get<std::string>()));
    for (const auto& c : j.at("credentials")) {
      Credential cred;
      ASSIGN_OR_RETURN(cred.ephid, FixedFromHex<kEphIdSize>(
                                       c.at("ephid").get<std::string>()));
      ASSIGN_OR_RETURN(
          cred.signature,
          BigNum::FromHexString(c.at("signature").get<std::string>()));
      cred.interval = c.at("interval").get<uint32_t>();
      creds.credentials.push_back(std::move(cred));
    }
    return creds;
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed: credentials: ", e.what()));
  }
}

}  // namespace bsid
