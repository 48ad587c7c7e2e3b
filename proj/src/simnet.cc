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

#include "bsid/simnet.h"

#include <fstream>
#include <functional>
#include <optional>
#include <queue>
#include <random>
#include <variant>

#include "absl/container/flat_hash_set.h"
#include "absl/strings/str_cat.h"
#include "bsid/beacon.h"
#include "bsid/clock.h"
#include "bsid/crypto.h"
#include "bsid/ephid.h"
#include "bsid/receiver_store.h"
#include "bsid/registration.h"
#include "bsid/rsa_blind.h"
#include "bsid/status_macros.h"
#include "bsid/tesla.h"
#include "json.hpp"

namespace bsid {

namespace {

constexpr int64_t kMaxDurationS = 86400;
constexpr absl::Time kSimEpoch = absl::UnixEpoch();

// Independent random streams, all derived from rng_seed.
enum Stream : uint64_t {
  kStreamSetup = 1,
  kStreamOffsets = 2,
  kStreamReception = 3,
  kStreamAttackerBase = 1000,
};

std::mt19937_64 MakeStream(uint64_t seed, uint64_t stream) {
  std::seed_seq seq{
      static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32),
      static_cast<uint32_t>(stream), static_cast<uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

template <size_t N>
void FillRandom(std::mt19937_64& rng, std::array<uint8_t, N>& out) {
  for (size_t i = 0; i < N; i += 8) {
    uint64_t word = rng();
    for (size_t b = i; b < std::min(N, i + 8); ++b) {
      out[b] = static_cast<uint8_t>(word);
      word >>= 8;
    }
  }
}

absl::Time SimTime(int64_t t_ms) {
  return kSimEpoch + absl::Milliseconds(t_ms);
}

enum class EventType : uint8_t { kKeyRelease = 0, kBeacon = 1, kSample = 2 };

struct Event {
  int64_t t_ms;
  EventType type;
  // Interval index for key releases; sender id for beacons (attackers
  // first, then honest devices); unused for samples.
  uint32_t source;

  bool operator>(const Event& o) const {
    return std::tie(t_ms, type, source) > std::tie(o.t_ms, o.type, o.source);
  }
};

struct HonestDevice {
  // Index i - 1 holds the beacon content for interval i.
  std::vector<Beacon> beacons;
  int64_t offset_ms = 0;
};

struct World {
  TeslaChain chain;
  std::vector<HonestDevice> honest;
  absl::flat_hash_set<EphId> honest_ids;
};

uint32_t IntervalCount(const SimConfig& c) {
  const int64_t n = (c.duration_s + c.epoch_s - 1) / c.epoch_s;
  return static_cast<uint32_t>(std::max<int64_t>(n, 1));
}

// Registers every honest device, and exchanges each credential for its
// authenticator through the Mix.
absl::StatusOr<World> BuildWorld(const SimConfig& c) {
  Drbg setup = Drbg::FromUint64(c.rng_seed ^ (uint64_t{kStreamSetup} << 56));
  ASSIGN_OR_RETURN(DayKeyPair keys,
                   DayKeyPair::Generate(0, c.signer_modulus_bits, setup));
  const DayPublicKey pub = keys.public_key();

  TeslaSchedule schedule;
  schedule.period = absl::Seconds(c.epoch_s);
  schedule.start = kSimEpoch + schedule.period;
  schedule.sync_error = absl::Seconds(c.sync_error_s);
  schedule.length = IntervalCount(c);
  ASSIGN_OR_RETURN(TeslaChain chain,
                   TeslaChain::Generate(setup.NextKey(), schedule));

  ManualClock clock(kSimEpoch);
  Signer signer(SignerOptions{.rng_seed = setup.NextUint64()});
  RETURN_IF_ERROR(signer.AddDayKeys(std::move(keys)));
  AuthService service(pub, chain, clock, setup.NextUint64());
  Mix mix(setup.NextUint64());

  struct Ticket {
    RequestNonce nonce;
    Key32 key;
    EphId ephid;
  };
  std::vector<std::vector<Ticket>> tickets(c.honest_count);
  const auto n = static_cast<uint16_t>(schedule.length);
  for (uint32_t h = 0; h < c.honest_count; ++h) {
    const MainDaySeed main = MainDaySeed::Generate(0, setup);
    SignerConnection conn(signer, [&clock] { return clock.Now(); });
    ASSIGN_OR_RETURN(
        IssuedCredentials creds,
        RunRegistration(main, c.registration_sets, n, pub,
                        absl::StrCat("sim-device-", h),
                        [&conn](ByteSpan m) { return conn.Handle(m); }));
    for (const Credential& cred : creds.credentials) {
      AuthRequest req{setup.Next<kRequestNonceSize>(), setup.NextKey(),
                      cred.ephid, cred.signature, cred.interval};
      tickets[h].push_back({req.nonce, req.response_key, cred.ephid});
      mix.Submit(std::move(req));
    }
  }
  mix.Flush(service);

  World world{std::move(chain), {}, {}};
  std::mt19937_64 offsets = MakeStream(c.rng_seed, kStreamOffsets);
  for (uint32_t h = 0; h < c.honest_count; ++h) {
    HonestDevice device;
    for (const Ticket& t : tickets[h]) {
      auto entry = service.RetrieveIndividual(t.nonce);
      if (!entry.has_value()) {
        return absl::InternalError("authenticator missing after Mix flush");
      }
      ASSIGN_OR_RETURN(AuthTag auth, DecryptAuthenticator(*entry, t.key));
      Beacon b;
      b.ephid = t.ephid;
      b.auth = auth;
      device.beacons.push_back(b);
      world.honest_ids.insert(t.ephid);
    }
    device.offset_ms = static_cast<int64_t>(
        offsets() % static_cast<uint64_t>(c.honest_interval_ms));
    world.honest.push_back(std::move(device));
  }
  return world;
}

// Receiver state for one mode.
struct VerifyingReceiver {
  ReceiverStore store;
};

struct BaselineReceiver {
  uint64_t received = 0;
  uint64_t stored_attackers = 0;
  absl::flat_hash_set<EphId> honest_seen;
};

absl::StatusOr<SimMetrics> Run(const SimConfig& c, bool verify) {
  RETURN_IF_ERROR(c.Validate());
  ASSIGN_OR_RETURN(World world, BuildWorld(c));
  const TeslaSchedule& schedule = world.chain.schedule();
  const uint32_t receivers = c.honest_count;
  const int64_t duration_ms = c.duration_s * 1000;
  const auto delay_ms =
      static_cast<int64_t>(std::llround(c.verification_delay_s * 1000.0));

  std::vector<VerifyingReceiver> verifying;
  std::vector<BaselineReceiver> baseline(verify ? 0 : receivers);
  if (verify) {
    for (uint32_t r = 0; r < receivers; ++r) {
      verifying.push_back({ReceiverStore(schedule, world.chain.anchor(), 0)});
    }
  }

  std::priority_queue<Event, std::vector<Event>, std::greater<>> queue;
  std::mt19937_64 offsets = MakeStream(c.rng_seed, kStreamOffsets);
  for (uint32_t h = 0; h < c.honest_count; ++h) offsets();  // used by setup
  std::vector<std::mt19937_64> attacker_rng;
  for (uint32_t a = 0; a < c.attacker_count; ++a) {
    attacker_rng.push_back(MakeStream(c.rng_seed, kStreamAttackerBase + a));
    const auto offset = static_cast<int64_t>(
        offsets() % static_cast<uint64_t>(c.attacker_interval_ms));
    if (offset < duration_ms) queue.push({offset, EventType::kBeacon, a});
  }
  for (uint32_t h = 0; h < c.honest_count; ++h) {
    const int64_t offset = world.honest[h].offset_ms;
    if (offset < duration_ms) {
      queue.push({offset, EventType::kBeacon, c.attacker_count + h});
    }
  }
  for (uint32_t i = 1; i <= schedule.length; ++i) {
    queue.push({i * c.epoch_s * 1000 + delay_ms, EventType::kKeyRelease, i});
  }
  const int64_t sample_ms = c.sample_interval_s * 1000;
  if (sample_ms <= duration_ms) queue.push({sample_ms, EventType::kSample, 0});

  std::mt19937_64 reception = MakeStream(c.rng_seed, kStreamReception);
  std::bernoulli_distribution heard(c.reception_rate);
  std::uniform_int_distribution<int> rssi_dist(-95, -40);

  SimMetrics m;
  auto deliver = [&](uint32_t r, const BeaconWire& wire, bool from_attacker,
                     absl::Time now, int16_t rssi) {
    auto beacon = DecodeBeacon(wire);
    if (!beacon.ok()) return;
    if (verify) {
      const BeaconOutcome outcome =
          verifying[r].store.OnBeacon(*beacon, now, rssi);
      if (outcome != BeaconOutcome::kUpdated) {
        ++(from_attacker ? m.received_from_attackers : m.received_honest);
      }
      return;
    }
    BaselineReceiver& b = baseline[r];
    if (from_attacker) {
      ++b.received;
      ++b.stored_attackers;
      ++m.received_from_attackers;
    } else if (b.honest_seen.insert(beacon->ephid).second) {
      ++b.received;
      ++m.received_honest;
    }
  };

  while (!queue.empty()) {
    const Event ev = queue.top();
    queue.pop();
    ++m.events;
    const absl::Time now = SimTime(ev.t_ms);
    switch (ev.type) {
      case EventType::kKeyRelease: {
        if (!verify) break;
        ASSIGN_OR_RETURN(Key32 key, ReleaseKey(world.chain, ev.source, now));
        for (VerifyingReceiver& r : verifying) {
          RETURN_IF_ERROR(r.store.OnKeyRelease(key, ev.source).status());
          r.store.Prune(now);
        }
        break;
      }
      case EventType::kBeacon: {
        Beacon beacon;
        bool from_attacker = ev.source < c.attacker_count;
        std::optional<uint32_t> self;
        int64_t period = c.attacker_interval_ms;
        bool send = true;
        if (from_attacker) {
          FillRandom(attacker_rng[ev.source], beacon.ephid);
          FillRandom(attacker_rng[ev.source], beacon.auth);
          ++m.attacker_beacons_sent;
        } else {
          const uint32_t h = ev.source - c.attacker_count;
          self = h;
          period = c.honest_interval_ms;
          auto interval = schedule.IntervalAt(now);
          // Honest devices stay silent once their key may be public.
          send = interval.has_value() && schedule.Acceptable(*interval, now);
          if (send) {
            beacon = world.honest[h].beacons[*interval - 1];
            ++m.honest_beacons_sent;
          }
        }
        if (send) {
          ASSIGN_OR_RETURN(BeaconWire wire, EncodeBeacon(beacon));
          for (uint32_t r = 0; r < receivers; ++r) {
            if (self == r || !heard(reception)) continue;
            const auto rssi = static_cast<int16_t>(rssi_dist(reception));
            deliver(r, wire, from_attacker, now, rssi);
          }
        }
        if (ev.t_ms + period < duration_ms) {
          queue.push({ev.t_ms + period, EventType::kBeacon, ev.source});
        }
        break;
      }
      case EventType::kSample: {
        for (uint32_t r = 0; r < receivers; ++r) {
          SimSample s;
          s.time_s = ev.t_ms / 1000;
          s.receiver_id = r;
          if (verify) {
            const ReceiverStore& store = verifying[r].store;
            const StoreCounters& k = store.counters();
            const StorageBytes bytes = store.storage_bytes();
            s.received = k.received;
            s.pending = store.pending_count();
            s.verified = k.promoted;
            s.rejected = k.rejected + k.expired;
            s.bytes = bytes.pending_bytes + bytes.verified_bytes;
          } else {
            s.received = baseline[r].received;
            s.verified = baseline[r].received;
            s.bytes = baseline[r].received * kBaselineRecordBytes;
          }
          m.samples.push_back(s);
        }
        if (ev.t_ms + sample_ms <= duration_ms) {
          queue.push({ev.t_ms + sample_ms, EventType::kSample, 0});
        }
        break;
      }
    }
  }

  if (verify) {
    for (const VerifyingReceiver& r : verifying) {
      const StoreCounters& k = r.store.counters();
      m.received_total += k.received;
      m.stored_total += k.promoted;
      m.rejected_total += k.rejected;
      m.expired_total += k.expired;
      m.pending_total += r.store.pending_count();
      for (const VerifiedRecord& rec : r.store.verified()) {
        ++(world.honest_ids.contains(rec.ephid) ? m.verified_honest
                                                : m.verified_from_attackers);
      }
    }
    m.stored_bytes = m.stored_total * kRecordSize;
  } else {
    for (const BaselineReceiver& b : baseline) {
      m.received_total += b.received;
      m.stored_total += b.received;
      m.verified_from_attackers += b.stored_attackers;
      m.verified_honest += b.received - b.stored_attackers;
    }
    m.stored_bytes = m.stored_total * kBaselineRecordBytes;
  }
  m.reduction_rate =
      m.received_from_attackers == 0
          ? 1.0
          : 1.0 - static_cast<double>(m.verified_from_attackers) /
                      static_cast<double>(m.received_from_attackers);
  m.overall_reduction = m.received_total == 0
                            ? 1.0
                            : 1.0 - static_cast<double>(m.stored_total) /
                                        static_cast<double>(m.received_total);
  return m;
}

}  // namespace

absl::Status SimConfig::Validate() const {
  auto bad = [](absl::string_view what) {
    return absl::InvalidArgumentError(absl::StrCat("invalid-argument: ", what));
  };
  if (duration_s < 0 || duration_s > kMaxDurationS) {
    return bad("duration_s must be in [0, 86400]");
  }
  if (epoch_s <= 0) return bad("epoch_s must be positive");
  if (attacker_interval_ms <= 0)
    return bad("attacker_interval_ms must be positive");
  if (honest_interval_ms <= 0)
    return bad("honest_interval_ms must be positive");
  if (honest_count == 0) return bad("honest_count must be at least 1");
  if (!(reception_rate >= 0.0 && reception_rate <= 1.0)) {
    return bad("reception_rate must be in [0, 1]");
  }
  if (!(verification_delay_s >= 0.0) || verification_delay_s > kMaxDurationS) {
    return bad("verification_delay_s must be non-negative");
  }
  if (sync_error_s < 0 || sync_error_s >= epoch_s) {
    return bad("sync_error_s must be in [0, epoch_s)");
  }
  if (sample_interval_s <= 0) return bad("sample_interval_s must be positive");
  if (registration_sets == 0) return bad("registration_sets must be positive");
  if (signer_modulus_bits < 512)
    return bad("signer_modulus_bits must be >= 512");
  return absl::OkStatus();
}

absl::StatusOr<SimConfig> ParseSimConfig(const std::string& json) {
  nlohmann::json j = nlohmann::json::parse(json, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    return absl::InvalidArgumentError("malformed: scenario config is not JSON");
  }
  SimConfig c;
  try {
    for (const auto& [name, value] : j.items()) {
      if (name == "duration_s")
        c.duration_s = value.get<int64_t>();
      else if (name == "epoch_s")
        c.epoch_s = value.get<int64_t>();
      else if (name == "attacker_count")
        c.attacker_count = value.get<uint32_t>();
      else if (name == "attacker_interval_ms")
        c.attacker_interval_ms = value.get<int64_t>();
      else if (name == "honest_count")
        c.honest_count = value.get<uint32_t>();
      else if (name == "honest_interval_ms")
        c.honest_interval_ms = value.get<int64_t>();
      else if (name == "reception_rate")
        c.reception_rate = value.get<double>();
      else if (name == "verification_delay_s")
        c.verification_delay_s = value.get<double>();
      else if (name == "sync_error_s")
        c.sync_error_s = value.get<int64_t>();
      else if (name == "sample_interval_s")
        c.sample_interval_s = value.get<int64_t>();
      else if (name == "rng_seed")
        c.rng_seed = value.get<uint64_t>();
      else if (name == "signer_modulus_bits")
        c.signer_modulus_bits = value.get<int>();
      else if (name == "registration_sets")
        c.registration_sets = value.get<uint16_t>();
      else
        return absl::InvalidArgumentError(
            absl::StrCat("malformed: unknown config field '", name, "'"));
    }
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("malformed: ", e.what()));
  }
  RETURN_IF_ERROR(c.Validate());
  return c;
}

std::string SerializeSimConfig(const SimConfig& c) {
  nlohmann::json j = {
      {"duration_s", c.duration_s},
      {"epoch_s", c.epoch_s},
      {"attacker_count", c.attacker_count},
      {"attacker_interval_ms", c.attacker_interval_ms},
      {"honest_count", c.honest_count},
      {"honest_interval_ms", c.honest_interval_ms},
      {"reception_rate", c.reception_rate},
      {"verification_delay_s", c.verification_delay_s},
      {"sync_error_s", c.sync_error_s},
      {"sample_interval_s", c.sample_interval_s},
      {"rng_seed", c.rng_seed},
      {"signer_modulus_bits", c.signer_modulus_bits},
      {"registration_sets", c.registration_sets},
  };
  return j.dump(2);
}

absl::StatusOr<SimMetrics> RunScenario(const SimConfig& config) {
  return Run(config, /*verify=*/true);
}

absl::StatusOr<SimMetrics> BaselineScenario(const SimConfig& config) {
  return Run(config, /*verify=*/false);
}

std::string FormatMetricsCsv(const SimMetrics& metrics) {
  std::string out =
      "time_s,receiver_id,received,pending,verified,rejected,bytes\n";
  for (const SimSample& s : metrics.samples) {
    absl::StrAppend(&out, s.time_s, ",", s.receiver_id, ",", s.received, ",",
                    s.pending, ",", s.verified, ",", s.rejected, ",", s.bytes,
                    "\n");
  }
  return out;
}

absl::Status ExportMetricsCsv(const SimMetrics& metrics,
                              const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  out << FormatMetricsCsv(metrics);
  if (!out) return absl::UnavailableError(absl::StrCat("cannot write ", path));
  return absl::OkStatus();
}

}  // namespace bsid
