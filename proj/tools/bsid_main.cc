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

// bsid: command-line entry point.
//
// Relative file paths resolve against $BSID_DATA_DIR when it is set.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "bsid/bytes.h"
#include "bsid/clock.h"
#include "bsid/crypto.h"
#include "bsid/exposure.h"
#include "bsid/key_release_udp.h"
#include "bsid/receiver_store.h"
#include "bsid/registration.h"
#include "bsid/rsa_blind.h"
#include "bsid/simnet.h"
#include "bsid/status_macros.h"
#include "bsid/tesla.h"

namespace bsid {
namespace {

std::string DataPath(const std::string& path) {
  const char* dir = std::getenv("BSID_DATA_DIR");
  if (path.empty() || dir == nullptr || *dir == '\0' ||
      std::filesystem::path(path).is_absolute()) {
    return path;
  }
  return (std::filesystem::path(dir) / path).string();
}

absl::StatusOr<std::string> ReadText(const std::string& path) {
  ASSIGN_OR_RETURN(Bytes raw, ReadFileBytes(DataPath(path)));
  return std::string(raw.begin(), raw.end());
}

absl::Status WriteText(const std::string& path, const std::string& text) {
  return WriteFileBytes(DataPath(path), AsSpan(absl::string_view(text)));
}

Drbg SeededRng(const std::optional<uint64_t>& seed) {
  return seed.has_value() ? Drbg::FromUint64(*seed) : Drbg::FromEntropy();
}

struct Options {
  std::optional<uint64_t> seed;
  std::string config;
  std::string out;
  std::string keys;
  std::string creds;
  std::string board;
  std::string store;
  std::string identity;
  uint32_t day = 0;
  int bits = kDefaultModulusBits;
  uint16_t sets = kDefaultSetCount;
  uint16_t per_set = kDefaultEphIdsPerDay;
  uint16_t port = 0;
  uint64_t max_requests = 0;
  double mbps = 1.0;
  double record_bytes = 36.0;
  double hours = 1.0;
  double id_wire_bytes = 16.0;
  bool baseline = false;
};

absl::Status Keygen(const Options& o) {
  Drbg rng = SeededRng(o.seed);
  ASSIGN_OR_RETURN(DayKeyPair keys, DayKeyPair::Generate(o.day, o.bits, rng));
  RETURN_IF_ERROR(WriteText(o.out, SerializeKeyPair(keys)));
  std::cout << "day " << o.day << " key (" << keys.public_key().modulus_bits()
            << " bits) written to " << o.out << "\n";
  return absl::OkStatus();
}

absl::Status Register(const Options& o) {
  ASSIGN_OR_RETURN(std::string key_json, ReadText(o.keys));
  ASSIGN_OR_RETURN(DayKeyPair keys, ParseKeyPair(key_json));
  const DayPublicKey pub = keys.public_key();
  Drbg rng = SeededRng(o.seed);
  Signer signer(SignerOptions{.rng_seed = rng.NextUint64()});
  RETURN_IF_ERROR(signer.AddDayKeys(std::move(keys)));
  SignerConnection conn(signer, [] { return absl::Now(); });

  const MainDaySeed main = MainDaySeed::Generate(pub.day_index, rng);
  ASSIGN_OR_RETURN(
      IssuedCredentials creds,
      RunRegistration(main, o.sets, o.per_set, pub, o.identity,
                      [&conn](ByteSpan m) { return conn.Handle(m); }));
  RETURN_IF_ERROR(WriteText(o.out, SerializeCredentials(creds, main)));
  std::cout << creds.credentials.size() << " credentials for day "
            << creds.day_index << " (set " << creds.selected << " of "
            << creds.set_count << ") written to " << o.out << "\n";
  return absl::OkStatus();
}

absl::Status TeslaServe(const Options& o) {
  Drbg rng = SeededRng(o.seed);
  TeslaSchedule schedule;
  schedule.start = absl::Now();
  ASSIGN_OR_RETURN(TeslaChain chain,
                   TeslaChain::Generate(rng.NextKey(), schedule));
  SystemClock clock;
  ASSIGN_OR_RETURN(KeyReleaseServer server,
                   KeyReleaseServer::Bind(chain, clock, o.port));
  std::cout << "anchor " << ToHex(AsSpan(chain.anchor())) << "\n"
            << "listening on udp port " << server.port() << std::endl;
  return server.Serve(o.max_requests);
}

absl::Status Simulate(const Options& o) {
  ASSIGN_OR_RETURN(std::string text, ReadText(o.config));
  ASSIGN_OR_RETURN(SimConfig config, ParseSimConfig(text));
  if (o.seed.has_value()) config.rng_seed = *o.seed;
  ASSIGN_OR_RETURN(SimMetrics m,
                   o.baseline ? BaselineScenario(config) : RunScenario(config));
  RETURN_IF_ERROR(ExportMetricsCsv(m, DataPath(o.out)));
  std::cout << absl::StrFormat(
      "received %d (attackers %d, honest %d)\nstored %d (%d bytes)\n"
      "attacker records stored %d\nreduction_rate %.4f\n"
      "overall_reduction %.4f\n",
      m.received_total, m.received_from_attackers, m.received_honest,
      m.stored_total, m.stored_bytes, m.verified_from_attackers,
      m.reduction_rate, m.overall_reduction);
  return absl::OkStatus();
}

absl::Status ReportPositive(const Options& o) {
  ASSIGN_OR_RETURN(std::string text, ReadText(o.creds));
  ASSIGN_OR_RETURN(IssuedCredentials creds, ParseCredentials(text));
  ASSIGN_OR_RETURN(BulletinBoard board, BulletinBoard::Open(DataPath(o.board)));
  InfectiousDay day{creds.day_index, creds.secondary_seed, creds.selected,
                    creds.per_set};
  ASSIGN_OR_RETURN(uint32_t case_number, board.PublishPositive(o.day, {day}));
  std::cout << "published case " << case_number << " on day " << o.day
            << " covering day " << creds.day_index << "\n";
  return absl::OkStatus();
}

absl::Status CheckExposureCommand(const Options& o) {
  ASSIGN_OR_RETURN(Bytes raw, ReadFileBytes(DataPath(o.store)));
  ASSIGN_OR_RETURN(std::vector<VerifiedRecord> records, DecodeStoreFile(raw));
  ASSIGN_OR_RETURN(BulletinBoard board, BulletinBoard::Open(DataPath(o.board)));
  const std::vector<ExposureMatch> matches = CheckExposure(records, board);
  if (matches.empty()) std::cout << "no exposure\n";
  for (const ExposureMatch& m : matches) {
    std::cout << "match case " << m.publication_day << "/" << m.case_number
              << " day " << m.day_index << ":";
    for (const EphId& id : m.ephids) std::cout << " " << ToHex(AsSpan(id));
    std::cout << "\n";
  }
  return absl::OkStatus();
}

absl::Status DosCalc(const Options& o) {
  DosModel model;
  model.id_wire_bytes = o.id_wire_bytes;
  const double bytes =
      DosMagnitudeBytes(o.mbps, o.record_bytes, o.hours, model);
  std::cout << absl::StrFormat(
      "%.3f Mbps, %.0f-byte records, %.2f h: %.0f bytes (%.3f GB)\n", o.mbps,
      o.record_bytes, o.hours, bytes, bytes / 1e9);
  return absl::OkStatus();
}

}  // namespace
}  // namespace bsid

int main(int argc, char** argv) {
  using bsid::Options;
  CLI::App app{"Blind-signed EphID contact tracing tools"};
  app.require_subcommand(1);
  Options o;
  auto seed = [&o](CLI::App* cmd) {
    cmd->add_option("--seed", o.seed, "Seed for all randomness");
  };

  CLI::App* keygen = app.add_subcommand("keygen", "Generate a day key pair");
  seed(keygen);
  keygen->add_option("--day", o.day, "Day index");
  keygen->add_option("--bits", o.bits, "Modulus size")
      ->check(CLI::Range(512, 8192));
  keygen->add_option("--out", o.out, "Key file")->required();

  CLI::App* reg = app.add_subcommand("register", "Obtain blind-signed EphIDs");
  seed(reg);
  reg->add_option("--keys", o.keys, "Signer key file")->required();
  reg->add_option("--identity", o.identity, "Verified identity")->required();
  reg->add_option("--sets", o.sets, "Candidate sets M")
      ->check(CLI::Range(2, 1000));
  reg->add_option("--per-set", o.per_set, "EphIDs per set n")
      ->check(CLI::Range(1, 4096));
  reg->add_option("--out", o.out, "Credentials file")->required();

  CLI::App* serve =
      app.add_subcommand("tesla-serve", "Serve TESLA keys over UDP");
  seed(serve);
  serve->add_option("--port", o.port, "UDP port (0 = ephemeral)");
  serve->add_option("--max-requests", o.max_requests,
                    "Stop after N (0 = never)");

  CLI::App* sim = app.add_subcommand("simulate", "Run a flooding scenario");
  seed(sim);
  sim->add_option("--config", o.config, "Scenario JSON")->required();
  sim->add_option("--out", o.out, "Metrics CSV")->required();
  sim->add_flag("--baseline", o.baseline, "Store every EphID, no verification");

  CLI::App* report =
      app.add_subcommand("report-positive", "Publish a positive report");
  report->add_option("--creds", o.creds, "Credentials file")->required();
  report->add_option("--board", o.board, "Board journal")->required();
  report->add_option("--day", o.day, "Publication day");

  CLI::App* check =
      app.add_subcommand("check-exposure", "Match store against board");
  check->add_option("--store", o.store, "Verified store file")->required();
  check->add_option("--board", o.board, "Board journal")->required();

  CLI::App* dos = app.add_subcommand("dos-calc", "Storage forced by flooding");
  dos->add_option("--mbps", o.mbps, "Attacker bandwidth");
  dos->add_option("--record-bytes", o.record_bytes, "Stored bytes per EphID");
  dos->add_option("--hours", o.hours, "Attack duration");
  dos->add_option("--id-wire-bytes", o.id_wire_bytes,
                  "Airtime bytes per EphID");

  CLI11_PARSE(app, argc, argv);

  absl::Status status;
  if (keygen->parsed())
    status = bsid::Keygen(o);
  else if (reg->parsed())
    status = bsid::Register(o);
  else if (serve->parsed())
    status = bsid::TeslaServe(o);
  else if (sim->parsed())
    status = bsid::Simulate(o);
  else if (report->parsed())
    status = bsid::ReportPositive(o);
  else if (check->parsed())
    status = bsid::CheckExposureCommand(o);
  else if (dos->parsed())
    status = bsid::DosCalc(o);
  if (!status.ok()) {
    std::cerr << "bsid: " << status.message() << "\n";
    return 1;
  }
  return 0;
}
