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

// UDP transport for the key-release datagrams in tesla.h. IPv4 loopback or
// any address; requests are answered one at a time.

#ifndef BSID_KEY_RELEASE_UDP_H_
#define BSID_KEY_RELEASE_UDP_H_

#include <cstdint>
#include <string>
#include <utility>

#include "absl/status/statusor.h"
#include "absl/time/time.h"
#include "bsid/clock.h"
#include "bsid/tesla.h"

namespace bsid {

// Owns a socket descriptor.
class UdpSocket {
 public:
  UdpSocket() = default;
  explicit UdpSocket(int fd) : fd_(fd) {}
  UdpSocket(UdpSocket&& other) noexcept : fd_(std::exchange(other.fd_, -1)) {}
  UdpSocket& operator=(UdpSocket&& other) noexcept;
  UdpSocket(const UdpSocket&) = delete;
  UdpSocket& operator=(const UdpSocket&) = delete;
  ~UdpSocket();

  int fd() const { return fd_; }

 private:
  int fd_ = -1;
};

class KeyReleaseServer {
 public:
  // Port 0 picks an ephemeral port; see port().
  static absl::StatusOr<KeyReleaseServer> Bind(const TeslaChain& chain,
                                               const Clock& clock,
                                               uint16_t port);

  uint16_t port() const { return port_; }

  // Waits up to `timeout` for one datagram and answers it. Returns true if a
  // request was answered, false on timeout or a dropped garbage datagram.
  absl::StatusOr<bool> ServeOne(absl::Duration timeout);

  // Answers up to `max_requests` requests (0 = forever).
  absl::Status Serve(uint64_t max_requests);

 private:
  KeyReleaseServer(const TeslaChain& chain, const Clock& clock,
                   UdpSocket socket, uint16_t port)
      : chain_(&chain),
        clock_(&clock),
        socket_(std::move(socket)),
        port_(port) {}

  const TeslaChain* chain_;
  const Clock* clock_;
  UdpSocket socket_;
  uint16_t port_;
};

// One request/response exchange. Returns k_i, not-yet (Unavailable), or
// DeadlineExceeded when no answer arrives in time.
absl::StatusOr<Key32> RequestKey(const std::string& host, uint16_t port,
                                 uint32_t i, absl::Duration timeout);

}  // namespace bsid

#endif  // BSID_KEY_RELEASE_UDP_H_
