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

#include "bsid/key_release_udp.h"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "absl/strings/str_cat.h"
#include "bsid/status_macros.h"

namespace bsid {

namespace {

constexpr size_t kMaxDatagram = 512;

absl::Status Errno(absl::string_view what) {
  return absl::UnavailableError(absl::StrCat(what, ": ", std::strerror(errno)));
}

// True if the socket became readable within `timeout`.
absl::StatusOr<bool> WaitReadable(int fd, absl::Duration timeout) {
  pollfd p{fd, POLLIN, 0};
  const int ms = timeout == absl::InfiniteDuration()
                     ? -1
                     : static_cast<int>(absl::ToInt64Milliseconds(timeout));
  int rc;
  do {
    rc = ::poll(&p, 1, ms);
  } while (rc < 0 && errno == EINTR);
  if (rc < 0) return Errno("poll");
  return rc > 0;
}

}  // namespace

UdpSocket& UdpSocket::operator=(UdpSocket&& other) noexcept {
  if (this != &other) {
    if (fd_ >= 0) ::close(fd_);
    fd_ = std::exchange(other.fd_, -1);
  }
  return *this;
}

UdpSocket::~UdpSocket() {
  if (fd_ >= 0) ::close(fd_);
}

absl::StatusOr<KeyReleaseServer> KeyReleaseServer::Bind(const TeslaChain& chain,
                                                        const Clock& clock,
                                                        uint16_t port) {
  UdpSocket socket(::socket(AF_INET, SOCK_DGRAM, 0));
  if (socket.fd() < 0) return Errno("socket");
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_ANY);
  addr.sin_port = htons(port);
  if (::bind(socket.fd(), reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) <
      0) {
    return Errno(absl::StrCat("bind port ", port));
  }
  socklen_t len = sizeof(addr);
  if (::getsockname(socket.fd(), reinterpret_cast<sockaddr*>(&addr), &len) <
      0) {
    return Errno("getsockname");
  }
  return KeyReleaseServer(chain, clock, std::move(socket),
                          ntohs(addr.sin_port));
}

absl::StatusOr<bool> KeyReleaseServer::ServeOne(absl::Duration timeout) {
  ASSIGN_OR_RETURN(bool readable, WaitReadable(socket_.fd(), timeout));
  if (!readable) return false;
  uint8_t buf[kMaxDatagram];
  sockaddr_in peer{};
  socklen_t peer_len = sizeof(peer);
  const ssize_t n = ::recvfrom(socket_.fd(), buf, sizeof(buf), 0,
                               reinterpret_cast<sockaddr*>(&peer), &peer_len);
  if (n < 0) return Errno("recvfrom");
  auto reply = HandleKeyDatagram(*chain_, clock_->Now(),
                                 ByteSpan(buf, static_cast<size_t>(n)));
  if (!reply.has_value()) return false;
  if (::sendto(socket_.fd(), reply->data(), reply->size(), 0,
               reinterpret_cast<sockaddr*>(&peer), peer_len) < 0) {
    return Errno("sendto");
  }
  return true;
}

absl::Status KeyReleaseServer::Serve(uint64_t max_requests) {
  uint64_t answered = 0;
  while (max_requests == 0 || answered < max_requests) {
    ASSIGN_OR_RETURN(bool ok, ServeOne(absl::InfiniteDuration()));
    if (ok) ++answered;
  }
  return absl::OkStatus();
}

absl::StatusOr<Key32> RequestKey(const std::string& host, uint16_t port,
                                 uint32_t i, absl::Duration timeout) {
  UdpSocket socket(::socket(AF_INET, SOCK_DGRAM, 0));
  if (socket.fd() < 0) return Errno("socket");
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("invalid-argument: not an IPv4 address: ", host));
  }
  const Bytes request = EncodeKeyRequest(i);
  if (::sendto(socket.fd(), request.data(), request.size(), 0,
               reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0) {
    return Errno("sendto");
  }
  ASSIGN_OR_RETURN(bool readable, WaitReadable(socket.fd(), timeout));
  if (!readable) {
    return absl::DeadlineExceededError("no key-release response");
  }
  uint8_t buf[kMaxDatagram];
  const ssize_t n = ::recv(socket.fd(), buf, sizeof(buf), 0);
  if (n < 0) return Errno("recv");
  ASSIGN_OR_RETURN(auto response,
                   DecodeKeyResponse(ByteSpan(buf, static_cast<size_t>(n))));
  if (response.first != i) {
    return absl::DataLossError("malformed: response for a different interval");
  }
  return response.second;
}

}  // namespace bsid
