/*
 * Copyright 2026 The FedSplit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// POSIX stream sockets behind the ByteStream interface. Counters live in
// Endpoint, so TCP/IP header bytes are never counted.

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <mutex>

#include "fedsplit/transport.h"

namespace fedsplit {
namespace {

std::string errno_text(const std::string& what) {
  return what + ": " + std::strerror(errno);
}

class SocketStream : public ByteStream {
 public:
  explicit SocketStream(int fd) : fd_(fd) {
    int one = 1;
    ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  }
  ~SocketStream() override {
    close();
    if (fd_ >= 0) ::close(fd_);
  }

  void write_all(const std::uint8_t* data, std::size_t n) override {
    while (n > 0) {
      const ssize_t w = ::send(fd_, data, n, MSG_NOSIGNAL);
      if (w < 0) {
        if (errno == EINTR) continue;
        if (errno == EPIPE || errno == ECONNRESET || errno == EBADF) {
          throw ChannelClosed(errno_text("tcp send"));
        }
        throw ChannelError(errno_text("tcp send"));
      }
      data += w;
      n -= static_cast<std::size_t>(w);
    }
  }

  void read_exact(std::uint8_t* data, std::size_t n) override {
    while (n > 0) {
      const ssize_t r = ::recv(fd_, data, n, 0);
      if (r == 0) throw ChannelClosed("tcp peer closed the connection");
      if (r < 0) {
        if (errno == EINTR) continue;
        if (errno == ECONNRESET || errno == EBADF) throw ChannelClosed(errno_text("tcp recv"));
        throw ChannelError(errno_text("tcp recv"));
      }
      data += r;
      n -= static_cast<std::size_t>(r);
    }
  }

  // shutdown() rather than close() so a thread blocked in recv wakes up
  // without the descriptor being reused underneath it.
  void close() override {
    std::lock_guard<std::mutex> lock(mu_);
    if (!shut_ && fd_ >= 0) {
      ::shutdown(fd_, SHUT_RDWR);
      shut_ = true;
    }
  }

 private:
  int fd_;
  std::mutex mu_;
  bool shut_ = false;
};

addrinfo* resolve(const std::string& host, std::uint16_t port, bool passive) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  if (passive) hints.ai_flags = AI_PASSIVE;
  addrinfo* res = nullptr;
  const std::string service = std::to_string(port);
  const int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &res);
  if (rc != 0 || res == nullptr) {
    throw ChannelError("cannot resolve '" + host + "': " + ::gai_strerror(rc));
  }
  return res;
}

}  // namespace

TcpListener::TcpListener(const std::string& address) {
  const auto [host, port] = parse_address(address);
  addrinfo* res = resolve(host, port, true);
  fd_ = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
  if (fd_ < 0) {
    ::freeaddrinfo(res);
    throw ChannelError(errno_text("socket"));
  }
  int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  if (::bind(fd_, res->ai_addr, res->ai_addrlen) != 0 || ::listen(fd_, 64) != 0) {
    const std::string err = errno_text("bind/listen on " + address);
    ::freeaddrinfo(res);
    ::close(fd_);
    fd_ = -1;
    throw ChannelError(err);
  }
  ::freeaddrinfo(res);
  sockaddr_in bound{};
  socklen_t len = sizeof(bound);
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&bound), &len);
  port_ = ntohs(bound.sin_port);
}

TcpListener::~TcpListener() { close(); }

void TcpListener::close() {
  if (fd_ >= 0) {
    ::shutdown(fd_, SHUT_RDWR);
    ::close(fd_);
    fd_ = -1;
  }
}

EndpointPtr TcpListener::accept(std::size_t max_payload) {
  for (;;) {
    const int fd = ::accept(fd_, nullptr, nullptr);
    if (fd >= 0) return std::make_unique<Endpoint>(std::make_unique<SocketStream>(fd), max_payload);
    if (errno != EINTR) throw ChannelError(errno_text("accept"));
  }
}

EndpointPtr tcp_connect(const std::string& address, std::size_t max_payload) {
  const auto [host, port] = parse_address(address);
  addrinfo* res = resolve(host, port, false);
  const int fd = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
  if (fd < 0) {
    ::freeaddrinfo(res);
    throw ChannelError(errno_text("socket"));
  }
  int rc;
  do {
    rc = ::connect(fd, res->ai_addr, res->ai_addrlen);
  } while (rc != 0 && errno == EINTR);
  ::freeaddrinfo(res);
  if (rc != 0) {
    const std::string err = errno_text("connect to " + address);
    ::close(fd);
    throw ChannelError(err);
  }
  return std::make_unique<Endpoint>(std::make_unique<SocketStream>(fd), max_payload);
}

}  // namespace fedsplit
