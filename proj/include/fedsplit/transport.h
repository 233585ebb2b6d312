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

#ifndef FEDSPLIT_TRANSPORT_H_
#define FEDSPLIT_TRANSPORT_H_

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>

#include "fedsplit/codec.h"

namespace fedsplit {

enum class FrameType : std::uint8_t {
  kHello = 1,
  kModelDown = 2,
  kModelUp = 3,
  kActivations = 4,
  kGradients = 5,
  kClientWeights = 6,
  kTokenPass = 7,
  kRoundDone = 8,
  kMetrics = 9,
  kBye = 10,
};

const char* to_string(FrameType t);
bool is_known_frame_type(std::uint8_t tag);

struct Frame {
  FrameType type = FrameType::kHello;
  Bytes payload;

  friend bool operator==(const Frame&, const Frame&) = default;
};

inline constexpr std::size_t kFrameHeaderBytes = 5;
inline constexpr std::size_t kDefaultMaxPayload = std::size_t{64} << 20;

inline std::size_t frame_size(std::size_t payload) { return kFrameHeaderBytes + payload; }

// Base of every transport failure.
class ChannelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The peer went away or the local side was closed.
class ChannelClosed : public ChannelError {
 public:
  using ChannelError::ChannelError;
};

// Well-formed bytes carrying the wrong thing: unknown tag, oversize payload,
// unexpected frame type.
class ProtocolError : public ChannelError {
 public:
  using ChannelError::ChannelError;
};

// A reliable ordered byte pipe. read_exact throws ChannelClosed on EOF.
class ByteStream {
 public:
  virtual ~ByteStream() = default;
  virtual void write_all(const std::uint8_t* data, std::size_t n) = 0;
  virtual void read_exact(std::uint8_t* data, std::size_t n) = 0;
  virtual void close() = 0;
};

struct ByteCounts {
  std::uint64_t tx = 0;
  std::uint64_t rx = 0;

  ByteCounts operator-(const ByteCounts& o) const { return {tx - o.tx, rx - o.rx}; }
  ByteCounts& operator+=(const ByteCounts& o) {
    tx += o.tx;
    rx += o.rx;
    return *this;
  }
  friend bool operator==(const ByteCounts&, const ByteCounts&) = default;
};

enum class Direction { kSent, kReceived };

// Framed, byte-counted channel end. Counters include the 5-byte header.
// Single owner: one thread at a time may send or receive.
class Endpoint {
 public:
  using Observer = std::function<void(Direction, const Frame&)>;

  explicit Endpoint(std::unique_ptr<ByteStream> stream,
                    std::size_t max_payload = kDefaultMaxPayload);
  ~Endpoint();

  Endpoint(const Endpoint&) = delete;
  Endpoint& operator=(const Endpoint&) = delete;

  void send(const Frame& frame);
  void send(FrameType type, Bytes payload = {});
  Frame recv();
  // recv() that throws ProtocolError unless the frame has the given type.
  Frame recv_expect(FrameType type);
  void close();

  ByteCounts counters() const { return {tx_.load(), rx_.load()}; }
  std::size_t max_payload() const { return max_payload_; }

  // Called after each frame is sent or received, on the calling thread.
  void set_observer(Observer observer) { observer_ = std::move(observer); }

 private:
  std::unique_ptr<ByteStream> stream_;
  std::size_t max_payload_;
  std::atomic<std::uint64_t> tx_{0};
  std::atomic<std::uint64_t> rx_{0};
  Observer observer_;
};

using EndpointPtr = std::unique_ptr<Endpoint>;

// In-process blocking pipe pair. Closing either side ends both directions.
std::pair<EndpointPtr, EndpointPtr> make_loopback(std::size_t max_payload = kDefaultMaxPayload);

// "host:port"; port 0 picks a free port.
class TcpListener {
 public:
  explicit TcpListener(const std::string& address);
  ~TcpListener();
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  std::uint16_t port() const { return port_; }
  // Blocks until a peer connects.
  EndpointPtr accept(std::size_t max_payload = kDefaultMaxPayload);
  void close();

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

EndpointPtr tcp_connect(const std::string& address,
                        std::size_t max_payload = kDefaultMaxPayload);

// Splits "host:port"; throws ChannelError on a malformed address.
std::pair<std::string, std::uint16_t> parse_address(const std::string& address);

}  // namespace fedsplit

#endif  // FEDSPLIT_TRANSPORT_H_
