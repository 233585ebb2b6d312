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

#include "fedsplit/transport.h"

#include <condition_variable>
#include <cstring>
#include <deque>
#include <mutex>

namespace fedsplit {

const char* to_string(FrameType t) {
  switch (t) {
    case FrameType::kHello: return "HELLO";
    case FrameType::kModelDown: return "MODEL_DOWN";
    case FrameType::kModelUp: return "MODEL_UP";
    case FrameType::kActivations: return "ACTIVATIONS";
    case FrameType::kGradients: return "GRADIENTS";
    case FrameType::kClientWeights: return "CLIENT_WEIGHTS";
    case FrameType::kTokenPass: return "TOKEN_PASS";
    case FrameType::kRoundDone: return "ROUND_DONE";
    case FrameType::kMetrics: return "METRICS";
    case FrameType::kBye: return "BYE";
  }
  return "UNKNOWN";
}

bool is_known_frame_type(std::uint8_t tag) {
  return tag >= static_cast<std::uint8_t>(FrameType::kHello) &&
         tag <= static_cast<std::uint8_t>(FrameType::kBye);
}

Endpoint::Endpoint(std::unique_ptr<ByteStream> stream, std::size_t max_payload)
    : stream_(std::move(stream)), max_payload_(max_payload) {}

Endpoint::~Endpoint() { close(); }

void Endpoint::send(const Frame& frame) {
  if (frame.payload.size() > max_payload_) {
    throw ProtocolError(std::string("oversize ") + to_string(frame.type) + " payload: " +
                        std::to_string(frame.payload.size()) + " > " +
                        std::to_string(max_payload_));
  }
  Bytes wire(kFrameHeaderBytes + frame.payload.size());
  const auto len = static_cast<std::uint32_t>(frame.payload.size());
  std::memcpy(wire.data(), &len, 4);
  wire[4] = static_cast<std::uint8_t>(frame.type);
  if (!frame.payload.empty()) {
    std::memcpy(wire.data() + kFrameHeaderBytes, frame.payload.data(), frame.payload.size());
  }
  stream_->write_all(wire.data(), wire.size());
  tx_ += wire.size();
  if (observer_) observer_(Direction::kSent, frame);
}

void Endpoint::send(FrameType type, Bytes payload) { send(Frame{type, std::move(payload)}); }

Frame Endpoint::recv() {
  std::uint8_t header[kFrameHeaderBytes];
  stream_->read_exact(header, kFrameHeaderBytes);
  std::uint32_t len;
  std::memcpy(&len, header, 4);
  if (len > max_payload_) {
    throw ProtocolError("incoming payload of " + std::to_string(len) + " bytes exceeds " +
                        std::to_string(max_payload_));
  }
  Frame frame;
  frame.payload.resize(len);
  if (len > 0) stream_->read_exact(frame.payload.data(), len);
  rx_ += kFrameHeaderBytes + len;
  // The payload is consumed first so the stream stays aligned on frames.
  if (!is_known_frame_type(header[4])) {
    throw ProtocolError("unknown frame tag 0x" +
                        std::string(1, "0123456789ABCDEF"[header[4] >> 4]) +
                        std::string(1, "0123456789ABCDEF"[header[4] & 15]));
  }
  frame.type = static_cast<FrameType>(header[4]);
  if (observer_) observer_(Direction::kReceived, frame);
  return frame;
}

Frame Endpoint::recv_expect(FrameType type) {
  Frame f = recv();
  if (f.type != type) {
    throw ProtocolError(std::string("expected ") + to_string(type) + ", got " +
                        to_string(f.type));
  }
  return f;
}

void Endpoint::close() {
  if (stream_) stream_->close();
}

namespace {

// One direction of a loopback pair.
struct Pipe {
  std::mutex mu;
  std::condition_variable cv;
  std::deque<std::uint8_t> buf;
  bool closed = false;

  void write(const std::uint8_t* data, std::size_t n) {
    {
      std::lock_guard<std::mutex> lock(mu);
      if (closed) throw ChannelClosed("write on closed loopback channel");
      buf.insert(buf.end(), data, data + n);
    }
    cv.notify_all();
  }

  void read(std::uint8_t* data, std::size_t n) {
    std::unique_lock<std::mutex> lock(mu);
    std::size_t got = 0;
    while (got < n) {
      cv.wait(lock, [&] { return !buf.empty() || closed; });
      if (buf.empty()) throw ChannelClosed("loopback channel closed");
      const std::size_t take = std::min(n - got, buf.size());
      std::copy_n(buf.begin(), take, data + got);
      buf.erase(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(take));
      got += take;
    }
  }

  void close() {
    {
      std::lock_guard<std::mutex> lock(mu);
      closed = true;
    }
    cv.notify_all();
  }
};

class LoopbackStream : public ByteStream {
 public:
  LoopbackStream(std::shared_ptr<Pipe> out, std::shared_ptr<Pipe> in)
      : out_(std::move(out)), in_(std::move(in)) {}

  void write_all(const std::uint8_t* data, std::size_t n) override { out_->write(data, n); }
  void read_exact(std::uint8_t* data, std::size_t n) override { in_->read(data, n); }
  void close() override {
    out_->close();
    in_->close();
  }

 private:
  std::shared_ptr<Pipe> out_;
  std::shared_ptr<Pipe> in_;
};

}  // namespace

std::pair<EndpointPtr, EndpointPtr> make_loopback(std::size_t max_payload) {
  auto ab = std::make_shared<Pipe>();
  auto ba = std::make_shared<Pipe>();
  return {std::make_unique<Endpoint>(std::make_unique<LoopbackStream>(ab, ba), max_payload),
          std::make_unique<Endpoint>(std::make_unique<LoopbackStream>(ba, ab), max_payload)};
}

std::pair<std::string, std::uint16_t> parse_address(const std::string& address) {
  const auto colon = address.rfind(':');
  if (colon == std::string::npos || colon + 1 == address.size()) {
    throw ChannelError("address '" + address + "' is not host:port");
  }
  std::string host = address.substr(0, colon);
  if (host.empty()) host = "0.0.0.0";
  unsigned long port = 0;
  try {
    std::size_t used = 0;
    port = std::stoul(address.substr(colon + 1), &used);
    if (used != address.size() - colon - 1) throw std::invalid_argument("junk");
  } catch (const std::exception&) {
    throw ChannelError("address '" + address + "' has a bad port");
  }
  if (port > 65535) throw ChannelError("address '" + address + "' has a bad port");
  return {host, static_cast<std::uint16_t>(port)};
}

}  // namespace fedsplit
