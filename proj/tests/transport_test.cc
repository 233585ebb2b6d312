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

#include <cstring>
#include <random>
#include <thread>

#include <gtest/gtest.h>

#include "fedsplit/codec.h"
#include "fedsplit/transport.h"

namespace fedsplit {
namespace {

Tensor random_tensor(Shape shape, std::mt19937& rng) {
  Tensor t(std::move(shape));
  std::uniform_real_distribution<float> u(-5, 5);
  for (auto& v : t.data()) v = u(rng);
  return t;
}

TEST(CodecTest, EncodedLengthMatchesLayout) {
  Tensor t({2, 3});
  for (std::size_t i = 0; i < 6; ++i) t[i] = static_cast<float>(i) - 2.5f;
  const Bytes b = encode_tensor(t);
  ASSERT_EQ(b.size(), 36u);
  EXPECT_EQ(encoded_tensor_size({2, 3}), 36u);
  // Header words, then the first float verbatim.
  std::uint32_t w[3];
  std::memcpy(w, b.data(), 12);
  EXPECT_EQ(w[0], 2u);
  EXPECT_EQ(w[1], 2u);
  EXPECT_EQ(w[2], 3u);
  const std::uint8_t first[4] = {0x00, 0x00, 0x20, 0xC0};  // -2.5f little-endian
  EXPECT_EQ(std::memcmp(b.data() + 12, first, 4), 0);
}

TEST(CodecTest, RoundTripIsBitExact) {
  std::mt19937 rng(3);
  for (int i = 0; i < 20; ++i) {
    Shape s;
    const int rank = 1 + static_cast<int>(rng() % 4);
    for (int d = 0; d < rank; ++d) s.push_back(1 + rng() % 5);
    Tensor t = random_tensor(s, rng);
    EXPECT_EQ(decode_tensor(encode_tensor(t)), t);
  }
  const std::vector<float> p{1.0f, -0.0f, 3e-38f};
  Bytes enc = encode_params(p);
  EXPECT_EQ(enc.size(), encoded_params_size(3));
  const auto back = decode_params(enc);
  EXPECT_EQ(std::memcmp(back.data(), p.data(), 12), 0);
}

TEST(CodecTest, MalformedInputs) {
  const Bytes three{1, 0, 0};
  EXPECT_THROW(decode_tensor(three), CodecError);
  Bytes b = encode_tensor(Tensor({2, 2}, 1.0f));
  Bytes trailing = b;
  trailing.push_back(0);
  EXPECT_THROW(decode_tensor(trailing), CodecError);
  Bytes truncated(b.begin(), b.end() - 1);
  EXPECT_THROW(decode_tensor(truncated), CodecError);
  // Dims 2^16 x 2^16 overflow the u32 element count.
  Bytes overflow;
  for (std::uint32_t w : {2u, 65536u, 65536u}) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(&w);
    overflow.insert(overflow.end(), p, p + 4);
  }
  EXPECT_THROW(decode_tensor(overflow), CodecError);
  EXPECT_THROW(decode_u32(Bytes{1, 2}), CodecError);
}

TEST(CodecTest, ActivationPayloadDecodesSequentially) {
  std::mt19937 rng(5);
  Tensor a = random_tensor({3, 2, 4}, rng);
  std::vector<Label> y{4, 0, 2};
  Bytes payload;
  append_tensor(payload, a);
  append_labels(payload, y);
  EXPECT_EQ(payload.size(), encoded_tensor_size(a.shape()) + encoded_labels_size(3));
  ByteReader r(payload);
  EXPECT_EQ(r.tensor(), a);
  EXPECT_EQ(r.labels(), y);
  EXPECT_NO_THROW(r.finish());
}

TEST(FrameTest, EmptyFrameCostsFiveBytes) {
  auto [a, b] = make_loopback();
  EXPECT_EQ(a->counters(), (ByteCounts{0, 0}));
  a->send(FrameType::kTokenPass);
  EXPECT_EQ(a->counters().tx, 5u);
  Frame f = b->recv();
  EXPECT_EQ(f.type, FrameType::kTokenPass);
  EXPECT_TRUE(f.payload.empty());
  EXPECT_EQ(b->counters().rx, 5u);
}

TEST(FrameTest, TensorFrameCountsHeaderPlusPayload) {
  auto [a, b] = make_loopback();
  Frame sent{FrameType::kModelDown, encode_tensor(Tensor({2, 3}, 0.5f))};
  a->send(sent);
  EXPECT_EQ(a->counters().tx, 41u);
  EXPECT_EQ(b->recv(), sent);
  EXPECT_EQ(a->counters().tx, b->counters().rx);
}

TEST(FrameTest, FifoOrderAndMonotonicCounters) {
  auto [a, b] = make_loopback();
  std::thread producer([&a = a] {
    for (std::uint32_t i = 0; i < 100; ++i) a->send(FrameType::kMetrics, encode_u32(i));
  });
  ByteCounts last;
  for (std::uint32_t i = 0; i < 100; ++i) {
    Frame f = b->recv_expect(FrameType::kMetrics);
    EXPECT_EQ(decode_u32(f.payload), i);
    const ByteCounts now = b->counters();
    EXPECT_GE(now.rx, last.rx);
    last = now;
  }
  producer.join();
  EXPECT_EQ(a->counters().tx, 100u * 9u);
  EXPECT_EQ(a->counters().tx, b->counters().rx);
}

TEST(FrameTest, UnknownTagRejected) {
  // A raw stream lets the test write a frame header Endpoint refuses to build.
  struct Raw : ByteStream {
    Bytes data;
    std::size_t pos = 0;
    void write_all(const std::uint8_t*, std::size_t) override {}
    void read_exact(std::uint8_t* out, std::size_t n) override {
      if (pos + n > data.size()) throw ChannelClosed("eof");
      std::memcpy(out, data.data() + pos, n);
      pos += n;
    }
    void close() override {}
  };
  auto raw = std::make_unique<Raw>();
  raw->data = {0, 0, 0, 0, 0xFF, 0, 0, 0, 0, 0x00};
  Endpoint ep(std::move(raw));
  EXPECT_THROW(ep.recv(), ProtocolError);
  EXPECT_THROW(ep.recv(), ProtocolError);  // tag 0 is also unknown
}

TEST(FrameTest, OversizePayloadRejected) {
  auto [a, b] = make_loopback(16);
  EXPECT_THROW(a->send(FrameType::kMetrics, Bytes(17)), ProtocolError);
  EXPECT_EQ(a->counters().tx, 0u);
  EXPECT_NO_THROW(a->send(FrameType::kMetrics, Bytes(16)));
}

TEST(FrameTest, UnexpectedTypeIsProtocolError) {
  auto [a, b] = make_loopback();
  a->send(FrameType::kGradients);
  EXPECT_THROW(b->recv_expect(FrameType::kActivations), ProtocolError);
}

TEST(LoopbackTest, ClosedChannelErrors) {
  auto [a, b] = make_loopback();
  a->send(FrameType::kBye);
  a->close();
  EXPECT_EQ(b->recv().type, FrameType::kBye);  // buffered data still drains
  EXPECT_THROW(b->recv(), ChannelClosed);
  EXPECT_THROW(b->send(FrameType::kBye), ChannelClosed);
}

TEST(LoopbackTest, CloseWakesBlockedReader) {
  auto [a, b] = make_loopback();
  std::thread closer([&a = a] {
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
    a->close();
  });
  EXPECT_THROW(b->recv(), ChannelClosed);
  closer.join();
}

TEST(TcpTest, ConnectToClosedPortFails) {
  std::uint16_t port;
  {
    TcpListener l("127.0.0.1:0");
    port = l.port();
  }
  EXPECT_THROW(tcp_connect("127.0.0.1:" + std::to_string(port)), ChannelError);
  EXPECT_THROW(tcp_connect("nonsense"), ChannelError);
  EXPECT_THROW(parse_address("host:99999"), ChannelError);
}

// The same scripted exchange over either transport.
std::pair<ByteCounts, ByteCounts> echo_exchange(Endpoint& a, Endpoint& b) {
  std::thread echo([&b] {
    for (;;) {
      Frame f = b.recv();
      if (f.type == FrameType::kBye) break;
      b.send(f);
    }
  });
  std::mt19937 rng(9);
  for (int i = 0; i < 10; ++i) {
    Frame f{FrameType::kActivations, encode_tensor(random_tensor({1 + rng() % 7, 3}, rng))};
    a.send(f);
    EXPECT_EQ(a.recv(), f);
  }
  a.send(FrameType::kBye);
  echo.join();
  return {a.counters(), b.counters()};
}

TEST(TcpTest, EchoMatchesLoopbackCounters) {
  auto [la, lb] = make_loopback();
  const auto loop = echo_exchange(*la, *lb);

  TcpListener listener("127.0.0.1:0");
  EndpointPtr server;
  std::thread acceptor([&] { server = listener.accept(); });
  EndpointPtr client = tcp_connect("127.0.0.1:" + std::to_string(listener.port()));
  acceptor.join();
  const auto tcp = echo_exchange(*client, *server);

  EXPECT_EQ(tcp.first, loop.first);
  EXPECT_EQ(tcp.second, loop.second);
  // Conservation: everything sent was received.
  EXPECT_EQ(tcp.first.tx + tcp.second.tx, tcp.first.rx + tcp.second.rx);
}

TEST(TcpTest, PeerCloseSurfacesAsChannelClosed) {
  TcpListener listener("127.0.0.1:0");
  EndpointPtr server;
  std::thread acceptor([&] { server = listener.accept(); });
  EndpointPtr client = tcp_connect("127.0.0.1:" + std::to_string(listener.port()));
  acceptor.join();
  client->close();
  EXPECT_THROW(server->recv(), ChannelClosed);
}

TEST(ObserverTest, SeesEveryFrame) {
  auto [a, b] = make_loopback();
  std::vector<FrameType> seen;
  b->set_observer([&](Direction d, const Frame& f) {
    if (d == Direction::kReceived) seen.push_back(f.type);
  });
  a->send(FrameType::kHello, encode_u32(3));
  a->send(FrameType::kBye);
  b->recv();
  b->recv();
  EXPECT_EQ(seen, (std::vector<FrameType>{FrameType::kHello, FrameType::kBye}));
}

}  // namespace
}  // namespace fedsplit
