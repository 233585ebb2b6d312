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

#include "fedsplit/codec.h"

#include <bit>
#include <cstring>
#include <limits>
#include <string>

namespace fedsplit {

static_assert(std::endian::native == std::endian::little,
              "wire format assumes a little-endian host");
static_assert(sizeof(float) == 4);

namespace {

constexpr std::uint64_t kMaxElements = std::numeric_limits<std::uint32_t>::max();

void put_u32(Bytes& out, std::uint32_t v) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
  out.insert(out.end(), p, p + 4);
}

void put_shape(Bytes& out, const Shape& shape) {
  put_u32(out, static_cast<std::uint32_t>(shape.size()));
  for (std::size_t d : shape) {
    if (d > kMaxElements) throw CodecError("dimension " + std::to_string(d) + " exceeds u32");
    put_u32(out, static_cast<std::uint32_t>(d));
  }
}

}  // namespace

std::size_t encoded_tensor_size(const Shape& shape) {
  return 4 + 4 * shape.size() + 4 * shape_numel(shape);
}

void append_tensor(Bytes& out, const Tensor& t) {
  out.reserve(out.size() + encoded_tensor_size(t.shape()));
  put_shape(out, t.shape());
  const auto* p = reinterpret_cast<const std::uint8_t*>(t.raw());
  out.insert(out.end(), p, p + 4 * t.numel());
}

Bytes encode_tensor(const Tensor& t) {
  Bytes out;
  append_tensor(out, t);
  return out;
}

Tensor decode_tensor(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  Tensor t = r.tensor();
  r.finish();
  return t;
}

std::size_t encoded_labels_size(std::size_t n) { return 8 + 4 * n; }

void append_labels(Bytes& out, std::span<const Label> labels) {
  put_shape(out, Shape{labels.size()});
  for (Label l : labels) put_u32(out, l);
}

std::size_t encoded_params_size(std::size_t count) { return 8 + 4 * count; }

Bytes encode_params(std::span<const float> params) {
  return encode_tensor(Tensor({params.size()}, std::vector<float>(params.begin(), params.end())));
}

std::vector<float> decode_params(std::span<const std::uint8_t> bytes) {
  Tensor t = decode_tensor(bytes);
  if (t.rank() != 1) throw CodecError("parameter vector must have rank 1, got " + shape_str(t.shape()));
  return {t.data().begin(), t.data().end()};
}

Bytes encode_u32(std::uint32_t v) {
  Bytes out;
  put_u32(out, v);
  return out;
}

std::uint32_t decode_u32(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  const std::uint32_t v = r.u32();
  r.finish();
  return v;
}

void ByteReader::need(std::size_t n) const {
  if (remaining() < n) {
    throw CodecError("truncated buffer: need " + std::to_string(n) + " bytes at offset " +
                     std::to_string(pos_) + ", have " + std::to_string(remaining()));
  }
}

std::uint32_t ByteReader::u32() {
  need(4);
  std::uint32_t v;
  std::memcpy(&v, bytes_.data() + pos_, 4);
  pos_ += 4;
  return v;
}

Shape ByteReader::read_shape() {
  const std::uint32_t ndim = u32();
  need(std::size_t{4} * ndim);
  Shape shape(ndim);
  std::uint64_t numel = 1;
  for (auto& d : shape) {
    d = u32();
    if (d == 0) throw CodecError("zero-sized dimension");
    numel *= d;
    if (numel > kMaxElements) throw CodecError("dimension product overflows u32");
  }
  return shape;
}

Tensor ByteReader::tensor() {
  Shape shape = read_shape();
  if (shape.empty()) throw CodecError("tensor with zero dimensions");
  const std::size_t n = shape_numel(shape);
  need(4 * n);
  std::vector<float> data(n);
  std::memcpy(data.data(), bytes_.data() + pos_, 4 * n);
  pos_ += 4 * n;
  return Tensor(std::move(shape), std::move(data));
}

std::vector<Label> ByteReader::labels() {
  const std::uint32_t ndim = u32();
  if (ndim != 1) throw CodecError("labels must have rank 1, got " + std::to_string(ndim));
  const std::uint32_t n = u32();
  need(std::size_t{4} * n);
  std::vector<Label> out(n);
  std::memcpy(out.data(), bytes_.data() + pos_, std::size_t{4} * n);
  pos_ += std::size_t{4} * n;
  return out;
}

void ByteReader::finish() const {
  if (remaining() != 0) throw CodecError(std::to_string(remaining()) + " trailing bytes");
}

}  // namespace fedsplit
