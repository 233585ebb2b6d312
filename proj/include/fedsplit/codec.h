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

#ifndef FEDSPLIT_CODEC_H_
#define FEDSPLIT_CODEC_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "fedsplit/tensor.h"

namespace fedsplit {

using Bytes = std::vector<std::uint8_t>;

class CodecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tensor wire layout: u32 ndim, ndim x u32 dims, numel x f32, all
// little-endian.
std::size_t encoded_tensor_size(const Shape& shape);
void append_tensor(Bytes& out, const Tensor& t);
Bytes encode_tensor(const Tensor& t);
// Rejects trailing bytes.
Tensor decode_tensor(std::span<const std::uint8_t> bytes);

// Labels use the same header with ndim = 1 and u32 elements.
std::size_t encoded_labels_size(std::size_t n);
void append_labels(Bytes& out, std::span<const Label> labels);

// A flat parameter vector travels as a rank-1 tensor.
std::size_t encoded_params_size(std::size_t count);
Bytes encode_params(std::span<const float> params);
std::vector<float> decode_params(std::span<const std::uint8_t> bytes);

Bytes encode_u32(std::uint32_t v);
std::uint32_t decode_u32(std::span<const std::uint8_t> bytes);

// Sequential decoder over one payload.
class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint32_t u32();
  Tensor tensor();
  std::vector<Label> labels();

  std::size_t remaining() const { return bytes_.size() - pos_; }
  // Throws CodecError unless every byte was consumed.
  void finish() const;

 private:
  void need(std::size_t n) const;
  Shape read_shape();

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace fedsplit

#endif  // FEDSPLIT_CODEC_H_
