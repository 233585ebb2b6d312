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

#ifndef FEDSPLIT_LOSS_H_
#define FEDSPLIT_LOSS_H_

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>

#include "fedsplit/tensor.h"

namespace fedsplit {

template <typename T>
struct LossResult {
  T loss{};
  BasicTensor<T> grad;  // d(mean loss)/d(logits), same shape as logits
};

// Mean over the batch of -log softmax(logits)[label], stabilized by
// subtracting the row max. grad = (softmax - onehot) / batch.
template <typename T>
LossResult<T> softmax_cross_entropy(const BasicTensor<T>& logits,
                                    std::span<const Label> labels) {
  if (logits.rank() != 2) {
    throw ShapeError("softmax_cross_entropy expects [batch, classes] logits, got " +
                     shape_str(logits.shape()));
  }
  const std::size_t batch = logits.dim(0), classes = logits.dim(1);
  if (labels.size() != batch) {
    throw ShapeError("softmax_cross_entropy: " + std::to_string(labels.size()) +
                     " labels for a batch of " + std::to_string(batch));
  }
  LossResult<T> out{T{0}, BasicTensor<T>(logits.shape())};
  const T inv_batch = T{1} / static_cast<T>(batch);
  T total{0};
  for (std::size_t b = 0; b < batch; ++b) {
    if (labels[b] >= classes) {
      throw std::out_of_range("label " + std::to_string(labels[b]) + " at row " +
                              std::to_string(b) + " outside [0, " +
                              std::to_string(classes) + ")");
    }
    const T* row = logits.raw() + b * classes;
    T* grow = out.grad.raw() + b * classes;
    T mx = row[0];
    for (std::size_t c = 1; c < classes; ++c) mx = row[c] > mx ? row[c] : mx;
    T denom{0};
    for (std::size_t c = 0; c < classes; ++c) {
      grow[c] = std::exp(row[c] - mx);
      denom += grow[c];
    }
    total += std::log(denom) - (row[labels[b]] - mx);
    for (std::size_t c = 0; c < classes; ++c) {
      const T p = grow[c] / denom;
      grow[c] = (p - (c == labels[b] ? T{1} : T{0})) * inv_batch;
    }
  }
  out.loss = total * inv_batch;
  return out;
}

}  // namespace fedsplit

#endif  // FEDSPLIT_LOSS_H_
