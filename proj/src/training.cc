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

#include "fedsplit/training.h"

#include "fedsplit/loss.h"
#include "fedsplit/rng.h"

namespace fedsplit {

std::vector<std::size_t> epoch_order(std::uint64_t seed, std::size_t model_id, std::size_t client,
                                     std::size_t round, std::size_t epoch, std::size_t samples) {
  return shuffled_indices(
      samples, derive_seed(seed, SeedStream::kShuffle, {model_id, client, round, epoch}));
}

Model initial_model(const ModelSpec& spec, std::uint64_t seed, std::size_t model_id) {
  return init_weights(spec, model_id == 0 ? seed : derive_seed(seed, SeedStream::kInit, {model_id}));
}

float train_batch(Model& model, Optimizer& opt, const Tensor& x, std::span<const Label> y) {
  const Tensor logits = model.forward(x);
  const LossResult<float> loss = softmax_cross_entropy(logits, y);
  model.backward(loss.grad);
  opt.step(model);
  return loss.loss;
}

}  // namespace fedsplit
