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

#ifndef FEDSPLIT_TRAINING_H_
#define FEDSPLIT_TRAINING_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fedsplit/dataset.h"
#include "fedsplit/model.h"
#include "fedsplit/model_zoo.h"
#include "fedsplit/optimizer.h"

namespace fedsplit {

// Failure inside an engine, tagged with where it happened. Transport and
// codec errors are rethrown wrapped in this.
class EngineError : public std::runtime_error {
 public:
  EngineError(const std::string& what, std::size_t round, std::size_t client)
      : std::runtime_error(what), round_(round), client_(client) {}
  std::size_t round() const { return round_; }
  std::size_t client() const { return client_; }

 private:
  std::size_t round_;
  std::size_t client_;
};

// Shuffle of a client's shard for one epoch. Seeded per
// (seed, model, client, round, epoch) so runs that share those coordinates
// see the same batches regardless of scheduling.
std::vector<std::size_t> epoch_order(std::uint64_t seed, std::size_t model_id, std::size_t client,
                                     std::size_t round, std::size_t epoch, std::size_t samples);

// The starting weights of model `model_id` of an experiment.
Model initial_model(const ModelSpec& spec, std::uint64_t seed, std::size_t model_id = 0);

// One forward/backward/step on a batch; returns the batch mean loss.
float train_batch(Model& model, Optimizer& opt, const Tensor& x, std::span<const Label> y);

// Invoked by the coordinators after each round with the current full model.
using RoundHook = std::function<void(std::size_t round, const Model& model)>;

}  // namespace fedsplit

#endif  // FEDSPLIT_TRAINING_H_
