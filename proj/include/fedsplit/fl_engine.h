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

#ifndef FEDSPLIT_FL_ENGINE_H_
#define FEDSPLIT_FL_ENGINE_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fedsplit/dataset.h"
#include "fedsplit/metrics.h"
#include "fedsplit/model_zoo.h"
#include "fedsplit/optimizer.h"
#include "fedsplit/training.h"
#include "fedsplit/transport.h"

namespace fedsplit {

struct FlConfig {
  std::size_t clients = 1;
  std::size_t rounds = 100;
  std::size_t local_epochs = 1;
  std::size_t batch_size = 32;
  OptimizerConfig optimizer;
  std::uint64_t seed = 0;
  ModelSpec model;
  bool wall_clock = true;

  void validate() const;
};

struct LocalTrainOptions {
  std::size_t epochs = 1;
  std::size_t batch_size = 32;
  OptimizerConfig optimizer;
  std::uint64_t seed = 0;
  std::size_t client = 0;
  std::size_t round = 0;
};

// E shuffled passes over the shard with a fresh optimizer. Returns the mean
// training loss over all batches.
float local_train(Model& model, const Dataset& shard, const LocalTrainOptions& options);

struct ClientUpdate {
  std::size_t client = 0;
  std::span<const float> weights;
  std::size_t samples = 0;
};

// sum_k s_k w_k / sum_k s_k, accumulated in double in ascending client id.
std::vector<float> fedavg_aggregate(std::span<const ClientUpdate> updates);

struct TrainResult {
  Model model;
  std::vector<RoundMetrics> rounds;
};

// Coordinator. endpoints[k] talks to client k, whose shard holds
// shard_sizes[k] samples. Sends BYE to every client at the end.
TrainResult run_fl(const FlConfig& config, const Dataset& test,
                   std::span<Endpoint* const> endpoints, std::span<const std::size_t> shard_sizes,
                   const RoundHook& hook = {});

// Client worker: answers MODEL_DOWN with MODEL_UP until BYE.
void run_fl_client(const FlConfig& config, std::size_t client_id, const Dataset& shard,
                   Endpoint& endpoint);

}  // namespace fedsplit

#endif  // FEDSPLIT_FL_ENGINE_H_
