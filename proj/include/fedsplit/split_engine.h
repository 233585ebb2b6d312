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

#ifndef FEDSPLIT_SPLIT_ENGINE_H_
#define FEDSPLIT_SPLIT_ENGINE_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fedsplit/dataset.h"
#include "fedsplit/fl_engine.h"
#include "fedsplit/metrics.h"
#include "fedsplit/model_zoo.h"
#include "fedsplit/optimizer.h"
#include "fedsplit/protocol.h"
#include "fedsplit/training.h"
#include "fedsplit/transport.h"

namespace fedsplit {

struct SplitConfig {
  std::size_t clients = 1;
  std::size_t rounds = 100;
  std::size_t batch_size = 32;
  OptimizerConfig optimizer;
  std::uint64_t seed = 0;
  ModelSpec model;
  std::size_t cut_index = 2;
  SyncMode sync_mode = SyncMode::kRelay;
  // Selects the init weights and batch-order stream; the ensemble gives each
  // member its own id.
  std::size_t model_id = 0;
  // Client visit order within a round; empty means 0, 1, ..., k-1.
  std::vector<std::size_t> order;
  bool wall_clock = true;
  // Simulated extra server compute per batch.
  std::uint32_t server_delay_us = 0;

  void validate() const;
  std::vector<std::size_t> visit_order() const;
  std::vector<SplitStep> schedule() const;
};

// Client half for one pass over the shard: ACTIVATIONS up, GRADIENTS down,
// local step, per mini-batch.
void split_client_epoch(Model& client_part, Optimizer& opt, const Dataset& shard,
                        std::span<const std::size_t> order, std::size_t batch_size,
                        Endpoint& endpoint);

// Server half for one client epoch of `batches` mini-batches. Returns the
// mean training loss.
float split_server_session(Model& server_part, Optimizer& opt, const Shape& smashed_shape,
                           std::size_t batches, Endpoint& endpoint,
                           std::uint32_t delay_us = 0);

// Client-side state of one model: the sub-network and its optimizer, which
// persists across this client's turns.
class SplitClient {
 public:
  SplitClient(const SplitConfig& config, std::size_t client_id, const Dataset& shard);

  void run_step(const SplitStep& step, Endpoint& endpoint);
  const Model& part() const { return part_; }

 private:
  SplitConfig config_;
  std::size_t id_;
  const Dataset& shard_;
  Model part_;
  Optimizer opt_;
};

// Coordinator-side state of one model: the server sub-network, its
// optimizer, and the latest client sub-network it has seen.
class SplitCoordinator {
 public:
  SplitCoordinator(const SplitConfig& config, std::span<const std::size_t> shard_sizes);

  // Handoff-in, server session, evaluation upload, handoff-out. Throws
  // EngineError if the step would hand the token to a client that already
  // holds it or skip a required handoff.
  void run_step(const SplitStep& step, Endpoint& endpoint);
  Model full_model() const { return join_models(client_part_, server_); }
  const Model& server_part() const { return server_; }

 private:
  SplitConfig config_;
  std::vector<std::size_t> shard_sizes_;
  Shape smashed_;
  Model server_;
  Optimizer opt_;
  Model client_part_;
  std::size_t holder_;  // client currently holding the token
};

// Coordinator loop over the schedule; endpoints[k] talks to client k.
TrainResult run_split(const SplitConfig& config, const Dataset& test,
                      std::span<Endpoint* const> endpoints,
                      std::span<const std::size_t> shard_sizes, const RoundHook& hook = {});

void run_split_client(const SplitConfig& config, std::size_t client_id, const Dataset& shard,
                      Endpoint& endpoint);

}  // namespace fedsplit

#endif  // FEDSPLIT_SPLIT_ENGINE_H_
