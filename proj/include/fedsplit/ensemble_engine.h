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

#ifndef FEDSPLIT_ENSEMBLE_ENGINE_H_
#define FEDSPLIT_ENSEMBLE_ENGINE_H_

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "fedsplit/protocol.h"
#include "fedsplit/split_engine.h"

namespace fedsplit {

// M split-learning models sharing K clients. `base` supplies everything but
// the architecture; base.model is ignored.
struct EnsembleConfig {
  SplitConfig base;
  std::vector<ModelSpec> models;

  void validate() const;
  // Config that trains member m alone with exactly the same per-client
  // batches: own init stream, visit order rotated by m.
  SplitConfig member(std::size_t m) const;
};

struct EnsembleResult {
  std::vector<TrainResult> models;
  std::vector<double> round_ms;                  // wall time of each round
  std::vector<std::vector<double>> session_ms;   // [round][phase * M + m]
};

using EnsembleHook = std::function<void(std::size_t model, std::size_t round, const Model&)>;

// Phases run with one thread per model and a barrier in between. Per-model
// round bytes are the deltas of the endpoints that model used.
EnsembleResult run_ensemble(const EnsembleConfig& config, const Dataset& test,
                            std::span<Endpoint* const> endpoints,
                            std::span<const std::size_t> shard_sizes,
                            const EnsembleHook& hook = {});

void run_ensemble_client(const EnsembleConfig& config, std::size_t client_id,
                         const Dataset& shard, Endpoint& endpoint);

}  // namespace fedsplit

#endif  // FEDSPLIT_ENSEMBLE_ENGINE_H_
