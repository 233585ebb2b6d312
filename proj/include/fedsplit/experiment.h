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

// Binds config, data, engines and transports into one run. The CLI is a thin
// layer over these calls.

#ifndef FEDSPLIT_EXPERIMENT_H_
#define FEDSPLIT_EXPERIMENT_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fedsplit/config.h"
#include "fedsplit/dataset.h"
#include "fedsplit/estimator.h"
#include "fedsplit/metrics.h"
#include "fedsplit/partition.h"

namespace fedsplit {

struct PreparedData {
  Dataset train;
  Dataset test;
  PartitionPlan plan;
  std::vector<Dataset> shards;
  std::vector<std::size_t> shard_sizes;
};

// Deterministic in the config: every process that loads the same config
// sees the same split and plan.
PreparedData prepare_data(const ExperimentConfig& config);

struct ExperimentResult {
  Mode mode = Mode::kFl;
  std::vector<std::vector<RoundMetrics>> series;  // one per model
  std::vector<Model> models;
  ByteCounts live;           // coordinator counters over the whole run
  CommEstimate estimate;     // the estimator for the same run
  double wall_ms = 0.0;
  std::vector<double> ensemble_round_ms;
  std::vector<std::vector<double>> ensemble_session_ms;
};

CommEstimate estimate_experiment(const ExperimentConfig& config,
                                 const std::vector<std::size_t>& shard_sizes);

// Called with (model index, round, full model) after every round.
using ExperimentHook = std::function<void(std::size_t, std::size_t, const Model&)>;

// Coordinator and every client in this process, over loopback pipes or
// local TCP connections per config.transport.
ExperimentResult run_local(const ExperimentConfig& config, const ExperimentHook& hook = {});

// Coordinator only: listens on `listen` and waits for config.clients peers.
ExperimentResult run_coordinator(const ExperimentConfig& config, const std::string& listen);

// One client process connecting to `connect`, retrying refused connects
// for up to retry_ms.
void run_client(const ExperimentConfig& config, std::size_t client_id, const std::string& connect,
                std::uint32_t retry_ms = 0);

// Files produced for `output`: <output>.csv and <output>.json, with a
// .m<id> infix per ensemble member. Returns the written paths.
std::vector<std::string> write_metrics(const ExperimentConfig& config,
                                       const ExperimentResult& result);

// Writes <output>.plan.json and <output>.stats.json.
std::vector<std::string> write_partition(const ExperimentConfig& config,
                                         const PreparedData& data);

std::string summary_line(const ExperimentResult& result);

}  // namespace fedsplit

#endif  // FEDSPLIT_EXPERIMENT_H_
