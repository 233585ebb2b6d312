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

#ifndef FEDSPLIT_CONFIG_H_
#define FEDSPLIT_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "fedsplit/ensemble_engine.h"
#include "fedsplit/fl_engine.h"
#include "fedsplit/model_zoo.h"
#include "fedsplit/optimizer.h"
#include "fedsplit/protocol.h"
#include "fedsplit/split_engine.h"

namespace fedsplit {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : std::runtime_error(key.empty() ? what : "'" + key + "': " + what), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

enum class Mode { kFl, kSplit, kEnsemble };
std::string to_string(Mode mode);

enum class PartitionScheme { kIid, kImbalanced, kNonIid };
enum class TransportKind { kLoopback, kTcp };

struct ExperimentConfig {
  Mode mode = Mode::kFl;
  std::size_t clients = 1;
  std::size_t rounds = 100;
  std::size_t local_epochs = 1;
  std::size_t batch_size = 32;
  OptimizerConfig optimizer;
  std::uint64_t seed = 0;
  SyncMode sync_mode = SyncMode::kRelay;
  std::string output;  // metrics file prefix; empty writes nothing
  bool wall_clock = true;
  std::uint32_t server_delay_us = 0;
  double test_fraction = 0.5;

  ConvProfile model;
  std::size_t cut_index = 2;

  bool synthetic = true;
  std::string data_path;
  std::size_t synth_samples = 2000;
  double noise_std = 1.8;  // about 95% reachable with the default model

  PartitionScheme scheme = PartitionScheme::kIid;
  double sigma = 0.5;
  std::size_t classes_per_client = 1;
  std::string plan_file;  // replay a saved plan instead of partitioning

  TransportKind transport = TransportKind::kLoopback;
  std::string address = "127.0.0.1:0";

  std::vector<std::size_t> ensemble_depths;  // conv_depth of each member

  ModelSpec model_spec() const;
  std::vector<ModelSpec> ensemble_specs() const;
  FlConfig fl() const;
  SplitConfig split() const;
  EnsembleConfig ensemble() const;
};

// Flat "key = value" lines with optional [section] headers that prefix the
// keys; '#' or ';' starts a comment line. Throws ConfigError naming the key.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

}  // namespace fedsplit

#endif  // FEDSPLIT_CONFIG_H_
