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

// Schedules shared by coordinator, clients and the byte estimators. Every
// party derives the same step list from the same config, so no schedule is
// ever sent on the wire.

#ifndef FEDSPLIT_PROTOCOL_H_
#define FEDSPLIT_PROTOCOL_H_

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace fedsplit {

// How the client sub-network moves between clients. kRelay ships weights
// through the coordinator; kNone passes only a token, so each client keeps
// training its own copy.
enum class SyncMode { kRelay, kNone };

SyncMode parse_sync_mode(const std::string& name);
std::string to_string(SyncMode mode);

// One client's turn at one model.
//   handoff_in:  the turn starts by receiving CLIENT_WEIGHTS (relay) or
//                TOKEN_PASS (none) from the coordinator.
//   eval_upload: after the epoch the client uploads its sub-network in a
//                METRICS frame because the coordinator has no current copy
//                for end-of-round evaluation.
//   handoff_out: the turn ends by uploading CLIENT_WEIGHTS or TOKEN_PASS.
struct SplitStep {
  std::size_t index = 0;  // position in the global step list
  std::size_t round = 0;
  std::size_t client = 0;
  bool handoff_in = false;
  bool handoff_out = false;
  bool eval_upload = false;

  friend bool operator==(const SplitStep&, const SplitStep&) = default;
};

// rounds x order.size() steps; round r visits order[0], order[1], ...
std::vector<SplitStep> split_schedule(std::size_t rounds, const std::vector<std::size_t>& order,
                                      SyncMode mode);

// table[p][m] is the client that trains model m in phase p, (m + p) mod K.
// Throws std::invalid_argument unless 1 <= models <= clients.
using RotationTable = std::vector<std::vector<std::size_t>>;
RotationTable ensemble_schedule(std::size_t models, std::size_t clients);

// Client visit order of model m under the rotation: m, m+1, ... mod K.
std::vector<std::size_t> rotated_order(std::size_t clients, std::size_t shift);

inline std::size_t batch_count(std::size_t samples, std::size_t batch_size) {
  return (samples + batch_size - 1) / batch_size;
}

// Sizes of the mini-batches of one epoch; the last may be short.
std::vector<std::size_t> batch_sizes(std::size_t samples, std::size_t batch_size);

}  // namespace fedsplit

#endif  // FEDSPLIT_PROTOCOL_H_
