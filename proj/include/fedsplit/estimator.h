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

// Closed-form byte counts for the wire protocol. These walk the same
// schedules as the engines so they match the live counters exactly.

#ifndef FEDSPLIT_ESTIMATOR_H_
#define FEDSPLIT_ESTIMATOR_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fedsplit/protocol.h"
#include "fedsplit/tensor.h"

namespace fedsplit {

// payload: tensor element bytes. overhead: frame headers plus codec
// dimension headers.
struct ByteItem {
  std::uint64_t payload = 0;
  std::uint64_t overhead = 0;

  std::uint64_t total() const { return payload + overhead; }
  ByteItem& operator+=(const ByteItem& o) {
    payload += o.payload;
    overhead += o.overhead;
    return *this;
  }
  friend bool operator==(const ByteItem&, const ByteItem&) = default;
};

struct CommEstimate {
  ByteItem model_down;   // FL MODEL_DOWN
  ByteItem model_up;     // FL MODEL_UP
  ByteItem activations;  // smashed data, with the ACTIVATIONS frame header
  ByteItem labels;       // labels riding in ACTIVATIONS frames
  ByteItem gradients;
  ByteItem handoff;      // CLIENT_WEIGHTS or TOKEN_PASS, both legs
  ByteItem evaluation;   // METRICS uploads of the client sub-network
  ByteItem control;      // HELLO and BYE

  // Per client, client->coordinator and coordinator->client.
  std::vector<std::uint64_t> client_up;
  std::vector<std::uint64_t> client_down;
  // Per client ACTIVATIONS item totals (smashed data, headers included).
  std::vector<std::uint64_t> client_activations;

  std::uint64_t total() const;
  std::uint64_t payload_total() const;
  // Everything except control, i.e. the bytes inside RoundMetrics.
  std::uint64_t rounds_total() const { return total() - control.total(); }
  std::string to_json() const;

  CommEstimate& operator+=(const CommEstimate& o);
};

enum class FlDirection { kOne, kBoth };

// kOne counts uploads only. Control frames are included in both cases.
CommEstimate estimate_fl_bytes(std::size_t param_count, std::size_t rounds, std::size_t clients,
                               FlDirection direction = FlDirection::kBoth);

// order defaults to 0..k-1 and only matters for which client pays the
// handoff and evaluation frames.
CommEstimate estimate_split_bytes(const Shape& smashed_shape,
                                  std::span<const std::size_t> shard_sizes,
                                  std::size_t batch_size, std::size_t rounds,
                                  std::size_t client_param_count, SyncMode sync_mode,
                                  const std::vector<std::size_t>& order = {});

struct EnsembleMemberShape {
  Shape smashed_shape;
  std::size_t client_param_count = 0;
};

// Sum over members of their solo split estimates, with control frames once.
CommEstimate estimate_ensemble_bytes(std::span<const EnsembleMemberShape> members,
                                     std::span<const std::size_t> shard_sizes,
                                     std::size_t batch_size, std::size_t rounds,
                                     SyncMode sync_mode);

}  // namespace fedsplit

#endif  // FEDSPLIT_ESTIMATOR_H_
