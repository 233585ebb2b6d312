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

#include "fedsplit/protocol.h"

#include <algorithm>

namespace fedsplit {

SyncMode parse_sync_mode(const std::string& name) {
  if (name == "relay") return SyncMode::kRelay;
  if (name == "none") return SyncMode::kNone;
  throw std::invalid_argument("unknown sync_mode '" + name + "' (expected relay or none)");
}

std::string to_string(SyncMode mode) { return mode == SyncMode::kRelay ? "relay" : "none"; }

std::vector<SplitStep> split_schedule(std::size_t rounds, const std::vector<std::size_t>& order,
                                      SyncMode mode) {
  if (order.empty()) throw std::invalid_argument("split schedule needs at least one client");
  std::vector<SplitStep> steps;
  steps.reserve(rounds * order.size());
  for (std::size_t r = 0; r < rounds; ++r) {
    for (std::size_t c : order) {
      SplitStep s;
      s.index = steps.size();
      s.round = r;
      s.client = c;
      steps.push_back(s);
    }
  }
  for (std::size_t i = 0; i < steps.size(); ++i) {
    SplitStep& s = steps[i];
    s.handoff_in = i > 0 && steps[i - 1].client != s.client;
    s.handoff_out = i + 1 < steps.size() && steps[i + 1].client != s.client;
    const bool round_end = i + 1 == steps.size() || steps[i + 1].round != s.round;
    // In relay mode a handoff-out already hands the coordinator the current
    // sub-network; otherwise it has to be uploaded for evaluation.
    s.eval_upload = round_end && !(mode == SyncMode::kRelay && s.handoff_out);
  }
  return steps;
}

std::vector<std::size_t> rotated_order(std::size_t clients, std::size_t shift) {
  std::vector<std::size_t> order(clients);
  for (std::size_t p = 0; p < clients; ++p) order[p] = (shift + p) % clients;
  return order;
}

RotationTable ensemble_schedule(std::size_t models, std::size_t clients) {
  if (models < 1) throw std::invalid_argument("ensemble needs at least one model");
  if (models > clients) {
    throw std::invalid_argument(std::to_string(models) + " models cannot share " +
                                std::to_string(clients) +
                                " clients: a client would serve two models in one phase");
  }
  RotationTable table(clients, std::vector<std::size_t>(models));
  for (std::size_t p = 0; p < clients; ++p) {
    for (std::size_t m = 0; m < models; ++m) table[p][m] = (m + p) % clients;
  }
  return table;
}

std::vector<std::size_t> batch_sizes(std::size_t samples, std::size_t batch_size) {
  if (batch_size == 0) throw std::invalid_argument("batch_size must be >= 1");
  std::vector<std::size_t> out;
  for (std::size_t off = 0; off < samples; off += batch_size) {
    out.push_back(std::min(batch_size, samples - off));
  }
  return out;
}

}  // namespace fedsplit
