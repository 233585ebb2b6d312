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

#ifndef FEDSPLIT_METRICS_H_
#define FEDSPLIT_METRICS_H_

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "fedsplit/dataset.h"
#include "fedsplit/model.h"
#include "fedsplit/transport.h"

namespace fedsplit {

// Bytes are seen from the coordinator: tx flows to clients, rx from them.
struct RoundMetrics {
  std::size_t round = 0;
  double accuracy = 0.0;
  double loss = 0.0;
  double wall_ms = 0.0;
  std::uint64_t tx_bytes = 0;
  std::uint64_t rx_bytes = 0;
  std::uint64_t cum_tx = 0;
  std::uint64_t cum_rx = 0;
  std::vector<ByteCounts> per_client;

  friend bool operator==(const RoundMetrics&, const RoundMetrics&) = default;
};

struct EvalResult {
  double accuracy = 0.0;
  double loss = 0.0;
};

inline constexpr std::size_t kEvalBatch = 256;

// Argmax accuracy and mean cross-entropy over the whole set. The model is
// copied so its caches stay untouched.
EvalResult evaluate_accuracy(const Model& model, const Dataset& test,
                             std::size_t batch_size = kEvalBatch);

// Builds the series round by round. Thread-safe.
class MetricsCollector {
 public:
  MetricsCollector(std::size_t clients, bool wall_clock);

  void begin_round();
  // Bytes exchanged with each client during the round.
  const RoundMetrics& end_round(const EvalResult& eval, std::span<const ByteCounts> per_client);
  // Same, with an externally measured wall time.
  const RoundMetrics& end_round(const EvalResult& eval, std::span<const ByteCounts> per_client,
                                double wall_ms);

  std::vector<RoundMetrics> series() const;

 private:
  std::size_t clients_;
  bool wall_clock_;
  mutable std::mutex mu_;
  std::chrono::steady_clock::time_point start_;
  std::vector<RoundMetrics> series_;
};

// Counter snapshot of every endpoint.
std::vector<ByteCounts> snapshot(std::span<Endpoint* const> endpoints);
std::vector<ByteCounts> deltas(std::span<const ByteCounts> after, std::span<const ByteCounts> before);

ByteCounts series_total(const std::vector<RoundMetrics>& series);

std::string metrics_csv(const std::vector<RoundMetrics>& series);
std::string metrics_json(const std::vector<RoundMetrics>& series);
std::vector<RoundMetrics> parse_metrics_json(const std::string& text);

enum class MetricsFormat { kCsv, kJson };
// Throws std::runtime_error if the path cannot be written.
void export_metrics(const std::vector<RoundMetrics>& series, const std::string& path,
                    MetricsFormat format);

}  // namespace fedsplit

#endif  // FEDSPLIT_METRICS_H_
