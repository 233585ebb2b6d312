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

#include "fedsplit/metrics.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "fedsplit/loss.h"
#include "json.hpp"

namespace fedsplit {

using json = nlohmann::json;

EvalResult evaluate_accuracy(const Model& model, const Dataset& test, std::size_t batch_size) {
  if (test.size() == 0) throw DataError("evaluation set is empty");
  if (batch_size == 0) throw std::invalid_argument("batch_size must be >= 1");
  Model m = model;
  std::size_t correct = 0;
  double loss_sum = 0.0;
  std::vector<std::size_t> idx;
  for (std::size_t off = 0; off < test.size(); off += batch_size) {
    const std::size_t b = std::min(batch_size, test.size() - off);
    idx.resize(b);
    for (std::size_t i = 0; i < b; ++i) idx[i] = off + i;
    const Tensor logits = m.forward(test.gather(idx));
    const auto labels = test.gather_labels(idx);
    const std::size_t classes = logits.dim(1);
    for (std::size_t i = 0; i < b; ++i) {
      const float* row = logits.raw() + i * classes;
      const auto arg = static_cast<std::size_t>(std::max_element(row, row + classes) - row);
      correct += arg == labels[i];
    }
    loss_sum += static_cast<double>(softmax_cross_entropy(logits, labels).loss) * b;
  }
  return {static_cast<double>(correct) / test.size(), loss_sum / test.size()};
}

MetricsCollector::MetricsCollector(std::size_t clients, bool wall_clock)
    : clients_(clients), wall_clock_(wall_clock) {}

void MetricsCollector::begin_round() {
  std::lock_guard<std::mutex> lock(mu_);
  start_ = std::chrono::steady_clock::now();
}

const RoundMetrics& MetricsCollector::end_round(const EvalResult& eval,
                                                std::span<const ByteCounts> per_client) {
  double ms;
  {
    std::lock_guard<std::mutex> lock(mu_);
    ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
             .count();
  }
  return end_round(eval, per_client, ms);
}

const RoundMetrics& MetricsCollector::end_round(const EvalResult& eval,
                                                std::span<const ByteCounts> per_client,
                                                double wall_ms) {
  if (per_client.size() != clients_) {
    throw std::invalid_argument("round metrics for " + std::to_string(per_client.size()) +
                                " clients, expected " + std::to_string(clients_));
  }
  std::lock_guard<std::mutex> lock(mu_);
  RoundMetrics m;
  m.round = series_.size();
  m.accuracy = eval.accuracy;
  m.loss = eval.loss;
  m.wall_ms = wall_clock_ ? wall_ms : 0.0;
  m.per_client.assign(per_client.begin(), per_client.end());
  for (const ByteCounts& c : per_client) {
    m.tx_bytes += c.tx;
    m.rx_bytes += c.rx;
  }
  m.cum_tx = m.tx_bytes + (series_.empty() ? 0 : series_.back().cum_tx);
  m.cum_rx = m.rx_bytes + (series_.empty() ? 0 : series_.back().cum_rx);
  series_.push_back(std::move(m));
  return series_.back();
}

std::vector<RoundMetrics> MetricsCollector::series() const {
  std::lock_guard<std::mutex> lock(mu_);
  return series_;
}

std::vector<ByteCounts> snapshot(std::span<Endpoint* const> endpoints) {
  std::vector<ByteCounts> out;
  for (const Endpoint* e : endpoints) out.push_back(e->counters());
  return out;
}

std::vector<ByteCounts> deltas(std::span<const ByteCounts> after,
                               std::span<const ByteCounts> before) {
  std::vector<ByteCounts> out;
  for (std::size_t i = 0; i < after.size(); ++i) out.push_back(after[i] - before[i]);
  return out;
}

ByteCounts series_total(const std::vector<RoundMetrics>& series) {
  ByteCounts total;
  for (const RoundMetrics& m : series) total += ByteCounts{m.tx_bytes, m.rx_bytes};
  return total;
}

std::string metrics_csv(const std::vector<RoundMetrics>& series) {
  std::string out = "round,accuracy,loss,wall_ms,tx_bytes,rx_bytes,cum_tx,cum_rx\n";
  char line[256];
  for (const RoundMetrics& m : series) {
    std::snprintf(line, sizeof(line), "%zu,%.6f,%.6f,%.3f,%llu,%llu,%llu,%llu\n", m.round,
                  m.accuracy, m.loss, m.wall_ms, static_cast<unsigned long long>(m.tx_bytes),
                  static_cast<unsigned long long>(m.rx_bytes),
                  static_cast<unsigned long long>(m.cum_tx),
                  static_cast<unsigned long long>(m.cum_rx));
    out += line;
  }
  return out;
}

std::string metrics_json(const std::vector<RoundMetrics>& series) {
  json rounds = json::array();
  for (const RoundMetrics& m : series) {
    json clients = json::array();
    for (const ByteCounts& c : m.per_client) clients.push_back({{"tx", c.tx}, {"rx", c.rx}});
    rounds.push_back({{"round", m.round},
                      {"accuracy", m.accuracy},
                      {"loss", m.loss},
                      {"wall_ms", m.wall_ms},
                      {"tx_bytes", m.tx_bytes},
                      {"rx_bytes", m.rx_bytes},
                      {"cum_tx", m.cum_tx},
                      {"cum_rx", m.cum_rx},
                      {"per_client", clients}});
  }
  return json{{"rounds", rounds}}.dump(1) + "\n";
}

std::vector<RoundMetrics> parse_metrics_json(const std::string& text) {
  const json j = json::parse(text);
  std::vector<RoundMetrics> out;
  for (const json& r : j.at("rounds")) {
    RoundMetrics m;
    m.round = r.at("round").get<std::size_t>();
    m.accuracy = r.at("accuracy").get<double>();
    m.loss = r.at("loss").get<double>();
    m.wall_ms = r.at("wall_ms").get<double>();
    m.tx_bytes = r.at("tx_bytes").get<std::uint64_t>();
    m.rx_bytes = r.at("rx_bytes").get<std::uint64_t>();
    m.cum_tx = r.at("cum_tx").get<std::uint64_t>();
    m.cum_rx = r.at("cum_rx").get<std::uint64_t>();
    for (const json& c : r.at("per_client")) {
      m.per_client.push_back({c.at("tx").get<std::uint64_t>(), c.at("rx").get<std::uint64_t>()});
    }
    out.push_back(std::move(m));
  }
  return out;
}

void export_metrics(const std::vector<RoundMetrics>& series, const std::string& path,
                    MetricsFormat format) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write metrics file '" + path + "'");
  f << (format == MetricsFormat::kCsv ? metrics_csv(series) : metrics_json(series));
  if (!f) throw std::runtime_error("failed writing metrics file '" + path + "'");
}

}  // namespace fedsplit
