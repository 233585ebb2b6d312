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

#ifndef FEDSPLIT_PARTITION_H_
#define FEDSPLIT_PARTITION_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "fedsplit/dataset.h"

namespace fedsplit {

// Per-client ordered sample indices into one dataset.
struct PartitionPlan {
  std::vector<std::vector<std::size_t>> clients;

  std::size_t client_count() const { return clients.size(); }
  std::vector<std::size_t> sizes() const;
  std::size_t total() const;

  // Disjoint, in range, every client non-empty. Throws DataError.
  void validate(std::size_t dataset_size) const;

  std::string to_json() const;
  static PartitionPlan from_json(const std::string& text);
  void save(const std::string& path) const;
  static PartitionPlan load(const std::string& path);

  friend bool operator==(const PartitionPlan&, const PartitionPlan&) = default;
};

PartitionPlan partition_iid(const Dataset& data, std::size_t clients, std::uint64_t seed);

// Sizes ~ Normal(n/k, sigma*n/k), clipped at 1 and rescaled to sum to n by
// largest-remainder rounding.
PartitionPlan partition_imbalanced(const Dataset& data, std::size_t clients, double sigma,
                                   std::uint64_t seed);
std::vector<std::size_t> imbalanced_sizes(std::size_t n, std::size_t clients, double sigma,
                                          std::uint64_t seed);

// Sorts by label, cuts into clients*classes_per_client contiguous shards and
// deals them round-robin. When the shard count is a multiple of the class
// count, shards are cut inside each class so none straddles two labels.
PartitionPlan partition_noniid(const Dataset& data, std::size_t clients,
                               std::size_t classes_per_client, std::uint64_t seed);

struct PartitionStats {
  std::vector<std::size_t> sizes;
  std::vector<std::vector<std::size_t>> histograms;  // [client][class]
  std::vector<std::size_t> distinct_labels;          // per client
  double size_cv = 0.0;         // stddev/mean of sizes
  double mean_tv_distance = 0;  // mean total-variation distance to global mix
  double chi_squared = 0.0;     // sum over clients/classes of (obs-exp)^2/exp

  std::string to_json() const;
};

PartitionStats partition_stats(const PartitionPlan& plan, const Dataset& data);

}  // namespace fedsplit

#endif  // FEDSPLIT_PARTITION_H_
