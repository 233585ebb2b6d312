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

#include "fedsplit/partition.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "fedsplit/rng.h"
#include "json.hpp"

namespace fedsplit {

using json = nlohmann::json;

std::vector<std::size_t> PartitionPlan::sizes() const {
  std::vector<std::size_t> out;
  for (const auto& c : clients) out.push_back(c.size());
  return out;
}

std::size_t PartitionPlan::total() const {
  std::size_t n = 0;
  for (const auto& c : clients) n += c.size();
  return n;
}

void PartitionPlan::validate(std::size_t dataset_size) const {
  if (clients.empty()) throw DataError("partition plan has no clients");
  std::vector<bool> seen(dataset_size, false);
  for (std::size_t k = 0; k < clients.size(); ++k) {
    if (clients[k].empty()) throw DataError("client " + std::to_string(k) + " holds no samples");
    for (std::size_t i : clients[k]) {
      if (i >= dataset_size) {
        throw DataError("client " + std::to_string(k) + ": index " + std::to_string(i) +
                        " outside dataset of " + std::to_string(dataset_size));
      }
      if (seen[i]) {
        throw DataError("client " + std::to_string(k) + ": index " + std::to_string(i) +
                        " assigned twice");
      }
      seen[i] = true;
    }
  }
}

std::string PartitionPlan::to_json() const {
  json j;
  j["total"] = total();
  j["clients"] = json::array();
  for (std::size_t k = 0; k < clients.size(); ++k) {
    j["clients"].push_back({{"id", k}, {"indices", clients[k]}});
  }
  return j.dump(1);
}

PartitionPlan PartitionPlan::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("partition plan is not valid json: ") + e.what());
  }
  PartitionPlan plan;
  if (!j.contains("clients") || !j["clients"].is_array()) {
    throw DataError("partition plan lacks a 'clients' array");
  }
  plan.clients.resize(j["clients"].size());
  std::vector<bool> filled(plan.clients.size(), false);
  for (const json& c : j["clients"]) {
    const auto id = c.at("id").get<std::size_t>();
    if (id >= plan.clients.size() || filled[id]) {
      throw DataError("partition plan has bad or duplicate client id " + std::to_string(id));
    }
    plan.clients[id] = c.at("indices").get<std::vector<std::size_t>>();
    filled[id] = true;
  }
  return plan;
}

void PartitionPlan::save(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write partition plan '" + path + "'");
  f << to_json() << "\n";
}

PartitionPlan PartitionPlan::load(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot read partition plan '" + path + "'");
  std::stringstream buf;
  buf << f.rdbuf();
  return from_json(buf.str());
}

namespace {

void check_clients(const Dataset& data, std::size_t clients) {
  if (clients < 1) throw DataError("need at least one client");
  if (clients > data.size()) {
    throw DataError(std::to_string(clients) + " clients exceed " +
                    std::to_string(data.size()) + " samples");
  }
}

PartitionPlan deal_by_sizes(const std::vector<std::size_t>& order,
                            const std::vector<std::size_t>& sizes) {
  PartitionPlan plan;
  std::size_t off = 0;
  for (std::size_t s : sizes) {
    plan.clients.emplace_back(order.begin() + off, order.begin() + off + s);
    off += s;
  }
  return plan;
}

std::vector<std::size_t> even_sizes(std::size_t n, std::size_t parts) {
  std::vector<std::size_t> sizes(parts, n / parts);
  for (std::size_t i = 0; i < n % parts; ++i) ++sizes[i];
  return sizes;
}

}  // namespace

PartitionPlan partition_iid(const Dataset& data, std::size_t clients, std::uint64_t seed) {
  check_clients(data, clients);
  const auto order = shuffled_indices(data.size(), derive_seed(seed, SeedStream::kPartition, {0}));
  return deal_by_sizes(order, even_sizes(data.size(), clients));
}

std::vector<std::size_t> imbalanced_sizes(std::size_t n, std::size_t clients, double sigma,
                                          std::uint64_t seed) {
  if (clients < 1 || clients > n) throw DataError("need 1 <= clients <= samples");
  if (sigma < 0) throw DataError("sigma must be >= 0");
  const double mean = static_cast<double>(n) / clients;
  std::vector<double> draws(clients, mean);
  if (sigma > 0) {
    Rng rng(derive_seed(seed, SeedStream::kPartition, {1}));
    std::normal_distribution<double> normal(mean, sigma * mean);
    for (double& d : draws) d = std::max(1.0, normal(rng));
  }
  const double sum = std::accumulate(draws.begin(), draws.end(), 0.0);

  // Largest-remainder rounding onto exactly n, keeping every size >= 1.
  std::vector<std::size_t> sizes(clients);
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t k = 0; k < clients; ++k) {
    const double exact = draws[k] * static_cast<double>(n) / sum;
    sizes[k] = static_cast<std::size_t>(std::floor(exact));
    remainders.emplace_back(exact - std::floor(exact), k);
    assigned += sizes[k];
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; assigned < n; ++i, ++assigned) ++sizes[remainders[i % clients].second];
  for (std::size_t k = 0; k < clients; ++k) {
    while (sizes[k] == 0) {
      auto big = std::max_element(sizes.begin(), sizes.end());
      --*big;
      ++sizes[k];
    }
  }
  return sizes;
}

PartitionPlan partition_imbalanced(const Dataset& data, std::size_t clients, double sigma,
                                   std::uint64_t seed) {
  check_clients(data, clients);
  const auto sizes = imbalanced_sizes(data.size(), clients, sigma, seed);
  const auto order = shuffled_indices(data.size(), derive_seed(seed, SeedStream::kPartition, {0}));
  return deal_by_sizes(order, sizes);
}

PartitionPlan partition_noniid(const Dataset& data, std::size_t clients,
                               std::size_t classes_per_client, std::uint64_t seed) {
  check_clients(data, clients);
  const std::size_t classes = data.class_count;
  if (classes_per_client < 1 || classes_per_client > classes) {
    throw DataError("classes_per_client must be in [1, " + std::to_string(classes) + "]");
  }
  const std::size_t shards = clients * classes_per_client;
  if (shards > data.size()) {
    throw DataError(std::to_string(shards) + " shards cannot be cut from " +
                    std::to_string(data.size()) + " samples");
  }
  // Shuffle first so the order inside a class is seed-dependent, then sort
  // stably by label.
  std::vector<std::size_t> order =
      shuffled_indices(data.size(), derive_seed(seed, SeedStream::kPartition, {2}));
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return data.labels[a] < data.labels[b];
  });

  std::vector<std::vector<std::size_t>> shard_list;
  if (shards % classes == 0) {
    const std::size_t per_class = shards / classes;
    auto begin = order.begin();
    for (std::size_t c = 0; c < classes; ++c) {
      auto end = std::find_if(begin, order.end(),
                              [&](std::size_t i) { return data.labels[i] != c; });
      const auto count = static_cast<std::size_t>(end - begin);
      if (count < per_class) {
        throw DataError("class " + std::to_string(c) + " has " + std::to_string(count) +
                        " samples, fewer than the " + std::to_string(per_class) +
                        " shards it must supply");
      }
      std::size_t off = 0;
      for (std::size_t s : even_sizes(count, per_class)) {
        shard_list.emplace_back(begin + off, begin + off + s);
        off += s;
      }
      begin = end;
    }
  } else {
    std::size_t off = 0;
    for (std::size_t s : even_sizes(order.size(), shards)) {
      shard_list.emplace_back(order.begin() + off, order.begin() + off + s);
      off += s;
    }
  }
  PartitionPlan plan;
  plan.clients.resize(clients);
  for (std::size_t s = 0; s < shard_list.size(); ++s) {
    auto& dst = plan.clients[s % clients];
    dst.insert(dst.end(), shard_list[s].begin(), shard_list[s].end());
  }
  return plan;
}

PartitionStats partition_stats(const PartitionPlan& plan, const Dataset& data) {
  PartitionStats st;
  st.sizes = plan.sizes();
  const std::size_t classes = data.class_count;
  std::vector<double> global(classes, 0.0);
  for (const auto& client : plan.clients) {
    std::vector<std::size_t> h(classes, 0);
    for (std::size_t i : client) ++h[data.labels.at(i)];
    std::size_t distinct = 0;
    for (std::size_t c = 0; c < classes; ++c) {
      distinct += h[c] > 0;
      global[c] += static_cast<double>(h[c]);
    }
    st.histograms.push_back(std::move(h));
    st.distinct_labels.push_back(distinct);
  }
  const double total = static_cast<double>(plan.total());
  for (double& g : global) g /= total > 0 ? total : 1.0;

  double mean = total / std::max<std::size_t>(1, st.sizes.size());
  double var = 0;
  for (std::size_t s : st.sizes) var += (s - mean) * (s - mean);
  var /= std::max<std::size_t>(1, st.sizes.size());
  st.size_cv = mean > 0 ? std::sqrt(var) / mean : 0.0;

  double tv_sum = 0;
  for (std::size_t k = 0; k < st.histograms.size(); ++k) {
    const double n_k = static_cast<double>(st.sizes[k]);
    double tv = 0;
    for (std::size_t c = 0; c < classes; ++c) {
      const double obs = static_cast<double>(st.histograms[k][c]);
      const double exp = n_k * global[c];
      tv += std::fabs(obs / n_k - global[c]);
      if (exp > 0) st.chi_squared += (obs - exp) * (obs - exp) / exp;
    }
    tv_sum += 0.5 * tv;
  }
  st.mean_tv_distance = st.histograms.empty() ? 0.0 : tv_sum / st.histograms.size();
  return st;
}

std::string PartitionStats::to_json() const {
  json j;
  j["sizes"] = sizes;
  j["histograms"] = histograms;
  j["distinct_labels"] = distinct_labels;
  j["size_cv"] = size_cv;
  j["mean_tv_distance"] = mean_tv_distance;
  j["chi_squared"] = chi_squared;
  return j.dump(1);
}

}  // namespace fedsplit
