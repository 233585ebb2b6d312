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

#ifndef FEDSPLIT_RNG_H_
#define FEDSPLIT_RNG_H_

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace fedsplit {

using Rng = std::mt19937_64;

// Stream ids keep derived seeds for different purposes apart.
enum class SeedStream : std::uint64_t {
  kInit = 1,
  kShuffle = 2,
  kPartition = 3,
  kData = 4,
  kSplit = 5,
};

// Mixes a base seed with a purpose tag and coordinates (client, round, ...)
// via splitmix64 so neighbouring coordinates give unrelated streams.
std::uint64_t derive_seed(std::uint64_t base, SeedStream stream,
                          std::initializer_list<std::uint64_t> coords = {});

// Fisher-Yates permutation of 0..n-1.
std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed);

}  // namespace fedsplit

#endif  // FEDSPLIT_RNG_H_
