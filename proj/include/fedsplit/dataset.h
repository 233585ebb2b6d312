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

#ifndef FEDSPLIT_DATASET_H_
#define FEDSPLIT_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fedsplit/tensor.h"

namespace fedsplit {

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// samples: [n, channels, length]; labels[i] < class_count.
struct Dataset {
  Tensor samples;
  std::vector<Label> labels;
  std::size_t class_count = 0;

  std::size_t size() const { return labels.size(); }
  Shape sample_shape() const {
    return Shape(samples.shape().begin() + 1, samples.shape().end());
  }
  void validate() const;

  // Rows in the given order (indices may repeat).
  Dataset subset(std::span<const std::size_t> indices) const;
  // Batch view: samples[indices] as a [k, channels, length] tensor.
  Tensor gather(std::span<const std::size_t> indices) const;
  std::vector<Label> gather_labels(std::span<const std::size_t> indices) const;
};

// One row per sample: integer label, then a fixed number of float
// features. '#' lines and blank lines are skipped. Errors carry the 1-based
// line number.
Dataset load_csv(const std::string& path, std::size_t class_count);
Dataset parse_csv(const std::string& text, std::size_t class_count);

// Class c is A*sin(2*pi*(c+1)*t/length + c*pi/classes) plus N(0, noise_std)
// noise; labels are assigned round-robin so class counts differ by <= 1, and
// rows are then shuffled.
Dataset synth_sequences(std::size_t n, std::size_t classes, std::size_t length,
                        double noise_std, std::uint64_t seed);

// The noiseless per-class signal used by synth_sequences.
std::vector<float> synth_template(std::size_t cls, std::size_t classes, std::size_t length);

// Shuffles then holds out round(test_fraction * n) rows as the test set.
std::pair<Dataset, Dataset> train_test_split(const Dataset& data, double test_fraction,
                                             std::uint64_t seed);

}  // namespace fedsplit

#endif  // FEDSPLIT_DATASET_H_
