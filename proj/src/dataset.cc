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

#include "fedsplit/dataset.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "fedsplit/rng.h"

namespace fedsplit {

void Dataset::validate() const {
  if (labels.empty()) throw DataError("dataset is empty");
  if (samples.rank() != 3 || samples.dim(0) != labels.size()) {
    throw DataError("samples " + shape_str(samples.shape()) + " do not match " +
                    std::to_string(labels.size()) + " labels");
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= class_count) {
      throw DataError("label " + std::to_string(labels[i]) + " at row " +
                      std::to_string(i) + " exceeds class count " +
                      std::to_string(class_count));
    }
  }
}

Tensor Dataset::gather(std::span<const std::size_t> indices) const {
  const std::size_t row = samples.numel() / size();
  Shape shape = samples.shape();
  shape[0] = indices.size();
  std::vector<float> out;
  out.reserve(indices.size() * row);
  for (std::size_t i : indices) {
    if (i >= size()) throw DataError("sample index " + std::to_string(i) + " out of range");
    const float* src = samples.raw() + i * row;
    out.insert(out.end(), src, src + row);
  }
  return Tensor(std::move(shape), std::move(out));
}

std::vector<Label> Dataset::gather_labels(std::span<const std::size_t> indices) const {
  std::vector<Label> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(labels.at(i));
  return out;
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  return Dataset{gather(indices), gather_labels(indices), class_count};
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

Dataset parse_csv(const std::string& text, std::size_t class_count) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  std::vector<float> values;
  std::vector<Label> labels;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.push_back("");
    const std::string where = "row " + std::to_string(line_no);
    if (cells.size() < 2) throw DataError(where + ": need a label and at least one feature");
    if (width == 0) width = cells.size() - 1;
    if (cells.size() - 1 != width) {
      throw DataError(where + ": expected " + std::to_string(width) + " features, got " +
                      std::to_string(cells.size() - 1));
    }
    unsigned long label = 0;
    auto [lp, lec] = std::from_chars(cells[0].data(), cells[0].data() + cells[0].size(), label);
    if (lec != std::errc() || lp != cells[0].data() + cells[0].size()) {
      throw DataError(where + ": label '" + cells[0] + "' is not a non-negative integer");
    }
    if (label >= class_count) {
      throw DataError(where + ": label " + cells[0] + " >= class count " +
                      std::to_string(class_count));
    }
    labels.push_back(static_cast<Label>(label));
    for (std::size_t c = 1; c < cells.size(); ++c) {
      std::size_t used = 0;
      float v = 0;
      try {
        v = std::stof(cells[c], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != cells[c].size()) {
        throw DataError(where + ", column " + std::to_string(c + 1) + ": '" + cells[c] +
                        "' is not numeric");
      }
      values.push_back(v);
    }
  }
  if (labels.empty()) throw DataError("csv contains no rows");
  Dataset d{Tensor({labels.size(), 1, width}, std::move(values)), std::move(labels),
            class_count};
  return d;
}

Dataset load_csv(const std::string& path, std::size_t class_count) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open csv '" + path + "'");
  std::stringstream buf;
  buf << f.rdbuf();
  return parse_csv(buf.str(), class_count);
}

std::vector<float> synth_template(std::size_t cls, std::size_t classes, std::size_t length) {
  std::vector<float> out(length);
  const double freq = static_cast<double>(cls + 1);
  const double phase = std::numbers::pi * static_cast<double>(cls) / static_cast<double>(classes);
  for (std::size_t t = 0; t < length; ++t) {
    out[t] = static_cast<float>(
        std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(t) / length + phase));
  }
  return out;
}

Dataset synth_sequences(std::size_t n, std::size_t classes, std::size_t length,
                        double noise_std, std::uint64_t seed) {
  if (classes < 1 || n < classes) {
    throw std::invalid_argument("synth_sequences needs n >= classes >= 1");
  }
  if (length < 8) throw std::invalid_argument("synth_sequences needs length >= 8");
  if (noise_std < 0) throw std::invalid_argument("noise_std must be >= 0");
  std::vector<std::vector<float>> templates;
  for (std::size_t c = 0; c < classes; ++c) templates.push_back(synth_template(c, classes, length));

  const std::vector<std::size_t> order =
      shuffled_indices(n, derive_seed(seed, SeedStream::kData, {0}));
  Rng rng(derive_seed(seed, SeedStream::kData, {1}));
  std::normal_distribution<double> noise(0.0, noise_std > 0 ? noise_std : 1.0);
  Dataset d{Tensor({n, 1, length}), std::vector<Label>(n), classes};
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t row = order[i];
    const std::size_t cls = i % classes;
    d.labels[row] = static_cast<Label>(cls);
    float* dst = d.samples.raw() + row * length;
    for (std::size_t t = 0; t < length; ++t) {
      dst[t] = templates[cls][t] + (noise_std > 0 ? static_cast<float>(noise(rng)) : 0.0f);
    }
  }
  return d;
}

std::pair<Dataset, Dataset> train_test_split(const Dataset& data, double test_fraction,
                                             std::uint64_t seed) {
  if (test_fraction < 0.0 || test_fraction >= 1.0) {
    throw std::invalid_argument("test_fraction must be in [0, 1)");
  }
  const std::size_t n = data.size();
  const auto n_test = static_cast<std::size_t>(std::llround(test_fraction * n));
  if (n_test >= n) throw DataError("test split leaves no training data");
  const std::vector<std::size_t> idx = shuffled_indices(n, derive_seed(seed, SeedStream::kSplit));
  std::vector<std::size_t> test(idx.begin(), idx.begin() + n_test);
  std::vector<std::size_t> train(idx.begin() + n_test, idx.end());
  Dataset test_set = n_test > 0 ? data.subset(test) : Dataset{};
  return {data.subset(train), std::move(test_set)};
}

}  // namespace fedsplit
