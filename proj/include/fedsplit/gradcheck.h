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

#ifndef FEDSPLIT_GRADCHECK_H_
#define FEDSPLIT_GRADCHECK_H_

#include <span>

#include "fedsplit/model.h"
#include "fedsplit/tensor.h"

namespace fedsplit {

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;  // flat parameter index of the worst entry
  std::size_t checked = 0;
};

// Compares every parameter's backprop gradient of the mean cross-entropy
// loss against central finite differences. Both are evaluated on a 64-bit
// copy of the model. Relative error is |a - n| / max(|a|, |n|, 1e-8).
GradCheckReport gradient_check(const Model& model, const Tensor& input,
                               std::span<const Label> labels,
                               double epsilon = 1e-5);

}  // namespace fedsplit

#endif  // FEDSPLIT_GRADCHECK_H_
