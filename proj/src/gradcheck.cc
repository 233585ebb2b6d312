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

#include "fedsplit/gradcheck.h"

#include <algorithm>
#include <cmath>

#include "fedsplit/loss.h"

namespace fedsplit {

GradCheckReport gradient_check(const Model& model, const Tensor& input,
                               std::span<const Label> labels, double epsilon) {
  BasicModel<double> m = model.cast<double>();
  const BasicTensor<double> x = input.cast<double>();

  auto loss_at = [&]() {
    return softmax_cross_entropy(m.forward(x), labels).loss;
  };

  LossResult<double> base = softmax_cross_entropy(m.forward(x), labels);
  m.backward(base.grad);
  const std::vector<double> analytic = m.flat_grads();
  m.clear_caches();

  GradCheckReport report;
  std::size_t flat = 0;
  for (BasicTensor<double>* p : m.param_refs()) {
    for (std::size_t j = 0; j < p->numel(); ++j, ++flat) {
      const double saved = (*p)[j];
      (*p)[j] = saved + epsilon;
      const double up = loss_at();
      (*p)[j] = saved - epsilon;
      const double down = loss_at();
      (*p)[j] = saved;
      m.clear_caches();
      const double numeric = (up - down) / (2.0 * epsilon);
      const double a = analytic[flat];
      const double rel =
          std::fabs(a - numeric) / std::max({std::fabs(a), std::fabs(numeric), 1e-8});
      if (rel > report.max_rel_error || std::isnan(rel)) {
        report.max_rel_error = rel;
        report.worst_index = flat;
      }
      ++report.checked;
    }
  }
  return report;
}

}  // namespace fedsplit
