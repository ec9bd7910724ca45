// Copyright (c) 2026 The unitvc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef AUTOGRAD_ADAM_H_
#define AUTOGRAD_ADAM_H_

#include <cstdint>
#include <vector>

#include "autograd/tensor.h"

namespace unitvc {
namespace ag {

struct AdamOptions {
  double learning_rate = 2e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// First/second moment buffers, kept outside the optimizer so they can be
// checkpointed together with the parameters.
struct AdamSlots {
  int64_t step = 0;
  std::vector<std::vector<double>> first;
  std::vector<std::vector<double>> second;
};

class Adam {
 public:
  Adam(std::vector<Tensor> params, const AdamOptions& options,
       AdamSlots* slots);

  void ZeroGrad();
  // Global L2 norm of all gradients.
  double GradNorm() const;
  // Rescales gradients so their global norm is at most `max_norm`; returns the
  // norm before clipping.
  double ClipGradNorm(double max_norm);
  bool GradientsFinite() const;
  void Step();

  const std::vector<Tensor>& params() const { return params_; }

 private:
  std::vector<Tensor> params_;
  AdamOptions options_;
  AdamSlots* slots_;
};

}  // namespace ag
}  // namespace unitvc

#endif  // AUTOGRAD_ADAM_H_
