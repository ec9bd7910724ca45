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

#include "autograd/adam.h"

#include <cmath>
#include <stdexcept>

namespace unitvc {
namespace ag {

Adam::Adam(std::vector<Tensor> params, const AdamOptions& options,
           AdamSlots* slots)
    : params_(std::move(params)), options_(options), slots_(slots) {
  if (slots_->first.empty()) {
    for (const Tensor& p : params_) {
      slots_->first.emplace_back(p.numel(), 0.0);
      slots_->second.emplace_back(p.numel(), 0.0);
    }
  }
  if (slots_->first.size() != params_.size()) {
    throw std::invalid_argument("optimizer state does not match parameters");
  }
  for (size_t i = 0; i < params_.size(); ++i) {
    if (static_cast<int64_t>(slots_->first[i].size()) != params_[i].numel()) {
      throw std::invalid_argument("optimizer state shape mismatch");
    }
  }
}

void Adam::ZeroGrad() {
  for (Tensor& p : params_) p.ZeroGrad();
}

double Adam::GradNorm() const {
  double sq = 0.0;
  for (const Tensor& p : params_) {
    if (!p.has_grad()) continue;
    for (double g : p.grad()) sq += g * g;
  }
  return std::sqrt(sq);
}

double Adam::ClipGradNorm(double max_norm) {
  const double norm = GradNorm();
  if (norm > max_norm && std::isfinite(norm)) {
    const double scale = max_norm / (norm + 1e-12);
    for (Tensor& p : params_) {
      if (!p.has_grad()) continue;
      for (double& g : p.mutable_grad()) g *= scale;
    }
  }
  return norm;
}

bool Adam::GradientsFinite() const {
  for (const Tensor& p : params_) {
    if (!p.has_grad()) continue;
    for (double g : p.grad()) {
      if (!std::isfinite(g)) return false;
    }
  }
  return true;
}

void Adam::Step() {
  ++slots_->step;
  const double t = static_cast<double>(slots_->step);
  const double c1 = 1.0 - std::pow(options_.beta1, t);
  const double c2 = 1.0 - std::pow(options_.beta2, t);
  for (size_t i = 0; i < params_.size(); ++i) {
    Tensor& p = params_[i];
    if (!p.has_grad()) continue;
    const auto& g = p.grad();
    auto& m = slots_->first[i];
    auto& v = slots_->second[i];
    double* w = p.data();
    for (size_t k = 0; k < g.size(); ++k) {
      m[k] = options_.beta1 * m[k] + (1.0 - options_.beta1) * g[k];
      v[k] = options_.beta2 * v[k] + (1.0 - options_.beta2) * g[k] * g[k];
      w[k] -= options_.learning_rate * (m[k] / c1) /
              (std::sqrt(v[k] / c2) + options_.eps);
    }
  }
}

}  // namespace ag
}  // namespace unitvc
