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

#include "training/trainer.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include <glog/logging.h>

#include "autograd/ops.h"

namespace unitvc {

namespace {

std::vector<ag::Tensor> Tensors(const std::vector<NamedParameter>& params) {
  std::vector<ag::Tensor> out;
  out.reserve(params.size());
  for (const auto& p : params) out.push_back(p.tensor);
  return out;
}

ag::AdamOptions Options(double lr, const TrainConfig& cfg) {
  ag::AdamOptions o;
  o.learning_rate = lr;
  o.beta1 = cfg.adam_beta1;
  o.beta2 = cfg.adam_beta2;
  return o;
}

}  // namespace

BatchSchedule::BatchSchedule(int num_items, int batch_size, uint64_t seed)
    : num_items_(num_items),
      batch_size_(std::max(1, std::min(batch_size, num_items))),
      seed_(seed) {
  if (num_items < 1) throw std::invalid_argument("no training utterances");
}

std::vector<int> BatchSchedule::Batch(int64_t step) const {
  std::vector<int> out;
  int64_t cached_epoch = -1;
  std::vector<int> perm(num_items_);
  for (int i = 0; i < batch_size_; ++i) {
    const int64_t g = step * batch_size_ + i;
    const int64_t epoch = g / num_items_;
    if (epoch != cached_epoch) {
      std::iota(perm.begin(), perm.end(), 0);
      std::mt19937_64 rng(seed_ * 0x100000001b3ULL + epoch);
      std::shuffle(perm.begin(), perm.end(), rng);
      cached_epoch = epoch;
    }
    out.push_back(perm[g % num_items_]);
  }
  return out;
}

Trainer::Trainer(ModelState* state, const TrainConfig& cfg)
    : state_(state),
      cfg_(cfg),
      generator_params_(state->GeneratorParameters()),
      discriminator_params_(state->DiscriminatorParameters()),
      generator_opt_(Tensors(generator_params_),
                     Options(cfg.learning_rate_generator, cfg),
                     &state->generator_slots()),
      discriminator_opt_(Tensors(discriminator_params_),
                         Options(cfg.learning_rate_discriminator, cfg),
                         &state->discriminator_slots()) {}

void Trainer::ZeroAllGrads() {
  generator_opt_.ZeroGrad();
  discriminator_opt_.ZeroGrad();
}

std::map<std::string, double> Trainer::GroupNorms() const {
  std::map<std::string, double> sq;
  for (const std::string& g : ModelState::GroupNames()) sq[g] = 0.0;
  for (const auto* params : {&generator_params_, &discriminator_params_}) {
    for (const auto& p : *params) {
      double s = 0.0;
      if (p.tensor.has_grad()) {
        for (double g : p.tensor.grad()) s += g * g;
      }
      sq[ModelState::GroupOf(p.name)] += s;
    }
  }
  for (auto& [name, v] : sq) v = std::sqrt(v);
  return sq;
}

LossReport Trainer::TrainStep(
    const std::vector<const UtteranceFeatures*>& batch) {
  LossReport r;
  if (batch.empty()) throw std::invalid_argument("empty batch");
  const double n = static_cast<double>(batch.size());
  ZeroAllGrads();

  std::vector<UtteranceForward> forwards;
  forwards.reserve(batch.size());
  for (const UtteranceFeatures* u : batch) {
    forwards.push_back(ForwardUtterance(*state_, *u, cfg_));
  }
  last_pitch_target_ = forwards[0].pitch_target.ToMatrix();
  last_pitch_pred_ = forwards[0].pitch_pred.ToMatrix();

  // Discriminator update on detached fakes.
  for (size_t i = 0; i < batch.size(); ++i) {
    ag::Tensor loss = ag::Scale(
        DiscriminatorLoss(*state_, ag::Tensor::FromMatrix(batch[i]->mel.frames),
                          forwards[i].synthesis.mel.Detach()),
        1.0 / n);
    r.adv_disc += loss.item();
    loss.Backward();
  }
  const std::map<std::string, double> disc_norms = GroupNorms();
  const bool disc_ok =
      std::isfinite(r.adv_disc) && discriminator_opt_.GradientsFinite();

  // Generator losses use the discriminator before its update so that a
  // skipped step leaves every parameter untouched.
  std::vector<ag::Tensor> totals;
  for (size_t i = 0; i < batch.size(); ++i) {
    const LossTerms t = ComputeLossTerms(*state_, forwards[i], *batch[i]);
    r.recon_l1 += t.recon_l1.item() / n;
    r.adv_gen += t.adv_gen.item() / n;
    r.voicing_bce += t.voicing_bce.item() / n;
    r.duration_mse += t.duration_mse.item() / n;
    r.pitch_bin_bce += t.pitch_bin_bce.item() / n;
    r.energy_bin_bce += t.energy_bin_bce.item() / n;
    r.pitch_consistency_mse += t.pitch_consistency_mse.item() / n;
    r.energy_consistency_mse += t.energy_consistency_mse.item() / n;
    totals.push_back(ag::Scale(WeightedTotal(t, cfg_), 1.0 / n));
    r.total_gen += totals.back().item();
  }

  if (!disc_ok || !r.AllFinite()) {
    r.skipped = true;
    r.message = "non-finite loss; step skipped";
    ZeroAllGrads();
    state_->set_step(state_->step() + 1);
    LOG(WARNING) << r.message;
    return r;
  }

  discriminator_opt_.ClipGradNorm(cfg_.grad_clip_norm);
  // The generator backward must not see discriminator gradients from the
  // discriminator pass, and vice versa.
  std::vector<std::vector<double>> disc_grads;
  for (auto& p : discriminator_params_) {
    disc_grads.push_back(p.tensor.has_grad() ? p.tensor.grad()
                                             : std::vector<double>());
    p.tensor.ZeroGrad();
  }
  for (const ag::Tensor& t : totals) t.Backward();
  for (auto& p : discriminator_params_) p.tensor.ZeroGrad();

  last_norms_ = GroupNorms();
  last_norms_["discriminator"] = disc_norms.at("discriminator");

  if (!generator_opt_.GradientsFinite()) {
    r.skipped = true;
    r.message = "non-finite generator gradient; step skipped";
    ZeroAllGrads();
    state_->set_step(state_->step() + 1);
    LOG(WARNING) << r.message;
    return r;
  }
  generator_opt_.ClipGradNorm(cfg_.grad_clip_norm);
  generator_opt_.Step();
  for (size_t i = 0; i < discriminator_params_.size(); ++i) {
    if (disc_grads[i].empty()) continue;
    discriminator_params_[i].tensor.mutable_grad() = disc_grads[i];
  }
  discriminator_opt_.Step();
  ZeroAllGrads();
  state_->set_step(state_->step() + 1);
  return r;
}

std::map<std::string, double> Trainer::GradientNorms(
    const std::vector<const UtteranceFeatures*>& batch, uint32_t mask) {
  ZeroAllGrads();
  const double n = static_cast<double>(batch.size());
  for (const UtteranceFeatures* u : batch) {
    const UtteranceForward f = ForwardUtterance(*state_, *u, cfg_);
    const LossTerms t = ComputeLossTerms(*state_, f, *u);
    ag::Tensor total = ag::Scale(WeightedTotal(t, cfg_, mask), 1.0 / n);
    if (total.requires_grad()) total.Backward();
  }
  std::map<std::string, double> norms = GroupNorms();
  ZeroAllGrads();
  return norms;
}

}  // namespace unitvc
