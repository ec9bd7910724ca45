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

#ifndef TRAINING_TRAINER_H_
#define TRAINING_TRAINER_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "autograd/adam.h"
#include "model/model_state.h"
#include "training/losses.h"

namespace unitvc {

// Deterministic, resumable batch order: position g = step * batch + i maps
// to a seeded shuffle of epoch g / n.
class BatchSchedule {
 public:
  BatchSchedule(int num_items, int batch_size, uint64_t seed);
  std::vector<int> Batch(int64_t step) const;
  int batch_size() const { return batch_size_; }

 private:
  int num_items_;
  int batch_size_;
  uint64_t seed_;
};

// Owns the two optimizers over a ModelState and runs alternating
// least-squares adversarial updates.
class Trainer {
 public:
  Trainer(ModelState* state, const TrainConfig& cfg);

  // One discriminator update on (real, detached fake) followed by one
  // generator update. Non-finite losses or gradients skip both updates and
  // set report.skipped. The step counter advances either way.
  LossReport TrainStep(const std::vector<const UtteranceFeatures*>& batch);

  // Per-group gradient L2 norms from the last TrainStep, before clipping.
  const std::map<std::string, double>& last_gradient_norms() const {
    return last_norms_;
  }

  // Per-group gradient norms of the batch-averaged weighted sum of the
  // selected generator terms. Parameters are left untouched.
  std::map<std::string, double> GradientNorms(
      const std::vector<const UtteranceFeatures*>& batch, uint32_t mask);

  // Ground-truth and predicted pitch bin weights of the first utterance in
  // the last step.
  const RealMatrix& last_pitch_target() const { return last_pitch_target_; }
  const RealMatrix& last_pitch_prediction() const { return last_pitch_pred_; }

  const TrainConfig& config() const { return cfg_; }

 private:
  void ZeroAllGrads();
  std::map<std::string, double> GroupNorms() const;

  ModelState* state_;
  TrainConfig cfg_;
  std::vector<NamedParameter> generator_params_;
  std::vector<NamedParameter> discriminator_params_;
  ag::Adam generator_opt_;
  ag::Adam discriminator_opt_;
  std::map<std::string, double> last_norms_;
  RealMatrix last_pitch_target_;
  RealMatrix last_pitch_pred_;
};

}  // namespace unitvc

#endif  // TRAINING_TRAINER_H_
