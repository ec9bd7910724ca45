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

#ifndef TRAINING_LOSSES_H_
#define TRAINING_LOSSES_H_

#include <cstdint>
#include <string>
#include <vector>

#include "autograd/tensor.h"
#include "config/system_config.h"
#include "corpus/utterance.h"
#include "model/model_state.h"

namespace unitvc {

struct LossReport {
  double recon_l1 = 0.0;
  double adv_gen = 0.0;
  double adv_disc = 0.0;
  double voicing_bce = 0.0;
  double duration_mse = 0.0;
  double pitch_bin_bce = 0.0;
  double energy_bin_bce = 0.0;
  double pitch_consistency_mse = 0.0;
  double energy_consistency_mse = 0.0;
  double total_gen = 0.0;
  bool skipped = false;
  std::string message;

  bool AllFinite() const;
  // One JSON object on a single line.
  std::string ToJson(int64_t step) const;
};

// Generator-side loss terms, selectable by mask.
enum LossTerm : uint32_t {
  kReconstruction = 1u << 0,
  kAdversarial = 1u << 1,
  kVoicing = 1u << 2,
  kDuration = 1u << 3,
  kPitchBins = 1u << 4,
  kEnergyBins = 1u << 5,
  kPitchConsistency = 1u << 6,
  kEnergyConsistency = 1u << 7,
  kAllLossTerms = 0xffu,
};

// c * gt + (1 - c) * pred. Throws on shape mismatch or c outside [0, 1].
RealMatrix MixBinWeights(const RealMatrix& gt, const RealMatrix& pred,
                         double c);
ag::Tensor MixBinWeights(const ag::Tensor& gt, const ag::Tensor& pred,
                         double c);

// Teacher-forced forward pass over one utterance.
struct UtteranceForward {
  AttributeVector pitch_energy, rhythm, speaker;
  ag::Tensor log_durations;  // [K]
  PitchEnergyLogits logits;  // at the ground-truth durations
  ag::Tensor pitch_target, energy_target;  // ground-truth bin weights
  ag::Tensor pitch_pred, energy_pred;      // sigmoid of the logits
  ag::Tensor pitch_input, energy_input;    // what the synthesizer consumed
  std::vector<uint8_t> voicing_input;
  UnitSequence units_input;
  SynthesisParts synthesis;
};

UtteranceForward ForwardUtterance(const ModelState& state,
                                  const UtteranceFeatures& u,
                                  const TrainConfig& cfg);

// Least-squares objectives on raw scores: 0.5 * (mean (real - 1)^2 +
// mean fake^2) for the discriminator, mean (fake - 1)^2 for the generator.
ag::Tensor LeastSquaresDiscriminatorLoss(const ag::Tensor& real_scores,
                                         const ag::Tensor& fake_scores);
ag::Tensor LeastSquaresGeneratorLoss(const ag::Tensor& fake_scores);

// Generator objective on D(fake). Zero when the
// utterance is too short for the discriminator.
ag::Tensor GeneratorAdversarialLoss(const ModelState& state,
                                    const ag::Tensor& fake);
// Discriminator objective on D(real), D(fake); `fake` should be detached.
ag::Tensor DiscriminatorLoss(const ModelState& state, const ag::Tensor& real,
                             const ag::Tensor& fake);

struct LossTerms {
  ag::Tensor recon_l1, adv_gen, voicing_bce, duration_mse, pitch_bin_bce,
      energy_bin_bce, pitch_consistency_mse, energy_consistency_mse;
};

LossTerms ComputeLossTerms(const ModelState& state, const UtteranceForward& f,
                           const UtteranceFeatures& u);

// Weighted sum of the selected terms. Consistency terms only count when
// joint optimization is on.
ag::Tensor WeightedTotal(const LossTerms& terms, const TrainConfig& cfg,
                         uint32_t mask = kAllLossTerms);

// Losses averaged over the batch without touching parameters or gradients.
LossReport ComputeLosses(const ModelState& state,
                         const std::vector<const UtteranceFeatures*>& batch,
                         const TrainConfig& cfg);

// Ground-truth bin weights of one utterance (pitch clamped into its grid,
// energy likewise).
RealMatrix PitchTargets(const ModelState& state, const UtteranceFeatures& u);
RealMatrix EnergyTargets(const ModelState& state, const UtteranceFeatures& u);

}  // namespace unitvc

#endif  // TRAINING_LOSSES_H_
