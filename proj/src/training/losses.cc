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

#include "training/losses.h"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "autograd/ops.h"

namespace unitvc {

namespace {

ag::Tensor Constant(const RealMatrix& m) { return ag::Tensor::FromMatrix(m); }

ag::Tensor VectorTensor(const std::vector<double>& v) {
  return ag::Tensor::FromVector({static_cast<int64_t>(v.size())}, v);
}

}  // namespace

bool LossReport::AllFinite() const {
  for (double v : {recon_l1, adv_gen, adv_disc, voicing_bce, duration_mse,
                   pitch_bin_bce, energy_bin_bce, pitch_consistency_mse,
                   energy_consistency_mse, total_gen}) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

std::string LossReport::ToJson(int64_t step) const {
  nlohmann::ordered_json j;
  j["step"] = step;
  j["recon_l1"] = recon_l1;
  j["adv_gen"] = adv_gen;
  j["adv_disc"] = adv_disc;
  j["voicing_bce"] = voicing_bce;
  j["duration_mse"] = duration_mse;
  j["pitch_bin_bce"] = pitch_bin_bce;
  j["energy_bin_bce"] = energy_bin_bce;
  j["pitch_consistency_mse"] = pitch_consistency_mse;
  j["energy_consistency_mse"] = energy_consistency_mse;
  j["total_gen"] = total_gen;
  j["skipped"] = skipped;
  if (!message.empty()) j["message"] = message;
  return j.dump();
}

RealMatrix MixBinWeights(const RealMatrix& gt, const RealMatrix& pred,
                         double c) {
  if (gt.rows() != pred.rows() || gt.cols() != pred.cols()) {
    throw std::invalid_argument("bin weight shapes differ");
  }
  if (!(c >= 0.0 && c <= 1.0)) {
    throw std::invalid_argument("mixing coefficient outside [0, 1]");
  }
  if (c == 1.0) return gt;
  return c * gt + (1.0 - c) * pred;
}

ag::Tensor MixBinWeights(const ag::Tensor& gt, const ag::Tensor& pred,
                         double c) {
  if (gt.shape() != pred.shape()) {
    throw std::invalid_argument("bin weight shapes differ: " +
                                ag::ShapeToString(gt.shape()) + " vs " +
                                ag::ShapeToString(pred.shape()));
  }
  if (!(c >= 0.0 && c <= 1.0)) {
    throw std::invalid_argument("mixing coefficient outside [0, 1]");
  }
  if (c == 1.0) return gt;
  return ag::Add(ag::Scale(gt, c), ag::Scale(pred, 1.0 - c));
}

RealMatrix PitchTargets(const ModelState& state, const UtteranceFeatures& u) {
  return ClampedBinWeights(u.pitch.pitch, state.pitch_grid());
}

RealMatrix EnergyTargets(const ModelState& state, const UtteranceFeatures& u) {
  return ClampedBinWeights(u.energy.energy, state.energy_grid());
}

UtteranceForward ForwardUtterance(const ModelState& state,
                                  const UtteranceFeatures& u,
                                  const TrainConfig& cfg) {
  CheckAligned(u);
  UtteranceForward f;
  f.pitch_energy = state.EncodeAttribute(AttributeKind::kPitchEnergy, u.wave);
  f.rhythm = state.EncodeAttribute(AttributeKind::kRhythm, u.wave);
  f.speaker = state.EncodeAttribute(AttributeKind::kSpeaker, u.wave);
  f.log_durations = state.PredictLogDurations(u.units, f.rhythm);
  f.logits = state.PredictPitchEnergy(u.units, f.pitch_energy);
  f.pitch_target = Constant(PitchTargets(state, u));
  f.energy_target = Constant(EnergyTargets(state, u));
  f.pitch_pred = ag::Sigmoid(f.logits.pitch);
  f.energy_pred = ag::Sigmoid(f.logits.energy);
  if (cfg.joint_optimization) {
    f.pitch_input = MixBinWeights(f.pitch_target, f.pitch_pred,
                                  cfg.mix_coefficient);
    f.energy_input = MixBinWeights(f.energy_target, f.energy_pred,
                                   cfg.mix_coefficient);
  } else {
    f.pitch_input = f.pitch_target;
    f.energy_input = f.energy_target;
  }
  // Durations and voicing always come from the ground truth in training.
  f.voicing_input = u.pitch.voicing;
  f.units_input = u.units;
  f.synthesis = state.Synthesize(f.pitch_input, f.voicing_input,
                                 f.energy_input, f.units_input, f.speaker);
  return f;
}

ag::Tensor LeastSquaresDiscriminatorLoss(const ag::Tensor& real_scores,
                                         const ag::Tensor& fake_scores) {
  return ag::Scale(ag::Add(ag::MeanSquaredToConstant(real_scores, 1.0),
                           ag::MeanSquaredToConstant(fake_scores, 0.0)),
                   0.5);
}

ag::Tensor LeastSquaresGeneratorLoss(const ag::Tensor& fake_scores) {
  return ag::MeanSquaredToConstant(fake_scores, 1.0);
}

ag::Tensor GeneratorAdversarialLoss(const ModelState& state,
                                    const ag::Tensor& fake) {
  if (fake.dim(0) < Discriminator::kMinFrames) return ag::Tensor::Scalar(0.0);
  return LeastSquaresGeneratorLoss(state.discriminator().Forward(fake));
}

ag::Tensor DiscriminatorLoss(const ModelState& state, const ag::Tensor& real,
                             const ag::Tensor& fake) {
  if (real.dim(0) < Discriminator::kMinFrames) return ag::Tensor::Scalar(0.0);
  const Discriminator& d = state.discriminator();
  return LeastSquaresDiscriminatorLoss(d.Forward(real), d.Forward(fake));
}

LossTerms ComputeLossTerms(const ModelState& state, const UtteranceForward& f,
                           const UtteranceFeatures& u) {
  LossTerms t;
  const ag::Tensor mel = Constant(u.mel.frames);
  if (f.synthesis.mel.shape() != mel.shape()) {
    throw std::invalid_argument("synthesized mel " +
                                ag::ShapeToString(f.synthesis.mel.shape()) +
                                " vs target " + ag::ShapeToString(mel.shape()));
  }
  t.recon_l1 = ag::MeanAbsoluteError(f.synthesis.mel, mel);
  t.adv_gen = GeneratorAdversarialLoss(state, f.synthesis.mel);

  std::vector<double> voicing(u.pitch.voicing.begin(), u.pitch.voicing.end());
  t.voicing_bce =
      ag::BinaryCrossEntropyWithLogits(f.logits.voicing, VectorTensor(voicing));

  std::vector<double> log_targets(u.units.durations.size());
  for (size_t k = 0; k < log_targets.size(); ++k) {
    log_targets[k] = DurationTarget(u.units.durations[k]);
  }
  t.duration_mse =
      ag::MeanSquaredError(f.log_durations, VectorTensor(log_targets));

  t.pitch_bin_bce =
      ag::BinaryCrossEntropyWithLogits(f.logits.pitch, f.pitch_target);
  t.energy_bin_bce =
      ag::BinaryCrossEntropyWithLogits(f.logits.energy, f.energy_target);

  const BinEmbeddingTable& pt = state.source_net().table();
  const BinEmbeddingTable& et = state.energy_net().table();
  t.pitch_consistency_mse =
      ag::MeanSquaredError(pt.Encode(f.pitch_pred), pt.Encode(f.pitch_target));
  t.energy_consistency_mse = ag::MeanSquaredError(et.Encode(f.energy_pred),
                                                  et.Encode(f.energy_target));
  return t;
}

ag::Tensor WeightedTotal(const LossTerms& t, const TrainConfig& cfg,
                         uint32_t mask) {
  ag::Tensor total = ag::Tensor::Scalar(0.0);
  auto add = [&](uint32_t bit, const ag::Tensor& term, double w) {
    if ((mask & bit) && w != 0.0) total = ag::Add(total, ag::Scale(term, w));
  };
  add(kReconstruction, t.recon_l1, cfg.weight_recon_l1);
  add(kAdversarial, t.adv_gen, cfg.weight_adversarial);
  add(kVoicing, t.voicing_bce, cfg.weight_voicing);
  add(kDuration, t.duration_mse, cfg.weight_duration);
  add(kPitchBins, t.pitch_bin_bce, cfg.weight_pitch_bins);
  add(kEnergyBins, t.energy_bin_bce, cfg.weight_energy_bins);
  if (cfg.joint_optimization) {
    add(kPitchConsistency, t.pitch_consistency_mse,
        cfg.weight_pitch_consistency);
    add(kEnergyConsistency, t.energy_consistency_mse,
        cfg.weight_energy_consistency);
  }
  return total;
}

LossReport ComputeLosses(const ModelState& state,
                         const std::vector<const UtteranceFeatures*>& batch,
                         const TrainConfig& cfg) {
  ag::NoGradGuard no_grad;
  LossReport r;
  if (batch.empty()) return r;
  for (const UtteranceFeatures* u : batch) {
    const UtteranceForward f = ForwardUtterance(state, *u, cfg);
    const LossTerms t = ComputeLossTerms(state, f, *u);
    r.recon_l1 += t.recon_l1.item();
    r.adv_gen += t.adv_gen.item();
    r.voicing_bce += t.voicing_bce.item();
    r.duration_mse += t.duration_mse.item();
    r.pitch_bin_bce += t.pitch_bin_bce.item();
    r.energy_bin_bce += t.energy_bin_bce.item();
    r.pitch_consistency_mse += t.pitch_consistency_mse.item();
    r.energy_consistency_mse += t.energy_consistency_mse.item();
    r.total_gen += WeightedTotal(t, cfg).item();
    r.adv_disc += DiscriminatorLoss(state, ag::Tensor::FromMatrix(u->mel.frames),
                                    f.synthesis.mel)
                      .item();
  }
  const double n = static_cast<double>(batch.size());
  for (double* v : {&r.recon_l1, &r.adv_gen, &r.adv_disc, &r.voicing_bce,
                    &r.duration_mse, &r.pitch_bin_bce, &r.energy_bin_bce,
                    &r.pitch_consistency_mse, &r.energy_consistency_mse,
                    &r.total_gen}) {
    *v /= n;
  }
  return r;
}

}  // namespace unitvc
