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

#ifndef MODEL_MODEL_STATE_H_
#define MODEL_MODEL_STATE_H_

#include <array>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "autograd/adam.h"
#include "bins/bins.h"
#include "config/system_config.h"
#include "model/layers.h"
#include "model/networks.h"
#include "units/units.h"
#include "units/vocabulary.h"

namespace unitvc {

class FingerprintError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Outputs of the three synthesizer branches and their sum.
struct SynthesisParts {
  ag::Tensor source;  // [N, bands]
  ag::Tensor filter;  // [N, bands]
  ag::Tensor energy;  // [N]
  ag::Tensor mel;     // source + filter, energy added to every band
};

// Adds the per-frame energy to every band of source + filter.
ag::Tensor CombineBranches(const ag::Tensor& source, const ag::Tensor& filter,
                           const ag::Tensor& energy);

// log(duration + 1) regression target.
double DurationTarget(int duration);
// round(exp(x) - 1), clamped to [1, max_duration].
std::vector<int> DecodeDurations(const std::vector<double>& log_durations,
                                 int max_duration);

// Every learnable component plus the optimizer state, the training step and
// the unit vocabulary used to build the training data.
class ModelState {
 public:
  static constexpr int64_t kFormatVersion = 1;

  explicit ModelState(const SystemConfig& cfg);
  ModelState(const ModelState&) = delete;
  ModelState& operator=(const ModelState&) = delete;

  void Initialize(uint64_t seed);

  const SystemConfig& config() const { return config_; }
  const BinGrid& pitch_grid() const { return pitch_grid_; }
  const BinGrid& energy_grid() const { return energy_grid_; }

  const AttributeEncoder& encoder(AttributeKind kind) const {
    return *encoders_[static_cast<int>(kind)];
  }
  const Embedding& unit_embedding() const { return unit_embedding_; }
  const DurationNet& duration_net() const { return duration_; }
  const PitchEnergyNet& pitch_energy_net() const { return pitch_energy_; }
  const SourceNet& source_net() const { return source_; }
  const FilterNet& filter_net() const { return filter_; }
  const EnergyNet& energy_net() const { return energy_; }
  const Discriminator& discriminator() const { return discriminator_; }

  UnitVocabulary& vocabulary() { return vocabulary_; }
  const UnitVocabulary& vocabulary() const { return vocabulary_; }

  int64_t step() const { return step_; }
  void set_step(int64_t step) { step_ = step; }
  ag::AdamSlots& generator_slots() { return generator_slots_; }
  ag::AdamSlots& discriminator_slots() { return discriminator_slots_; }

  // Parameter groups, named "<group>.<path>". Groups: encoder.pitch_energy,
  // encoder.rhythm, encoder.speaker, unit_embedding, duration, pitch_energy,
  // source, filter, energy, discriminator.
  std::vector<NamedParameter> GeneratorParameters() const;
  std::vector<NamedParameter> DiscriminatorParameters() const;
  std::vector<NamedParameter> AllParameters() const;
  static std::vector<std::string> GroupNames();
  static std::string GroupOf(const std::string& parameter_name);

  AttributeVector EncodeAttribute(AttributeKind kind,
                                  const Waveform& wave) const;
  // [K] log-scale durations.
  ag::Tensor PredictLogDurations(const UnitSequence& units,
                                 const AttributeVector& rhythm) const;
  // Frame-rate logits at length units.TotalFrames().
  PitchEnergyLogits PredictPitchEnergy(const UnitSequence& units,
                                       const AttributeVector& pitch_energy) const;
  SynthesisParts Synthesize(const ag::Tensor& pitch_weights,
                            const std::vector<uint8_t>& voicing,
                            const ag::Tensor& energy_weights,
                            const UnitSequence& units,
                            const AttributeVector& speaker) const;

  void Save(const std::string& path) const;
  // Restores the state with the configuration stored in the checkpoint.
  static std::unique_ptr<ModelState> Load(const std::string& path);
  // Same, but throws FingerprintError unless the stored model fingerprint
  // equals expected.ModelFingerprint().
  static std::unique_ptr<ModelState> Load(const std::string& path,
                                          const SystemConfig& expected);

 private:
  ag::Tensor ExpandedUnitEmbeddings(const UnitSequence& units) const;

  SystemConfig config_;
  BinGrid pitch_grid_;
  BinGrid energy_grid_;
  std::array<std::unique_ptr<AttributeEncoder>, 3> encoders_;
  Embedding unit_embedding_;
  DurationNet duration_;
  PitchEnergyNet pitch_energy_;
  SourceNet source_;
  FilterNet filter_;
  EnergyNet energy_;
  Discriminator discriminator_;
  UnitVocabulary vocabulary_;
  int64_t step_ = 0;
  ag::AdamSlots generator_slots_;
  ag::AdamSlots discriminator_slots_;
};

}  // namespace unitvc

#endif  // MODEL_MODEL_STATE_H_
