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

#ifndef MODEL_NETWORKS_H_
#define MODEL_NETWORKS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "autograd/tensor.h"
#include "bins/bins.h"
#include "config/system_config.h"
#include "frontend/wav.h"
#include "model/layers.h"

namespace unitvc {

enum class AttributeKind { kPitchEnergy = 0, kRhythm = 1, kSpeaker = 2 };

std::string AttributeKindName(AttributeKind kind);
AttributeKind ParseAttributeKind(const std::string& name);

struct AttributeVector {
  AttributeKind kind = AttributeKind::kSpeaker;
  ag::Tensor values;  // [1, attribute_dim]
};

// Concatenates a per-sequence attribute to every row, then projects.
ag::Tensor FuseAttribute(const Linear& fusion, const ag::Tensor& sequence,
                         const AttributeVector& attribute);

// Waveform -> strided conv features (about 20 ms per frame) -> one
// self-attention layer -> mean over time -> linear.
class AttributeEncoder : public Module {
 public:
  AttributeEncoder(AttributeKind kind, const ModelConfig& cfg);

  // Shortest waveform that yields one backbone frame.
  static constexpr int kMinSamples = 325;

  AttributeKind kind() const { return kind_; }
  // [frames, encoder_channels]
  ag::Tensor Backbone(const std::vector<double>& samples) const;
  ag::Tensor Contextualize(const ag::Tensor& features) const;
  AttributeVector Pool(const ag::Tensor& frames) const;
  AttributeVector Encode(const Waveform& wave) const;
  // Entry point for externally computed backbone features.
  AttributeVector EncodeFromBackbone(const ag::Tensor& features) const;

 private:
  AttributeKind kind_;
  Conv1dLayer conv1_, conv2_, conv3_;
  LayerNorm feature_norm_;
  TransformerLayer context_;
  Linear head_;
};

// Unit-rate log-duration regression, conditioned on the rhythm attribute.
class DurationNet : public Module {
 public:
  explicit DurationNet(const ModelConfig& cfg);
  // unit_embeddings: [K, unit_embedding_dim] -> [K]
  ag::Tensor Forward(const ag::Tensor& unit_embeddings,
                     const AttributeVector& rhythm) const;

 private:
  Linear fusion_;
  ResidualStack stack_;
  Linear out_;
};

struct PitchEnergyLogits {
  ag::Tensor pitch;    // [N, pitch bins]
  ag::Tensor voicing;  // [N]
  ag::Tensor energy;   // [N, energy bins]
};

// Frame-rate pitch/voicing/energy prediction from expanded units.
class PitchEnergyNet : public Module {
 public:
  PitchEnergyNet(const ModelConfig& cfg, int pitch_bins, int energy_bins);
  // frame_embeddings: [N, unit_embedding_dim]
  PitchEnergyLogits Forward(const ag::Tensor& frame_embeddings,
                            const AttributeVector& pitch_energy) const;

 private:
  int pitch_bins_, energy_bins_;
  Linear fusion_;
  ResidualStack stack_;
  Linear out_;
};

// Pitch bins + voicing -> excitation spectrogram.
class SourceNet : public Module {
 public:
  SourceNet(const ModelConfig& cfg, int pitch_bins, int mel_bands);
  ag::Tensor Forward(const ag::Tensor& pitch_weights,
                     const std::vector<uint8_t>& voicing,
                     const AttributeVector& speaker) const;
  // Embedded pitch with unvoiced frames replaced, [N, bin_embedding_dim].
  ag::Tensor EncodePitch(const ag::Tensor& pitch_weights,
                         const std::vector<uint8_t>& voicing) const;
  const BinEmbeddingTable& table() const { return table_; }
  const ResidualStack& stack() const { return stack_; }

 private:
  BinEmbeddingTable table_;
  Linear fusion_;
  ResidualStack stack_;
  Linear out_;
};

// Expanded units -> articulation spectrogram, resized to the mel length
// part way through the stack.
class FilterNet : public Module {
 public:
  FilterNet(const ModelConfig& cfg, int mel_bands);
  ag::Tensor Forward(const ag::Tensor& frame_embeddings,
                     const AttributeVector& speaker,
                     int64_t target_length) const;
  const ResidualStack& stack() const { return stack_; }

 private:
  Linear fusion_;
  ResidualStack stack_;
  Linear out_;
};

// Energy bins -> one scalar per frame.
class EnergyNet : public Module {
 public:
  EnergyNet(const ModelConfig& cfg, int energy_bins);
  ag::Tensor Forward(const ag::Tensor& energy_weights) const;  // [N]
  ag::Tensor EncodeEnergy(const ag::Tensor& energy_weights) const;
  const BinEmbeddingTable& table() const { return table_; }
  const ResidualStack& stack() const { return stack_; }

 private:
  BinEmbeddingTable table_;
  Linear in_;
  ResidualStack stack_;
  Linear out_;
};

// Five 3x3 conv layers over the mel image with leaky ReLU; one least-squares
// score per patch.
class Discriminator : public Module {
 public:
  Discriminator(const ModelConfig& cfg);
  static constexpr int kMinFrames = 11;
  ag::Tensor Forward(const ag::Tensor& mel) const;  // [N, bands] -> [scores]

 private:
  std::vector<std::unique_ptr<Conv2dLayer>> layers_;
};

}  // namespace unitvc

#endif  // MODEL_NETWORKS_H_
