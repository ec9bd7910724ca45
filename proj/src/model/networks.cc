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

#include "model/networks.h"

#include <stdexcept>

#include "autograd/ops.h"

namespace unitvc {

namespace {

void CheckKind(const AttributeVector& a, AttributeKind expected) {
  if (a.kind != expected) {
    throw std::invalid_argument("attribute kind mismatch: expected " +
                                AttributeKindName(expected) + ", got " +
                                AttributeKindName(a.kind));
  }
}

ag::Tensor Flatten(const ag::Tensor& x) { return ag::Reshape(x, {x.numel()}); }

int AttentionHeads(int dim) { return dim % 4 == 0 ? 4 : 1; }

}  // namespace

std::string AttributeKindName(AttributeKind kind) {
  switch (kind) {
    case AttributeKind::kPitchEnergy:
      return "pitch_energy";
    case AttributeKind::kRhythm:
      return "rhythm";
    case AttributeKind::kSpeaker:
      return "speaker";
  }
  return "unknown";
}

AttributeKind ParseAttributeKind(const std::string& name) {
  if (name == "pitch_energy" || name == "p") return AttributeKind::kPitchEnergy;
  if (name == "rhythm" || name == "r") return AttributeKind::kRhythm;
  if (name == "speaker" || name == "s") return AttributeKind::kSpeaker;
  throw std::invalid_argument("unknown attribute kind '" + name + "'");
}

ag::Tensor FuseAttribute(const Linear& fusion, const ag::Tensor& sequence,
                         const AttributeVector& attribute) {
  ag::Tensor tiled = ag::RepeatRows(attribute.values, sequence.dim(0));
  return fusion.Forward(ag::ConcatColumns({sequence, tiled}));
}

AttributeEncoder::AttributeEncoder(AttributeKind kind, const ModelConfig& cfg)
    : kind_(kind),
      conv1_(1, cfg.encoder_channels, 10, 5, 0),
      conv2_(cfg.encoder_channels, cfg.encoder_channels, 8, 8, 0),
      conv3_(cfg.encoder_channels, cfg.encoder_channels, 8, 8, 0),
      feature_norm_(cfg.encoder_channels),
      context_(cfg.encoder_channels, AttentionHeads(cfg.encoder_channels),
               2 * cfg.encoder_channels),
      head_(cfg.encoder_channels, cfg.attribute_dim) {
  RegisterChild("conv1", &conv1_);
  RegisterChild("conv2", &conv2_);
  RegisterChild("conv3", &conv3_);
  RegisterChild("feature_norm", &feature_norm_);
  RegisterChild("context", &context_);
  RegisterChild("head", &head_);
}

ag::Tensor AttributeEncoder::Backbone(const std::vector<double>& samples) const {
  if (samples.size() < static_cast<size_t>(kMinSamples)) {
    throw std::invalid_argument(
        "waveform shorter than one backbone frame (" +
        std::to_string(samples.size()) + " < " + std::to_string(kMinSamples) +
        " samples)");
  }
  ag::Tensor x = ag::Tensor::FromVector(
      {static_cast<int64_t>(samples.size()), 1}, samples);
  x = ag::Relu(conv1_.Forward(x));
  x = ag::Relu(conv2_.Forward(x));
  x = ag::Relu(conv3_.Forward(x));
  return feature_norm_.Forward(x);
}

ag::Tensor AttributeEncoder::Contextualize(const ag::Tensor& features) const {
  return context_.Forward(features);
}

AttributeVector AttributeEncoder::Pool(const ag::Tensor& frames) const {
  return {kind_, head_.Forward(ag::MeanRows(frames))};
}

AttributeVector AttributeEncoder::Encode(const Waveform& wave) const {
  return Pool(Contextualize(Backbone(wave.samples)));
}

AttributeVector AttributeEncoder::EncodeFromBackbone(
    const ag::Tensor& features) const {
  return Pool(Contextualize(features));
}

DurationNet::DurationNet(const ModelConfig& cfg)
    : fusion_(cfg.unit_embedding_dim + cfg.attribute_dim, cfg.width),
      stack_(cfg.width, cfg.kernel_size, cfg.duration_blocks),
      out_(cfg.width, 1) {
  RegisterChild("fusion", &fusion_);
  RegisterChild("stack", &stack_);
  RegisterChild("out", &out_);
}

ag::Tensor DurationNet::Forward(const ag::Tensor& unit_embeddings,
                                const AttributeVector& rhythm) const {
  CheckKind(rhythm, AttributeKind::kRhythm);
  ag::Tensor h = FuseAttribute(fusion_, unit_embeddings, rhythm);
  return Flatten(out_.Forward(stack_.Forward(h)));
}

PitchEnergyNet::PitchEnergyNet(const ModelConfig& cfg, int pitch_bins,
                               int energy_bins)
    : pitch_bins_(pitch_bins),
      energy_bins_(energy_bins),
      fusion_(cfg.unit_embedding_dim + cfg.attribute_dim, cfg.width),
      stack_(cfg.width, cfg.kernel_size, cfg.pitch_energy_blocks),
      out_(cfg.width, pitch_bins + 1 + energy_bins) {
  RegisterChild("fusion", &fusion_);
  RegisterChild("stack", &stack_);
  RegisterChild("out", &out_);
}

PitchEnergyLogits PitchEnergyNet::Forward(
    const ag::Tensor& frame_embeddings,
    const AttributeVector& pitch_energy) const {
  CheckKind(pitch_energy, AttributeKind::kPitchEnergy);
  ag::Tensor h = FuseAttribute(fusion_, frame_embeddings, pitch_energy);
  ag::Tensor y = out_.Forward(stack_.Forward(h));
  PitchEnergyLogits out;
  out.pitch = ag::SliceColumns(y, 0, pitch_bins_);
  out.voicing = Flatten(ag::SliceColumns(y, pitch_bins_, 1));
  out.energy = ag::SliceColumns(y, pitch_bins_ + 1, energy_bins_);
  return out;
}

SourceNet::SourceNet(const ModelConfig& cfg, int pitch_bins, int mel_bands)
    : fusion_(cfg.bin_embedding_dim + cfg.attribute_dim, cfg.width),
      stack_(cfg.width, cfg.kernel_size, cfg.source_blocks),
      out_(cfg.width, mel_bands) {
  table_ = BinEmbeddingTable(
      Register("pitch_table", {pitch_bins, cfg.bin_embedding_dim},
               ParamInit::kNormal, cfg.embedding_init_std),
      Register("unvoiced", {cfg.bin_embedding_dim}, ParamInit::kNormal,
               cfg.embedding_init_std));
  RegisterChild("fusion", &fusion_);
  RegisterChild("stack", &stack_);
  RegisterChild("out", &out_);
}

ag::Tensor SourceNet::EncodePitch(const ag::Tensor& pitch_weights,
                                  const std::vector<uint8_t>& voicing) const {
  if (static_cast<int64_t>(voicing.size()) != pitch_weights.dim(0)) {
    throw std::invalid_argument("pitch has " +
                                std::to_string(pitch_weights.dim(0)) +
                                " frames but voicing has " +
                                std::to_string(voicing.size()));
  }
  return table_.ApplyVoicing(table_.Encode(pitch_weights), voicing);
}

ag::Tensor SourceNet::Forward(const ag::Tensor& pitch_weights,
                              const std::vector<uint8_t>& voicing,
                              const AttributeVector& speaker) const {
  CheckKind(speaker, AttributeKind::kSpeaker);
  ag::Tensor h = FuseAttribute(fusion_, EncodePitch(pitch_weights, voicing),
                               speaker);
  return out_.Forward(stack_.Forward(h));
}

FilterNet::FilterNet(const ModelConfig& cfg, int mel_bands)
    : fusion_(cfg.unit_embedding_dim + cfg.attribute_dim, cfg.width),
      stack_(cfg.width, cfg.kernel_size, cfg.filter_blocks,
             cfg.filter_interpolation_block),
      out_(cfg.width, mel_bands) {
  RegisterChild("fusion", &fusion_);
  RegisterChild("stack", &stack_);
  RegisterChild("out", &out_);
}

ag::Tensor FilterNet::Forward(const ag::Tensor& frame_embeddings,
                              const AttributeVector& speaker,
                              int64_t target_length) const {
  CheckKind(speaker, AttributeKind::kSpeaker);
  if (target_length < 1) {
    throw std::invalid_argument("target length must be >= 1");
  }
  ag::Tensor h = FuseAttribute(fusion_, frame_embeddings, speaker);
  h = stack_.Forward(h, target_length);
  if (stack_.interpolate_after() == 0) h = NearestInterpolate(h, target_length);
  return out_.Forward(h);
}

EnergyNet::EnergyNet(const ModelConfig& cfg, int energy_bins)
    : in_(cfg.bin_embedding_dim, cfg.width),
      stack_(cfg.width, cfg.kernel_size, cfg.energy_blocks),
      out_(cfg.width, 1) {
  table_ = BinEmbeddingTable(
      Register("energy_table", {energy_bins, cfg.bin_embedding_dim},
               ParamInit::kNormal, cfg.embedding_init_std),
      ag::Tensor());
  RegisterChild("in", &in_);
  RegisterChild("stack", &stack_);
  RegisterChild("out", &out_);
}

ag::Tensor EnergyNet::EncodeEnergy(const ag::Tensor& energy_weights) const {
  return table_.Encode(energy_weights);
}

ag::Tensor EnergyNet::Forward(const ag::Tensor& energy_weights) const {
  ag::Tensor h = in_.Forward(EncodeEnergy(energy_weights));
  return Flatten(out_.Forward(stack_.Forward(h)));
}

Discriminator::Discriminator(const ModelConfig& cfg) {
  const int c = cfg.discriminator_channels;
  // (in, out, freq stride)
  const int spec[5][3] = {{1, c, 2}, {c, c, 2}, {c, c, 2}, {c, c, 1},
                          {c, 1, 1}};
  for (int i = 0; i < 5; ++i) {
    layers_.push_back(std::make_unique<Conv2dLayer>(
        spec[i][0], spec[i][1], 3, 3, 1, spec[i][2], 0, 1));
    RegisterChild("conv" + std::to_string(i), layers_.back().get());
  }
}

ag::Tensor Discriminator::Forward(const ag::Tensor& mel) const {
  if (mel.dim(0) < kMinFrames) {
    throw std::invalid_argument("input too short for the discriminator: " +
                                std::to_string(mel.dim(0)) + " < " +
                                std::to_string(kMinFrames) + " frames");
  }
  ag::Tensor x = ag::Reshape(mel, {mel.dim(0), mel.dim(1), 1});
  for (size_t i = 0; i < layers_.size(); ++i) {
    x = layers_[i]->Forward(x);
    if (i + 1 < layers_.size()) x = ag::LeakyRelu(x, 0.2);
  }
  return Flatten(x);
}

}  // namespace unitvc
