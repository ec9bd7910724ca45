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

#include "model/model_state.h"

#include <cmath>
#include <algorithm>

#include "autograd/ops.h"
#include "utils/archive.h"
#include "utils/string_util.h"

namespace unitvc {

namespace {

constexpr AttributeKind kKinds[3] = {AttributeKind::kPitchEnergy,
                                     AttributeKind::kRhythm,
                                     AttributeKind::kSpeaker};

const SystemConfig& Validated(const SystemConfig& cfg) {
  cfg.Validate();
  return cfg;
}

void AppendGroup(const Module& m, const std::string& group,
                 std::vector<NamedParameter>* out) {
  for (auto& p : m.NamedParameters(group + ".")) out->push_back(std::move(p));
}

void PutSlots(Archive* a, const std::string& prefix,
              const ag::AdamSlots& slots) {
  a->PutInts(prefix + "step", {1}, {slots.step});
  a->PutInts(prefix + "count", {1}, {static_cast<int64_t>(slots.first.size())});
  for (size_t i = 0; i < slots.first.size(); ++i) {
    a->PutDoubles(prefix + "m/" + std::to_string(i),
                  {slots.first[i].size()}, slots.first[i]);
    a->PutDoubles(prefix + "v/" + std::to_string(i),
                  {slots.second[i].size()}, slots.second[i]);
  }
}

ag::AdamSlots GetSlots(const Archive& a, const std::string& prefix) {
  ag::AdamSlots slots;
  slots.step = a.GetInts(prefix + "step").at(0);
  const int64_t count = a.GetInts(prefix + "count").at(0);
  for (int64_t i = 0; i < count; ++i) {
    slots.first.push_back(a.GetDoubles(prefix + "m/" + std::to_string(i)));
    slots.second.push_back(a.GetDoubles(prefix + "v/" + std::to_string(i)));
  }
  return slots;
}

}  // namespace

ag::Tensor CombineBranches(const ag::Tensor& source, const ag::Tensor& filter,
                           const ag::Tensor& energy) {
  return ag::AddColumnVector(ag::Add(source, filter), energy);
}

double DurationTarget(int duration) { return std::log(duration + 1.0); }

std::vector<int> DecodeDurations(const std::vector<double>& log_durations,
                                 int max_duration) {
  std::vector<int> out(log_durations.size());
  for (size_t k = 0; k < log_durations.size(); ++k) {
    const double x = std::min(log_durations[k], std::log(max_duration + 1.0));
    const double d = std::round(std::exp(x) - 1.0);
    out[k] = static_cast<int>(std::clamp(d, 1.0, double(max_duration)));
  }
  return out;
}

ModelState::ModelState(const SystemConfig& cfg)
    : config_(Validated(cfg)),
      pitch_grid_(cfg.pitch_grid),
      energy_grid_(cfg.energy_grid),
      unit_embedding_(cfg.units.vocabulary_size, cfg.model.unit_embedding_dim,
                      1.0),
      duration_(cfg.model),
      pitch_energy_(cfg.model, cfg.pitch_grid.count, cfg.energy_grid.count),
      source_(cfg.model, cfg.pitch_grid.count, cfg.feature.n_mels),
      filter_(cfg.model, cfg.feature.n_mels),
      energy_(cfg.model, cfg.energy_grid.count),
      discriminator_(cfg.model) {
  for (AttributeKind k : kKinds) {
    encoders_[static_cast<int>(k)] =
        std::make_unique<AttributeEncoder>(k, cfg.model);
  }
}

void ModelState::Initialize(uint64_t seed) {
  InitializeParameters(AllParameters(), seed);
  step_ = 0;
  generator_slots_ = {};
  discriminator_slots_ = {};
}

std::vector<NamedParameter> ModelState::GeneratorParameters() const {
  std::vector<NamedParameter> out;
  for (AttributeKind k : kKinds) {
    AppendGroup(encoder(k), "encoder." + AttributeKindName(k), &out);
  }
  AppendGroup(unit_embedding_, "unit_embedding", &out);
  AppendGroup(duration_, "duration", &out);
  AppendGroup(pitch_energy_, "pitch_energy", &out);
  AppendGroup(source_, "source", &out);
  AppendGroup(filter_, "filter", &out);
  AppendGroup(energy_, "energy", &out);
  return out;
}

std::vector<NamedParameter> ModelState::DiscriminatorParameters() const {
  std::vector<NamedParameter> out;
  AppendGroup(discriminator_, "discriminator", &out);
  return out;
}

std::vector<NamedParameter> ModelState::AllParameters() const {
  std::vector<NamedParameter> out = GeneratorParameters();
  for (auto& p : DiscriminatorParameters()) out.push_back(std::move(p));
  return out;
}

std::vector<std::string> ModelState::GroupNames() {
  return {"encoder.pitch_energy", "encoder.rhythm", "encoder.speaker",
          "unit_embedding",       "duration",       "pitch_energy",
          "source",               "filter",         "energy",
          "discriminator"};
}

std::string ModelState::GroupOf(const std::string& parameter_name) {
  for (const std::string& g : GroupNames()) {
    if (parameter_name.compare(0, g.size() + 1, g + ".") == 0) return g;
  }
  return "";
}

AttributeVector ModelState::EncodeAttribute(AttributeKind kind,
                                            const Waveform& wave) const {
  return encoder(kind).Encode(wave);
}

ag::Tensor ModelState::ExpandedUnitEmbeddings(const UnitSequence& units) const {
  ValidateUnitSequence(units);
  return ag::GatherRows(unit_embedding_.Lookup(units.units),
                        ExpansionIndex(units.durations));
}

ag::Tensor ModelState::PredictLogDurations(const UnitSequence& units,
                                           const AttributeVector& rhythm) const {
  ValidateUnitSequence(units);
  return duration_.Forward(unit_embedding_.Lookup(units.units), rhythm);
}

PitchEnergyLogits ModelState::PredictPitchEnergy(
    const UnitSequence& units, const AttributeVector& pitch_energy) const {
  return pitch_energy_.Forward(ExpandedUnitEmbeddings(units), pitch_energy);
}

SynthesisParts ModelState::Synthesize(const ag::Tensor& pitch_weights,
                                      const std::vector<uint8_t>& voicing,
                                      const ag::Tensor& energy_weights,
                                      const UnitSequence& units,
                                      const AttributeVector& speaker) const {
  const int64_t frames = pitch_weights.dim(0);
  if (energy_weights.dim(0) != frames) {
    throw std::invalid_argument("pitch has " + std::to_string(frames) +
                                " frames but energy has " +
                                std::to_string(energy_weights.dim(0)));
  }
  SynthesisParts parts;
  parts.source = source_.Forward(pitch_weights, voicing, speaker);
  parts.filter = filter_.Forward(ExpandedUnitEmbeddings(units), speaker, frames);
  parts.energy = energy_.Forward(energy_weights);
  parts.mel = CombineBranches(parts.source, parts.filter, parts.energy);
  return parts;
}

void ModelState::Save(const std::string& path) const {
  Archive a;
  a.PutInts("format_version", {1}, {kFormatVersion});
  a.PutString("config", config_.ToText(false));
  a.PutString("model_fingerprint", HexDigest(config_.ModelFingerprint()));
  a.PutInts("step", {1}, {step_});
  for (const auto& p : AllParameters()) {
    std::vector<uint64_t> dims(p.tensor.shape().begin(),
                               p.tensor.shape().end());
    a.PutDoubles("param/" + p.name, dims, p.tensor.values());
  }
  PutSlots(&a, "adam/generator/", generator_slots_);
  PutSlots(&a, "adam/discriminator/", discriminator_slots_);
  if (vocabulary_.fitted()) vocabulary_.WriteTo(&a, "vocabulary/");
  a.Save(path);
}

std::unique_ptr<ModelState> ModelState::Load(const std::string& path) {
  const Archive a = Archive::Load(path);
  if (!a.Has("format_version") ||
      a.GetInts("format_version").at(0) != kFormatVersion) {
    throw std::runtime_error("unsupported checkpoint format: " + path);
  }
  const SystemConfig cfg = SystemConfig::FromText(a.GetString("config"));
  const std::string stored = a.GetString("model_fingerprint");
  if (stored != HexDigest(cfg.ModelFingerprint())) {
    throw FingerprintError("checkpoint fingerprint " + stored +
                           " does not match its embedded config");
  }
  auto state = std::make_unique<ModelState>(cfg);
  for (const auto& p : state->AllParameters()) {
    const std::string key = "param/" + p.name;
    if (!a.Has(key)) {
      throw std::runtime_error("checkpoint lacks parameter " + p.name);
    }
    const auto& v = a.GetDoubles(key);
    if (v.size() != p.tensor.values().size()) {
      throw std::runtime_error("parameter " + p.name + " has " +
                               std::to_string(v.size()) + " values, expected " +
                               std::to_string(p.tensor.values().size()));
    }
    ag::Tensor t = p.tensor;
    t.values() = v;
  }
  state->step_ = a.GetInts("step").at(0);
  state->generator_slots_ = GetSlots(a, "adam/generator/");
  state->discriminator_slots_ = GetSlots(a, "adam/discriminator/");
  if (a.Has("vocabulary/format_version")) {
    state->vocabulary_ = UnitVocabulary::ReadFrom(a, "vocabulary/");
  }
  return state;
}

std::unique_ptr<ModelState> ModelState::Load(const std::string& path,
                                             const SystemConfig& expected) {
  auto state = Load(path);
  const uint64_t want = expected.ModelFingerprint();
  const uint64_t have = state->config().ModelFingerprint();
  if (want != have) {
    throw FingerprintError("config fingerprint mismatch: checkpoint " +
                           HexDigest(have) + ", config " + HexDigest(want));
  }
  return state;
}

}  // namespace unitvc
