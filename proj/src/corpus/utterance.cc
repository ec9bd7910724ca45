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

#include "corpus/utterance.h"

#include <filesystem>
#include <stdexcept>

#include "utils/string_util.h"

namespace unitvc {

void CheckAligned(const UtteranceFeatures& u) {
  CheckFramingAligned(u.mel, u.energy, u.pitch);
  ValidateUnitSequence(u.units);
  if (u.units.TotalFrames() != u.mel.num_frames()) {
    throw std::invalid_argument(
        "framing mismatch: units cover " +
        std::to_string(u.units.TotalFrames()) + " frames, mel has " +
        std::to_string(u.mel.num_frames()));
  }
}

uint64_t HashSamples(const Waveform& wave) {
  const auto* bytes = reinterpret_cast<const char*>(wave.samples.data());
  return Fnv1a64(std::string_view(bytes, wave.samples.size() * sizeof(double)),
                 Fnv1a64(std::to_string(wave.sample_rate)));
}

UtteranceFeatures ExtractFeatures(const Waveform& wave,
                                  const UnitVocabulary& vocabulary,
                                  const SystemConfig& cfg,
                                  const std::string& id,
                                  const std::string& wav_path) {
  const FeatureConfig& fc = cfg.feature;
  CheckAnalyzable(wave, fc);
  UtteranceFeatures u;
  u.id = id;
  u.source_path = wav_path;
  u.wave = wave;
  u.content_hash = HashSamples(wave);
  u.feature_fingerprint = cfg.FeatureFingerprint();
  ComputeMelAndEnergy(wave, fc, &u.mel, &u.energy);
  const int frames = u.mel.num_frames();

  PitchTrack raw;
  if (!cfg.adapters.pitch_command.empty()) {
    if (wav_path.empty()) {
      throw std::invalid_argument("pitch adapter needs a waveform file");
    }
    raw = RunPitchAdapter(cfg.adapters.pitch_command, wav_path, frames);
  } else {
    raw = EstimatePitch(wave, fc);
  }
  u.pitch = MeanNormalizePitch(raw, fc);

  std::vector<int> unit_frames;
  if (!cfg.adapters.units_dir.empty()) {
    if (id.empty()) throw std::invalid_argument("unit adapter needs an id");
    const auto path =
        std::filesystem::path(cfg.adapters.units_dir) / (id + ".units");
    unit_frames = ParseUnitsFile(ReadFileBytes(path.string()), frames,
                                 cfg.units.vocabulary_size);
  } else {
    if (vocabulary.size() > cfg.units.vocabulary_size) {
      throw std::invalid_argument("vocabulary has more units than configured");
    }
    unit_frames = vocabulary.Quantize(u.mel);
    u.vocabulary_hash = vocabulary.Hash();
  }
  u.units = Deduplicate(unit_frames);
  CheckAligned(u);
  return u;
}

UtteranceFeatures ExtractFeaturesFromFile(const std::string& wav_path,
                                          const std::string& id,
                                          const UnitVocabulary& vocabulary,
                                          const SystemConfig& cfg) {
  const Waveform wave = LoadWaveform(wav_path, cfg.feature.sample_rate);
  UtteranceFeatures u = ExtractFeatures(wave, vocabulary, cfg, id, wav_path);
  u.content_hash = Fnv1a64(ReadFileBytes(wav_path));
  return u;
}

}  // namespace unitvc
