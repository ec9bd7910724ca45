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

#ifndef CORPUS_UTTERANCE_H_
#define CORPUS_UTTERANCE_H_

#include <cstdint>
#include <string>

#include "config/system_config.h"
#include "frontend/features.h"
#include "frontend/wav.h"
#include "units/units.h"
#include "units/vocabulary.h"

namespace unitvc {

// Everything the model observes about one utterance, frame aligned:
// mel.num_frames() == pitch.num_frames() == energy.num_frames()
// == units.TotalFrames().
struct UtteranceFeatures {
  std::string id;
  std::string label;
  std::string source_path;
  Waveform wave;
  MelSpectrogram mel;
  PitchTrack pitch;  // mean normalized
  EnergyContour energy;
  UnitSequence units;
  uint64_t content_hash = 0;
  uint64_t feature_fingerprint = 0;
  uint64_t vocabulary_hash = 0;

  int num_frames() const { return mel.num_frames(); }
};

// Throws unless all per-frame streams share one length and the units are a
// valid run-length sequence covering it.
void CheckAligned(const UtteranceFeatures& u);

uint64_t HashSamples(const Waveform& wave);

// Computes mel, energy, normalized pitch and deduplicated units. External
// pitch/unit adapters from cfg.adapters are used when configured; they need
// `wav_path` and `id` respectively.
UtteranceFeatures ExtractFeatures(const Waveform& wave,
                                  const UnitVocabulary& vocabulary,
                                  const SystemConfig& cfg,
                                  const std::string& id = "",
                                  const std::string& wav_path = "");

UtteranceFeatures ExtractFeaturesFromFile(const std::string& wav_path,
                                          const std::string& id,
                                          const UnitVocabulary& vocabulary,
                                          const SystemConfig& cfg);

}  // namespace unitvc

#endif  // CORPUS_UTTERANCE_H_
