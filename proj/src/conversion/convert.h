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

#ifndef CONVERSION_CONVERT_H_
#define CONVERSION_CONVERT_H_

#include <string>
#include <vector>

#include "corpus/utterance.h"
#include "model/model_state.h"

namespace unitvc {

enum class ProsodySource { kGroundTruth, kPredicted };

struct TransferSet {
  bool speaker = false;
  bool pitch_energy = false;
  bool rhythm = false;

  bool empty() const { return !speaker && !pitch_energy && !rhythm; }
  std::string ToString() const;
};

// "speaker", "prosody" (rhythm + pitch_energy), "all", "none", or a comma
// list of speaker / pitch_energy / rhythm.
TransferSet ParseTransfer(const std::string& text);
ProsodySource ParseProsodySource(const std::string& text);  // gt | predicted
std::string ProsodySourceName(ProsodySource p);
// Default policy: predicted prosody whenever rhythm or pitch-energy is
// transferred, ground truth otherwise.
ProsodySource DefaultProsodySource(const TransferSet& t);

struct ConversionRequest {
  const UtteranceFeatures* source = nullptr;
  const UtteranceFeatures* target = nullptr;
  TransferSet transfer;
  ProsodySource prosody_source = ProsodySource::kGroundTruth;
};

// Throws std::invalid_argument for requests that break the invariants
// (missing utterances, ground-truth prosody with rhythm transfer).
void ValidateRequest(const ConversionRequest& req);

struct ConversionResult {
  MelSpectrogram mel;
  UnitSequence units;            // source units with the durations used
  std::vector<uint8_t> voicing;  // voicing fed to the synthesizer
  ag::Tensor energy_branch;      // energy-network output, [N]
};

// Throws std::runtime_error for an untrained state and FingerprintError when
// the features were extracted under a different feature configuration.
ConversionResult Convert(const ConversionRequest& req, const ModelState& state);

struct BatchItemReport {
  std::string name;
  bool ok = false;
  std::string reason;
  std::string wav_path;
};

// Manifest lines: "<source wav> <target wav> <transfer> [gt|predicted]
// [name]". Writes <name>.wav and <name>.json per request into out_dir.
// Failures are collected per item.
std::vector<BatchItemReport> BatchConvert(const std::string& manifest_path,
                                          const ModelState& state,
                                          const SystemConfig& cfg,
                                          const std::string& out_dir);

// JSON metadata for one conversion.
std::string ConversionMetadata(const std::string& source,
                               const std::string& target,
                               const TransferSet& transfer,
                               ProsodySource prosody, int frames,
                               const Waveform& out, const SystemConfig& cfg);

}  // namespace unitvc

#endif  // CONVERSION_CONVERT_H_
