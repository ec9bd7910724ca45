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

#include "conversion/convert.h"

#include <filesystem>
#include <stdexcept>

#include <json.hpp>

#include "autograd/ops.h"
#include "conversion/vocoder.h"
#include "corpus/manifest.h"
#include "training/losses.h"
#include "utils/string_util.h"

namespace unitvc {

namespace fs = std::filesystem;

std::string TransferSet::ToString() const {
  std::vector<std::string> parts;
  if (speaker) parts.push_back("speaker");
  if (pitch_energy) parts.push_back("pitch_energy");
  if (rhythm) parts.push_back("rhythm");
  if (parts.empty()) return "none";
  std::string out = parts[0];
  for (size_t i = 1; i < parts.size(); ++i) out += "," + parts[i];
  return out;
}

TransferSet ParseTransfer(const std::string& text) {
  TransferSet t;
  if (text == "none" || text.empty()) return t;
  if (text == "prosody") {
    t.pitch_energy = t.rhythm = true;
    return t;
  }
  if (text == "all") {
    t.speaker = t.pitch_energy = t.rhythm = true;
    return t;
  }
  for (const std::string& part : Split(text, ',')) {
    const std::string p = Trim(part);
    if (p == "speaker") t.speaker = true;
    else if (p == "pitch_energy") t.pitch_energy = true;
    else if (p == "rhythm") t.rhythm = true;
    else throw std::invalid_argument("unknown transfer '" + p + "'");
  }
  return t;
}

ProsodySource ParseProsodySource(const std::string& text) {
  if (text == "gt" || text == "ground_truth") return ProsodySource::kGroundTruth;
  if (text == "predicted") return ProsodySource::kPredicted;
  throw std::invalid_argument("unknown prosody source '" + text + "'");
}

std::string ProsodySourceName(ProsodySource p) {
  return p == ProsodySource::kGroundTruth ? "gt" : "predicted";
}

ProsodySource DefaultProsodySource(const TransferSet& t) {
  return (t.rhythm || t.pitch_energy) ? ProsodySource::kPredicted
                                      : ProsodySource::kGroundTruth;
}

void ValidateRequest(const ConversionRequest& req) {
  if (!req.source || !req.target) {
    throw std::invalid_argument("request needs a source and a target");
  }
  if (req.prosody_source == ProsodySource::kGroundTruth && req.transfer.rhythm) {
    throw std::invalid_argument(
        "ground-truth prosody cannot be combined with rhythm transfer");
  }
}

ConversionResult Convert(const ConversionRequest& req, const ModelState& state) {
  ValidateRequest(req);
  if (state.step() <= 0) throw std::runtime_error("untrained model state");
  const uint64_t fp = state.config().FeatureFingerprint();
  for (const UtteranceFeatures* u : {req.source, req.target}) {
    if (u->feature_fingerprint != fp) {
      throw FingerprintError("features of '" + u->id +
                             "' were extracted under a different config");
    }
  }
  CheckAligned(*req.source);

  ag::NoGradGuard no_grad;
  const UtteranceFeatures& src = *req.source;
  auto pick = [&](bool transfer) -> const Waveform& {
    return transfer ? req.target->wave : src.wave;
  };
  const AttributeVector speaker = state.EncodeAttribute(
      AttributeKind::kSpeaker, pick(req.transfer.speaker));

  ConversionResult out;
  out.units = src.units;
  ag::Tensor pitch_w, energy_w;
  if (req.prosody_source == ProsodySource::kGroundTruth) {
    pitch_w = ag::Tensor::FromMatrix(PitchTargets(state, src));
    energy_w = ag::Tensor::FromMatrix(EnergyTargets(state, src));
    out.voicing = src.pitch.voicing;
  } else {
    const AttributeVector rhythm = state.EncodeAttribute(
        AttributeKind::kRhythm, pick(req.transfer.rhythm));
    const AttributeVector pitch_energy = state.EncodeAttribute(
        AttributeKind::kPitchEnergy, pick(req.transfer.pitch_energy));
    const ag::Tensor log_d = state.PredictLogDurations(src.units, rhythm);
    out.units.durations =
        DecodeDurations(log_d.values(), state.config().model.max_duration);
    const PitchEnergyLogits logits =
        state.PredictPitchEnergy(out.units, pitch_energy);
    pitch_w = ag::Sigmoid(logits.pitch);
    energy_w = ag::Sigmoid(logits.energy);
    const ag::Tensor v = ag::Sigmoid(logits.voicing);
    const double threshold = state.config().model.voicing_threshold;
    out.voicing.resize(v.numel());
    for (int64_t j = 0; j < v.numel(); ++j) {
      out.voicing[j] = v.values()[j] >= threshold ? 1 : 0;
    }
  }
  const SynthesisParts parts =
      state.Synthesize(pitch_w, out.voicing, energy_w, out.units, speaker);
  out.mel.frames = parts.mel.ToMatrix();
  out.mel.hop_seconds = src.mel.hop_seconds;
  out.energy_branch = parts.energy;
  return out;
}

std::string ConversionMetadata(const std::string& source,
                               const std::string& target,
                               const TransferSet& transfer,
                               ProsodySource prosody, int frames,
                               const Waveform& out, const SystemConfig& cfg) {
  nlohmann::ordered_json j;
  j["source"] = source;
  j["target"] = target;
  j["transfer"] = transfer.ToString();
  j["prosody_source"] = ProsodySourceName(prosody);
  j["frames"] = frames;
  j["output_seconds"] = out.seconds();
  j["sample_rate"] = out.sample_rate;
  j["seed"] = cfg.inference.vocoder_seed;
  j["vocoder"] = cfg.adapters.vocoder_command.empty()
                     ? "griffin_lim"
                     : cfg.adapters.vocoder_command;
  return j.dump(2) + "\n";
}

std::vector<BatchItemReport> BatchConvert(const std::string& manifest_path,
                                          const ModelState& state,
                                          const SystemConfig& cfg,
                                          const std::string& out_dir) {
  const auto rows = ReadTable(manifest_path);
  const std::string base = fs::path(manifest_path).parent_path().string();
  fs::create_directories(out_dir);
  std::vector<BatchItemReport> report;
  for (size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    BatchItemReport item;
    item.name = row.size() > 4 ? row[4] : "item" + std::to_string(i);
    try {
      if (row.size() < 3) {
        throw std::invalid_argument(
            "expected '<source> <target> <transfer> [gt|predicted] [name]'");
      }
      const TransferSet transfer = ParseTransfer(row[2]);
      const ProsodySource prosody = row.size() > 3
                                        ? ParseProsodySource(row[3])
                                        : DefaultProsodySource(transfer);
      const std::string src_path = ResolvePath(row[0], base);
      const std::string tgt_path = ResolvePath(row[1], base);
      const UtteranceFeatures src = ExtractFeaturesFromFile(
          src_path, FileStem(src_path), state.vocabulary(), state.config());
      const UtteranceFeatures tgt = ExtractFeaturesFromFile(
          tgt_path, FileStem(tgt_path), state.vocabulary(), state.config());
      const ConversionResult res =
          Convert({&src, &tgt, transfer, prosody}, state);
      const Waveform wave = RenderWaveform(res.mel, cfg);
      item.wav_path = (fs::path(out_dir) / (item.name + ".wav")).string();
      WriteWav(item.wav_path, wave);
      WriteFileBytes(
          (fs::path(out_dir) / (item.name + ".json")).string(),
          ConversionMetadata(src_path, tgt_path, transfer, prosody,
                             res.mel.num_frames(), wave, cfg));
      item.ok = true;
    } catch (const std::exception& e) {
      item.ok = false;
      item.reason = e.what();
    }
    report.push_back(std::move(item));
  }
  return report;
}

}  // namespace unitvc
