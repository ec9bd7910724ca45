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

#include "frontend/features.h"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <filesystem>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "utils/string_util.h"

namespace unitvc {

namespace {

const RealMatrix& CachedFilterbank(const FeatureConfig& cfg) {
  // Filterbanks are small; keep one per geometry.
  struct Entry {
    int sr, n_fft, n_mels;
    double lo, hi;
    RealMatrix fb;
  };
  static std::mutex mu;
  static std::deque<Entry> cache;
  std::lock_guard<std::mutex> lock(mu);
  for (const Entry& e : cache) {
    if (e.sr == cfg.sample_rate && e.n_fft == cfg.n_fft &&
        e.n_mels == cfg.n_mels && e.lo == cfg.f_min && e.hi == cfg.f_max) {
      return e.fb;
    }
  }
  cache.push_back({cfg.sample_rate, cfg.n_fft, cfg.n_mels, cfg.f_min,
                   cfg.f_max,
                   MelFilterbank(cfg.sample_rate, cfg.n_fft, cfg.n_mels,
                                 cfg.f_min, cfg.f_max)});
  return cache.back().fb;
}

}  // namespace

void CheckAnalyzable(const Waveform& wave, const FeatureConfig& cfg) {
  if (wave.sample_rate != cfg.sample_rate) {
    throw std::invalid_argument("waveform rate " +
                                std::to_string(wave.sample_rate) +
                                " Hz differs from system rate " +
                                std::to_string(cfg.sample_rate) + " Hz");
  }
  if (wave.samples.size() < static_cast<size_t>(cfg.win_length)) {
    throw std::invalid_argument(
        "waveform shorter than one analysis window (" +
        std::to_string(wave.samples.size()) + " < " +
        std::to_string(cfg.win_length) + " samples)");
  }
}

void ComputeMelAndEnergy(const Waveform& wave, const FeatureConfig& cfg,
                         MelSpectrogram* mel, EnergyContour* energy) {
  CheckAnalyzable(wave, cfg);
  Stft stft(cfg.n_fft, cfg.win_length, cfg.hop_length);
  const ComplexMatrix spec = stft.Forward(wave.samples);
  const RealMatrix power = spec.cwiseAbs2();
  if (mel != nullptr) {
    const RealMatrix& fb = CachedFilterbank(cfg);
    mel->frames = ((power * fb.transpose()).array() + cfg.log_eps).log();
    mel->hop_seconds = static_cast<double>(cfg.hop_length) / cfg.sample_rate;
  }
  if (energy != nullptr) {
    energy->energy.resize(power.rows());
    for (int n = 0; n < power.rows(); ++n) {
      energy->energy[n] = std::sqrt(power.row(n).sum());
    }
  }
}

MelSpectrogram ComputeMelSpectrogram(const Waveform& wave,
                                     const FeatureConfig& cfg) {
  MelSpectrogram mel;
  ComputeMelAndEnergy(wave, cfg, &mel, nullptr);
  return mel;
}

EnergyContour ComputeEnergyContour(const Waveform& wave,
                                   const FeatureConfig& cfg) {
  EnergyContour e;
  ComputeMelAndEnergy(wave, cfg, nullptr, &e);
  return e;
}

PitchTrack EstimatePitch(const Waveform& wave, const FeatureConfig& cfg) {
  CheckAnalyzable(wave, cfg);
  const int frames = static_cast<int>(wave.samples.size() / cfg.hop_length);
  const int win = cfg.win_length;
  const int min_lag =
      std::max(2, static_cast<int>(std::floor(cfg.sample_rate / cfg.pitch_f_max)));
  const int max_lag = std::min(
      win - 2, static_cast<int>(std::ceil(cfg.sample_rate / cfg.pitch_f_min)));
  const long n = static_cast<long>(wave.samples.size());

  PitchTrack track;
  track.pitch.assign(frames, 0.0);
  track.voicing.assign(frames, 0);

  std::vector<double> seg(win);
  std::vector<double> prefix(win + 1);
  std::vector<double> r(max_lag + 2, 0.0);
  for (int f = 0; f < frames; ++f) {
    const long start = static_cast<long>(f) * cfg.hop_length +
                       cfg.hop_length / 2 - win / 2;
    double energy = 0.0;
    for (int i = 0; i < win; ++i) {
      const long t = start + i;
      seg[i] = (t >= 0 && t < n) ? wave.samples[t] : 0.0;
    }
    // RMS gate measured over the frame's own hop.
    for (int i = 0; i < cfg.hop_length; ++i) {
      const long t = static_cast<long>(f) * cfg.hop_length + i;
      if (t < n) energy += wave.samples[t] * wave.samples[t];
    }
    if (std::sqrt(energy / cfg.hop_length) < cfg.silence_rms) continue;

    prefix[0] = 0.0;
    for (int i = 0; i < win; ++i) prefix[i + 1] = prefix[i] + seg[i] * seg[i];
    for (int lag = min_lag - 1; lag <= max_lag + 1; ++lag) {
      double dot = 0.0;
      for (int i = 0; i + lag < win; ++i) dot += seg[i] * seg[i + lag];
      const double e0 = prefix[win - lag];
      const double e1 = prefix[win] - prefix[lag];
      r[lag] = (e0 > 0 && e1 > 0) ? dot / std::sqrt(e0 * e1) : 0.0;
    }
    double best = -1.0;
    for (int lag = min_lag; lag <= max_lag; ++lag) best = std::max(best, r[lag]);
    if (best < cfg.periodicity_threshold) continue;
    // The shortest lag that is a local peak close to the global best avoids
    // picking multiples of the period.
    int chosen = -1;
    for (int lag = min_lag; lag <= max_lag; ++lag) {
      if (r[lag] >= 0.85 * best && r[lag] >= r[lag - 1] &&
          r[lag] >= r[lag + 1]) {
        chosen = lag;
        break;
      }
    }
    if (chosen < 0 || r[chosen] < cfg.periodicity_threshold) continue;
    double refined = chosen;
    const double denom = r[chosen - 1] - 2.0 * r[chosen] + r[chosen + 1];
    if (std::abs(denom) > 1e-12) {
      const double delta = 0.5 * (r[chosen - 1] - r[chosen + 1]) / denom;
      if (std::abs(delta) < 1.0) refined += delta;
    }
    const double f0 = std::clamp(cfg.sample_rate / refined, cfg.pitch_f_min,
                                 cfg.pitch_f_max);
    track.pitch[f] = f0;
    track.voicing[f] = 1;
  }
  return track;
}

PitchTrack MeanNormalizePitch(const PitchTrack& track,
                              const FeatureConfig& cfg) {
  if (track.voicing.size() != track.pitch.size()) {
    throw std::invalid_argument("pitch and voicing lengths differ");
  }
  if (track.normalized) return track;
  double sum = 0.0;
  int voiced = 0;
  for (size_t j = 0; j < track.pitch.size(); ++j) {
    if (track.voicing[j]) {
      sum += track.pitch[j];
      ++voiced;
    }
  }
  PitchTrack out = track;
  out.normalized = true;
  out.mean_f0 = voiced > 0 ? sum / voiced : cfg.default_mean_f0;
  for (size_t j = 0; j < out.pitch.size(); ++j) {
    out.pitch[j] = out.voicing[j] ? track.pitch[j] - out.mean_f0 : 0.0;
  }
  return out;
}

PitchTrack ParsePitchAdapterOutput(const std::string& text, int num_frames) {
  std::istringstream is(text);
  std::string line;
  double hop = 0.0;
  PitchTrack raw;
  while (std::getline(is, line)) {
    const auto fields = SplitWhitespace(line);
    if (fields.empty() || fields[0][0] == '#') continue;
    if (fields[0] == "hop_seconds") {
      if (fields.size() != 2) throw std::runtime_error("bad hop_seconds line");
      hop = std::stod(fields[1]);
      continue;
    }
    if (fields.size() != 2) {
      throw std::runtime_error("pitch adapter line needs '<f0> <voiced>': " +
                               line);
    }
    const double f0 = std::stod(fields[0]);
    const int v = std::stoi(fields[1]);
    if (!std::isfinite(f0) || (v != 0 && v != 1)) {
      throw std::runtime_error("pitch adapter produced invalid frame: " + line);
    }
    raw.pitch.push_back(v ? f0 : 0.0);
    raw.voicing.push_back(static_cast<uint8_t>(v));
  }
  if (!(hop > 0.0)) throw std::runtime_error("pitch adapter output lacks hop_seconds");
  if (raw.pitch.empty()) throw std::runtime_error("pitch adapter produced no frames");
  PitchTrack out;
  out.pitch = NearestResample(raw.pitch, num_frames);
  out.voicing = NearestResample(raw.voicing, num_frames);
  return out;
}

PitchTrack RunPitchAdapter(const std::string& command,
                           const std::string& wav_path, int num_frames) {
  namespace fs = std::filesystem;
  static std::atomic<int> counter{0};
  const fs::path out = fs::temp_directory_path() /
                       ("unitvc_pitch_" + std::to_string(getpid()) + "_" +
                        std::to_string(counter++) + ".txt");
  const std::string cmd =
      command + " '" + wav_path + "' '" + out.string() + "'";
  const int rc = std::system(cmd.c_str());
  if (rc != 0) {
    throw std::runtime_error("pitch adapter failed (exit " +
                             std::to_string(rc) + "): " + cmd);
  }
  const std::string text = ReadFileBytes(out.string());
  fs::remove(out);
  return ParsePitchAdapterOutput(text, num_frames);
}

void CheckFramingAligned(const MelSpectrogram& mel, const EnergyContour& energy,
                         const PitchTrack& pitch) {
  const int n = mel.num_frames();
  if (energy.num_frames() != n || pitch.num_frames() != n ||
      pitch.voicing.size() != pitch.pitch.size()) {
    throw std::invalid_argument(
        "framing mismatch: mel " + std::to_string(n) + ", energy " +
        std::to_string(energy.num_frames()) + ", pitch " +
        std::to_string(pitch.num_frames()) + " frames");
  }
}

}  // namespace unitvc
