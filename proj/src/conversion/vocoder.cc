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

#include "conversion/vocoder.h"

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <stdexcept>

#include "frontend/stft.h"
#include "utils/archive.h"
#include "utils/string_util.h"

namespace unitvc {

namespace fs = std::filesystem;

namespace {

std::string ShellQuote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out += c;
  }
  return out + "'";
}

void CheckBands(const MelSpectrogram& mel, const FeatureConfig& cfg) {
  if (mel.num_bands() != cfg.n_mels) {
    throw std::invalid_argument("mel has " + std::to_string(mel.num_bands()) +
                                " bands, config expects " +
                                std::to_string(cfg.n_mels));
  }
  if (mel.num_frames() < 1) throw std::invalid_argument("empty mel");
}

}  // namespace

RealMatrix MelToLinearPower(const MelSpectrogram& mel, const FeatureConfig& cfg,
                            int iterations) {
  CheckBands(mel, cfg);
  const RealMatrix fb = MelFilterbank(cfg.sample_rate, cfg.n_fft, cfg.n_mels,
                                      cfg.f_min, cfg.f_max);  // [m, k]
  const RealMatrix target =
      (mel.frames.array().exp() - cfg.log_eps).cwiseMax(0.0).matrix();  // [n, m]
  const RealMatrix gram = fb.transpose() * fb;                        // [k, k]
  const RealMatrix numer = target * fb;                               // [n, k]
  RealMatrix power = numer.cwiseMax(1e-12);
  // Lee-Seung multiplicative updates keep the estimate non-negative.
  for (int it = 0; it < iterations; ++it) {
    const RealMatrix denom = power * gram;
    power.array() *= numer.array() / (denom.array() + 1e-12);
  }
  return power;
}

std::vector<double> GriffinLim(const RealMatrix& magnitude,
                               const FeatureConfig& cfg, int iterations,
                               double momentum, uint64_t seed) {
  Stft stft(cfg.n_fft, cfg.win_length, cfg.hop_length);
  const size_t num_samples =
      static_cast<size_t>(magnitude.rows()) * cfg.hop_length;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(-M_PI, M_PI);
  ComplexMatrix spec(magnitude.rows(), magnitude.cols());
  for (int i = 0; i < spec.rows(); ++i) {
    for (int j = 0; j < spec.cols(); ++j) {
      spec(i, j) = std::polar(magnitude(i, j), angle(rng));
    }
  }
  auto with_magnitude = [&](const ComplexMatrix& s) {
    ComplexMatrix out(s.rows(), s.cols());
    for (int i = 0; i < s.rows(); ++i) {
      for (int j = 0; j < s.cols(); ++j) {
        const double a = std::abs(s(i, j));
        out(i, j) = a > 1e-16 ? s(i, j) * (magnitude(i, j) / a)
                              : std::complex<double>(magnitude(i, j), 0.0);
      }
    }
    return out;
  };
  ComplexMatrix previous = ComplexMatrix::Zero(spec.rows(), spec.cols());
  ComplexMatrix accelerated = spec;
  for (int it = 0; it < iterations; ++it) {
    ComplexMatrix projected =
        stft.Forward(stft.Inverse(with_magnitude(accelerated), num_samples));
    accelerated = projected + momentum * (projected - previous);
    previous = std::move(projected);
  }
  return stft.Inverse(with_magnitude(accelerated), num_samples);
}

Waveform RenderGriffinLim(const MelSpectrogram& mel, const FeatureConfig& cfg,
                          const InferenceConfig& inference) {
  const RealMatrix magnitude = MelToLinearPower(mel, cfg).cwiseSqrt();
  Waveform w;
  w.sample_rate = cfg.sample_rate;
  w.samples = GriffinLim(magnitude, cfg, inference.vocoder_iterations,
                         inference.vocoder_momentum, inference.vocoder_seed);
  return w;
}

Waveform RenderWithCommand(const MelSpectrogram& mel, const FeatureConfig& cfg,
                           const std::string& command) {
  CheckBands(mel, cfg);
  static std::atomic<int> counter{0};
  const fs::path dir =
      fs::temp_directory_path() / ("unitvc_vocoder_" + std::to_string(getpid()) +
                                   "_" + std::to_string(counter++));
  fs::create_directories(dir);
  const std::string mel_path = (dir / "mel.bin").string();
  const std::string wav_path = (dir / "out.wav").string();
  Archive a;
  a.PutDoubles("mel",
               {static_cast<uint64_t>(mel.num_frames()),
                static_cast<uint64_t>(mel.num_bands())},
               std::vector<double>(mel.frames.data(),
                                   mel.frames.data() + mel.frames.size()));
  a.PutInts("sample_rate", {1}, {cfg.sample_rate});
  a.PutInts("hop_length", {1}, {cfg.hop_length});
  a.Save(mel_path);
  const std::string cmd =
      command + " " + ShellQuote(mel_path) + " " + ShellQuote(wav_path);
  const int status = std::system(cmd.c_str());
  if (status != 0) {
    fs::remove_all(dir);
    throw std::runtime_error("vocoder adapter failed (status " +
                             std::to_string(status) + "): " + command);
  }
  Waveform w = LoadWaveform(wav_path, cfg.sample_rate);
  fs::remove_all(dir);
  return w;
}

Waveform RenderWaveform(const MelSpectrogram& mel, const SystemConfig& cfg) {
  if (!cfg.adapters.vocoder_command.empty()) {
    return RenderWithCommand(mel, cfg.feature, cfg.adapters.vocoder_command);
  }
  return RenderGriffinLim(mel, cfg.feature, cfg.inference);
}

}  // namespace unitvc
