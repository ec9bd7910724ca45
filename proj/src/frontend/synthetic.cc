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

#include "frontend/synthetic.h"

#include <algorithm>
#include <cmath>
#include <random>

namespace unitvc {

namespace {

const std::vector<std::vector<double>>& VowelFormants() {
  static const std::vector<std::vector<double>> kFormants = {
      {730.0, 1090.0, 2440.0},  // a
      {270.0, 2290.0, 3010.0},  // i
      {300.0, 870.0, 2240.0},   // u
      {530.0, 1840.0, 2480.0},  // e
      {570.0, 840.0, 2410.0},   // o
  };
  return kFormants;
}

void ApplyFades(std::vector<double>* x, int sample_rate) {
  const size_t fade = std::min(x->size() / 2, static_cast<size_t>(sample_rate / 100));
  for (size_t i = 0; i < fade; ++i) {
    const double g = static_cast<double>(i) / fade;
    (*x)[i] *= g;
    (*x)[x->size() - 1 - i] *= g;
  }
}

}  // namespace

std::vector<double> Sawtooth(double f0, double seconds, int sample_rate,
                             double amplitude) {
  const size_t n = static_cast<size_t>(std::llround(seconds * sample_rate));
  std::vector<double> x(n, 0.0);
  const int harmonics = static_cast<int>(sample_rate / 2.0 / f0);
  for (int h = 1; h <= harmonics; ++h) {
    const double w = 2.0 * M_PI * h * f0 / sample_rate;
    const double a = amplitude * (2.0 / M_PI) * ((h % 2) ? 1.0 : -1.0) / h;
    for (size_t t = 0; t < n; ++t) x[t] += a * std::sin(w * t);
  }
  return x;
}

std::vector<double> WhiteNoise(double seconds, int sample_rate,
                               double amplitude, uint64_t seed) {
  const size_t n = static_cast<size_t>(std::llround(seconds * sample_rate));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> x(n);
  for (double& v : x) v = amplitude * u(rng);
  return x;
}

std::vector<double> SynthesizeVowel(const VowelSpec& spec, int sample_rate) {
  const size_t n = static_cast<size_t>(std::llround(spec.seconds * sample_rate));
  std::vector<double> x(n, 0.0);
  const double nyquist = sample_rate / 2.0;
  const int max_h =
      static_cast<int>(nyquist / std::min(spec.f0_start, spec.f0_end));
  std::vector<double> phase(max_h + 1, 0.0);
  for (size_t t = 0; t < n; ++t) {
    const double frac = n > 1 ? static_cast<double>(t) / (n - 1) : 0.0;
    const double f0 = spec.f0_start + (spec.f0_end - spec.f0_start) * frac;
    double v = 0.0;
    for (int h = 1; h <= max_h; ++h) {
      const double f = h * f0;
      phase[h] += 2.0 * M_PI * f / sample_rate;
      if (f >= nyquist) continue;
      double env = 0.02;
      for (size_t k = 0; k < spec.formants.size(); ++k) {
        const double bw = 60.0 + 40.0 * k;
        const double d = f - spec.formants[k];
        env += std::exp(-d * d / (2.0 * bw * bw)) / (1.0 + k);
      }
      v += env * std::sin(phase[h]) / std::sqrt(static_cast<double>(h));
    }
    x[t] = v;
  }
  double peak = 0.0;
  for (double v : x) peak = std::max(peak, std::abs(v));
  if (peak > 0) {
    for (double& v : x) v *= spec.amplitude / peak;
  }
  ApplyFades(&x, sample_rate);
  return x;
}

Waveform MakeToyUtterance(int index, int sample_rate, double seconds,
                          uint64_t seed) {
  static const double kBaseF0[] = {110.0, 165.0, 220.0};
  static const double kFormantScale[] = {1.0, 1.12, 1.25};
  const int speaker = index % 3;
  std::mt19937_64 rng(seed * 1000003ULL + static_cast<uint64_t>(index));
  std::uniform_real_distribution<double> u(0.0, 1.0);

  Waveform w;
  w.sample_rate = sample_rate;
  const size_t total = static_cast<size_t>(std::llround(seconds * sample_rate));
  while (w.samples.size() < total) {
    const double r = u(rng);
    const double seg = 0.10 + 0.12 * u(rng);
    std::vector<double> part;
    if (r < 0.7) {
      VowelSpec spec;
      const auto& formants =
          VowelFormants()[static_cast<size_t>(u(rng) * VowelFormants().size()) %
                          VowelFormants().size()];
      spec.formants.clear();
      for (double f : formants) spec.formants.push_back(f * kFormantScale[speaker]);
      const double base = kBaseF0[speaker] * (0.9 + 0.2 * u(rng));
      spec.f0_start = base;
      spec.f0_end = base * (0.8 + 0.4 * u(rng));
      spec.seconds = seg;
      spec.amplitude = 0.15 + 0.2 * u(rng);
      part = SynthesizeVowel(spec, sample_rate);
    } else if (r < 0.88) {
      part = WhiteNoise(seg * 0.7, sample_rate, 0.05 + 0.05 * u(rng), rng());
      // First difference tilts the noise toward high frequencies.
      for (size_t i = part.size(); i-- > 1;) part[i] -= part[i - 1];
      ApplyFades(&part, sample_rate);
    } else {
      part.assign(static_cast<size_t>(seg * 0.5 * sample_rate), 0.0);
    }
    w.samples.insert(w.samples.end(), part.begin(), part.end());
  }
  w.samples.resize(total);
  return w;
}

}  // namespace unitvc
