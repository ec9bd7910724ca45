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

#ifndef FRONTEND_SYNTHETIC_H_
#define FRONTEND_SYNTHETIC_H_

#include <cstdint>
#include <vector>

#include "frontend/wav.h"

namespace unitvc {

// Band-limited sawtooth at a fixed f0.
std::vector<double> Sawtooth(double f0, double seconds, int sample_rate,
                             double amplitude = 0.5);
std::vector<double> WhiteNoise(double seconds, int sample_rate,
                               double amplitude, uint64_t seed);

struct VowelSpec {
  double f0_start = 120.0;
  double f0_end = 120.0;
  std::vector<double> formants{730.0, 1090.0, 2440.0};
  double seconds = 0.2;
  double amplitude = 0.3;
};

// Harmonic source shaped by Gaussian formant resonances, with a linear f0
// glide and 10 ms fades.
std::vector<double> SynthesizeVowel(const VowelSpec& spec, int sample_rate);

// Deterministic speech-like utterance: vowels, fricatives and pauses. The
// "speaker" (base f0 and formant scale) cycles with `index`.
Waveform MakeToyUtterance(int index, int sample_rate, double seconds,
                          uint64_t seed = 7);

}  // namespace unitvc

#endif  // FRONTEND_SYNTHETIC_H_
