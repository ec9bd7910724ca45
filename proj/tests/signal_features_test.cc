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

#include <cmath>
#include <fstream>
#include <vector>

#include <gtest/gtest.h>

#include "frontend/features.h"
#include "frontend/synthetic.h"
#include "frontend/wav.h"
#include "test_support.h"

namespace unitvc {
namespace {

using testing_support::TempDir;

// Minimal RIFF writer independent of EncodeWav, for decoder checks.
std::string RawWav(int channels, int rate, int bits, int format,
                   const std::string& payload) {
  auto u32 = [](uint32_t v) {
    return std::string{static_cast<char>(v & 0xff),
                       static_cast<char>((v >> 8) & 0xff),
                       static_cast<char>((v >> 16) & 0xff),
                       static_cast<char>((v >> 24) & 0xff)};
  };
  auto u16 = [](uint16_t v) {
    return std::string{static_cast<char>(v & 0xff),
                       static_cast<char>((v >> 8) & 0xff)};
  };
  const int block = channels * bits / 8;
  std::string fmt = u16(format) + u16(channels) + u32(rate) +
                    u32(rate * block) + u16(block) + u16(bits);
  std::string body = "WAVE" + std::string("fmt ") + u32(16) + fmt + "data" +
                     u32(payload.size()) + payload;
  return "RIFF" + u32(body.size()) + body;
}

std::string Pcm16(const std::vector<int16_t>& v) {
  std::string s;
  for (int16_t x : v) {
    s.push_back(static_cast<char>(x & 0xff));
    s.push_back(static_cast<char>((x >> 8) & 0xff));
  }
  return s;
}

Waveform Wave(std::vector<double> samples, int rate = 16000) {
  Waveform w;
  w.samples = std::move(samples);
  w.sample_rate = rate;
  return w;
}

TEST(WavTest, OneSecondMonoAtSystemRate) {
  TempDir dir;
  WriteWav(dir.File("a.wav"), Wave(Sawtooth(200.0, 1.0, 16000)));
  EXPECT_EQ(LoadWaveform(dir.File("a.wav"), 16000).samples.size(), 16000u);
}

TEST(WavTest, ResamplesToTargetRate) {
  TempDir dir;
  WriteWav(dir.File("a.wav"), Wave(Sawtooth(200.0, 1.0, 32000), 32000));
  Waveform w = LoadWaveform(dir.File("a.wav"), 16000);
  EXPECT_EQ(w.sample_rate, 16000);
  EXPECT_EQ(w.samples.size(), 16000u);
}

TEST(WavTest, EmptyAudioIsRejected) {
  TempDir dir;
  {
    std::ofstream f(dir.File("empty.wav"), std::ios::binary);
    f << RawWav(1, 16000, 16, 1, "");
  }
  try {
    LoadWaveform(dir.File("empty.wav"), 16000);
    FAIL() << "expected an error";
  } catch (const std::exception& e) {
    EXPECT_NE(std::string(e.what()).find("empty audio"), std::string::npos);
  }
  {
    std::ofstream f(dir.File("zero.wav"), std::ios::binary);
  }
  EXPECT_THROW(LoadWaveform(dir.File("zero.wav"), 16000), std::exception);
  EXPECT_THROW(LoadWaveform(dir.File("missing.wav"), 16000), std::exception);
}

TEST(WavTest, StereoIsAveragedAndPcmScaled) {
  // Left 16384, right -16384 averages to 0; left 32767, right 32767 to ~1.
  Waveform w = DecodeWav(RawWav(2, 16000, 16, 1,
                                Pcm16({16384, -16384, 32767, 32767})));
  ASSERT_EQ(w.samples.size(), 2u);
  EXPECT_NEAR(w.samples[0], 0.0, 1e-12);
  EXPECT_NEAR(w.samples[1], 32767.0 / 32768.0, 1e-12);
}

TEST(WavTest, UnsupportedEncodingIsRejected) {
  EXPECT_THROW(DecodeWav(RawWav(1, 16000, 16, 7, Pcm16({1, 2}))),
               std::exception);
  EXPECT_THROW(DecodeWav("garbage"), std::exception);
}

TEST(WavTest, EncodeDecodeRoundTrip) {
  Waveform w = Wave(Sawtooth(150.0, 0.1, 16000));
  Waveform back = DecodeWav(EncodeWav(w));
  ASSERT_EQ(back.samples.size(), w.samples.size());
  for (size_t i = 0; i < w.samples.size(); ++i) {
    EXPECT_NEAR(back.samples[i], w.samples[i], 1.0 / 32767.0);
  }
}

TEST(MelTest, FramingArithmetic) {
  FeatureConfig cfg;
  MelSpectrogram mel =
      ComputeMelSpectrogram(Wave(Sawtooth(200.0, 1.0, 16000)), cfg);
  EXPECT_EQ(mel.num_frames(), 50);
  EXPECT_EQ(mel.num_bands(), 80);
  EXPECT_TRUE(mel.frames.allFinite());
  EXPECT_DOUBLE_EQ(mel.hop_seconds, 0.02);
}

TEST(MelTest, SilenceIsLogEpsilon) {
  FeatureConfig cfg;
  MelSpectrogram mel =
      ComputeMelSpectrogram(Wave(std::vector<double>(16000, 0.0)), cfg);
  for (int n = 0; n < mel.num_frames(); ++n) {
    for (int b = 0; b < mel.num_bands(); ++b) {
      EXPECT_DOUBLE_EQ(mel.frames(n, b), std::log(cfg.log_eps));
    }
  }
}

TEST(MelTest, ShorterThanWindowIsRejected) {
  FeatureConfig cfg;
  EXPECT_THROW(ComputeMelSpectrogram(Wave(std::vector<double>(1000, 0.1)), cfg),
               std::invalid_argument);
}

TEST(EnergyTest, SilenceIsZero) {
  FeatureConfig cfg;
  EnergyContour e =
      ComputeEnergyContour(Wave(std::vector<double>(16000, 0.0)), cfg);
  ASSERT_EQ(e.num_frames(), 50);
  for (double q : e.energy) EXPECT_EQ(q, 0.0);
}

TEST(EnergyTest, Homogeneity) {
  FeatureConfig cfg;
  Waveform w = MakeToyUtterance(0, 16000, 1.0);
  Waveform w2 = w;
  for (double& s : w2.samples) s *= 2.0;
  EnergyContour e1 = ComputeEnergyContour(w, cfg);
  EnergyContour e2 = ComputeEnergyContour(w2, cfg);
  ASSERT_EQ(e1.num_frames(), e2.num_frames());
  for (int n = 0; n < e1.num_frames(); ++n) {
    EXPECT_NEAR(e2.energy[n], 2.0 * e1.energy[n],
                1e-5 * std::max(1e-12, 2.0 * e1.energy[n]));
    EXPECT_GE(e1.energy[n], 0.0);
  }
}

TEST(EnergyTest, EnergyIsLinearSpectrumNorm) {
  // 1000 Hz falls exactly on bin 64 of a 1024-point transform at 16 kHz.
  FeatureConfig cfg;
  const double a = 0.4;
  std::vector<double> s(16000);
  const double f = 1000.0;
  for (size_t t = 0; t < s.size(); ++t) {
    s[t] = a * std::sin(2 * M_PI * f * t / 16000.0);
  }
  EnergyContour e = ComputeEnergyContour(Wave(s), cfg);
  double hann_sum = 0.0;
  for (int i = 0; i < cfg.win_length; ++i) {
    hann_sum += 0.5 - 0.5 * std::cos(2 * M_PI * i / cfg.win_length);
  }
  // A bin-centered tone puts A * sum / 2 in its bin and half that in each
  // neighbour (Hann main lobe), so the norm is A * sum / 2 * sqrt(1.5).
  const double expected = a * hann_sum / 2.0 * std::sqrt(1.5);
  const double mid = e.energy[25];
  EXPECT_NEAR(mid / expected, 1.0, 0.02);
}

TEST(EnergyTest, LengthMatchesMel) {
  FeatureConfig cfg;
  Waveform w = MakeToyUtterance(3, 16000, 1.37);
  EXPECT_EQ(ComputeEnergyContour(w, cfg).num_frames(),
            ComputeMelSpectrogram(w, cfg).num_frames());
}

TEST(PitchTest, SawtoothAt200Hz) {
  FeatureConfig cfg;
  PitchTrack p = EstimatePitch(Wave(Sawtooth(200.0, 1.0, 16000)), cfg);
  ASSERT_EQ(p.num_frames(), 50);
  int good = 0;
  for (int j = 0; j < p.num_frames(); ++j) {
    if (p.voicing[j] && std::abs(p.pitch[j] - 200.0) <= 5.0) ++good;
  }
  EXPECT_GE(good, 45) << "frames voiced within 5 Hz: " << good;
}

TEST(PitchTest, WhiteNoiseIsMostlyUnvoiced) {
  FeatureConfig cfg;
  PitchTrack p = EstimatePitch(Wave(WhiteNoise(1.0, 16000, 0.3, 11)), cfg);
  int unvoiced = 0;
  for (uint8_t v : p.voicing) unvoiced += v == 0;
  EXPECT_GE(unvoiced, 40);
}

TEST(PitchTest, SilenceIsUnvoiced) {
  FeatureConfig cfg;
  PitchTrack p = EstimatePitch(Wave(std::vector<double>(16000, 0.0)), cfg);
  for (size_t j = 0; j < p.voicing.size(); ++j) {
    EXPECT_EQ(p.voicing[j], 0);
    EXPECT_EQ(p.pitch[j], 0.0);
  }
}

TEST(PitchTest, VoicedFramesStayInRange) {
  FeatureConfig cfg;
  PitchTrack p = EstimatePitch(MakeToyUtterance(1, 16000, 2.0), cfg);
  for (int j = 0; j < p.num_frames(); ++j) {
    if (p.voicing[j]) {
      EXPECT_GE(p.pitch[j], cfg.pitch_f_min);
      EXPECT_LE(p.pitch[j], cfg.pitch_f_max);
    }
  }
}

PitchTrack Track(std::vector<double> pitch, std::vector<uint8_t> voicing) {
  PitchTrack t;
  t.pitch = std::move(pitch);
  t.voicing = std::move(voicing);
  return t;
}

TEST(NormalizeTest, AllVoiced) {
  FeatureConfig cfg;
  PitchTrack n = MeanNormalizePitch(Track({100, 200}, {1, 1}), cfg);
  EXPECT_DOUBLE_EQ(n.pitch[0], -50.0);
  EXPECT_DOUBLE_EQ(n.pitch[1], 50.0);
  EXPECT_DOUBLE_EQ(n.mean_f0, 150.0);
  EXPECT_TRUE(n.normalized);
}

TEST(NormalizeTest, ZeroMeanInput) {
  FeatureConfig cfg;
  PitchTrack n = MeanNormalizePitch(Track({-10, 10}, {1, 1}), cfg);
  EXPECT_DOUBLE_EQ(n.pitch[0], -10.0);
  EXPECT_DOUBLE_EQ(n.pitch[1], 10.0);
  EXPECT_DOUBLE_EQ(n.mean_f0, 0.0);
}

TEST(NormalizeTest, VoicedOnlyMean) {
  FeatureConfig cfg;
  PitchTrack n = MeanNormalizePitch(Track({100, 0, 300}, {1, 0, 1}), cfg);
  EXPECT_DOUBLE_EQ(n.pitch[0], -100.0);
  EXPECT_DOUBLE_EQ(n.pitch[1], 0.0);
  EXPECT_DOUBLE_EQ(n.pitch[2], 100.0);
  EXPECT_DOUBLE_EQ(n.mean_f0, 200.0);
}

TEST(NormalizeTest, AllUnvoicedUsesDefaultMean) {
  FeatureConfig cfg;
  PitchTrack n = MeanNormalizePitch(Track({0, 0}, {0, 0}), cfg);
  EXPECT_DOUBLE_EQ(n.mean_f0, cfg.default_mean_f0);
  EXPECT_DOUBLE_EQ(n.pitch[0], 0.0);
}

TEST(NormalizeTest, IdempotentAndZeroMean) {
  FeatureConfig cfg;
  PitchTrack raw = EstimatePitch(MakeToyUtterance(2, 16000, 2.0), cfg);
  PitchTrack once = MeanNormalizePitch(raw, cfg);
  PitchTrack twice = MeanNormalizePitch(once, cfg);
  EXPECT_EQ(once.pitch, twice.pitch);
  EXPECT_EQ(once.mean_f0, twice.mean_f0);
  double sum = 0.0;
  int voiced = 0;
  for (int j = 0; j < once.num_frames(); ++j) {
    if (once.voicing[j]) {
      sum += once.pitch[j];
      ++voiced;
    }
  }
  ASSERT_GT(voiced, 0);
  EXPECT_NEAR(sum / voiced, 0.0, 1e-6);
}

TEST(FeaturesTest, ExtractionIsBitIdentical) {
  FeatureConfig cfg;
  Waveform w = MakeToyUtterance(4, 16000, 1.0);
  MelSpectrogram a = ComputeMelSpectrogram(w, cfg);
  MelSpectrogram b = ComputeMelSpectrogram(w, cfg);
  EXPECT_TRUE(a.frames == b.frames);
  EXPECT_EQ(EstimatePitch(w, cfg).pitch, EstimatePitch(w, cfg).pitch);
  EXPECT_EQ(ComputeEnergyContour(w, cfg).energy,
            ComputeEnergyContour(w, cfg).energy);
}

TEST(FeaturesTest, PitchAdapterOutputIsResampled) {
  PitchTrack p = ParsePitchAdapterOutput(
      "hop_seconds 0.01\n100 1\n110 1\n0 0\n0 0\n", 2);
  ASSERT_EQ(p.num_frames(), 2);
  EXPECT_DOUBLE_EQ(p.pitch[0], 100.0);
  EXPECT_EQ(p.voicing[1], 0);
  EXPECT_THROW(ParsePitchAdapterOutput("100 1\n", 2), std::runtime_error);
  EXPECT_THROW(ParsePitchAdapterOutput("hop_seconds 0.01\n100 3\n", 2),
               std::runtime_error);
}

TEST(FeaturesTest, FramingMismatchIsRejected) {
  MelSpectrogram mel;
  mel.frames = RealMatrix::Zero(3, 2);
  EnergyContour e;
  e.energy = {0, 0};
  PitchTrack p = Track({0, 0, 0}, {0, 0, 0});
  EXPECT_THROW(CheckFramingAligned(mel, e, p), std::invalid_argument);
}

}  // namespace
}  // namespace unitvc
