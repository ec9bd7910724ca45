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

#include "frontend/stft.h"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <stdexcept>

namespace unitvc {

namespace {

// FFTW planning is not thread safe; execution with new-array functions is.
std::mutex& PlannerMutex() {
  static std::mutex m;
  return m;
}

double HzToMel(double hz) {
  constexpr double kLinearStep = 200.0 / 3.0;
  constexpr double kBreakHz = 1000.0;
  const double log_step = std::log(6.4) / 27.0;
  if (hz < kBreakHz) return hz / kLinearStep;
  return kBreakHz / kLinearStep + std::log(hz / kBreakHz) / log_step;
}

double MelToHz(double mel) {
  constexpr double kLinearStep = 200.0 / 3.0;
  constexpr double kBreakHz = 1000.0;
  const double break_mel = kBreakHz / kLinearStep;
  const double log_step = std::log(6.4) / 27.0;
  if (mel < break_mel) return mel * kLinearStep;
  return kBreakHz * std::exp(log_step * (mel - break_mel));
}

}  // namespace

Stft::Stft(int n_fft, int win_length, int hop_length)
    : n_fft_(n_fft), hop_(hop_length), window_(n_fft, 0.0) {
  if (n_fft < 2 || win_length < 1 || win_length > n_fft || hop_length < 1) {
    throw std::invalid_argument("invalid STFT geometry");
  }
  const int offset = (n_fft - win_length) / 2;
  for (int i = 0; i < win_length; ++i) {
    window_[offset + i] = 0.5 - 0.5 * std::cos(2.0 * M_PI * i / win_length);
  }
  std::lock_guard<std::mutex> lock(PlannerMutex());
  time_buf_ = fftw_alloc_real(n_fft);
  auto* freq = fftw_alloc_complex(n_fft / 2 + 1);
  freq_buf_ = freq;
  forward_plan_ = fftw_plan_dft_r2c_1d(n_fft, time_buf_, freq, FFTW_ESTIMATE);
  inverse_plan_ = fftw_plan_dft_c2r_1d(n_fft, freq, time_buf_, FFTW_ESTIMATE);
}

Stft::~Stft() {
  std::lock_guard<std::mutex> lock(PlannerMutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
  fftw_free(time_buf_);
  fftw_free(freq_buf_);
}

long Stft::FrameStart(int frame) const {
  return static_cast<long>(frame) * hop_ + hop_ / 2 - n_fft_ / 2;
}

ComplexMatrix Stft::Forward(const std::vector<double>& signal) {
  const int frames = NumFrames(signal.size());
  const int bins = num_bins();
  ComplexMatrix out(frames, bins);
  auto* freq = static_cast<fftw_complex*>(freq_buf_);
  const long n = static_cast<long>(signal.size());
  for (int f = 0; f < frames; ++f) {
    const long start = FrameStart(f);
    for (int i = 0; i < n_fft_; ++i) {
      const long t = start + i;
      time_buf_[i] = (t >= 0 && t < n) ? signal[t] * window_[i] : 0.0;
    }
    fftw_execute(static_cast<fftw_plan>(forward_plan_));
    for (int k = 0; k < bins; ++k) {
      out(f, k) = std::complex<double>(freq[k][0], freq[k][1]);
    }
  }
  return out;
}

std::vector<double> Stft::Inverse(const ComplexMatrix& spectrum,
                                  size_t num_samples) {
  if (spectrum.cols() != num_bins()) {
    throw std::invalid_argument("spectrum bin count does not match STFT");
  }
  std::vector<double> out(num_samples, 0.0);
  std::vector<double> norm(num_samples, 0.0);
  auto* freq = static_cast<fftw_complex*>(freq_buf_);
  const long n = static_cast<long>(num_samples);
  for (int f = 0; f < spectrum.rows(); ++f) {
    for (int k = 0; k < num_bins(); ++k) {
      freq[k][0] = spectrum(f, k).real();
      freq[k][1] = spectrum(f, k).imag();
    }
    fftw_execute(static_cast<fftw_plan>(inverse_plan_));
    const long start = FrameStart(f);
    for (int i = 0; i < n_fft_; ++i) {
      const long t = start + i;
      if (t < 0 || t >= n) continue;
      out[t] += window_[i] * time_buf_[i] / n_fft_;
      norm[t] += window_[i] * window_[i];
    }
  }
  for (long t = 0; t < n; ++t) {
    if (norm[t] > 1e-10) out[t] /= norm[t];
  }
  return out;
}

RealMatrix MelFilterbank(int sample_rate, int n_fft, int n_mels, double f_min,
                         double f_max) {
  const int bins = n_fft / 2 + 1;
  const double mel_lo = HzToMel(f_min);
  const double mel_hi = HzToMel(f_max);
  std::vector<double> edges(n_mels + 2);
  for (int i = 0; i < n_mels + 2; ++i) {
    edges[i] = MelToHz(mel_lo + (mel_hi - mel_lo) * i / (n_mels + 1));
  }
  RealMatrix fb = RealMatrix::Zero(n_mels, bins);
  for (int m = 0; m < n_mels; ++m) {
    const double lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
    const double norm = 2.0 / (hi - lo);
    for (int k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate / n_fft;
      const double rise = (f - lo) / (mid - lo);
      const double fall = (hi - f) / (hi - mid);
      const double w = std::max(0.0, std::min(rise, fall));
      fb(m, k) = w * norm;
    }
  }
  return fb;
}

}  // namespace unitvc
