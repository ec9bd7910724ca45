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

#ifndef FRONTEND_STFT_H_
#define FRONTEND_STFT_H_

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace unitvc {

using RealMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ComplexMatrix = Eigen::Matrix<std::complex<double>, Eigen::Dynamic,
                                    Eigen::Dynamic, Eigen::RowMajor>;

// Short-time Fourier transform with periodic Hann window. Frame n is centered
// on sample n * hop + hop / 2 and the signal is zero padded at both ends, so a
// signal of T samples yields floor(T / hop) frames.
class Stft {
 public:
  Stft(int n_fft, int win_length, int hop_length);
  ~Stft();
  Stft(const Stft&) = delete;
  Stft& operator=(const Stft&) = delete;

  int num_bins() const { return n_fft_ / 2 + 1; }
  int NumFrames(size_t num_samples) const {
    return static_cast<int>(num_samples / hop_);
  }

  // [frames, n_fft / 2 + 1]
  ComplexMatrix Forward(const std::vector<double>& signal);
  // Weighted overlap-add inverse producing `num_samples` samples.
  std::vector<double> Inverse(const ComplexMatrix& spectrum,
                              size_t num_samples);

 private:
  long FrameStart(int frame) const;

  int n_fft_;
  int hop_;
  std::vector<double> window_;  // length n_fft, Hann centered
  double* time_buf_;
  void* freq_buf_;
  void* forward_plan_;
  void* inverse_plan_;
};

// Slaney-style mel filterbank with area normalization, [n_mels, n_fft/2 + 1].
RealMatrix MelFilterbank(int sample_rate, int n_fft, int n_mels, double f_min,
                         double f_max);

}  // namespace unitvc

#endif  // FRONTEND_STFT_H_
