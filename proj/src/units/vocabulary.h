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

#ifndef UNITS_VOCABULARY_H_
#define UNITS_VOCABULARY_H_

#include <cstdint>
#include <string>
#include <vector>

#include "config/system_config.h"
#include "frontend/features.h"
#include "frontend/wav.h"
#include "utils/archive.h"

namespace unitvc {

// Per-frame log-mel concatenated with first-order deltas, [frames, 2 * bands].
RealMatrix MelWithDeltas(const MelSpectrogram& mel);

// k-means codebook over standardized frame descriptors.
class UnitVocabulary {
 public:
  static constexpr int64_t kFormatVersion = 1;

  UnitVocabulary() = default;
  UnitVocabulary(RealMatrix centroids, Eigen::RowVectorXd mean,
                 Eigen::RowVectorXd scale);

  bool fitted() const { return centroids_.rows() > 0; }
  int size() const { return static_cast<int>(centroids_.rows()); }
  int dim() const { return static_cast<int>(centroids_.cols()); }
  const RealMatrix& centroids() const { return centroids_; }

  RealMatrix Standardize(const RealMatrix& descriptors) const;
  // Nearest centroid per row of already standardized descriptors.
  std::vector<int> Assign(const RealMatrix& standardized) const;
  // One unit per mel frame. Throws when the vocabulary is not fitted.
  std::vector<int> Quantize(const MelSpectrogram& mel) const;
  std::vector<int> Quantize(const Waveform& wave,
                            const FeatureConfig& cfg) const;

  void WriteTo(Archive* archive, const std::string& prefix) const;
  static UnitVocabulary ReadFrom(const Archive& archive,
                                 const std::string& prefix);
  void Save(const std::string& path) const;
  static UnitVocabulary Load(const std::string& path);
  uint64_t Hash() const;

 private:
  RealMatrix centroids_;
  Eigen::RowVectorXd mean_;
  Eigen::RowVectorXd scale_;
};

// k-means over the rows of `points`: greedy k-means++ seeding and Lloyd
// iterations, keeping the lowest-inertia of `restarts` runs. Every returned
// centroid owns at least one point.
RealMatrix KMeans(const RealMatrix& points, int k, uint64_t seed,
                  int max_iterations, int restarts = 3);

// Standardizes mel+delta descriptors over the corpus and clusters them.
// Requires at least 10 * size frames and size >= 2.
UnitVocabulary FitVocabulary(const std::vector<Waveform>& corpus, int size,
                             uint64_t seed, const FeatureConfig& cfg,
                             int max_iterations = 50);
UnitVocabulary FitVocabularyFromMels(const std::vector<MelSpectrogram>& mels,
                                     int size, uint64_t seed,
                                     int max_iterations = 50);

// External unit exchange: "hop_seconds <h>" then whitespace separated unit ids.
// The ids are resampled to `num_frames` by nearest neighbor.
std::vector<int> ParseUnitsFile(const std::string& text, int num_frames,
                                int vocabulary_size);
std::string FormatUnitsFile(const std::vector<int>& frames, double hop_seconds);

}  // namespace unitvc

#endif  // UNITS_VOCABULARY_H_
