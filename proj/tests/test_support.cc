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

#include "test_support.h"

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <stdexcept>

#include "frontend/synthetic.h"

namespace unitvc {
namespace testing_support {

SystemConfig ToyConfig() {
  SystemConfig cfg;
  cfg.model.attribute_dim = 32;
  cfg.model.bin_embedding_dim = 32;
  cfg.model.unit_embedding_dim = 32;
  cfg.model.width = 64;
  cfg.model.encoder_channels = 32;
  cfg.model.discriminator_channels = 8;
  cfg.units.vocabulary_size = 32;
  cfg.train.learning_rate_generator = 1e-3;
  cfg.train.learning_rate_discriminator = 1e-3;
  cfg.train.batch_size = 4;
  cfg.train.num_steps = 300;
  cfg.train.checkpoint_every = 100;
  cfg.Validate();
  return cfg;
}

std::vector<const UtteranceFeatures*> ToyCorpus::Pointers() const {
  std::vector<const UtteranceFeatures*> out;
  for (const auto& f : features) out.push_back(&f);
  return out;
}

ToyCorpus MakeToyCorpus(const SystemConfig& cfg, int count, double seconds,
                        uint64_t seed) {
  ToyCorpus corpus;
  // The vocabulary sees enough utterances to give every unit ten frames.
  std::vector<Waveform> fit;
  for (int i = 0; i < std::max(count, 10); ++i) {
    fit.push_back(MakeToyUtterance(i, cfg.feature.sample_rate, seconds, seed));
  }
  corpus.waves.assign(fit.begin(), fit.begin() + count);
  corpus.vocabulary =
      FitVocabulary(fit, cfg.units.vocabulary_size, cfg.units.kmeans_seed,
                    cfg.feature, cfg.units.kmeans_iterations);
  for (int i = 0; i < count; ++i) {
    corpus.features.push_back(ExtractFeatures(
        corpus.waves[i], corpus.vocabulary, cfg, "toy_" + std::to_string(i)));
  }
  return corpus;
}

TempDir::TempDir() {
  std::string pattern =
      (std::filesystem::temp_directory_path() / "unitvc_test_XXXXXX").string();
  if (mkdtemp(pattern.data()) == nullptr) {
    throw std::runtime_error("mkdtemp failed");
  }
  path_ = pattern;
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::string TempDir::File(const std::string& name) const {
  return (std::filesystem::path(path_) / name).string();
}

double MaxAbsDiff(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double m = 0.0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace testing_support
}  // namespace unitvc
