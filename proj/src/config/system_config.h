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

#ifndef CONFIG_SYSTEM_CONFIG_H_
#define CONFIG_SYSTEM_CONFIG_H_

#include <cstdint>
#include <string>

namespace unitvc {

struct FeatureConfig {
  int sample_rate = 16000;
  int hop_length = 320;  // 20 ms, one frame per unit
  int win_length = 1024;
  int n_fft = 1024;
  int n_mels = 80;
  double f_min = 0.0;
  double f_max = 8000.0;
  double log_eps = 1e-5;
  double pitch_f_min = 60.0;
  double pitch_f_max = 400.0;
  double periodicity_threshold = 0.3;
  double default_mean_f0 = 120.0;
  // Frames whose RMS is below this are never voiced.
  double silence_rms = 1e-4;
};

struct GridConfig {
  double minimum = 0.0;
  double width = 1.0;
  int count = 200;
  double sigma = 4.0;
};

struct ModelConfig {
  int attribute_dim = 128;
  int bin_embedding_dim = 128;
  int unit_embedding_dim = 128;
  int width = 256;
  int kernel_size = 5;
  int filter_blocks = 16;
  int source_blocks = 16;
  int energy_blocks = 4;
  int duration_blocks = 2;
  int pitch_energy_blocks = 6;
  // The filter stack is resampled to the mel length after this many blocks.
  int filter_interpolation_block = 8;
  int encoder_channels = 128;
  int discriminator_channels = 32;
  int max_duration = 100;
  double voicing_threshold = 0.5;
  double embedding_init_std = 0.02;
};

struct UnitConfig {
  int vocabulary_size = 200;
  int kmeans_iterations = 50;
  uint64_t kmeans_seed = 1234;
};

struct TrainConfig {
  double weight_recon_l1 = 1.0;
  double weight_adversarial = 0.1;
  double weight_voicing = 1.0;
  double weight_duration = 1.0;
  double weight_pitch_bins = 1.0;
  double weight_energy_bins = 1.0;
  double weight_pitch_consistency = 1.0;
  double weight_energy_consistency = 1.0;
  double learning_rate_generator = 2e-4;
  double learning_rate_discriminator = 2e-4;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double grad_clip_norm = 5.0;
  int batch_size = 8;
  int num_steps = 1000;
  int checkpoint_every = 100;
  uint64_t seed = 0;
  bool joint_optimization = true;
  double mix_coefficient = 0.5;
};

struct InferenceConfig {
  int vocoder_iterations = 60;
  double vocoder_momentum = 0.99;
  uint64_t vocoder_seed = 0;
};

// External programs and exchange directories. Empty means "use the internal
// fallback".
struct AdapterConfig {
  std::string pitch_command;
  std::string units_dir;
  std::string vocoder_command;
};

struct SystemConfig {
  FeatureConfig feature;
  GridConfig pitch_grid{-250.0, 2.5, 200, 4.0};
  GridConfig energy_grid{0.0, 1.0, 200, 4.0};
  ModelConfig model;
  UnitConfig units;
  TrainConfig train;
  InferenceConfig inference;
  AdapterConfig adapters;

  // Throws std::invalid_argument on the first violated constraint.
  void Validate() const;

  // Flat "key = value" text, one documented key per line.
  std::string ToText(bool with_comments = true) const;
  static SystemConfig FromText(const std::string& text);
  static SystemConfig FromFile(const std::string& path);
  // Applies a single "key=value" override.
  void Set(const std::string& key, const std::string& value);
  std::string Get(const std::string& key) const;

  // Hash of everything that changes extracted features (feature.*, units.*).
  uint64_t FeatureFingerprint() const;
  // Hash of everything that changes parameter shapes or their meaning
  // (feature.*, pitch_grid.*, energy_grid.*, model.*, units.*).
  uint64_t ModelFingerprint() const;
};

}  // namespace unitvc

#endif  // CONFIG_SYSTEM_CONFIG_H_
