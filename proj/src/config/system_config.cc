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

#include "config/system_config.h"

#include <functional>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "utils/string_util.h"

namespace unitvc {

namespace {

struct Field {
  std::string key;
  std::string doc;
  std::function<std::string(const SystemConfig&)> get;
  std::function<void(SystemConfig&, const std::string&)> set;
};

double ParseDouble(const std::string& key, const std::string& v) {
  size_t pos = 0;
  double d;
  try {
    d = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "': not a number: " + v);
  }
  if (pos != v.size()) {
    throw std::invalid_argument("config key '" + key + "': not a number: " + v);
  }
  return d;
}

long long ParseInt(const std::string& key, const std::string& v) {
  size_t pos = 0;
  long long i;
  try {
    i = std::stoll(v, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key +
                                "': not an integer: " + v);
  }
  if (pos != v.size()) {
    throw std::invalid_argument("config key '" + key +
                                "': not an integer: " + v);
  }
  return i;
}

bool ParseBool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument("config key '" + key + "': not a bool: " + v);
}

template <typename M>
Field Num(std::string key, std::string doc, M SystemConfig::*section,
          double M::*member) {
  return {key, std::move(doc),
          [=](const SystemConfig& c) { return FormatDouble(c.*section.*member); },
          [=](SystemConfig& c, const std::string& v) {
            c.*section.*member = ParseDouble(key, v);
          }};
}

template <typename M>
Field Int(std::string key, std::string doc, M SystemConfig::*section,
          int M::*member) {
  return {key, std::move(doc),
          [=](const SystemConfig& c) {
            return std::to_string(c.*section.*member);
          },
          [=](SystemConfig& c, const std::string& v) {
            c.*section.*member = static_cast<int>(ParseInt(key, v));
          }};
}

template <typename M>
Field U64(std::string key, std::string doc, M SystemConfig::*section,
          uint64_t M::*member) {
  return {key, std::move(doc),
          [=](const SystemConfig& c) {
            return std::to_string(c.*section.*member);
          },
          [=](SystemConfig& c, const std::string& v) {
            c.*section.*member = static_cast<uint64_t>(ParseInt(key, v));
          }};
}

template <typename M>
Field Bool(std::string key, std::string doc, M SystemConfig::*section,
           bool M::*member) {
  return {key, std::move(doc),
          [=](const SystemConfig& c) {
            return std::string(c.*section.*member ? "true" : "false");
          },
          [=](SystemConfig& c, const std::string& v) {
            c.*section.*member = ParseBool(key, v);
          }};
}

template <typename M>
Field Str(std::string key, std::string doc, M SystemConfig::*section,
          std::string M::*member) {
  return {key, std::move(doc),
          [=](const SystemConfig& c) { return c.*section.*member; },
          [=](SystemConfig& c, const std::string& v) {
            c.*section.*member = v;
          }};
}

void AddGrid(std::vector<Field>* f, const std::string& prefix,
             GridConfig SystemConfig::*grid, const std::string& what) {
  f->push_back(Num(prefix + ".minimum", "lowest " + what + " value (bin 0 sits one width above)", grid, &GridConfig::minimum));
  f->push_back(Num(prefix + ".width", what + " bin width", grid, &GridConfig::width));
  f->push_back(Int(prefix + ".count", "number of " + what + " bins", grid, &GridConfig::count));
  f->push_back(Num(prefix + ".sigma", "Gaussian blur std of " + what + " bin weights", grid, &GridConfig::sigma));
}

const std::vector<Field>& Fields() {
  static const std::vector<Field> fields = [] {
    using S = SystemConfig;
    std::vector<Field> f;
    f.push_back(Int("feature.sample_rate", "system sample rate in Hz", &S::feature, &FeatureConfig::sample_rate));
    f.push_back(Int("feature.hop_length", "frame hop in samples", &S::feature, &FeatureConfig::hop_length));
    f.push_back(Int("feature.win_length", "analysis window in samples", &S::feature, &FeatureConfig::win_length));
    f.push_back(Int("feature.n_fft", "FFT size", &S::feature, &FeatureConfig::n_fft));
    f.push_back(Int("feature.n_mels", "mel band count", &S::feature, &FeatureConfig::n_mels));
    f.push_back(Num("feature.f_min", "lowest mel filter edge in Hz", &S::feature, &FeatureConfig::f_min));
    f.push_back(Num("feature.f_max", "highest mel filter edge in Hz", &S::feature, &FeatureConfig::f_max));
    f.push_back(Num("feature.log_eps", "floor added before the log of mel power", &S::feature, &FeatureConfig::log_eps));
    f.push_back(Num("feature.pitch_f_min", "lowest trackable f0 in Hz", &S::feature, &FeatureConfig::pitch_f_min));
    f.push_back(Num("feature.pitch_f_max", "highest trackable f0 in Hz", &S::feature, &FeatureConfig::pitch_f_max));
    f.push_back(Num("feature.periodicity_threshold", "normalized autocorrelation needed to call a frame voiced", &S::feature, &FeatureConfig::periodicity_threshold));
    f.push_back(Num("feature.default_mean_f0", "mean f0 assumed for fully unvoiced utterances", &S::feature, &FeatureConfig::default_mean_f0));
    f.push_back(Num("feature.silence_rms", "frames below this RMS are unvoiced", &S::feature, &FeatureConfig::silence_rms));
    AddGrid(&f, "pitch_grid", &S::pitch_grid, "normalized pitch");
    AddGrid(&f, "energy_grid", &S::energy_grid, "energy");
    f.push_back(Int("model.attribute_dim", "size of each attribute vector", &S::model, &ModelConfig::attribute_dim));
    f.push_back(Int("model.bin_embedding_dim", "size of pitch/energy bin embeddings", &S::model, &ModelConfig::bin_embedding_dim));
    f.push_back(Int("model.unit_embedding_dim", "size of unit embeddings", &S::model, &ModelConfig::unit_embedding_dim));
    f.push_back(Int("model.width", "channel width of residual stacks", &S::model, &ModelConfig::width));
    f.push_back(Int("model.kernel_size", "temporal kernel of residual blocks", &S::model, &ModelConfig::kernel_size));
    f.push_back(Int("model.filter_blocks", "residual blocks in the filter network", &S::model, &ModelConfig::filter_blocks));
    f.push_back(Int("model.source_blocks", "residual blocks in the source network", &S::model, &ModelConfig::source_blocks));
    f.push_back(Int("model.energy_blocks", "residual blocks in the energy network", &S::model, &ModelConfig::energy_blocks));
    f.push_back(Int("model.duration_blocks", "residual blocks in the duration network", &S::model, &ModelConfig::duration_blocks));
    f.push_back(Int("model.pitch_energy_blocks", "residual blocks in the pitch-energy network", &S::model, &ModelConfig::pitch_energy_blocks));
    f.push_back(Int("model.filter_interpolation_block", "filter blocks before resampling to mel length", &S::model, &ModelConfig::filter_interpolation_block));
    f.push_back(Int("model.encoder_channels", "channels of the attribute encoder backbone", &S::model, &ModelConfig::encoder_channels));
    f.push_back(Int("model.discriminator_channels", "channels of the discriminator", &S::model, &ModelConfig::discriminator_channels));
    f.push_back(Int("model.max_duration", "upper clamp for decoded unit durations", &S::model, &ModelConfig::max_duration));
    f.push_back(Num("model.voicing_threshold", "voicing probability cut at inference", &S::model, &ModelConfig::voicing_threshold));
    f.push_back(Num("model.embedding_init_std", "init std of bin embedding tables", &S::model, &ModelConfig::embedding_init_std));
    f.push_back(Int("units.vocabulary_size", "number of discrete units", &S::units, &UnitConfig::vocabulary_size));
    f.push_back(Int("units.kmeans_iterations", "maximum k-means iterations", &S::units, &UnitConfig::kmeans_iterations));
    f.push_back(U64("units.kmeans_seed", "k-means++ seed", &S::units, &UnitConfig::kmeans_seed));
    f.push_back(Num("train.weight_recon_l1", "weight of mel L1 reconstruction", &S::train, &TrainConfig::weight_recon_l1));
    f.push_back(Num("train.weight_adversarial", "weight of the least-squares generator loss", &S::train, &TrainConfig::weight_adversarial));
    f.push_back(Num("train.weight_voicing", "weight of voicing BCE", &S::train, &TrainConfig::weight_voicing));
    f.push_back(Num("train.weight_duration", "weight of log-duration MSE", &S::train, &TrainConfig::weight_duration));
    f.push_back(Num("train.weight_pitch_bins", "weight of pitch bin BCE", &S::train, &TrainConfig::weight_pitch_bins));
    f.push_back(Num("train.weight_energy_bins", "weight of energy bin BCE", &S::train, &TrainConfig::weight_energy_bins));
    f.push_back(Num("train.weight_pitch_consistency", "weight of encoded pitch MSE (joint optimization only)", &S::train, &TrainConfig::weight_pitch_consistency));
    f.push_back(Num("train.weight_energy_consistency", "weight of encoded energy MSE (joint optimization only)", &S::train, &TrainConfig::weight_energy_consistency));
    f.push_back(Num("train.learning_rate_generator", "Adam step size for everything but the discriminator", &S::train, &TrainConfig::learning_rate_generator));
    f.push_back(Num("train.learning_rate_discriminator", "Adam step size for the discriminator", &S::train, &TrainConfig::learning_rate_discriminator));
    f.push_back(Num("train.adam_beta1", "Adam first moment decay", &S::train, &TrainConfig::adam_beta1));
    f.push_back(Num("train.adam_beta2", "Adam second moment decay", &S::train, &TrainConfig::adam_beta2));
    f.push_back(Num("train.grad_clip_norm", "global gradient norm clip", &S::train, &TrainConfig::grad_clip_norm));
    f.push_back(Int("train.batch_size", "utterances per step", &S::train, &TrainConfig::batch_size));
    f.push_back(Int("train.num_steps", "total optimizer steps", &S::train, &TrainConfig::num_steps));
    f.push_back(Int("train.checkpoint_every", "steps between checkpoints", &S::train, &TrainConfig::checkpoint_every));
    f.push_back(U64("train.seed", "parameter init and data order seed", &S::train, &TrainConfig::seed));
    f.push_back(Bool("train.joint_optimization", "feed mixed predicted/ground-truth bins to the synthesizer", &S::train, &TrainConfig::joint_optimization));
    f.push_back(Num("train.mix_coefficient", "ground-truth share of the mixed bin weights", &S::train, &TrainConfig::mix_coefficient));
    f.push_back(Int("inference.vocoder_iterations", "phase reconstruction iterations of the fallback vocoder", &S::inference, &InferenceConfig::vocoder_iterations));
    f.push_back(Num("inference.vocoder_momentum", "momentum of the fallback vocoder", &S::inference, &InferenceConfig::vocoder_momentum));
    f.push_back(U64("inference.vocoder_seed", "initial phase seed of the fallback vocoder", &S::inference, &InferenceConfig::vocoder_seed));
    f.push_back(Str("adapters.pitch_command", "external pitch tracker: <cmd> <wav> <out>", &S::adapters, &AdapterConfig::pitch_command));
    f.push_back(Str("adapters.units_dir", "directory of externally computed <id>.units files", &S::adapters, &AdapterConfig::units_dir));
    f.push_back(Str("adapters.vocoder_command", "external vocoder: <cmd> <mel archive> <out wav>", &S::adapters, &AdapterConfig::vocoder_command));
    return f;
  }();
  return fields;
}

const Field& FindField(const std::string& key) {
  for (const Field& f : Fields()) {
    if (f.key == key) return f;
  }
  throw std::invalid_argument("unknown config key '" + key + "'");
}

bool HasPrefix(const std::string& key, const std::vector<std::string>& ps) {
  for (const std::string& p : ps) {
    if (key.compare(0, p.size(), p) == 0) return true;
  }
  return false;
}

uint64_t FingerprintOf(const SystemConfig& c,
                       const std::vector<std::string>& prefixes) {
  std::string canonical;
  for (const Field& f : Fields()) {
    if (!HasPrefix(f.key, prefixes)) continue;
    canonical += f.key + "=" + f.get(c) + "\n";
  }
  return Fnv1a64(canonical);
}

void Require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("invalid config: " + what);
}

}  // namespace

void SystemConfig::Validate() const {
  const FeatureConfig& f = feature;
  Require(f.sample_rate > 0, "feature.sample_rate must be positive");
  Require(f.hop_length > 0, "feature.hop_length must be positive");
  Require(f.win_length > 0 && f.win_length <= f.n_fft,
          "feature.win_length must be in (0, n_fft]");
  Require(f.n_mels >= 1, "feature.n_mels must be >= 1");
  Require(f.f_max > f.f_min && f.f_max <= f.sample_rate / 2.0,
          "feature.f_max must be in (f_min, sample_rate / 2]");
  Require(f.log_eps > 0, "feature.log_eps must be positive");
  Require(f.pitch_f_min > 0 && f.pitch_f_max > f.pitch_f_min,
          "pitch range must satisfy 0 < f_min < f_max");
  Require(f.default_mean_f0 > 0, "feature.default_mean_f0 must be positive");
  for (const GridConfig* g : {&pitch_grid, &energy_grid}) {
    Require(g->width > 0, "grid width must be positive");
    Require(g->count >= 2, "grid count must be >= 2");
    Require(g->sigma > 0, "grid sigma must be positive");
  }
  const ModelConfig& m = model;
  for (int v : {m.attribute_dim, m.bin_embedding_dim, m.unit_embedding_dim,
                m.width, m.kernel_size, m.encoder_channels,
                m.discriminator_channels, m.max_duration}) {
    Require(v >= 1, "model dimensions must be >= 1");
  }
  Require(m.kernel_size % 2 == 1, "model.kernel_size must be odd");
  for (int v : {m.filter_blocks, m.source_blocks, m.energy_blocks,
                m.duration_blocks, m.pitch_energy_blocks}) {
    Require(v >= 1, "block counts must be >= 1");
  }
  Require(m.filter_interpolation_block >= 0 &&
              m.filter_interpolation_block <= m.filter_blocks,
          "model.filter_interpolation_block must be in [0, filter_blocks]");
  Require(units.vocabulary_size >= 2, "units.vocabulary_size must be >= 2");
  Require(units.kmeans_iterations >= 1, "units.kmeans_iterations must be >= 1");
  const TrainConfig& t = train;
  for (double w : {t.weight_recon_l1, t.weight_adversarial, t.weight_voicing,
                   t.weight_duration, t.weight_pitch_bins,
                   t.weight_energy_bins, t.weight_pitch_consistency,
                   t.weight_energy_consistency}) {
    Require(w >= 0, "loss weights must be >= 0");
  }
  Require(t.mix_coefficient >= 0 && t.mix_coefficient <= 1,
          "train.mix_coefficient must be in [0, 1]");
  Require(t.learning_rate_generator > 0 && t.learning_rate_discriminator > 0,
          "learning rates must be positive");
  Require(t.batch_size >= 1, "train.batch_size must be >= 1");
  Require(t.num_steps >= 0, "train.num_steps must be >= 0");
  Require(t.checkpoint_every >= 1, "train.checkpoint_every must be >= 1");
  Require(t.grad_clip_norm > 0, "train.grad_clip_norm must be positive");
  Require(inference.vocoder_iterations >= 0,
          "inference.vocoder_iterations must be >= 0");
}

std::string SystemConfig::ToText(bool with_comments) const {
  std::ostringstream os;
  for (const Field& f : Fields()) {
    if (with_comments) os << "# " << f.doc << "\n";
    os << f.key << " = " << f.get(*this) << "\n";
  }
  return os.str();
}

SystemConfig SystemConfig::FromText(const std::string& text) {
  SystemConfig c;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = Trim(line);
    if (t.empty() || t[0] == '#') continue;
    const size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    }
    c.Set(Trim(t.substr(0, eq)), Trim(t.substr(eq + 1)));
  }
  c.Validate();
  return c;
}

SystemConfig SystemConfig::FromFile(const std::string& path) {
  return FromText(ReadFileBytes(path));
}

void SystemConfig::Set(const std::string& key, const std::string& value) {
  FindField(key).set(*this, value);
}

std::string SystemConfig::Get(const std::string& key) const {
  return FindField(key).get(*this);
}

uint64_t SystemConfig::FeatureFingerprint() const {
  return FingerprintOf(*this, {"feature.", "units."});
}

uint64_t SystemConfig::ModelFingerprint() const {
  return FingerprintOf(
      *this, {"feature.", "pitch_grid.", "energy_grid.", "model.", "units."});
}

}  // namespace unitvc
