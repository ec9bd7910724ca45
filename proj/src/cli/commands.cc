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

#include "cli/commands.h"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <mutex>
#include <thread>

#include <glog/logging.h>
#include <json.hpp>

#include "conversion/convert.h"
#include "conversion/vocoder.h"
#include "corpus/cache.h"
#include "corpus/manifest.h"
#include "eval/metrics.h"
#include "frontend/synthetic.h"
#include "model/model_state.h"
#include "training/trainer.h"
#include "utils/string_util.h"

namespace unitvc {

namespace fs = std::filesystem;

namespace {

void EnsureParentDir(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

// Loads a checkpoint. Without a custom config the stored one is used;
// otherwise the two must share a model fingerprint and the custom config
// supplies the runtime sections.
std::unique_ptr<ModelState> LoadState(const std::string& path,
                                      const CommonOptions& common,
                                      SystemConfig* runtime) {
  if (!common.customized()) {
    auto state = ModelState::Load(path);
    *runtime = state->config();
    return state;
  }
  *runtime = LoadConfig(common);
  return ModelState::Load(path, *runtime);
}

std::string StepCheckpointPath(const std::string& dir, int64_t step) {
  std::ostringstream name;
  name << "step_" << std::setw(8) << std::setfill('0') << step << ".ckpt";
  return (fs::path(dir) / name.str()).string();
}

void SaveCheckpoints(const ModelState& state, const std::string& dir) {
  state.Save(StepCheckpointPath(dir, state.step()));
  state.Save(LatestCheckpointPath(dir));
}

}  // namespace

std::string VocabularyPath(const std::string& cache_dir) {
  return (fs::path(cache_dir) / "vocabulary.bin").string();
}

std::string LatestCheckpointPath(const std::string& checkpoint_dir) {
  return (fs::path(checkpoint_dir) / "latest.ckpt").string();
}

std::string TrainLogPath(const std::string& checkpoint_dir) {
  return (fs::path(checkpoint_dir) / "train_log.jsonl").string();
}

SystemConfig LoadConfig(const CommonOptions& opts) {
  SystemConfig cfg = opts.config_path.empty()
                         ? SystemConfig()
                         : SystemConfig::FromFile(opts.config_path);
  for (const std::string& kv : opts.overrides) {
    const size_t eq = kv.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("override '" + kv + "' is not key=value");
    }
    cfg.Set(Trim(kv.substr(0, eq)), Trim(kv.substr(eq + 1)));
  }
  cfg.Validate();
  return cfg;
}

int CmdConfigDump(const CommonOptions& opts, std::ostream& out,
                  std::ostream& err) {
  try {
    out << LoadConfig(opts).ToText(true);
    return kExitOk;
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  }
}

int CmdExtract(const ExtractOptions& opts, std::ostream& out,
               std::ostream& err) {
  SystemConfig cfg;
  std::vector<ManifestEntry> entries;
  try {
    cfg = LoadConfig(opts.common);
    entries = ReadManifest(opts.manifest);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  const std::string cache = ResolveCacheDir(opts.cache_dir);
  fs::create_directories(cache);

  UnitVocabulary vocab;
  if (cfg.adapters.units_dir.empty()) {
    const std::string vpath = VocabularyPath(cache);
    if (fs::exists(vpath)) {
      vocab = UnitVocabulary::Load(vpath);
    } else {
      std::vector<Waveform> corpus;
      for (const auto& e : entries) {
        try {
          corpus.push_back(LoadWaveform(e.path, cfg.feature.sample_rate));
        } catch (const std::exception&) {
          // Reported below, per entry.
        }
      }
      try {
        LOG(INFO) << "fitting " << cfg.units.vocabulary_size
                  << "-unit vocabulary on " << corpus.size() << " files";
        vocab = FitVocabulary(corpus, cfg.units.vocabulary_size,
                              cfg.units.kmeans_seed, cfg.feature,
                              cfg.units.kmeans_iterations);
        vocab.Save(vpath);
      } catch (const std::exception& e) {
        err << "vocabulary fitting failed: " << e.what() << "\n";
        return kExitPartialFailure;
      }
    }
  }
  const uint64_t vocab_hash = vocab.fitted() ? vocab.Hash() : 0;
  const uint64_t fingerprint = cfg.FeatureFingerprint();

  std::atomic<size_t> next{0};
  std::atomic<int> extracted{0}, unchanged{0};
  std::mutex mu;
  std::vector<std::string> failures;
  auto worker = [&]() {
    for (size_t i = next++; i < entries.size(); i = next++) {
      const ManifestEntry& e = entries[i];
      try {
        const uint64_t hash = Fnv1a64(ReadFileBytes(e.path));
        const auto sidecar = ReadSidecar(cache, e.id);
        if (sidecar && sidecar->content_hash == hash &&
            sidecar->feature_fingerprint == fingerprint &&
            sidecar->vocabulary_hash == vocab_hash) {
          ++unchanged;
          continue;
        }
        UtteranceFeatures u = ExtractFeaturesFromFile(e.path, e.id, vocab, cfg);
        u.label = e.label;
        SaveCacheRecord(cache, u);
        ++extracted;
      } catch (const std::exception& ex) {
        std::lock_guard<std::mutex> lock(mu);
        failures.push_back(e.path + ": " + ex.what());
      }
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const size_t threads = std::min<size_t>(
      entries.size(), opts.threads > 0 ? opts.threads : hw);
  std::vector<std::thread> pool;
  for (size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::sort(failures.begin(), failures.end());
  for (const auto& f : failures) err << "failed " << f << "\n";
  out << "extracted " << extracted << ", unchanged " << unchanged
      << ", failed " << failures.size() << "\n";
  return failures.empty() ? kExitOk : kExitPartialFailure;
}

int CmdTrain(const TrainOptions& opts, std::ostream& out, std::ostream& err) {
  SystemConfig cfg;
  try {
    cfg = LoadConfig(opts.common);
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  }
  const std::string cache = ResolveCacheDir(opts.cache_dir);
  const auto records = ListCacheRecords(cache);
  if (records.empty()) {
    err << "no cache records in " << cache << "\n";
    return kExitUsage;
  }
  std::vector<UtteranceFeatures> data;
  try {
    for (const auto& r : records) data.push_back(LoadCacheRecord(r));
  } catch (const std::exception& e) {
    err << "cannot read cache: " << e.what() << "\n";
    return kExitUsage;
  }
  const uint64_t fingerprint = cfg.FeatureFingerprint();
  for (const auto& u : data) {
    if (u.feature_fingerprint != fingerprint) {
      err << "cache record '" << u.id << "' was extracted with a different "
          << "config (fingerprint " << HexDigest(u.feature_fingerprint)
          << ", config " << HexDigest(fingerprint) << ")\n";
      return kExitUsage;
    }
  }

  fs::create_directories(opts.checkpoint_dir);
  const std::string latest = LatestCheckpointPath(opts.checkpoint_dir);
  std::unique_ptr<ModelState> state;
  try {
    if (fs::exists(latest)) {
      state = ModelState::Load(latest, cfg);
      LOG(INFO) << "resuming from step " << state->step();
    } else {
      state = std::make_unique<ModelState>(cfg);
      state->Initialize(cfg.train.seed);
      const std::string vpath = VocabularyPath(cache);
      if (fs::exists(vpath)) state->vocabulary() = UnitVocabulary::Load(vpath);
    }
  } catch (const FingerprintError& e) {
    err << "checkpoint conflict: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "cannot load checkpoint: " << e.what() << "\n";
    return kExitUsage;
  }

  const int64_t target = opts.steps >= 0 ? opts.steps : cfg.train.num_steps;
  Trainer trainer(state.get(), cfg.train);
  BatchSchedule schedule(static_cast<int>(data.size()), cfg.train.batch_size,
                         cfg.train.seed);
  std::ofstream log(TrainLogPath(opts.checkpoint_dir), std::ios::app);
  int skipped = 0;
  while (state->step() < target) {
    std::vector<const UtteranceFeatures*> batch;
    for (int i : schedule.Batch(state->step())) batch.push_back(&data[i]);
    const LossReport report = trainer.TrainStep(batch);
    skipped += report.skipped ? 1 : 0;
    log << report.ToJson(state->step()) << "\n";
    log.flush();
    if (state->step() % 10 == 0) {
      LOG(INFO) << "step " << state->step() << " recon_l1 " << report.recon_l1
                << " total_gen " << report.total_gen;
    }
    if (cfg.train.checkpoint_every > 0 &&
        state->step() % cfg.train.checkpoint_every == 0) {
      SaveCheckpoints(*state, opts.checkpoint_dir);
    }
  }
  SaveCheckpoints(*state, opts.checkpoint_dir);
  out << "trained to step " << state->step() << " (" << skipped
      << " skipped), checkpoint " << latest << "\n";
  return kExitOk;
}

int CmdConvert(const ConvertOptions& opts, std::ostream& out,
               std::ostream& err) {
  TransferSet transfer;
  ProsodySource prosody;
  try {
    transfer = ParseTransfer(opts.transfer);
    prosody = opts.prosody_source.empty()
                  ? DefaultProsodySource(transfer)
                  : ParseProsodySource(opts.prosody_source);
    ConversionRequest probe;
    UtteranceFeatures dummy;
    probe.source = probe.target = &dummy;
    probe.transfer = transfer;
    probe.prosody_source = prosody;
    ValidateRequest(probe);
  } catch (const std::exception& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }
  SystemConfig runtime;
  std::unique_ptr<ModelState> state;
  try {
    state = LoadState(opts.checkpoint, opts.common, &runtime);
  } catch (const std::exception& e) {
    err << "cannot load checkpoint: " << e.what() << "\n";
    return kExitUsage;
  }
  try {
    const SystemConfig& cfg = state->config();
    const UtteranceFeatures src = ExtractFeaturesFromFile(
        opts.source, FileStem(opts.source), state->vocabulary(), cfg);
    const UtteranceFeatures tgt = ExtractFeaturesFromFile(
        opts.target, FileStem(opts.target), state->vocabulary(), cfg);
    const ConversionResult res =
        Convert({&src, &tgt, transfer, prosody}, *state);
    const Waveform wave = RenderWaveform(res.mel, runtime);
    EnsureParentDir(opts.out);
    WriteWav(opts.out, wave);
    const std::string meta_path =
        fs::path(opts.out).replace_extension(".json").string();
    WriteFileBytes(meta_path,
                   ConversionMetadata(opts.source, opts.target, transfer,
                                      prosody, res.mel.num_frames(), wave,
                                      runtime));
    out << "wrote " << opts.out << " (" << res.mel.num_frames()
        << " frames, source " << src.num_frames() << " frames)\n";
    return kExitOk;
  } catch (const std::exception& e) {
    err << "conversion failed: " << e.what() << "\n";
    return kExitPartialFailure;
  }
}

int CmdBatchConvert(const BatchConvertOptions& opts, std::ostream& out,
                    std::ostream& err) {
  SystemConfig runtime;
  std::unique_ptr<ModelState> state;
  try {
    state = LoadState(opts.checkpoint, opts.common, &runtime);
  } catch (const std::exception& e) {
    err << "cannot load checkpoint: " << e.what() << "\n";
    return kExitUsage;
  }
  std::vector<BatchItemReport> report;
  try {
    report = BatchConvert(opts.manifest, *state, runtime, opts.out_dir);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  nlohmann::ordered_json j = nlohmann::json::array();
  int failed = 0;
  for (const auto& item : report) {
    nlohmann::ordered_json row;
    row["name"] = item.name;
    row["ok"] = item.ok;
    if (item.ok) {
      row["wav"] = item.wav_path;
    } else {
      row["reason"] = item.reason;
      err << "failed " << item.name << ": " << item.reason << "\n";
      ++failed;
    }
    j.push_back(row);
  }
  WriteFileBytes((fs::path(opts.out_dir) / "report.json").string(),
                 j.dump(2) + "\n");
  out << "converted " << report.size() - failed << ", failed " << failed
      << "\n";
  return failed == 0 ? kExitOk : kExitPartialFailure;
}

int CmdEval(const EvalOptions& opts, std::ostream& out, std::ostream& err) {
  SystemConfig cfg;
  std::string pairs = opts.pairs;
  try {
    if (!opts.checkpoint.empty()) {
      SystemConfig runtime;
      auto state = LoadState(opts.checkpoint, opts.common, &runtime);
      cfg = runtime;
      const std::string work =
          opts.work_dir.empty()
              ? (fs::path(opts.out).parent_path() / "eval_outputs").string()
              : opts.work_dir;
      const auto items = BatchConvert(opts.pairs, *state, runtime, work);
      const auto rows = ReadTable(opts.pairs);
      const std::string base = fs::path(opts.pairs).parent_path().string();
      std::ostringstream generated;
      for (size_t i = 0; i < items.size(); ++i) {
        const std::string target = ResolvePath(rows[i].at(1), base);
        const std::string converted =
            items[i].ok ? items[i].wav_path : "<failed:" + items[i].name + ">";
        generated << target << " " << converted << " " << items[i].name << "\n";
      }
      pairs = (fs::path(work) / "pairs.txt").string();
      WriteFileBytes(pairs, generated.str());
    } else {
      cfg = LoadConfig(opts.common);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  MetricReport report;
  try {
    report = EvaluatePairs(pairs, cfg, opts.embeddings);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  if (!opts.out.empty()) {
    EnsureParentDir(opts.out);
    WriteFileBytes(opts.out, report.ToJson());
  }
  out << report.Summary();
  bool any_error = false;
  for (const auto& p : report.pairs) {
    if (!p.error.empty()) {
      err << "skipped " << p.name << ": " << p.error << "\n";
      any_error = true;
    }
  }
  return any_error ? kExitPartialFailure : kExitOk;
}

int CmdExportEmbeddings(const ExportOptions& opts, std::ostream& out,
                        std::ostream& err) {
  SystemConfig runtime;
  std::unique_ptr<ModelState> state;
  AttributeKind kind;
  std::vector<ManifestEntry> entries;
  try {
    kind = ParseAttributeKind(opts.kind);
    state = LoadState(opts.checkpoint, opts.common, &runtime);
    entries = ReadManifest(opts.manifest);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  try {
    EnsureParentDir(opts.out);
    WriteFileBytes(opts.out, ExportAttributeEmbeddings(entries, kind, *state));
  } catch (const std::exception& e) {
    err << "export failed: " << e.what() << "\n";
    return kExitPartialFailure;
  }
  out << "wrote " << entries.size() << " rows to " << opts.out << "\n";
  return kExitOk;
}

int CmdMakeToyCorpus(const ToyCorpusOptions& opts, std::ostream& out,
                     std::ostream& err) {
  if (opts.count < 1 || !(opts.seconds > 0.0)) {
    err << "count and seconds must be positive\n";
    return kExitUsage;
  }
  fs::create_directories(opts.out_dir);
  std::ostringstream manifest;
  for (int i = 0; i < opts.count; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "toy_%03d.wav", i);
    const Waveform w =
        MakeToyUtterance(i, opts.sample_rate, opts.seconds, opts.seed);
    WriteWav((fs::path(opts.out_dir) / name).string(), w);
    manifest << name << " speaker" << (i % 3) << "\n";
  }
  const std::string path = (fs::path(opts.out_dir) / "manifest.txt").string();
  WriteFileBytes(path, manifest.str());
  out << "wrote " << opts.count << " utterances and " << path << "\n";
  return kExitOk;
}

}  // namespace unitvc
