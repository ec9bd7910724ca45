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

#ifndef CLI_COMMANDS_H_
#define CLI_COMMANDS_H_

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "config/system_config.h"

namespace unitvc {

enum ExitCode { kExitOk = 0, kExitPartialFailure = 1, kExitUsage = 2 };

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;  // "key=value"

  bool customized() const {
    return !config_path.empty() || !overrides.empty();
  }
};

// Defaults, then the config file, then the overrides. Throws
// std::invalid_argument on any bad key or value.
SystemConfig LoadConfig(const CommonOptions& opts);

struct ExtractOptions {
  CommonOptions common;
  std::string manifest;
  std::string cache_dir;
  int threads = 0;  // 0: hardware concurrency
};

struct TrainOptions {
  CommonOptions common;
  std::string cache_dir;
  std::string checkpoint_dir;
  int64_t steps = -1;  // total step target; -1: train.num_steps
};

struct ConvertOptions {
  CommonOptions common;
  std::string checkpoint;
  std::string source;
  std::string target;
  std::string transfer = "speaker";
  std::string prosody_source;  // empty: policy default
  std::string out;
};

struct BatchConvertOptions {
  CommonOptions common;
  std::string checkpoint;
  std::string manifest;
  std::string out_dir;
};

struct EvalOptions {
  CommonOptions common;
  std::string pairs;
  std::string out;
  std::string embeddings;
  // With a checkpoint the manifest holds conversion requests that are run
  // first; their outputs are then scored against the targets.
  std::string checkpoint;
  std::string work_dir;
};

struct ExportOptions {
  CommonOptions common;
  std::string checkpoint;
  std::string manifest;
  std::string kind = "pitch_energy";
  std::string out;
};

struct ToyCorpusOptions {
  std::string out_dir;
  int count = 10;
  double seconds = 2.0;
  uint64_t seed = 7;
  int sample_rate = 16000;
};

// Each command reports to `out`/`err` and returns an ExitCode value.
int CmdConfigDump(const CommonOptions& opts, std::ostream& out,
                  std::ostream& err);
int CmdExtract(const ExtractOptions& opts, std::ostream& out,
               std::ostream& err);
int CmdTrain(const TrainOptions& opts, std::ostream& out, std::ostream& err);
int CmdConvert(const ConvertOptions& opts, std::ostream& out,
               std::ostream& err);
int CmdBatchConvert(const BatchConvertOptions& opts, std::ostream& out,
                    std::ostream& err);
int CmdEval(const EvalOptions& opts, std::ostream& out, std::ostream& err);
int CmdExportEmbeddings(const ExportOptions& opts, std::ostream& out,
                        std::ostream& err);
int CmdMakeToyCorpus(const ToyCorpusOptions& opts, std::ostream& out,
                     std::ostream& err);

std::string VocabularyPath(const std::string& cache_dir);
std::string LatestCheckpointPath(const std::string& checkpoint_dir);
std::string TrainLogPath(const std::string& checkpoint_dir);

}  // namespace unitvc

#endif  // CLI_COMMANDS_H_
