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

#ifndef EVAL_METRICS_H_
#define EVAL_METRICS_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "corpus/manifest.h"
#include "corpus/utterance.h"
#include "model/model_state.h"

namespace unitvc {

// Skip reasons reported in place of a metric value.
inline constexpr const char* kSkipZeroVariance = "zero variance";
inline constexpr const char* kSkipTooShort = "fewer than 2 frames";
inline constexpr const char* kSkipFewVoiced = "fewer than 2 common voiced frames";
inline constexpr const char* kSkipUnreadable = "unreadable input";

struct MetricValue {
  std::optional<double> value;
  std::string skip_reason;

  bool valid() const { return value.has_value(); }
};

// Pearson correlation. When lengths differ, b is first resampled to a's
// length by nearest neighbor.
MetricValue Pcc(const std::vector<double>& a, const std::vector<double>& b);

struct ProsodyPcc {
  MetricValue log_f0;
  MetricValue energy;
};

// log f0 (mean f0 added back) over frames voiced in both; energy over all
// frames.
ProsodyPcc ComputeProsodyPcc(const UtteranceFeatures& target,
                             const UtteranceFeatures& converted);

// Throws std::invalid_argument on dimension mismatch or a zero-norm vector.
double EmbeddingCosine(const std::vector<double>& a,
                       const std::vector<double>& b);

// "<id> <v1> <v2> ..." per line.
std::map<std::string, std::vector<double>> ParseEmbeddingFile(
    const std::string& text);

struct PairMetrics {
  std::string name;
  MetricValue pcc_log_f0;
  MetricValue pcc_energy;
  MetricValue cosine;
  std::string error;  // set when the pair could not be evaluated at all
};

struct MetricReport {
  std::vector<PairMetrics> pairs;

  std::optional<double> MeanLogF0() const;
  std::optional<double> MeanEnergy() const;
  std::optional<double> MeanCosine() const;
  std::map<std::string, int> SkipCounts() const;
  std::string ToJson() const;
  std::string Summary() const;
};

// Pairs manifest: "<target wav> <converted wav> [name]". Embedding files
// (optional) hold one vector per wav stem.
MetricReport EvaluatePairs(const std::string& manifest_path,
                           const SystemConfig& cfg,
                           const std::string& embeddings_path = "");

// One tab-separated row per entry: id, label ("-" when empty), attribute
// values.
std::string ExportAttributeEmbeddings(const std::vector<ManifestEntry>& entries,
                                      AttributeKind kind,
                                      const ModelState& state);

}  // namespace unitvc

#endif  // EVAL_METRICS_H_
