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

#ifndef CORPUS_CACHE_H_
#define CORPUS_CACHE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "corpus/utterance.h"

namespace unitvc {

// Scalars mirrored into the text sidecar next to each binary record.
struct CacheSidecar {
  std::string id;
  double mean_f0 = 0.0;
  int num_frames = 0;
  int num_units = 0;
  uint64_t content_hash = 0;
  uint64_t feature_fingerprint = 0;
  uint64_t vocabulary_hash = 0;
};

std::string CacheRecordPath(const std::string& dir, const std::string& id);
std::string CacheSidecarPath(const std::string& dir, const std::string& id);

std::string SerializeFeatures(const UtteranceFeatures& u);
UtteranceFeatures DeserializeFeatures(const std::string& bytes);

// Writes <dir>/<id>.uvc and <dir>/<id>.txt.
void SaveCacheRecord(const std::string& dir, const UtteranceFeatures& u);
UtteranceFeatures LoadCacheRecord(const std::string& path);

std::string FormatSidecar(const CacheSidecar& s);
CacheSidecar ParseSidecar(const std::string& text);
std::optional<CacheSidecar> ReadSidecar(const std::string& dir,
                                        const std::string& id);

// Binary record paths in the directory, sorted.
std::vector<std::string> ListCacheRecords(const std::string& dir);

// UNITVC_CACHE_ROOT when set and `dir` is relative, else `dir`.
std::string ResolveCacheDir(const std::string& dir);

}  // namespace unitvc

#endif  // CORPUS_CACHE_H_
