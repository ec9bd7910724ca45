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

#include "corpus/cache.h"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <stdexcept>

#include "utils/archive.h"
#include "utils/string_util.h"

namespace unitvc {

namespace fs = std::filesystem;

namespace {

constexpr int64_t kRecordVersion = 1;

uint64_t ParseHex(const std::string& s) { return std::stoull(s, nullptr, 16); }

template <typename T>
std::vector<int64_t> ToInts(const std::vector<T>& v) {
  return std::vector<int64_t>(v.begin(), v.end());
}

}  // namespace

std::string CacheRecordPath(const std::string& dir, const std::string& id) {
  return (fs::path(dir) / (id + ".uvc")).string();
}

std::string CacheSidecarPath(const std::string& dir, const std::string& id) {
  return (fs::path(dir) / (id + ".txt")).string();
}

std::string SerializeFeatures(const UtteranceFeatures& u) {
  Archive a;
  a.PutInts("record_version", {1}, {kRecordVersion});
  a.PutString("id", u.id);
  a.PutString("label", u.label);
  a.PutString("source_path", u.source_path);
  a.PutInts("sample_rate", {1}, {u.wave.sample_rate});
  a.PutDoubles("samples", {u.wave.samples.size()}, u.wave.samples);
  const RealMatrix& m = u.mel.frames;
  a.PutDoubles("mel",
               {static_cast<uint64_t>(m.rows()), static_cast<uint64_t>(m.cols())},
               std::vector<double>(m.data(), m.data() + m.size()));
  a.PutDoubles("hop_seconds", {1}, {u.mel.hop_seconds});
  a.PutDoubles("pitch", {u.pitch.pitch.size()}, u.pitch.pitch);
  a.PutInts("voicing", {u.pitch.voicing.size()}, ToInts(u.pitch.voicing));
  a.PutInts("pitch_normalized", {1}, {u.pitch.normalized ? 1 : 0});
  a.PutDoubles("mean_f0", {1}, {u.pitch.mean_f0});
  a.PutDoubles("energy", {u.energy.energy.size()}, u.energy.energy);
  a.PutInts("units", {u.units.units.size()}, ToInts(u.units.units));
  a.PutInts("durations", {u.units.durations.size()}, ToInts(u.units.durations));
  a.PutString("content_hash", HexDigest(u.content_hash));
  a.PutString("feature_fingerprint", HexDigest(u.feature_fingerprint));
  a.PutString("vocabulary_hash", HexDigest(u.vocabulary_hash));
  return a.Serialize();
}

UtteranceFeatures DeserializeFeatures(const std::string& bytes) {
  const Archive a = Archive::Deserialize(bytes);
  if (!a.Has("record_version") ||
      a.GetInts("record_version").at(0) != kRecordVersion) {
    throw std::runtime_error("unsupported cache record version");
  }
  UtteranceFeatures u;
  u.id = a.GetString("id");
  u.label = a.GetString("label");
  u.source_path = a.GetString("source_path");
  u.wave.sample_rate = static_cast<int>(a.GetInts("sample_rate").at(0));
  u.wave.samples = a.GetDoubles("samples");
  const auto& mel = a.Get("mel");
  if (mel.dims.size() != 2) throw std::runtime_error("corrupt mel matrix");
  u.mel.frames.resize(mel.dims[0], mel.dims[1]);
  std::copy(mel.doubles.begin(), mel.doubles.end(), u.mel.frames.data());
  u.mel.hop_seconds = a.GetDoubles("hop_seconds").at(0);
  u.pitch.pitch = a.GetDoubles("pitch");
  for (int64_t v : a.GetInts("voicing")) u.pitch.voicing.push_back(v ? 1 : 0);
  u.pitch.normalized = a.GetInts("pitch_normalized").at(0) != 0;
  u.pitch.mean_f0 = a.GetDoubles("mean_f0").at(0);
  u.energy.energy = a.GetDoubles("energy");
  for (int64_t v : a.GetInts("units")) u.units.units.push_back(int(v));
  for (int64_t v : a.GetInts("durations")) u.units.durations.push_back(int(v));
  u.content_hash = ParseHex(a.GetString("content_hash"));
  u.feature_fingerprint = ParseHex(a.GetString("feature_fingerprint"));
  u.vocabulary_hash = ParseHex(a.GetString("vocabulary_hash"));
  CheckAligned(u);
  return u;
}

void SaveCacheRecord(const std::string& dir, const UtteranceFeatures& u) {
  if (u.id.empty()) throw std::invalid_argument("cache record needs an id");
  fs::create_directories(dir);
  WriteFileBytes(CacheRecordPath(dir, u.id), SerializeFeatures(u));
  CacheSidecar s;
  s.id = u.id;
  s.mean_f0 = u.pitch.mean_f0;
  s.num_frames = u.num_frames();
  s.num_units = u.units.size();
  s.content_hash = u.content_hash;
  s.feature_fingerprint = u.feature_fingerprint;
  s.vocabulary_hash = u.vocabulary_hash;
  WriteFileBytes(CacheSidecarPath(dir, u.id), FormatSidecar(s));
}

UtteranceFeatures LoadCacheRecord(const std::string& path) {
  return DeserializeFeatures(ReadFileBytes(path));
}

std::string FormatSidecar(const CacheSidecar& s) {
  std::ostringstream os;
  os << "id " << s.id << "\n"
     << "mean_f0 " << FormatDouble(s.mean_f0) << "\n"
     << "num_frames " << s.num_frames << "\n"
     << "num_units " << s.num_units << "\n"
     << "content_hash " << HexDigest(s.content_hash) << "\n"
     << "feature_fingerprint " << HexDigest(s.feature_fingerprint) << "\n"
     << "vocabulary_hash " << HexDigest(s.vocabulary_hash) << "\n";
  return os.str();
}

CacheSidecar ParseSidecar(const std::string& text) {
  CacheSidecar s;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    const auto fields = SplitWhitespace(line);
    if (fields.size() != 2) continue;
    const std::string& k = fields[0];
    const std::string& v = fields[1];
    if (k == "id") s.id = v;
    else if (k == "mean_f0") s.mean_f0 = std::stod(v);
    else if (k == "num_frames") s.num_frames = std::stoi(v);
    else if (k == "num_units") s.num_units = std::stoi(v);
    else if (k == "content_hash") s.content_hash = ParseHex(v);
    else if (k == "feature_fingerprint") s.feature_fingerprint = ParseHex(v);
    else if (k == "vocabulary_hash") s.vocabulary_hash = ParseHex(v);
  }
  return s;
}

std::optional<CacheSidecar> ReadSidecar(const std::string& dir,
                                        const std::string& id) {
  const std::string path = CacheSidecarPath(dir, id);
  if (!fs::exists(path) || !fs::exists(CacheRecordPath(dir, id))) {
    return std::nullopt;
  }
  try {
    return ParseSidecar(ReadFileBytes(path));
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::vector<std::string> ListCacheRecords(const std::string& dir) {
  std::vector<std::string> out;
  if (!fs::is_directory(dir)) return out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".uvc") {
      out.push_back(e.path().string());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string ResolveCacheDir(const std::string& dir) {
  const char* root = std::getenv("UNITVC_CACHE_ROOT");
  if (root && *root && fs::path(dir).is_relative()) {
    return (fs::path(root) / dir).string();
  }
  return dir;
}

}  // namespace unitvc
