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

#include "corpus/manifest.h"

#include <filesystem>
#include <sstream>

#include "utils/string_util.h"

namespace unitvc {

namespace fs = std::filesystem;

namespace {

std::vector<std::vector<std::string>> ParseTable(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    const std::string t = Trim(line);
    if (t.empty() || t[0] == '#') continue;
    rows.push_back(SplitWhitespace(t));
  }
  return rows;
}

}  // namespace

std::string ResolvePath(const std::string& path, const std::string& base_dir) {
  if (base_dir.empty() || fs::path(path).is_absolute()) return path;
  return (fs::path(base_dir) / path).string();
}

std::string FileStem(const std::string& path) {
  return fs::path(path).stem().string();
}

std::vector<ManifestEntry> ParseManifest(const std::string& text,
                                         const std::string& base_dir) {
  std::vector<ManifestEntry> out;
  for (const auto& row : ParseTable(text)) {
    ManifestEntry e;
    e.path = ResolvePath(row[0], base_dir);
    e.id = FileStem(row[0]);
    if (row.size() > 1) e.label = row[1];
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<ManifestEntry> ReadManifest(const std::string& path) {
  return ParseManifest(ReadFileBytes(path),
                       fs::path(path).parent_path().string());
}

std::vector<std::vector<std::string>> ReadTable(const std::string& path) {
  return ParseTable(ReadFileBytes(path));
}

}  // namespace unitvc
