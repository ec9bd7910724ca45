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

#ifndef CORPUS_MANIFEST_H_
#define CORPUS_MANIFEST_H_

#include <string>
#include <vector>

namespace unitvc {

// One utterance per line: "<wav path> [label]". Blank lines and lines
// starting with '#' are ignored. Relative paths resolve against the
// manifest's directory.
struct ManifestEntry {
  std::string id;  // file stem
  std::string path;
  std::string label;
};

std::vector<ManifestEntry> ParseManifest(const std::string& text,
                                         const std::string& base_dir = "");
std::vector<ManifestEntry> ReadManifest(const std::string& path);

// Whitespace separated fields per line, comments and blanks dropped.
std::vector<std::vector<std::string>> ReadTable(const std::string& path);

std::string ResolvePath(const std::string& path, const std::string& base_dir);
std::string FileStem(const std::string& path);

}  // namespace unitvc

#endif  // CORPUS_MANIFEST_H_
