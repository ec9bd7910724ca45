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

#include "units/units.h"

#include <numeric>
#include <stdexcept>
#include <string>

namespace unitvc {

int UnitSequence::TotalFrames() const {
  return std::accumulate(durations.begin(), durations.end(), 0);
}

void ValidateUnitSequence(const UnitSequence& seq) {
  if (seq.units.empty()) throw std::invalid_argument("empty unit sequence");
  if (seq.units.size() != seq.durations.size()) {
    throw std::invalid_argument("units and durations differ in length");
  }
  for (size_t k = 0; k < seq.units.size(); ++k) {
    if (seq.durations[k] < 1) {
      throw std::invalid_argument("duration " + std::to_string(k) + " is < 1");
    }
    if (k > 0 && seq.units[k] == seq.units[k - 1]) {
      throw std::invalid_argument("consecutive units " + std::to_string(k - 1) +
                                  " and " + std::to_string(k) + " are equal");
    }
  }
}

UnitSequence Deduplicate(const std::vector<int>& frames) {
  if (frames.empty()) throw std::invalid_argument("empty frame sequence");
  UnitSequence seq;
  for (int u : frames) {
    if (!seq.units.empty() && seq.units.back() == u) {
      ++seq.durations.back();
    } else {
      seq.units.push_back(u);
      seq.durations.push_back(1);
    }
  }
  return seq;
}

std::vector<int> Expand(const UnitSequence& seq) {
  std::vector<int> frames;
  frames.reserve(seq.TotalFrames());
  for (size_t k = 0; k < seq.units.size(); ++k) {
    frames.insert(frames.end(), seq.durations[k], seq.units[k]);
  }
  return frames;
}

std::vector<int64_t> ExpansionIndex(const std::vector<int>& durations) {
  std::vector<int64_t> index;
  for (size_t k = 0; k < durations.size(); ++k) {
    if (durations[k] < 1) throw std::invalid_argument("duration < 1");
    index.insert(index.end(), durations[k], static_cast<int64_t>(k));
  }
  return index;
}

}  // namespace unitvc
